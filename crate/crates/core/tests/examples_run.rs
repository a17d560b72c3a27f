//! Every runnable example, run as a test.

mod streams {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/streams.rs"));
}

mod model_zoo {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/model_zoo.rs"));
}

mod walks {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/walks.rs"));
}

mod exact_quenched_mean {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/exact_quenched_mean.rs"));
}

mod moments {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/moments.rs"));
}

mod variance_growth {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/variance_growth.rs"));
}

mod phi_decay {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/phi_decay.rs"));
}

mod variance_identity {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/variance_identity.rs"));
}

mod invariance_principle {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/invariance_principle.rs"));
}

mod max_drift {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/max_drift.rs"));
}

mod difference_chain {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/difference_chain.rs"));
}

mod calibration {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/calibration.rs"));
}

mod run_config {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/run_config.rs"));
}

#[test]
fn examples_run() {
    streams::run_example().expect("streams");
    model_zoo::run_example().expect("model_zoo");
    walks::run_example().expect("walks");
    exact_quenched_mean::run_example().expect("exact_quenched_mean");
    moments::run_example().expect("moments");
    variance_growth::run_example().expect("variance_growth");
    phi_decay::run_example().expect("phi_decay");
    variance_identity::run_example().expect("variance_identity");
    invariance_principle::run_example().expect("invariance_principle");
    max_drift::run_example().expect("max_drift");
    difference_chain::run_example().expect("difference_chain");
    calibration::run_example().expect("calibration");
    run_config::run_example().expect("run_config");
}
