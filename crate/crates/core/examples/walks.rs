// Quenched and averaged paths, and the martingale decomposition.

use rwre_lab::walk::{martingale_residual, simulate_averaged_path, simulate_quenched_path};
use rwre_lab::{BiasLaw, Ensemble, ModelSpec, SiteFamily, Vector};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let spec = ModelSpec::lattice_product(2, SiteFamily::NearestNeighbor { bias: BiasLaw::STANDARD_UNIFORM }, true)?;
    let ens = Ensemble::new(spec, 11);
    let env = ens.environment(0);
    let path = simulate_quenched_path(&env, Vector::zeros(2), 1000, ens.walk_seed(0, 0));
    println!("quenched X_1000 = {:?}", path.positions[1000]);
    // X_n minus the summed local drifts is a martingale.
    println!("martingale part = {:?}", martingale_residual(&env, &path));

    let avg = simulate_averaged_path(&ens, 1000, 1);
    println!("averaged X_1000 = {:?} (env seed {:#x})", avg.positions[1000], avg.env_seed);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
