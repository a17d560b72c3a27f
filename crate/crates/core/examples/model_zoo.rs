// The four environment models and their closed-form moments.

use std::sync::Arc;

use rwre_lab::{BiasLaw, Displacement, Environment, Interpolation, ModelSpec, SiteFamily, Vector};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let nn = SiteFamily::NearestNeighbor { bias: BiasLaw::STANDARD_UNIFORM };
    let models = [
        ModelSpec::lattice_product(1, nn.clone(), true)?,
        ModelSpec::finite_range(1, 2.0, nn.clone(), Interpolation::Nearest)?,
        ModelSpec::fully_correlated(1, nn)?,
        ModelSpec::dirac(1, Displacement::Sign)?,
    ];
    for spec in models {
        let m = spec.moments().expect("closed form");
        let env = Environment::new(Arc::new(spec.clone()), 9);
        let drifts: Vec<String> = [-1.0, 0.0, 0.6, 1.0, 3.0]
            .iter()
            .map(|&x| format!("{:+.2}", env.query(0, &Vector::from_slice(&[x])).mean()[0]))
            .collect();
        println!(
            "{:<16} v = {:+.3}  D = {:.3}  Dq = {:.3}  drift at x = -1, 0, 0.6, 1, 3: {}",
            spec.name(),
            m.velocity[0],
            m.diffusion.get(0, 0),
            m.quenched_diffusion().get(0, 0),
            drifts.join(" ")
        );
    }
    // Space-time shifts: the shifted environment at (0, 0) is the original at (5, 2).
    let env = Environment::lattice_product(3, 1, SiteFamily::NearestNeighbor { bias: BiasLaw::STANDARD_UNIFORM }, true)?;
    let two = Vector::from_slice(&[2.0]);
    assert_eq!(env.shift(5, &two).query(0, &Vector::zeros(1)), env.query(5, &two));
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
