// One-step velocity and diffusion matrix from averaged walks.

use rwre_lab::walk::velocity_and_covariance;
use rwre_lab::{BiasLaw, Ensemble, ModelSpec, SiteFamily, Workers};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let spec = ModelSpec::lattice_product(1, SiteFamily::NearestNeighbor { bias: BiasLaw::Uniform { low: 0.3, high: 0.9 } }, true)?;
    let m = spec.moments().unwrap();
    let est = velocity_and_covariance(&Ensemble::new(spec, 1), 50_000, 1, &Workers::new(2));
    println!("v = {:.4} +- {:.4} (closed form {:.4})", est.velocity[0], est.velocity_se[0], m.velocity[0]);
    println!("D = {:.4} +- {:.4} (closed form {:.4})", est.diffusion.get(0, 0), est.diffusion_se.get(0, 0), m.diffusion.get(0, 0));
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
