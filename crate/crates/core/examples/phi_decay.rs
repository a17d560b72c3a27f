// Environment correlation phi(x) = E[g(omega) . g(T^{0,x} omega)].

use rwre_lab::stats::estimate_phi;
use rwre_lab::{BiasLaw, Ensemble, Interpolation, ModelSpec, SiteFamily, Vector, Workers};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let spec = ModelSpec::finite_range(1, 3.0, SiteFamily::NearestNeighbor { bias: BiasLaw::STANDARD_UNIFORM }, Interpolation::Nearest)?;
    let xs = [0.0, 1.0, 1.4, 1.6, 3.0, 6.0];
    let points: Vec<Vector> = xs.iter().map(|&x| Vector::from_slice(&[x])).collect();
    let phi = estimate_phi(&Ensemble::new(spec, 3), &points, 5000, &Workers::new(2));
    for (x, e) in xs.iter().zip(&phi.values) {
        println!("phi({x:>3}) = {:+.4} +- {:.4}", e.value, e.std_error);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
