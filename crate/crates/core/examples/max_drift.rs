// n^{-1/2} max_{k<=n} |E^omega_0[X_k] - k v| per environment.

use rwre_lab::stats::max_drift_check;
use rwre_lab::{BiasLaw, Ensemble, ModelSpec, SiteFamily, Workers};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let nn = SiteFamily::NearestNeighbor { bias: BiasLaw::STANDARD_UNIFORM };
    let grid: Vec<usize> = (6..=10).map(|k| 1 << k).collect();
    for spec in [ModelSpec::lattice_product(1, nn.clone(), true)?, ModelSpec::fully_correlated(1, nn)?] {
        let name = spec.name();
        let v = spec.moments().unwrap().velocity;
        let scan = max_drift_check(&Ensemble::new(spec, 6), 6, &grid, v, &Workers::new(2))?;
        println!("{name:<16} mean curve {:.3?}  halved in {}/6", scan.curve.estimates, scan.halved_count());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
