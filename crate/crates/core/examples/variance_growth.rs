// Growth of Var(E^omega_0[X_n]): about n^{1/2} under mixing in d = 1,
// linear when every site shares the level's environment.

use rwre_lab::stats::{variance_scan, MeanSource};
use rwre_lab::{BiasLaw, Ensemble, ModelSpec, SiteFamily, Workers};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let nn = SiteFamily::NearestNeighbor { bias: BiasLaw::STANDARD_UNIFORM };
    let grid: Vec<usize> = (4..=9).map(|k| 1 << k).collect();
    let workers = Workers::new(2);
    for spec in [ModelSpec::lattice_product(1, nn.clone(), true)?, ModelSpec::fully_correlated(1, nn)?] {
        let name = spec.name();
        let scan = variance_scan(&Ensemble::new(spec, 2), &grid, 200, MeanSource::Exact, &workers)?;
        let fit = scan.curve.fit.expect("enough points");
        println!("{name:<16} exponent {:.3}  95% CI [{:.3}, {:.3}]", fit.exponent, fit.ci_low, fit.ci_high);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
