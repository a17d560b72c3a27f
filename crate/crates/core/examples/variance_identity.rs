// E|E^omega_0[X_n] - n v|^2 against sum_{k<n} E_0[phi(Y_k)].

use rwre_lab::stats::variance_identity_check;
use rwre_lab::{BiasLaw, Ensemble, ModelSpec, SiteFamily, Workers};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let spec = ModelSpec::lattice_product(1, SiteFamily::NearestNeighbor { bias: BiasLaw::STANDARD_UNIFORM }, true)?;
    let check = variance_identity_check(&Ensemble::new(spec, 4), &[1, 4, 8], 1000, 10_000, &Workers::new(2))?;
    for r in &check.rows {
        println!(
            "n = {}: lhs {:.4} +- {:.4}  rhs {:.4} +- {:.4}  z = {:.2}",
            r.n, r.lhs.value, r.lhs.std_error, r.rhs.value, r.rhs.std_error, r.z()
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
