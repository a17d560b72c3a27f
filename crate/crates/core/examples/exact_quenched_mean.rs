// Quenched mean by exact propagation against Monte Carlo.

use rwre_lab::walk::{quenched_mean_exact, quenched_mean_mc};
use rwre_lab::{BiasLaw, Environment, SiteFamily, Vector, Workers};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let env = Environment::lattice_product(5, 1, SiteFamily::NearestNeighbor { bias: BiasLaw::STANDARD_UNIFORM }, true)?;
    let exact = quenched_mean_exact(&env, 32)?;
    let grid = [4, 8, 16, 32];
    let mc = quenched_mean_mc(&env, Vector::zeros(1), &grid, 20_000, 77, &Workers::new(2))?;
    for (i, &n) in grid.iter().enumerate() {
        let e = exact.mean_at(n).unwrap()[0];
        let (m, se) = (mc.means[i][0], mc.standard_errors[i][0]);
        println!("n = {n:>2}: exact {e:+.4}  mc {m:+.4} +- {se:.4}  z = {:.2}", (m - e) / se);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
