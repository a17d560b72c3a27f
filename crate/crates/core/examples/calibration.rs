// The test machinery on synthetic data with known answers.

use rwre_lab::stats::calibration::{fit_ci_coverage, ks_type_one_error};
use rwre_lab::Workers;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let ks = ks_type_one_error(200, 1000, 0.01, 1, &Workers::new(2));
    println!("KS rejections at 1%: {}/{} = {:.3}", ks.successes, ks.trials, ks.rate());
    let fit = fit_ci_coverage(200, 0.5, 0.05, 8, 2);
    println!("fit CI coverage: {:.3}", fit.rate());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
