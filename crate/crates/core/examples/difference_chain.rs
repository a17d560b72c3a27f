// The difference of two walks in one environment: exit times, excursions,
// occupation and escape probabilities.

use rwre_lab::diff_chain::{excursion_scan, exit_escape_probability, exit_time_scan, occupation_time, DiffChainKind};
use rwre_lab::{BiasLaw, Ensemble, ModelSpec, SiteFamily, Workers};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let spec = ModelSpec::lattice_product(1, SiteFamily::NearestNeighbor { bias: BiasLaw::STANDARD_UNIFORM }, true)?;
    let ens = Ensemble::new(spec, 7);
    let workers = Workers::new(2);

    let exit = exit_time_scan(&ens, &[4.0, 8.0, 16.0, 32.0], 500, 1_000_000, DiffChainKind::SameEnv, &workers)?;
    println!("E[U_r] {:.1?}, slope {:.2}", exit.curve.estimates, exit.curve.fit.unwrap().exponent);

    let a: Vec<f64> = (2..=10).map(|k| 2f64.powi(k)).collect();
    let exc = excursion_scan(&ens, 1 << 12, 1.0 / 27.0, 27.0, &a, 200, &workers)?;
    println!("excursion tail exponent {:.2} from {} excursions", exc.tail_exponent.unwrap().exponent, exc.tail_sample);

    let occ = occupation_time(&ens, &[64, 256, 1024, 4096], 0.2, 200, &workers)?;
    println!("occupation exponent {:.2}", occ.fit.unwrap().exponent);

    let esc = exit_escape_probability(&ens, 8.0, 1.0, 512, 100, &workers)?;
    println!("escape from the shell of B_8: min {:.2}, mean {:.2}", esc.min.value, esc.mean);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
