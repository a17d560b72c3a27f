// Run an experiment from TOML text and write its report.

use rwre_lab::experiment::{parse_config, run, OutputFormat};
use rwre_lab::Workers;

const CONFIG: &str = r#"
experiment = "ychain-exit"
master_seed = 7

[ychain-exit]
r = [2.0, 4.0, 8.0, 16.0]
replicas = 300
symmetry_samples = 2000
escape_r = [4.0, 8.0]
escape_replicas = 50
"#;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let config = parse_config(CONFIG)?;
    let report = run(&config, &Workers::new(2))?;
    print!("{}", report.summary());
    let dir = std::env::temp_dir().join("rwre-lab-example");
    for p in report.write(&dir, OutputFormat::Csv)? {
        println!("wrote {}", p.display());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
