//! Config-driven experiments.
//!
//! ```no_run
//! use rwre_lab::experiment::{load_config, run};
//! use rwre_lab::Workers;
//!
//! let config = load_config("configs/variance-scan.toml".as_ref()).unwrap();
//! let report = run(&config, &Workers::new(config.workers)).unwrap();
//! print!("{}", report.summary());
//! ```

pub mod config;
pub mod report;
pub mod run;

use std::path::Path;

pub use config::{parse_config, ConfigError, ExperimentConfig, ExperimentKind, ExperimentParams, ModelConfig, OutputFormat};
pub use report::{Report, Row, Timing, Verdict};
pub use run::{phi_reference, run, RunError};

/// Read and validate a config file.
pub fn load_config(path: &Path) -> Result<ExperimentConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Invalid(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text)
}
