//! Experiment reports and their JSON / CSV forms.
//!
//! Reports hold nothing that depends on the worker count or the clock, so
//! the same config and seed give byte-identical files. Wall-clock time is
//! written next to the report, never into it.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::{ExperimentConfig, OutputFormat};

/// One number in long format: which section produced it, where it sits
/// (replica, grid point, coordinate) and what it is.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Row {
    pub section: String,
    pub metric: String,
    /// Environment replica index, when the row belongs to one environment.
    pub replica: Option<u64>,
    pub x: Option<f64>,
    pub x2: Option<f64>,
    pub coordinate: Option<usize>,
    pub value: f64,
    pub std_error: Option<f64>,
    pub reference: Option<f64>,
}

impl Row {
    pub fn new(section: &str, metric: &str, value: f64) -> Self {
        Self {
            section: section.into(),
            metric: metric.into(),
            replica: None,
            x: None,
            x2: None,
            coordinate: None,
            value,
            std_error: None,
            reference: None,
        }
    }

    pub fn replica(mut self, r: u64) -> Self {
        self.replica = Some(r);
        self
    }

    pub fn at(mut self, x: f64) -> Self {
        self.x = Some(x);
        self
    }

    pub fn at2(mut self, x: f64, x2: f64) -> Self {
        self.x = Some(x);
        self.x2 = Some(x2);
        self
    }

    pub fn coord(mut self, j: usize) -> Self {
        self.coordinate = Some(j);
        self
    }

    pub fn se(mut self, s: f64) -> Self {
        self.std_error = Some(s);
        self
    }

    pub fn reference(mut self, r: f64) -> Self {
        self.reference = Some(r);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub name: String,
    pub passed: bool,
    pub observed: f64,
    pub threshold: String,
}

impl Verdict {
    pub fn new(name: &str, passed: bool, observed: f64, threshold: impl Into<String>) -> Self {
        Self { name: name.into(), passed, observed, threshold: threshold.into() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub experiment: &'static str,
    pub master_seed: u64,
    pub model: String,
    /// The config file as given.
    pub config_echo: String,
    /// The config with every default filled in.
    pub resolved: ExperimentConfig,
    pub rows: Vec<Row>,
    pub verdicts: Vec<Verdict>,
    pub all_passed: bool,
}

impl Report {
    pub fn new(config: &ExperimentConfig, model: String, rows: Vec<Row>, verdicts: Vec<Verdict>) -> Self {
        let all_passed = verdicts.iter().all(|v| v.passed);
        Self {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            experiment: config.experiment.name(),
            master_seed: config.master_seed,
            model,
            config_echo: config.source.clone(),
            resolved: config.clone(),
            rows,
            verdicts,
            all_passed,
        }
    }

    pub fn verdict(&self, name: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.name == name)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn rows_csv(&self) -> String {
        to_csv(&self.rows)
    }

    pub fn verdicts_csv(&self) -> String {
        to_csv(&self.verdicts)
    }

    /// Write the report into `dir` and return the paths written. JSON gives
    /// `<experiment>.json`; CSV gives `<experiment>.rows.csv`,
    /// `<experiment>.verdicts.csv` and the config echo `<experiment>.toml`.
    pub fn write(&self, dir: &Path, format: OutputFormat) -> io::Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let stem = self.experiment;
        let files: Vec<(String, String)> = match format {
            OutputFormat::Json => vec![(format!("{stem}.json"), self.to_json())],
            OutputFormat::Csv => vec![
                (format!("{stem}.rows.csv"), self.rows_csv()),
                (format!("{stem}.verdicts.csv"), self.verdicts_csv()),
                (format!("{stem}.toml"), self.config_echo.clone()),
            ],
        };
        files
            .into_iter()
            .map(|(name, body)| {
                let path = dir.join(name);
                fs::write(&path, body)?;
                Ok(path)
            })
            .collect()
    }

    /// One line per verdict, for terminals.
    pub fn summary(&self) -> String {
        let mut s = format!("{} (seed {}, model {})\n", self.experiment, self.master_seed, self.model);
        for v in &self.verdicts {
            let tag = if v.passed { "PASS" } else { "FAIL" };
            s.push_str(&format!("  {tag}  {}: observed {} (need {})\n", v.name, v.observed, v.threshold));
        }
        s
    }
}

fn to_csv<T: Serialize>(items: &[T]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for item in items {
        w.serialize(item).expect("csv row");
    }
    String::from_utf8(w.into_inner().expect("csv flush")).expect("utf8")
}

/// Wall-clock record kept beside the report.
#[derive(Clone, Debug, Serialize)]
pub struct Timing {
    pub experiment: String,
    pub workers: usize,
    pub seconds: f64,
}

impl Timing {
    pub fn write(&self, dir: &Path) -> io::Result<PathBuf> {
        fs::create_dir_all(dir)?;
        let path = dir.join(format!("{}.timing.json", self.experiment));
        fs::write(&path, serde_json::to_string_pretty(self).expect("timing serializes") + "\n")?;
        Ok(path)
    }
}
