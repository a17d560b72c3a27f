use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, ValueEnum};
use rwre_lab::experiment::{load_config, run, OutputFormat, Timing};
use rwre_lab::Workers;

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

/// Run one experiment from a TOML config. Exit status: 0 when every verdict
/// passes, 2 when some verdict fails, 1 on error.
#[derive(Parser)]
#[command(version)]
struct Args {
    #[arg(long)]
    config: PathBuf,
    /// Overrides `master_seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides `workers`. Results do not depend on it.
    #[arg(long)]
    workers: Option<usize>,
    /// Overrides `output.dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides `output.format`.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let mut config = match load_config(&args.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    if let Some(s) = args.seed {
        config.master_seed = s;
    }
    if let Some(w) = args.workers {
        config.workers = w.max(1);
    }
    if let Some(f) = args.format {
        config.output.format = match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        };
    }
    let dir = args.out.unwrap_or_else(|| PathBuf::from(&config.output.dir));

    let start = Instant::now();
    let report = match run(&config, &Workers::new(config.workers)) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let timing = Timing { experiment: report.experiment.to_string(), workers: config.workers, seconds: start.elapsed().as_secs_f64() };
    let written = report.write(&dir, config.output.format).and_then(|mut w| {
        w.push(timing.write(&dir)?);
        Ok(w)
    });
    match written {
        Ok(paths) => {
            for p in paths {
                eprintln!("wrote {}", p.display());
            }
        }
        Err(e) => {
            eprintln!("error: cannot write report: {e}");
            return ExitCode::from(1);
        }
    }
    eprintln!("wall clock {:.2} s on {} worker(s)", timing.seconds, timing.workers);
    print!("{}", report.summary());
    if report.all_passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    }
}
