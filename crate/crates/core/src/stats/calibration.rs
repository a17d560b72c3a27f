//! Self-calibration of the test machinery on synthetic data.

use serde::Serialize;

use crate::field::{derive_stream, StreamKey, StreamTag};
use crate::parallel::Workers;
use crate::stats::fit::{fit_exponent, ScanCurve};
use crate::stats::ks::ks_gaussian_test;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Calibration {
    pub trials: usize,
    pub successes: usize,
}

impl Calibration {
    pub fn rate(&self) -> f64 {
        self.successes as f64 / self.trials as f64
    }
}

/// Rejections at level `alpha` of KS tests on `sample_size` standard normal
/// draws against `Normal(0, 1)`; trial `i` draws from the synthetic stream
/// `(seed, i)`.
pub fn ks_type_one_error(trials: usize, sample_size: usize, alpha: f64, seed: u64, workers: &Workers) -> Calibration {
    let rejected = workers.map(trials, |i| {
        let mut s = derive_stream(StreamKey::new(seed, i as i64, &[], StreamTag::SYNTHETIC));
        let xs: Vec<f64> = (0..sample_size).map(|_| s.next_normal()).collect();
        !ks_gaussian_test(&xs, 0.0, 1.0).expect("valid synthetic sample").passes(alpha)
    });
    Calibration { trials, successes: rejected.iter().filter(|&&r| r).count() }
}

/// Coverage of the 95% exponent interval on curves `n^exponent (1 + noise z)`
/// over the dyadic grid `2^1..2^points`, each point reported with standard
/// error `noise * y`.
pub fn fit_ci_coverage(trials: usize, exponent: f64, noise: f64, points: usize, seed: u64) -> Calibration {
    let grid: Vec<f64> = (1..=points).map(|k| 2f64.powi(k as i32)).collect();
    let mut covered = 0;
    for i in 0..trials {
        let mut s = derive_stream(StreamKey::new(seed, i as i64, &[1], StreamTag::SYNTHETIC));
        let est: Vec<f64> = grid.iter().map(|n| n.powf(exponent) * (1.0 + noise * s.next_normal())).collect();
        let se = est.iter().map(|y| noise * y.abs()).collect();
        if let Ok(fit) = fit_exponent(&ScanCurve::new(grid.clone(), est, se)) {
            covered += usize::from(fit.contains(exponent));
        }
    }
    Calibration { trials, successes: covered }
}
