//! Kolmogorov-Smirnov tests against Gaussian references.

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};
use thiserror::Error;

/// Smallest sample the asymptotic p-value is trusted for.
pub const MIN_KS_SAMPLE: usize = 50;
const SERIES_TERMS: usize = 100;

#[derive(Debug, Error, PartialEq)]
pub enum GofError {
    #[error("reference variance must be positive and finite, got {0}")]
    Variance(f64),
    #[error("sample of size {0} is below the minimum of {MIN_KS_SAMPLE}")]
    SampleTooSmall(usize),
    #[error("sample contains non-finite values")]
    NotFinite,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GofTestResult {
    pub statistic: f64,
    pub p_value: f64,
    pub sample_size: usize,
    pub reference_mean: f64,
    pub reference_variance: f64,
}

impl GofTestResult {
    pub fn passes(&self, alpha: f64) -> bool {
        self.p_value > alpha
    }
}

/// `P(K > lambda)` for the Kolmogorov distribution. Uses the alternating
/// series `2 sum (-1)^(k-1) exp(-2 k^2 lambda^2)` above `lambda = 1.18` and
/// the theta-function form of the CDF below, where the series converges slowly.
pub fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 1.18 {
        let c = std::f64::consts::PI.powi(2) / (8.0 * lambda * lambda);
        let mut s = 0.0;
        for k in 1..=SERIES_TERMS {
            let j = (2 * k - 1) as f64;
            let term = (-j * j * c).exp();
            s += term;
            if term < 1e-300 {
                break;
            }
        }
        let cdf = (2.0 * std::f64::consts::PI).sqrt() / lambda * s;
        return (1.0 - cdf).clamp(0.0, 1.0);
    }
    let mut s = 0.0;
    for k in 1..=SERIES_TERMS {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        s += if k % 2 == 1 { term } else { -term };
        if term < 1e-300 {
            break;
        }
    }
    (2.0 * s).clamp(0.0, 1.0)
}

/// One-sample KS distance of `samples` from a continuous CDF.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
    }
    d
}

/// KS test of `samples` against `Normal(mean, variance)` with the asymptotic
/// p-value `P(K > sqrt(n) D)`.
pub fn ks_gaussian_test(samples: &[f64], mean: f64, variance: f64) -> Result<GofTestResult, GofError> {
    if !(variance > 0.0 && variance.is_finite()) {
        return Err(GofError::Variance(variance));
    }
    if samples.len() < MIN_KS_SAMPLE {
        return Err(GofError::SampleTooSmall(samples.len()));
    }
    if samples.iter().any(|x| !x.is_finite()) {
        return Err(GofError::NotFinite);
    }
    let normal = Normal::new(mean, variance.sqrt()).expect("validated parameters");
    let d = ks_statistic(samples, |x| normal.cdf(x));
    let n = samples.len();
    Ok(GofTestResult {
        statistic: d,
        p_value: kolmogorov_survival((n as f64).sqrt() * d),
        sample_size: n,
        reference_mean: mean,
        reference_variance: variance,
    })
}

/// KS test for samples supported on a lattice `c + spacing * Z` against a
/// continuous Gaussian. The empirical CDF is compared with the reference at
/// the midpoints between lattice points (a continuity correction), so the
/// jumps of a lattice-valued sample do not count as misfit.
pub fn ks_gaussian_test_lattice(samples: &[f64], mean: f64, variance: f64, spacing: f64) -> Result<GofTestResult, GofError> {
    if !(variance > 0.0 && variance.is_finite()) {
        return Err(GofError::Variance(variance));
    }
    if samples.len() < MIN_KS_SAMPLE {
        return Err(GofError::SampleTooSmall(samples.len()));
    }
    if samples.iter().any(|x| !x.is_finite()) || !(spacing > 0.0 && spacing.is_finite()) {
        return Err(GofError::NotFinite);
    }
    let normal = Normal::new(mean, variance.sqrt()).expect("validated parameters");
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let h = 0.5 * spacing;
    let mut d = normal.cdf(xs[0] - h);
    let mut i = 0;
    while i < xs.len() {
        let a = xs[i];
        // Atoms closer than half a cell are one lattice point up to rounding.
        while i < xs.len() && xs[i] - a < h {
            i += 1;
        }
        let f = i as f64 / n;
        d = d.max((f - normal.cdf(a + h)).abs());
        let next = if i < xs.len() { xs[i] - h } else { f64::INFINITY };
        d = d.max((f - normal.cdf(next)).abs());
    }
    Ok(GofTestResult {
        statistic: d,
        p_value: kolmogorov_survival(n.sqrt() * d),
        sample_size: xs.len(),
        reference_mean: mean,
        reference_variance: variance,
    })
}

/// Sup distance between the empirical CDFs of `a` and `b`.
pub fn two_sample_distance(a: &[f64], b: &[f64]) -> f64 {
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    xs.sort_by(f64::total_cmp);
    ys.sort_by(f64::total_cmp);
    let (n, m) = (xs.len() as f64, ys.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < xs.len() && j < ys.len() {
        let t = xs[i].min(ys[j]);
        while i < xs.len() && xs[i] <= t {
            i += 1;
        }
        while j < ys.len() && ys[j] <= t {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    d
}

/// Critical value of the two-sample distance at level `alpha` from the
/// asymptotic distribution.
pub fn two_sample_critical_value(n: usize, m: usize, alpha: f64) -> f64 {
    let c = (-0.5 * (alpha / 2.0).ln()).sqrt();
    c * ((n + m) as f64 / (n * m) as f64).sqrt()
}

/// Sign-flip symmetry check: the two-sample distance between `x` and `-x`
/// against the level-`alpha` critical value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SymmetryCheck {
    pub distance: f64,
    pub critical_value: f64,
    pub sample_size: usize,
}

impl SymmetryCheck {
    pub fn passes(&self) -> bool {
        self.distance <= self.critical_value
    }
}

pub fn symmetry_check(samples: &[f64], alpha: f64) -> SymmetryCheck {
    let flipped: Vec<f64> = samples.iter().map(|x| -x).collect();
    SymmetryCheck {
        distance: two_sample_distance(samples, &flipped),
        critical_value: two_sample_critical_value(samples.len(), samples.len(), alpha),
        sample_size: samples.len(),
    }
}
