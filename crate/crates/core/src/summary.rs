//! Sample summaries used throughout the estimators.

use serde::Serialize;

/// A Monte Carlo estimate with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Self { value, std_error: 0.0 }
    }

    /// `|value - target|` measured in standard errors (infinite when the
    /// error is zero and the value is off target).
    pub fn z_score(&self, target: f64) -> f64 {
        let diff = (self.value - target).abs();
        if diff == 0.0 {
            0.0
        } else {
            diff / self.std_error
        }
    }

    pub fn within(&self, target: f64, n_se: f64) -> bool {
        self.z_score(target) <= n_se
    }
}

/// Mean and variance accumulator with sums taken about a fixed reference
/// value. Identical inputs give exactly the reference back with zero error,
/// and accumulators sharing a reference merge exactly.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeanAccumulator {
    reference: f64,
    count: u64,
    sum: f64,
    sum_sq: f64,
}

impl MeanAccumulator {
    pub fn with_reference(reference: f64) -> Self {
        Self { reference, count: 0, sum: 0.0, sum_sq: 0.0 }
    }

    pub fn push(&mut self, x: f64) {
        let dx = x - self.reference;
        self.count += 1;
        self.sum += dx;
        self.sum_sq += dx * dx;
    }

    pub fn merge(&mut self, other: &MeanAccumulator) {
        debug_assert_eq!(self.reference.to_bits(), other.reference.to_bits());
        self.count += other.count;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        if self.count == 0 {
            return f64::NAN;
        }
        self.reference + self.sum / self.count as f64
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        let n = self.count as f64;
        ((self.sum_sq - self.sum * self.sum / n) / (n - 1.0)).max(0.0)
    }

    pub fn std_error(&self) -> f64 {
        if self.count == 0 {
            return f64::NAN;
        }
        (self.variance() / self.count as f64).sqrt()
    }

    pub fn estimate(&self) -> Estimate {
        Estimate { value: self.mean(), std_error: self.std_error() }
    }
}

/// Mean and standard error of a slice.
pub fn mean_estimate(values: &[f64]) -> Estimate {
    let mut acc = MeanAccumulator::with_reference(values.first().copied().unwrap_or(0.0));
    for &v in values {
        acc.push(v);
    }
    acc.estimate()
}

/// Sample covariance of paired data with its delta-method standard error
/// (the standard error of the mean of centered products).
pub fn covariance_estimate(xs: &[f64], ys: &[f64]) -> Estimate {
    assert_eq!(xs.len(), ys.len());
    let mx = mean_estimate(xs).value;
    let my = mean_estimate(ys).value;
    let products: Vec<f64> = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).collect();
    let e = mean_estimate(&products);
    let n = xs.len() as f64;
    Estimate { value: e.value * n / (n - 1.0), std_error: e.std_error }
}

/// Pearson correlation.
pub fn correlation(xs: &[f64], ys: &[f64]) -> f64 {
    let cov = covariance_estimate(xs, ys).value;
    let vx = covariance_estimate(xs, xs).value;
    let vy = covariance_estimate(ys, ys).value;
    cov / (vx * vy).sqrt()
}

/// Lag-`lag` autocorrelation pooled over many short series: the correlation
/// of the pairs `(s[k], s[k + lag])` collected from every series.
pub fn pooled_autocorrelation(series: &[Vec<f64>], lag: usize) -> Estimate {
    let mut a = Vec::new();
    let mut b = Vec::new();
    for s in series {
        for k in 0..s.len().saturating_sub(lag) {
            a.push(s[k]);
            b.push(s[k + lag]);
        }
    }
    let r = correlation(&a, &b);
    Estimate { value: r, std_error: 1.0 / (a.len() as f64).sqrt() }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_sample_is_exact() {
        let x = 0.1 + 0.2;
        let e = mean_estimate(&[x; 7]);
        assert_eq!(e.value, x);
        assert_eq!(e.std_error, 0.0);
    }

    #[test]
    fn mean_and_error() {
        let e = mean_estimate(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(e.value, 2.5);
        assert!((e.std_error - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn merge_equals_single_pass() {
        let xs: Vec<f64> = (0..100).map(|i| (i as f64).sqrt()).collect();
        let mut whole = MeanAccumulator::with_reference(1.0);
        xs.iter().for_each(|&x| whole.push(x));
        let mut left = MeanAccumulator::with_reference(1.0);
        let mut right = MeanAccumulator::with_reference(1.0);
        xs[..37].iter().for_each(|&x| left.push(x));
        xs[37..].iter().for_each(|&x| right.push(x));
        left.merge(&right);
        assert!((left.mean() - whole.mean()).abs() < 1e-12);
        assert!((left.variance() - whole.variance()).abs() < 1e-12);
    }

    #[test]
    fn z_score_with_zero_error() {
        assert_eq!(Estimate::exact(1.0).z_score(1.0), 0.0);
        assert!(Estimate::exact(1.0).z_score(2.0).is_infinite());
    }
}
