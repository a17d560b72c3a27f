//! Log-log exponent fits over scan curves.

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, StudentsT};
use thiserror::Error;

/// Fewest usable points an exponent fit accepts.
pub const MIN_FIT_POINTS: usize = 4;

#[derive(Debug, Error, PartialEq)]
pub enum FitError {
    #[error("{usable} usable grid points (estimate > 3 SE, positive grid), need {MIN_FIT_POINTS}")]
    InsufficientPoints { usable: usize },
}

/// Slope of `log estimate` against `log grid` with a 95% confidence interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExponentFit {
    pub exponent: f64,
    pub std_error: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub intercept: f64,
    pub points_used: usize,
}

impl ExponentFit {
    pub fn contains(&self, x: f64) -> bool {
        self.ci_low <= x && x <= self.ci_high
    }

    /// The fit of `1 / y`: exponent and interval reflected through zero.
    pub fn negated(&self) -> ExponentFit {
        ExponentFit {
            exponent: -self.exponent,
            std_error: self.std_error,
            ci_low: -self.ci_high,
            ci_high: -self.ci_low,
            intercept: -self.intercept,
            points_used: self.points_used,
        }
    }
}

/// A grid of estimates with standard errors.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanCurve {
    pub grid: Vec<f64>,
    pub estimates: Vec<f64>,
    pub standard_errors: Vec<f64>,
    pub fit: Option<ExponentFit>,
}

impl ScanCurve {
    pub fn new(grid: Vec<f64>, estimates: Vec<f64>, standard_errors: Vec<f64>) -> Self {
        assert!(grid.len() == estimates.len() && grid.len() == standard_errors.len());
        debug_assert!(standard_errors.iter().all(|&s| !(s < 0.0)));
        Self { grid, estimates, standard_errors, fit: None }
    }

    /// Attach the exponent fit when there are enough usable points.
    pub fn with_fit(mut self) -> Self {
        self.fit = fit_exponent(&self).ok();
        self
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// Indices of points entering the fit.
    pub fn usable(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| self.grid[i] > 0.0 && self.estimates[i] > 0.0 && self.estimates[i] > 3.0 * self.standard_errors[i])
            .collect()
    }
}

/// Ordinary least squares on `(ln grid, ln estimate)` over the usable points;
/// the interval is `slope +- t_{0.975, m - 2} * SE(slope)`.
pub fn fit_exponent(curve: &ScanCurve) -> Result<ExponentFit, FitError> {
    let idx = curve.usable();
    let m = idx.len();
    if m < MIN_FIT_POINTS {
        return Err(FitError::InsufficientPoints { usable: m });
    }
    let xs: Vec<f64> = idx.iter().map(|&i| curve.grid[i].ln()).collect();
    let ys: Vec<f64> = idx.iter().map(|&i| curve.estimates[i].ln()).collect();
    let mf = m as f64;
    let mx = xs.iter().sum::<f64>() / mf;
    let my = ys.iter().sum::<f64>() / mf;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let se = (rss / (mf - 2.0) / sxx).sqrt();
    let t = StudentsT::new(0.0, 1.0, mf - 2.0).expect("positive degrees of freedom").inverse_cdf(0.975);
    Ok(ExponentFit {
        exponent: slope,
        std_error: se,
        ci_low: slope - t * se,
        ci_high: slope + t * se,
        intercept,
        points_used: m,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn power_curve(c: f64, e: f64) -> ScanCurve {
        let grid: Vec<f64> = (4..=12).map(|k| 2f64.powi(k)).collect();
        let est = grid.iter().map(|n| c * n.powf(e)).collect();
        ScanCurve::new(grid.clone(), est, vec![0.0; grid.len()])
    }

    #[test]
    fn exact_power_laws() {
        let f = fit_exponent(&power_curve(1.0, 0.5)).unwrap();
        assert!((f.exponent - 0.5).abs() < 1e-12);
        assert!(f.ci_high - f.ci_low < 1e-9);
        let f = fit_exponent(&power_curve(3.7, 1.0)).unwrap();
        assert!((f.exponent - 1.0).abs() < 1e-12);
    }

    #[test]
    fn noisy_points_are_dropped() {
        let mut c = power_curve(1.0, 1.0);
        for s in c.standard_errors.iter_mut().skip(3) {
            *s = 1e9;
        }
        assert_eq!(fit_exponent(&c), Err(FitError::InsufficientPoints { usable: 3 }));
    }

    #[test]
    fn negation_reflects_interval() {
        let f = ExponentFit { exponent: -0.4, std_error: 0.1, ci_low: -0.6, ci_high: -0.2, intercept: 1.0, points_used: 5 };
        let g = f.negated();
        assert_eq!((g.exponent, g.ci_low, g.ci_high), (0.4, 0.2, 0.6));
    }
}
