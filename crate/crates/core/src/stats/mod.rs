//! Estimators, exponent fits and goodness-of-fit tests.

pub mod calibration;
pub mod estimators;
pub mod fit;
pub mod ks;

pub use estimators::{
    centering_velocity, cross_term_check, integer_lattice_spacing, estimate_phi, exact_means_on_grid, fclt_check, max_drift_check,
    variance_identity_check, variance_scan, CenteringVelocity, CovarianceRow, CrossTermRow, FcltCentering, FcltError,
    FcltReport, IdentityCheck, IdentityRow, MarginalTest, MaxDriftScan, MeanSource, PhiEstimate, VarianceScan,
    VelocitySource,
};
pub use fit::{fit_exponent, ExponentFit, FitError, ScanCurve};
pub use ks::{ks_gaussian_test, ks_gaussian_test_lattice, kolmogorov_survival, symmetry_check, two_sample_distance, GofError, GofTestResult, SymmetryCheck};
