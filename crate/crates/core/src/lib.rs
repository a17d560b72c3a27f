//! Monte Carlo laboratory for random walks in space-time random environments.
//!
//! The environment is a random field `(n, x) -> omega_{n,x}` on `Z x R^d`
//! whose time levels are i.i.d.; `omega_{n,x}` is the law of the jump taken
//! from `x` at time `n`. Everything is keyed by counter-based streams, so a
//! run is a pure function of its configuration and master seed.
//!
//! - [`field`]: streams and [`field::JumpLaw`].
//! - [`env`]: the model zoo, queries and space-time shifts.
//! - [`walk`]: quenched and averaged walks, quenched means, rescaled paths.
//! - [`diff_chain`]: the two-walk difference chains `Y` and `Y-bar`.
//! - [`stats`]: estimators, exponent fits and Kolmogorov-Smirnov tests.
//! - [`experiment`]: config-driven experiments and reports.

pub mod diff_chain;
pub mod env;
pub mod experiment;
pub mod field;
pub mod linalg;
pub mod parallel;
pub mod stats;
pub mod summary;
pub mod walk;

pub use env::{BiasLaw, Displacement, Ensemble, Environment, Interpolation, Model, ModelSpec, SiteFamily};
pub use field::JumpLaw;
pub use linalg::{Matrix, Vector};
pub use parallel::Workers;
