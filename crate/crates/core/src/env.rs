//! Space-time random environments.
//!
//! An [`Environment`] assigns a [`JumpLaw`] to every space-time point `(n, x)`
//! in `Z x R^d`. Laws are never stored: each query hashes the point's cell into
//! a stream key and draws the cell law afresh, so the answer is a pure function
//! of `(model, parameters, seed, shift, n, x)`. Distinct levels always use
//! distinct keys, which makes time slices independent.

use std::sync::Arc;

use smallvec::smallvec;
use thiserror::Error;

use crate::field::{derive_seed, derive_stream, Atom, JumpLaw, LawError, Stream, StreamKey, StreamTag};
use crate::linalg::{Matrix, Vector, MAX_DIM};

#[derive(Debug, Error, PartialEq)]
pub enum EnvError {
    #[error("invalid model parameter: {0}")]
    InvalidParameter(String),
    #[error("dimension {0} outside 1..={MAX_DIM}")]
    Dimension(usize),
    #[error(transparent)]
    Law(#[from] LawError),
}

fn invalid(msg: impl Into<String>) -> EnvError {
    EnvError::InvalidParameter(msg.into())
}

/// Distribution of the bias `p` of a nearest-neighbour site law.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BiasLaw {
    /// `p ~ Uniform(low, high)`.
    Uniform { low: f64, high: f64 },
    /// `p = low` or `p = high` with probability 1/2 each.
    TwoPoint { low: f64, high: f64 },
}

impl BiasLaw {
    pub const STANDARD_UNIFORM: BiasLaw = BiasLaw::Uniform { low: 0.0, high: 1.0 };

    fn bounds(&self) -> (f64, f64) {
        match *self {
            BiasLaw::Uniform { low, high } | BiasLaw::TwoPoint { low, high } => (low, high),
        }
    }

    fn validate(&self) -> Result<(), EnvError> {
        let (low, high) = self.bounds();
        if !(0.0..=1.0).contains(&low) || !(0.0..=1.0).contains(&high) || low > high {
            return Err(invalid(format!("bias bounds ({low}, {high}) must satisfy 0 <= low <= high <= 1")));
        }
        Ok(())
    }

    fn sample(&self, stream: &mut Stream) -> f64 {
        let u = stream.next_f64();
        match *self {
            BiasLaw::Uniform { low, high } => low + (high - low) * u,
            BiasLaw::TwoPoint { low, high } => {
                if u < 0.5 {
                    low
                } else {
                    high
                }
            }
        }
    }

    pub fn mean(&self) -> f64 {
        let (low, high) = self.bounds();
        0.5 * (low + high)
    }

    pub fn variance(&self) -> f64 {
        let (low, high) = self.bounds();
        match self {
            BiasLaw::Uniform { .. } => (high - low).powi(2) / 12.0,
            BiasLaw::TwoPoint { .. } => (high - low).powi(2) / 4.0,
        }
    }

    /// Enumerable support `(value, probability)`, if finite.
    pub fn support(&self) -> Option<Vec<(f64, f64)>> {
        match *self {
            BiasLaw::TwoPoint { low, high } => Some(vec![(low, 0.5), (high, 0.5)]),
            BiasLaw::Uniform { .. } => None,
        }
    }
}

/// Random law attached to one cell.
#[derive(Clone, Debug, PartialEq)]
pub enum SiteFamily {
    /// Every cell carries the same law (a nonrandom environment).
    Fixed(JumpLaw),
    /// Jumps `+e_j` with weight `p_j / d` and `-e_j` with weight `(1 - p_j) / d`,
    /// the biases `p_j` drawn i.i.d. from `bias`. In `d = 1` this is the
    /// coin `{(+1, p), (-1, 1 - p)}`.
    NearestNeighbor { bias: BiasLaw },
    /// `Gaussian{mean ~ N(0, mean_std^2 I), covariance = step_std^2 I}`.
    GaussianMean { mean_std: f64, step_std: f64 },
}

impl SiteFamily {
    fn validate(&self, dim: usize) -> Result<(), EnvError> {
        match self {
            SiteFamily::Fixed(law) => {
                if law.dim() != dim {
                    return Err(invalid(format!("fixed law has dimension {}, model has {dim}", law.dim())));
                }
                Ok(())
            }
            SiteFamily::NearestNeighbor { bias } => bias.validate(),
            SiteFamily::GaussianMean { mean_std, step_std } => {
                if !(*mean_std >= 0.0 && *step_std >= 0.0 && mean_std.is_finite() && step_std.is_finite()) {
                    return Err(invalid("gaussian standard deviations must be finite and nonnegative"));
                }
                Ok(())
            }
        }
    }

    fn draw(&self, dim: usize, stream: &mut Stream) -> JumpLaw {
        match self {
            SiteFamily::Fixed(law) => law.clone(),
            SiteFamily::NearestNeighbor { bias } => {
                let share = 1.0 / dim as f64;
                let mut atoms = smallvec![];
                for axis in 0..dim {
                    let p = bias.sample(stream);
                    let e = Vector::basis(dim, axis);
                    atoms.push(Atom { point: e, weight: p * share });
                    atoms.push(Atom { point: -e, weight: (1.0 - p) * share });
                }
                JumpLaw::atomic_unchecked(atoms)
            }
            SiteFamily::GaussianMean { mean_std, step_std } => JumpLaw::Gaussian {
                mean: stream.next_normals(dim) * *mean_std,
                covariance: Matrix::scaled_identity(dim, step_std * step_std),
            },
        }
    }

    fn moments(&self, dim: usize) -> Moments {
        match self {
            SiteFamily::Fixed(law) => Moments {
                velocity: law.mean(),
                diffusion: law.covariance(),
                drift_covariance: Matrix::zeros(dim),
            },
            SiteFamily::NearestNeighbor { bias } => {
                let d = dim as f64;
                let velocity = Vector::from_slice(&vec![(2.0 * bias.mean() - 1.0) / d; dim]);
                Moments {
                    velocity,
                    diffusion: Matrix::scaled_identity(dim, 1.0 / d) - velocity.outer(&velocity),
                    drift_covariance: Matrix::scaled_identity(dim, 4.0 * bias.variance() / (d * d)),
                }
            }
            SiteFamily::GaussianMean { mean_std, step_std } => Moments {
                velocity: Vector::zeros(dim),
                diffusion: Matrix::scaled_identity(dim, mean_std * mean_std + step_std * step_std),
                drift_covariance: Matrix::scaled_identity(dim, mean_std * mean_std),
            },
        }
    }
}

/// Law of the per-cell point `z` of a Dirac field.
#[derive(Clone, Debug, PartialEq)]
pub enum Displacement {
    /// `z` uniform over the `2d` unit vectors `+-e_j`.
    Sign,
    /// `z ~ N(0, std^2 I)`.
    Gaussian { std: f64 },
    /// The same `z` in every cell.
    Constant(Vector),
}

impl Displacement {
    fn draw(&self, dim: usize, stream: &mut Stream) -> Vector {
        match self {
            Displacement::Sign => {
                let k = stream.next_below(2 * dim as u64) as usize;
                let e = Vector::basis(dim, k / 2);
                if k % 2 == 0 {
                    e
                } else {
                    -e
                }
            }
            Displacement::Gaussian { std } => stream.next_normals(dim) * *std,
            Displacement::Constant(z) => *z,
        }
    }

    fn moments(&self, dim: usize) -> Moments {
        match self {
            Displacement::Sign => {
                let c = Matrix::scaled_identity(dim, 1.0 / dim as f64);
                Moments { velocity: Vector::zeros(dim), diffusion: c, drift_covariance: c }
            }
            Displacement::Gaussian { std } => {
                let c = Matrix::scaled_identity(dim, std * std);
                Moments { velocity: Vector::zeros(dim), diffusion: c, drift_covariance: c }
            }
            Displacement::Constant(z) => Moments {
                velocity: *z,
                diffusion: Matrix::zeros(dim),
                drift_covariance: Matrix::zeros(dim),
            },
        }
    }
}

/// How a finite-range field maps a point to its cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Interpolation {
    /// Law of the nearest center of the grid `R Z^d`; exact ties go to the
    /// lower center in every coordinate.
    Nearest,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Model {
    /// `omega_{n,x} = omega_{n,[U + x]}` with i.i.d. laws over `(level, unit cell)`.
    LatticeProduct { family: SiteFamily, uniform_offset: bool },
    /// Cells of side `range`; laws at points more than `range` apart (sup norm)
    /// on one level are independent.
    FiniteRange { family: SiteFamily, range: f64, interpolation: Interpolation },
    /// One law per level shared by every `x`.
    FullyCorrelated { family: SiteFamily },
    /// Every law is a point mass `delta_z`, `z` drawn per unit cell.
    DiracField { displacement: Displacement },
}

/// Averaged one-step moments of a model: the velocity `v = E_0[X_1]`, the
/// diffusion matrix `E_0[(X_1 - v)(X_1 - v)^T]` and the covariance of the
/// local drift `D(omega)`. The difference `diffusion - drift_covariance` is the
/// mean quenched one-step covariance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Moments {
    pub velocity: Vector,
    pub diffusion: Matrix,
    pub drift_covariance: Matrix,
}

impl Moments {
    pub fn quenched_diffusion(&self) -> Matrix {
        self.diffusion - self.drift_covariance
    }
}

/// A validated model with its dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelSpec {
    dim: usize,
    model: Model,
}

impl ModelSpec {
    pub fn new(dim: usize, model: Model) -> Result<Self, EnvError> {
        if !(1..=MAX_DIM).contains(&dim) {
            return Err(EnvError::Dimension(dim));
        }
        match &model {
            Model::LatticeProduct { family, .. } | Model::FullyCorrelated { family } => family.validate(dim)?,
            Model::FiniteRange { family, range, .. } => {
                if !(*range > 0.0 && range.is_finite()) {
                    return Err(invalid(format!("range must be positive, got {range}")));
                }
                family.validate(dim)?;
            }
            Model::DiracField { displacement } => match displacement {
                Displacement::Sign => {}
                Displacement::Gaussian { std } => {
                    if !(*std >= 0.0 && std.is_finite()) {
                        return Err(invalid("displacement std must be finite and nonnegative"));
                    }
                }
                Displacement::Constant(z) => {
                    if z.dim() != dim || !z.is_finite() {
                        return Err(invalid("constant displacement must be a finite point of the model dimension"));
                    }
                }
            },
        }
        Ok(Self { dim, model })
    }

    pub fn lattice_product(dim: usize, family: SiteFamily, uniform_offset: bool) -> Result<Self, EnvError> {
        Self::new(dim, Model::LatticeProduct { family, uniform_offset })
    }

    pub fn finite_range(dim: usize, range: f64, family: SiteFamily, interpolation: Interpolation) -> Result<Self, EnvError> {
        Self::new(dim, Model::FiniteRange { family, range, interpolation })
    }

    pub fn fully_correlated(dim: usize, family: SiteFamily) -> Result<Self, EnvError> {
        Self::new(dim, Model::FullyCorrelated { family })
    }

    pub fn dirac(dim: usize, displacement: Displacement) -> Result<Self, EnvError> {
        Self::new(dim, Model::DiracField { displacement })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn name(&self) -> &'static str {
        match self.model {
            Model::LatticeProduct { .. } => "lattice-product",
            Model::FiniteRange { .. } => "finite-range",
            Model::FullyCorrelated { .. } => "fully-correlated",
            Model::DiracField { .. } => "dirac",
        }
    }

    /// Closed-form averaged moments. Every model in the zoo has them; the
    /// `Option` leaves room for families that do not.
    pub fn moments(&self) -> Option<Moments> {
        Some(match &self.model {
            Model::LatticeProduct { family, .. } | Model::FiniteRange { family, .. } | Model::FullyCorrelated { family } => {
                family.moments(self.dim)
            }
            Model::DiracField { displacement } => displacement.moments(self.dim),
        })
    }

    /// Laws do not depend on `x` within a level.
    pub fn is_spatially_constant(&self) -> bool {
        matches!(self.model, Model::FullyCorrelated { .. })
            || matches!(
                &self.model,
                Model::LatticeProduct { family: SiteFamily::Fixed(_), .. }
                    | Model::FiniteRange { family: SiteFamily::Fixed(_), .. }
                    | Model::DiracField { displacement: Displacement::Constant(_) }
            )
    }
}

/// A random environment realization: a model, a seed and a space-time shift.
#[derive(Clone, Debug, PartialEq)]
pub struct Environment {
    spec: Arc<ModelSpec>,
    seed: u64,
    level_shift: i64,
    space_shift: Vector,
    lattice_offset: Vector,
}

impl Environment {
    pub fn new(spec: Arc<ModelSpec>, seed: u64) -> Self {
        let dim = spec.dim();
        let lattice_offset = match spec.model {
            Model::LatticeProduct { uniform_offset: true, .. } => {
                let s = derive_stream(StreamKey::new(seed, 0, &[], StreamTag::OFFSET));
                let mut u = Vector::zeros(dim);
                for j in 0..dim {
                    u[j] = s.at(j as u64);
                }
                u
            }
            _ => Vector::zeros(dim),
        };
        Self {
            spec,
            seed,
            level_shift: 0,
            space_shift: Vector::zeros(dim),
            lattice_offset,
        }
    }

    pub fn lattice_product(seed: u64, dim: usize, family: SiteFamily, uniform_offset: bool) -> Result<Self, EnvError> {
        Ok(Self::new(Arc::new(ModelSpec::lattice_product(dim, family, uniform_offset)?), seed))
    }

    pub fn finite_range(seed: u64, dim: usize, range: f64, family: SiteFamily, interpolation: Interpolation) -> Result<Self, EnvError> {
        Ok(Self::new(Arc::new(ModelSpec::finite_range(dim, range, family, interpolation)?), seed))
    }

    pub fn fully_correlated(seed: u64, dim: usize, family: SiteFamily) -> Result<Self, EnvError> {
        Ok(Self::new(Arc::new(ModelSpec::fully_correlated(dim, family)?), seed))
    }

    pub fn dirac(seed: u64, dim: usize, displacement: Displacement) -> Result<Self, EnvError> {
        Ok(Self::new(Arc::new(ModelSpec::dirac(dim, displacement)?), seed))
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.spec.dim()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// The accumulated shift `(m, y)`.
    pub fn shift_offset(&self) -> (i64, Vector) {
        (self.level_shift, self.space_shift)
    }

    /// The lattice-embedding offset `U` (zero unless enabled).
    pub fn lattice_offset(&self) -> Vector {
        self.lattice_offset
    }

    /// `T^{m,y}`: `shift(m, y).query(n, x) == query(n + m, x + y)`.
    pub fn shift(&self, m: i64, y: &Vector) -> Environment {
        let mut out = self.clone();
        out.level_shift += m;
        out.space_shift += *y;
        out
    }

    /// Stream key of the cell holding `(n, x)`.
    pub fn cell_key(&self, n: i64, x: &Vector) -> StreamKey {
        let level = n + self.level_shift;
        let pos = *x + self.space_shift;
        let d = self.dim();
        let mut cell = [0i64; MAX_DIM];
        match &self.spec.model {
            Model::LatticeProduct { .. } => {
                for j in 0..d {
                    cell[j] = (pos[j] + self.lattice_offset[j]).floor() as i64;
                }
            }
            Model::FiniteRange { range, interpolation: Interpolation::Nearest, .. } => {
                for j in 0..d {
                    cell[j] = (pos[j] / range - 0.5).ceil() as i64;
                }
            }
            Model::FullyCorrelated { .. } => {}
            Model::DiracField { .. } => {
                for j in 0..d {
                    cell[j] = pos[j].floor() as i64;
                }
            }
        }
        StreamKey::new(self.seed, level, &cell[..d], StreamTag::SITE)
    }

    pub fn query(&self, n: i64, x: &Vector) -> JumpLaw {
        debug_assert_eq!(x.dim(), self.dim());
        let mut stream = derive_stream(self.cell_key(n, x));
        let d = self.dim();
        match &self.spec.model {
            Model::LatticeProduct { family, .. } | Model::FiniteRange { family, .. } | Model::FullyCorrelated { family } => {
                family.draw(d, &mut stream)
            }
            Model::DiracField { displacement } => JumpLaw::dirac(displacement.draw(d, &mut stream)),
        }
    }

    /// Local drift `D(omega)`: the mean of the law at the origin.
    pub fn local_drift(&self) -> Vector {
        self.query(0, &Vector::zeros(self.dim())).mean()
    }
}

/// A model together with a master seed: the source of environment replicas
/// and walker seeds for averaged-measure experiments.
#[derive(Clone, Debug)]
pub struct Ensemble {
    spec: Arc<ModelSpec>,
    master_seed: u64,
}

impl Ensemble {
    pub fn new(spec: ModelSpec, master_seed: u64) -> Self {
        Self { spec: Arc::new(spec), master_seed }
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn dim(&self) -> usize {
        self.spec.dim()
    }

    pub fn env_seed(&self, replica: u64) -> u64 {
        derive_seed(self.master_seed, StreamTag::ENV_REPLICA, &[replica as i64])
    }

    pub fn environment(&self, replica: u64) -> Environment {
        Environment::new(self.spec.clone(), self.env_seed(replica))
    }

    /// An environment independent of `environment(replica)`.
    pub fn companion_environment(&self, replica: u64) -> Environment {
        Environment::new(
            self.spec.clone(),
            derive_seed(self.master_seed, StreamTag::ENV_COMPANION, &[replica as i64]),
        )
    }

    pub fn walk_seed(&self, replica: u64, walker: u64) -> u64 {
        derive_seed(self.master_seed, StreamTag::WALK_SEED, &[replica as i64, walker as i64])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform_nn() -> SiteFamily {
        SiteFamily::NearestNeighbor { bias: BiasLaw::STANDARD_UNIFORM }
    }

    #[test]
    fn same_unit_cell_same_law() {
        let env = Environment::lattice_product(3, 1, uniform_nn(), true).unwrap();
        let u = env.lattice_offset()[0];
        // The cell [k - U, k + 1 - U) maps to k.
        let a = Vector::from_slice(&[2.0 - u + 0.01]);
        let b = Vector::from_slice(&[2.0 - u + 0.98]);
        assert_eq!(env.query(5, &a), env.query(5, &b));
        let c = Vector::from_slice(&[2.0 - u + 1.01]);
        assert_ne!(env.query(5, &a), env.query(5, &c));
    }

    #[test]
    fn fixed_family_is_nonrandom() {
        let coin = JumpLaw::atomic([(Vector::from_slice(&[1.0]), 0.5), (Vector::from_slice(&[-1.0]), 0.5)]).unwrap();
        let env = Environment::lattice_product(1, 1, SiteFamily::Fixed(coin.clone()), true).unwrap();
        for n in -3..3 {
            assert_eq!(env.query(n, &Vector::from_slice(&[n as f64 * 1.7])), coin);
        }
        let m = env.spec().moments().unwrap();
        assert_eq!(m.drift_covariance, Matrix::zeros(1));
    }

    #[test]
    fn fully_correlated_ignores_space() {
        let env = Environment::fully_correlated(11, 2, uniform_nn()).unwrap();
        let mut s = derive_stream(StreamKey::new(0, 0, &[], StreamTag::SYNTHETIC));
        for _ in 0..100 {
            let x = Vector::from_slice(&[100.0 * (s.next_f64() - 0.5), 100.0 * (s.next_f64() - 0.5)]);
            let n = s.next_below(20) as i64 - 10;
            assert_eq!(env.query(n, &x), env.query(n, &Vector::zeros(2)));
        }
    }

    #[test]
    fn dirac_field_laws_are_point_masses() {
        let env = Environment::dirac(2, 1, Displacement::Sign).unwrap();
        for k in -20..20 {
            let law = env.query(k, &Vector::from_slice(&[k as f64 * 0.37]));
            assert!(matches!(law, JumpLaw::Dirac { .. }));
            assert_eq!(law.mean()[0].abs(), 1.0);
        }
    }

    #[test]
    fn finite_range_cells_and_ties() {
        let env = Environment::finite_range(9, 1, 2.0, uniform_nn(), Interpolation::Nearest).unwrap();
        // Cell 0 covers [-1, 1); the tie at x = 1 goes to the lower center.
        let key = |x: f64| env.cell_key(0, &Vector::from_slice(&[x])).cell().to_vec();
        assert_eq!(key(0.0), vec![0]);
        assert_eq!(key(0.99), vec![0]);
        assert_eq!(key(1.0), vec![0]);
        assert_eq!(key(1.01), vec![1]);
        assert_eq!(key(-1.0), vec![-1]);
        assert_eq!(key(-0.99), vec![0]);
    }

    #[test]
    fn finite_range_unit_cells_match_lattice_cells() {
        let fr = Environment::finite_range(4, 1, 1.0, uniform_nn(), Interpolation::Nearest).unwrap();
        // Interior of the unit cell around 3 shares one law; neighbours differ.
        let inside = [2.6, 3.0, 3.4];
        let law = fr.query(0, &Vector::from_slice(&[3.0]));
        for x in inside {
            assert_eq!(fr.query(0, &Vector::from_slice(&[x])), law);
        }
        assert_ne!(fr.query(0, &Vector::from_slice(&[3.6])), law);
    }

    #[test]
    fn identity_shift_and_group_law() {
        let env = Environment::lattice_product(21, 2, uniform_nn(), true).unwrap();
        assert_eq!(env.shift(0, &Vector::zeros(2)), env);
        let y1 = Vector::from_slice(&[1.5, -2.0]);
        let y2 = Vector::from_slice(&[-0.25, 4.0]);
        assert_eq!(env.shift(3, &y1).shift(-7, &y2), env.shift(-4, &(y1 + y2)));
    }

    #[test]
    fn shift_covariance_on_random_tuples() {
        let mut s = derive_stream(StreamKey::new(1, 0, &[], StreamTag::SYNTHETIC));
        for spec in [
            ModelSpec::lattice_product(1, uniform_nn(), true).unwrap(),
            ModelSpec::finite_range(1, 2.5, uniform_nn(), Interpolation::Nearest).unwrap(),
            ModelSpec::fully_correlated(1, uniform_nn()).unwrap(),
            ModelSpec::dirac(1, Displacement::Gaussian { std: 1.0 }).unwrap(),
        ] {
            let env = Environment::new(Arc::new(spec), 77);
            for _ in 0..100 {
                let m = s.next_below(50) as i64 - 25;
                let n = s.next_below(50) as i64 - 25;
                let y = Vector::from_slice(&[s.next_below(40) as f64 - 20.0]);
                let x = Vector::from_slice(&[(s.next_f64() - 0.5) * 30.0]);
                assert_eq!(env.shift(m, &y).query(n, &x), env.query(n + m, &(x + y)));
            }
        }
    }

    #[test]
    fn repeated_queries_are_bit_identical() {
        let env = Environment::lattice_product(5, 1, SiteFamily::GaussianMean { mean_std: 1.0, step_std: 0.5 }, true).unwrap();
        let x = Vector::from_slice(&[12.34]);
        let first = env.query(8, &x);
        for _ in 0..1000 {
            assert_eq!(env.query(8, &x), first);
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(ModelSpec::finite_range(1, 0.0, uniform_nn(), Interpolation::Nearest).is_err());
        assert!(ModelSpec::lattice_product(
            1,
            SiteFamily::NearestNeighbor { bias: BiasLaw::Uniform { low: 0.7, high: 0.2 } },
            false
        )
        .is_err());
        assert_eq!(ModelSpec::dirac(5, Displacement::Sign), Err(EnvError::Dimension(5)));
    }

    #[test]
    fn nearest_neighbor_moments() {
        let m = ModelSpec::lattice_product(1, uniform_nn(), true).unwrap().moments().unwrap();
        assert_eq!(m.velocity[0], 0.0);
        assert_eq!(m.diffusion.get(0, 0), 1.0);
        assert!((m.drift_covariance.get(0, 0) - 1.0 / 3.0).abs() < 1e-15);
        assert!((m.quenched_diffusion().get(0, 0) - 2.0 / 3.0).abs() < 1e-15);
    }
}
