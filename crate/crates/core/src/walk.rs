//! Walks in a fixed environment (quenched) and in fresh environments
//! (averaged), the quenched mean `E^omega_0[X_n]` by Monte Carlo and by exact
//! propagation, and the rescaled processes `B_eps` and `B~_eps`.

use serde::Serialize;
use thiserror::Error;

use crate::env::{Ensemble, Environment};
use crate::field::{derive_seed, derive_stream, JumpLaw, Stream, StreamKey, StreamTag};
use crate::linalg::{Matrix, Vector, MAX_DIM};
use crate::parallel::Workers;
use crate::summary::{Estimate, MeanAccumulator};

/// Mass below which a lattice point is dropped during exact propagation.
pub const PRUNE_THRESHOLD: f64 = 1e-15;
/// Largest bounding box (in lattice points) exact propagation will allocate.
pub const SUPPORT_CAP: usize = 10_000_000;

const MC_CHUNK: usize = 1024;

#[derive(Debug, Error, PartialEq)]
pub enum WalkError {
    #[error("law at level {level}, point {point:?} is not atomic; exact propagation needs lattice atoms")]
    NonAtomicLaw { level: i64, point: Vec<f64> },
    #[error("law at level {level} has an atom off the integer lattice: {atom:?}")]
    OffLattice { level: i64, atom: Vec<f64> },
    #[error("starting point {0:?} is not a lattice point")]
    OffLatticeStart(Vec<f64>),
    #[error("quenched support would need {size} lattice points (cap {SUPPORT_CAP})")]
    SupportCap { size: usize },
    #[error("no centering value for time {0}")]
    MissingCentering(usize),
    #[error("path has {len} positions, time {needed} requested")]
    PathTooShort { needed: usize, len: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

fn walk_stream(walk_seed: u64) -> Stream {
    derive_stream(StreamKey::new(walk_seed, 0, &[], StreamTag::WALK))
}

/// Seed of walker `index` in a family of walkers rooted at `base`.
pub fn walker_seed(base: u64, index: u64) -> u64 {
    derive_seed(base, StreamTag::WALK_SEED, &[index as i64])
}

/// One quenched transition from `(n, x)`.
#[inline]
pub fn quenched_step(env: &Environment, n: i64, x: &Vector, stream: &mut Stream) -> Vector {
    *x + env.query(n, x).sample(stream)
}

/// A single walker moving through a fixed environment, started at time 0.
#[derive(Clone, Debug)]
pub struct Walker<'a> {
    env: &'a Environment,
    time: i64,
    position: Vector,
    stream: Stream,
}

impl<'a> Walker<'a> {
    pub fn new(env: &'a Environment, start: Vector, walk_seed: u64) -> Self {
        Self { env, time: 0, position: start, stream: walk_stream(walk_seed) }
    }

    #[inline]
    pub fn step(&mut self) -> Vector {
        self.position = quenched_step(self.env, self.time, &self.position, &mut self.stream);
        self.time += 1;
        self.position
    }

    pub fn position(&self) -> Vector {
        self.position
    }

    pub fn time(&self) -> i64 {
        self.time
    }

    /// The law the walker is about to jump with.
    pub fn current_law(&self) -> JumpLaw {
        self.env.query(self.time, &self.position)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WalkPath {
    pub positions: Vec<Vector>,
    pub env_seed: u64,
    pub walk_seed: u64,
    pub start: Vector,
}

impl WalkPath {
    pub fn steps(&self) -> usize {
        self.positions.len() - 1
    }

    pub fn increments(&self) -> Vec<Vector> {
        self.positions.windows(2).map(|w| w[1] - w[0]).collect()
    }
}

/// Path under `P^omega_{x0}` for `steps` steps.
pub fn simulate_quenched_path(env: &Environment, start: Vector, steps: usize, walk_seed: u64) -> WalkPath {
    let mut walker = Walker::new(env, start, walk_seed);
    let mut positions = Vec::with_capacity(steps + 1);
    positions.push(start);
    for _ in 0..steps {
        positions.push(walker.step());
    }
    WalkPath { positions, env_seed: env.seed(), walk_seed, start }
}

/// Path under the averaged measure `P_0`: replica `replica` gets its own
/// environment and walker seed.
pub fn simulate_averaged_path(ensemble: &Ensemble, steps: usize, replica: u64) -> WalkPath {
    let env = ensemble.environment(replica);
    simulate_quenched_path(&env, Vector::zeros(ensemble.dim()), steps, ensemble.walk_seed(replica, 0))
}

/// `D(omega) = E^omega_0[X_1]`.
pub fn local_drift(env: &Environment) -> Vector {
    env.local_drift()
}

/// `X_N - X_0 - sum_{k<N} D(T^{k, X_k} omega)`, a mean-zero martingale under
/// `P^omega`.
pub fn martingale_residual(env: &Environment, path: &WalkPath) -> Vector {
    let mut compensator = Vector::zeros(env.dim());
    for (k, x) in path.positions[..path.steps()].iter().enumerate() {
        compensator += local_drift(&env.shift(k as i64, x));
    }
    path.positions[path.steps()] - path.positions[0] - compensator
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MeanMethod {
    MonteCarlo { walks: usize },
    ExactPropagation,
}

/// `E^omega_0[X_n]` on a grid of times.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuenchedMeanCurve {
    pub n_grid: Vec<usize>,
    pub means: Vec<Vector>,
    pub standard_errors: Vec<Vector>,
    pub method: MeanMethod,
}

impl QuenchedMeanCurve {
    pub fn mean_at(&self, n: usize) -> Option<Vector> {
        self.n_grid.binary_search(&n).ok().map(|i| self.means[i])
    }
}

fn validate_grid(n_grid: &[usize]) -> Result<(), WalkError> {
    if n_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(WalkError::InvalidArgument("time grid must be strictly increasing".into()));
    }
    Ok(())
}

/// Quenched mean from `walks` independent walkers in `env`, walker `j` using
/// seed `walker_seed(walk_base_seed, j)`. Standard errors are sample SD / sqrt(M).
pub fn quenched_mean_mc(
    env: &Environment,
    start: Vector,
    n_grid: &[usize],
    walks: usize,
    walk_base_seed: u64,
    workers: &Workers,
) -> Result<QuenchedMeanCurve, WalkError> {
    validate_grid(n_grid)?;
    if walks == 0 {
        return Err(WalkError::InvalidArgument("need at least one walk".into()));
    }
    let d = env.dim();
    let n_max = n_grid.last().copied().unwrap_or(0);
    let record = |seed: u64| -> Vec<Vector> {
        let mut walker = Walker::new(env, start, seed);
        let mut out = Vec::with_capacity(n_grid.len());
        let mut t = 0usize;
        for &n in n_grid {
            while t < n {
                walker.step();
                t += 1;
            }
            out.push(walker.position());
        }
        debug_assert_eq!(t, n_max);
        out
    };
    // Walker 0 fixes the summation reference for every chunk.
    let reference = record(walker_seed(walk_base_seed, 0));
    let chunks = walks.div_ceil(MC_CHUNK);
    let partials = workers.map(chunks, |c| {
        let mut accs: Vec<Vec<MeanAccumulator>> = reference
            .iter()
            .map(|r| (0..d).map(|j| MeanAccumulator::with_reference(r[j])).collect())
            .collect();
        for w in c * MC_CHUNK..((c + 1) * MC_CHUNK).min(walks) {
            for (g, x) in record(walker_seed(walk_base_seed, w as u64)).iter().enumerate() {
                for j in 0..d {
                    accs[g][j].push(x[j]);
                }
            }
        }
        accs
    });
    let mut total = partials[0].clone();
    for p in &partials[1..] {
        for (tg, pg) in total.iter_mut().zip(p) {
            for (t, q) in tg.iter_mut().zip(pg) {
                t.merge(q);
            }
        }
    }
    let means = total.iter().map(|g| Vector::from_slice(&g.iter().map(|a| a.mean()).collect::<Vec<_>>())).collect();
    let standard_errors = total
        .iter()
        .map(|g| Vector::from_slice(&g.iter().map(|a| a.std_error()).collect::<Vec<_>>()))
        .collect();
    Ok(QuenchedMeanCurve { n_grid: n_grid.to_vec(), means, standard_errors, method: MeanMethod::MonteCarlo { walks } })
}

fn lattice_coord(c: f64) -> Option<i64> {
    (c.fract() == 0.0 && c.abs() < 9.0e15).then_some(c as i64)
}

/// The quenched law `P^omega_{x0}{X_n = .}` of a walk whose jumps are integer
/// atoms, stored densely on its bounding box.
#[derive(Clone, Debug)]
pub struct LatticeDistribution {
    dim: usize,
    lower: [i64; MAX_DIM],
    extent: [usize; MAX_DIM],
    mass: Vec<f64>,
}

impl LatticeDistribution {
    pub fn point_mass(start: &Vector) -> Result<Self, WalkError> {
        let dim = start.dim();
        let mut lower = [0i64; MAX_DIM];
        for j in 0..dim {
            lower[j] = lattice_coord(start[j]).ok_or_else(|| WalkError::OffLatticeStart(start.as_slice().to_vec()))?;
        }
        let mut extent = [1usize; MAX_DIM];
        extent[dim..].iter_mut().for_each(|e| *e = 1);
        Ok(Self { dim, lower, extent, mass: vec![1.0] })
    }

    fn point_of(&self, mut idx: usize) -> [i64; MAX_DIM] {
        let mut p = [0i64; MAX_DIM];
        for j in 0..self.dim {
            p[j] = self.lower[j] + (idx % self.extent[j]) as i64;
            idx /= self.extent[j];
        }
        p
    }

    fn vector_of(&self, p: &[i64; MAX_DIM]) -> Vector {
        let mut v = Vector::zeros(self.dim);
        for j in 0..self.dim {
            v[j] = p[j] as f64;
        }
        v
    }

    /// `(point, probability)` over the support, in storage order.
    pub fn iter(&self) -> impl Iterator<Item = (Vector, f64)> + '_ {
        self.mass
            .iter()
            .enumerate()
            .filter(|(_, &m)| m > 0.0)
            .map(|(i, &m)| (self.vector_of(&self.point_of(i)), m))
    }

    pub fn support_size(&self) -> usize {
        self.mass.iter().filter(|&&m| m > 0.0).count()
    }

    pub fn total_mass(&self) -> f64 {
        self.mass.iter().sum()
    }

    pub fn probability(&self, point: &Vector) -> f64 {
        let mut idx = 0usize;
        let mut stride = 1usize;
        for j in 0..self.dim {
            let Some(c) = lattice_coord(point[j]) else { return 0.0 };
            let off = c - self.lower[j];
            if off < 0 || off as usize >= self.extent[j] {
                return 0.0;
            }
            idx += off as usize * stride;
            stride *= self.extent[j];
        }
        self.mass[idx]
    }

    pub fn mean(&self) -> Vector {
        let mut m = Vector::zeros(self.dim);
        for (x, p) in self.iter() {
            m += x * p;
        }
        m
    }

    /// `sum_x P(X = x) f(x)`.
    pub fn expect(&self, mut f: impl FnMut(&Vector) -> f64) -> f64 {
        self.iter().map(|(x, p)| p * f(&x)).sum()
    }

    fn check_law(law: &JumpLaw, level: i64, point: &Vector) -> Result<(), WalkError> {
        match law {
            JumpLaw::Gaussian { .. } => Err(WalkError::NonAtomicLaw { level, point: point.as_slice().to_vec() }),
            JumpLaw::Dirac { point: z } => {
                if z.as_slice().iter().all(|&c| lattice_coord(c).is_some()) {
                    Ok(())
                } else {
                    Err(WalkError::OffLattice { level, atom: z.as_slice().to_vec() })
                }
            }
            JumpLaw::Atomic { atoms } => {
                for a in atoms {
                    if a.point.as_slice().iter().any(|&c| lattice_coord(c).is_none()) {
                        return Err(WalkError::OffLattice { level, atom: a.point.as_slice().to_vec() });
                    }
                }
                Ok(())
            }
        }
    }

    fn for_each_atom(law: &JumpLaw, mut f: impl FnMut(&Vector, f64)) {
        match law {
            JumpLaw::Atomic { atoms } => atoms.iter().filter(|a| a.weight > 0.0).for_each(|a| f(&a.point, a.weight)),
            JumpLaw::Dirac { point } => f(point, 1.0),
            JumpLaw::Gaussian { .. } => unreachable!("checked before propagation"),
        }
    }

    /// Advance one step using the laws of level `n` of `env`.
    pub fn step(&mut self, env: &Environment, n: i64) -> Result<(), WalkError> {
        let d = self.dim;
        let constant = env.spec().is_spatially_constant();
        let mut laws: Vec<(usize, JumpLaw)> = Vec::new();
        let mut shared: Option<JumpLaw> = None;
        let mut lo = [i64::MAX; MAX_DIM];
        let mut hi = [i64::MIN; MAX_DIM];
        let mut track = |law: &JumpLaw| {
            Self::for_each_atom(law, |a, _| {
                for j in 0..d {
                    let c = a[j] as i64;
                    lo[j] = lo[j].min(c);
                    hi[j] = hi[j].max(c);
                }
            })
        };
        if constant {
            let x = self.iter().next().map(|(x, _)| x).unwrap_or(Vector::zeros(d));
            let law = env.query(n, &x);
            Self::check_law(&law, n, &x)?;
            track(&law);
            shared = Some(law);
        } else {
            for (i, &m) in self.mass.iter().enumerate() {
                if m == 0.0 {
                    continue;
                }
                let x = self.vector_of(&self.point_of(i));
                let law = env.query(n, &x);
                Self::check_law(&law, n, &x)?;
                track(&law);
                laws.push((i, law));
            }
        }
        let mut new_lower = [0i64; MAX_DIM];
        let mut new_extent = [1usize; MAX_DIM];
        let mut size = 1usize;
        for j in 0..d {
            new_lower[j] = self.lower[j] + lo[j];
            new_extent[j] = self.extent[j] + (hi[j] - lo[j]) as usize;
            size = size.saturating_mul(new_extent[j]);
        }
        if size > SUPPORT_CAP {
            return Err(WalkError::SupportCap { size });
        }
        let mut strides = [1usize; MAX_DIM];
        for j in 1..d {
            strides[j] = strides[j - 1] * new_extent[j - 1];
        }
        let mut next = vec![0.0; size];
        let mut scatter = |i: usize, law: &JumpLaw, m: f64| {
            let p = self.point_of(i);
            Self::for_each_atom(law, |a, w| {
                let mut t = 0usize;
                for j in 0..d {
                    t += (p[j] + a[j] as i64 - new_lower[j]) as usize * strides[j];
                }
                next[t] += m * w;
            });
        };
        match &shared {
            Some(law) => {
                for (i, &m) in self.mass.iter().enumerate() {
                    if m > 0.0 {
                        scatter(i, law, m);
                    }
                }
            }
            None => {
                for (i, law) in &laws {
                    scatter(*i, law, self.mass[*i]);
                }
            }
        }
        let mut total = 0.0;
        for v in next.iter_mut() {
            if *v < PRUNE_THRESHOLD {
                *v = 0.0;
            } else {
                total += *v;
            }
        }
        if total != 1.0 {
            for v in next.iter_mut() {
                *v /= total;
            }
        }
        self.lower = new_lower;
        self.extent = new_extent;
        self.mass = next;
        self.trim();
        Ok(())
    }

    /// Shrink the box to the nonzero entries.
    fn trim(&mut self) {
        let d = self.dim;
        let mut lo = [usize::MAX; MAX_DIM];
        let mut hi = [0usize; MAX_DIM];
        for (i, &m) in self.mass.iter().enumerate() {
            if m > 0.0 {
                let mut idx = i;
                for j in 0..d {
                    let c = idx % self.extent[j];
                    idx /= self.extent[j];
                    lo[j] = lo[j].min(c);
                    hi[j] = hi[j].max(c);
                }
            }
        }
        if (0..d).all(|j| lo[j] == 0 && hi[j] + 1 == self.extent[j]) {
            return;
        }
        let mut extent = [1usize; MAX_DIM];
        for j in 0..d {
            extent[j] = hi[j] - lo[j] + 1;
        }
        let size: usize = extent[..d].iter().product();
        let mut mass = vec![0.0; size];
        for (i, &m) in self.mass.iter().enumerate() {
            if m > 0.0 {
                let mut idx = i;
                let mut t = 0usize;
                let mut stride = 1usize;
                for j in 0..d {
                    let c = idx % self.extent[j];
                    idx /= self.extent[j];
                    t += (c - lo[j]) * stride;
                    stride *= extent[j];
                }
                mass[t] = m;
            }
        }
        for j in 0..d {
            self.lower[j] += lo[j] as i64;
        }
        self.extent = extent;
        self.mass = mass;
    }
}

/// Forward propagation of the full quenched law, step by step.
pub struct ExactPropagator<'a> {
    env: &'a Environment,
    time: i64,
    distribution: LatticeDistribution,
}

impl<'a> ExactPropagator<'a> {
    pub fn new(env: &'a Environment, start: &Vector) -> Result<Self, WalkError> {
        Ok(Self { env, time: 0, distribution: LatticeDistribution::point_mass(start)? })
    }

    pub fn time(&self) -> i64 {
        self.time
    }

    pub fn distribution(&self) -> &LatticeDistribution {
        &self.distribution
    }

    pub fn step(&mut self) -> Result<(), WalkError> {
        self.distribution.step(self.env, self.time)?;
        self.time += 1;
        Ok(())
    }

    /// `int f(T^{n,x} omega) pi^{omega,n}(dx)` at the current time `n`.
    pub fn environment_average(&self, mut f: impl FnMut(&Environment) -> f64) -> f64 {
        let n = self.time;
        self.distribution.expect(|x| f(&self.env.shift(n, x)))
    }
}

/// `E^omega_0[X_n]` for every `n` in `0..=n_max`, exact up to pruning of mass
/// below [`PRUNE_THRESHOLD`].
pub fn quenched_mean_exact(env: &Environment, n_max: usize) -> Result<QuenchedMeanCurve, WalkError> {
    let start = Vector::zeros(env.dim());
    let mut prop = ExactPropagator::new(env, &start)?;
    let mut means = Vec::with_capacity(n_max + 1);
    means.push(prop.distribution().mean());
    for _ in 0..n_max {
        prop.step()?;
        means.push(prop.distribution().mean());
    }
    Ok(QuenchedMeanCurve {
        n_grid: (0..=n_max).collect(),
        standard_errors: vec![Vector::zeros(env.dim()); n_max + 1],
        means,
        method: MeanMethod::ExactPropagation,
    })
}

/// Monte Carlo estimates of `v = E_0[X_1]` and `D = E_0[(X_1 - v)(X_1 - v)^T]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentEstimate {
    pub velocity: Vector,
    pub velocity_se: Vector,
    pub diffusion: Matrix,
    pub diffusion_se: Matrix,
    pub samples: usize,
}

/// One-step moments from `n_env` environments with `n_walk` walkers each.
/// Standard errors treat each environment as one cluster.
pub fn velocity_and_covariance(ensemble: &Ensemble, n_env: usize, n_walk: usize, workers: &Workers) -> MomentEstimate {
    assert!(n_env >= 2 && n_walk >= 1);
    let d = ensemble.dim();
    let steps: Vec<Vec<Vector>> = workers.map(n_env, |i| {
        let env = ensemble.environment(i as u64);
        let law = env.query(0, &Vector::zeros(d));
        (0..n_walk)
            .map(|j| law.sample(&mut walk_stream(ensemble.walk_seed(i as u64, j as u64))))
            .collect()
    });
    let cluster_means = |f: &dyn Fn(&Vector) -> f64| -> Vec<f64> {
        steps.iter().map(|c| c.iter().map(f).sum::<f64>() / n_walk as f64).collect()
    };
    let mut velocity = Vector::zeros(d);
    let mut velocity_se = Vector::zeros(d);
    for j in 0..d {
        let e = crate::summary::mean_estimate(&cluster_means(&|x| x[j]));
        velocity[j] = e.value;
        velocity_se[j] = e.std_error;
    }
    let mut diffusion = Matrix::zeros(d);
    let mut diffusion_se = Matrix::zeros(d);
    for a in 0..d {
        for b in 0..d {
            let e = crate::summary::mean_estimate(&cluster_means(&|x| (x[a] - velocity[a]) * (x[b] - velocity[b])));
            diffusion.set(a, b, e.value);
            diffusion_se.set(a, b, e.std_error);
        }
    }
    MomentEstimate { velocity, velocity_se, diffusion, diffusion_se, samples: n_env * n_walk }
}

/// Centering of a rescaled path.
#[derive(Clone, Copy, Debug)]
pub enum Centering<'a> {
    /// `B_eps(t) = sqrt(eps) (X_[t/eps] - [t/eps] v)`.
    Velocity(Vector),
    /// `B~_eps(t) = sqrt(eps) (X_[t/eps] - E^omega_0[X_[t/eps]])`.
    QuenchedMean(&'a QuenchedMeanCurve),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CenteringKind {
    VelocityCentered,
    QuenchedMeanCentered,
}

impl Centering<'_> {
    pub fn kind(&self) -> CenteringKind {
        match self {
            Centering::Velocity(_) => CenteringKind::VelocityCentered,
            Centering::QuenchedMean(_) => CenteringKind::QuenchedMeanCentered,
        }
    }

    pub fn at(&self, n: usize) -> Result<Vector, WalkError> {
        match self {
            Centering::Velocity(v) => Ok(*v * n as f64),
            Centering::QuenchedMean(curve) => curve.mean_at(n).ok_or(WalkError::MissingCentering(n)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScaledPath {
    pub epsilon: f64,
    pub times: Vec<f64>,
    pub values: Vec<Vector>,
    pub centering: CenteringKind,
}

/// `[t / eps]` with floor semantics.
pub fn scaled_index(t: f64, epsilon: f64) -> usize {
    (t / epsilon).floor() as usize
}

/// Evaluate the rescaled path at `times`; the value at `t` is
/// `sqrt(eps) (X_[t/eps] - centering([t/eps]))`.
pub fn scaled_path(path: &WalkPath, epsilon: f64, times: &[f64], centering: Centering<'_>) -> Result<ScaledPath, WalkError> {
    if !(epsilon > 0.0) {
        return Err(WalkError::InvalidArgument(format!("epsilon must be positive, got {epsilon}")));
    }
    let scale = epsilon.sqrt();
    let values = times
        .iter()
        .map(|&t| {
            if !(t >= 0.0) {
                return Err(WalkError::InvalidArgument(format!("negative time {t}")));
            }
            let n = scaled_index(t, epsilon);
            let x = path
                .positions
                .get(n)
                .ok_or(WalkError::PathTooShort { needed: n, len: path.positions.len() })?;
            Ok((*x - centering.at(n)?) * scale)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ScaledPath { epsilon, times: times.to_vec(), values, centering: centering.kind() })
}

/// Estimates of `int f dP_n`, the law of the environment seen from `X_n`
/// under `P_0`, for each `n` in `n_grid`.
pub fn env_chain_observable<F>(
    ensemble: &Ensemble,
    n_grid: &[usize],
    f: F,
    replicas: usize,
    workers: &Workers,
) -> Result<Vec<Estimate>, WalkError>
where
    F: Fn(&JumpLaw) -> f64 + Sync,
{
    validate_grid(n_grid)?;
    let n_max = n_grid.last().copied().unwrap_or(0);
    let d = ensemble.dim();
    let values: Vec<Vec<f64>> = workers.map(replicas, |i| {
        let path = simulate_averaged_path(ensemble, n_max, i as u64);
        let env = ensemble.environment(i as u64);
        n_grid
            .iter()
            .map(|&n| f(&env.shift(n as i64, &path.positions[n]).query(0, &Vector::zeros(d))))
            .collect()
    });
    Ok((0..n_grid.len())
        .map(|g| crate::summary::mean_estimate(&values.iter().map(|v| v[g]).collect::<Vec<_>>()))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{BiasLaw, Displacement, SiteFamily};

    fn mixing_env(seed: u64) -> Environment {
        Environment::lattice_product(seed, 1, SiteFamily::NearestNeighbor { bias: BiasLaw::STANDARD_UNIFORM }, true).unwrap()
    }

    #[test]
    fn zero_steps_is_start() {
        let env = mixing_env(1);
        let p = simulate_quenched_path(&env, Vector::zeros(1), 0, 5);
        assert_eq!(p.positions, vec![Vector::zeros(1)]);
    }

    #[test]
    fn lattice_steps_have_unit_length() {
        let env = mixing_env(2);
        let p = simulate_quenched_path(&env, Vector::zeros(1), 200, 9);
        assert!(p.increments().iter().all(|dx| dx[0].abs() == 1.0));
    }

    #[test]
    fn paths_replay() {
        let env = mixing_env(3);
        assert_eq!(
            simulate_quenched_path(&env, Vector::zeros(1), 50, 4),
            simulate_quenched_path(&env, Vector::zeros(1), 50, 4)
        );
    }

    #[test]
    fn dirac_walk_ignores_walk_seed() {
        let env = Environment::dirac(8, 2, Displacement::Gaussian { std: 1.0 }).unwrap();
        let a = simulate_quenched_path(&env, Vector::zeros(2), 30, 1);
        let b = simulate_quenched_path(&env, Vector::zeros(2), 30, 2);
        assert_eq!(a.positions, b.positions);
    }

    #[test]
    fn local_drift_of_coin_site() {
        let env = mixing_env(6);
        let law = env.query(0, &Vector::zeros(1));
        let JumpLaw::Atomic { atoms } = &law else { panic!() };
        let p = atoms[0].weight;
        assert!((local_drift(&env)[0] - (2.0 * p - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn local_drift_of_gaussian_site() {
        let env = Environment::lattice_product(6, 2, SiteFamily::GaussianMean { mean_std: 1.0, step_std: 1.0 }, true).unwrap();
        let JumpLaw::Gaussian { mean, .. } = env.query(0, &Vector::zeros(2)) else { panic!() };
        assert_eq!(local_drift(&env), mean);
    }

    #[test]
    fn exact_propagation_conserves_mass() {
        let env = mixing_env(12);
        let mut prop = ExactPropagator::new(&env, &Vector::zeros(1)).unwrap();
        for _ in 0..200 {
            prop.step().unwrap();
            assert!((prop.distribution().total_mass() - 1.0).abs() < 1e-12);
        }
        // Parity: after an even number of +-1 steps only even sites carry mass.
        assert_eq!(prop.distribution().probability(&Vector::from_slice(&[1.0])), 0.0);
    }

    #[test]
    fn exact_rejects_gaussian_laws() {
        let env = Environment::lattice_product(1, 1, SiteFamily::GaussianMean { mean_std: 1.0, step_std: 1.0 }, true).unwrap();
        assert!(matches!(quenched_mean_exact(&env, 3), Err(WalkError::NonAtomicLaw { .. })));
        let off = Environment::dirac(1, 1, Displacement::Constant(Vector::from_slice(&[0.5]))).unwrap();
        assert!(matches!(quenched_mean_exact(&off, 3), Err(WalkError::OffLattice { .. })));
    }

    #[test]
    fn nonrandom_fair_coin_has_zero_mean() {
        let coin = JumpLaw::atomic([(Vector::from_slice(&[1.0]), 0.5), (Vector::from_slice(&[-1.0]), 0.5)]).unwrap();
        let env = Environment::lattice_product(3, 1, SiteFamily::Fixed(coin), true).unwrap();
        let curve = quenched_mean_exact(&env, 64).unwrap();
        assert!(curve.means.iter().all(|m| m[0].abs() < 1e-12), "{:?}", curve.means);
    }

    #[test]
    fn dirac_mc_curve_is_the_path() {
        let env = Environment::dirac(4, 1, Displacement::Sign).unwrap();
        let grid: Vec<usize> = (0..=20).collect();
        let curve = quenched_mean_mc(&env, Vector::zeros(1), &grid, 300, 17, &Workers::serial()).unwrap();
        let path = simulate_quenched_path(&env, Vector::zeros(1), 20, 0);
        for (n, m) in curve.means.iter().enumerate() {
            assert_eq!(*m, path.positions[n]);
            assert_eq!(curve.standard_errors[n][0], 0.0);
        }
    }

    #[test]
    fn scaled_path_conventions() {
        let env = mixing_env(5);
        let path = simulate_quenched_path(&env, Vector::zeros(1), 8, 5);
        let v = Vector::from_slice(&[0.25]);
        let b = scaled_path(&path, 1.0, &[1.0], Centering::Velocity(v)).unwrap();
        assert_eq!(b.values[0], path.positions[1] - v);
        // [t/eps] uses floor.
        let b = scaled_path(&path, 0.5, &[1.3], Centering::Velocity(v)).unwrap();
        assert_eq!(b.values[0], (path.positions[2] - v * 2.0) * 0.5f64.sqrt());
        assert!(matches!(
            scaled_path(&path, 0.1, &[1.0], Centering::Velocity(v)),
            Err(WalkError::PathTooShort { .. })
        ));
        let short = QuenchedMeanCurve { n_grid: vec![0], means: vec![Vector::zeros(1)], standard_errors: vec![Vector::zeros(1)], method: MeanMethod::ExactPropagation };
        assert_eq!(
            scaled_path(&path, 1.0, &[3.0], Centering::QuenchedMean(&short)),
            Err(WalkError::MissingCentering(3))
        );
    }

    #[test]
    fn velocity_minus_quenched_centering() {
        let env = mixing_env(15);
        let path = simulate_quenched_path(&env, Vector::zeros(1), 64, 3);
        let curve = quenched_mean_exact(&env, 64).unwrap();
        let v = Vector::zeros(1);
        let eps = 1.0 / 16.0;
        let times = [0.5, 1.0, 2.5, 4.0];
        let b = scaled_path(&path, eps, &times, Centering::Velocity(v)).unwrap();
        let bt = scaled_path(&path, eps, &times, Centering::QuenchedMean(&curve)).unwrap();
        for (i, &t) in times.iter().enumerate() {
            let n = scaled_index(t, eps);
            let expect = (curve.means[n] - v * n as f64) * eps.sqrt();
            assert!((b.values[i][0] - bt.values[i][0] - expect[0]).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_observable_is_constant() {
        let ens = Ensemble::new(crate::env::ModelSpec::lattice_product(1, SiteFamily::NearestNeighbor { bias: BiasLaw::STANDARD_UNIFORM }, true).unwrap(), 3);
        let est = env_chain_observable(&ens, &[0, 3, 9], |_| 2.5, 50, &Workers::serial()).unwrap();
        assert!(est.iter().all(|e| e.value == 2.5 && e.std_error == 0.0));
    }
}
