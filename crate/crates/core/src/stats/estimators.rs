//! Estimators built on the walk and difference-chain engines.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::diff_chain::{DiffChain, DiffChainKind};
use crate::env::{Ensemble, Environment};
use crate::field::{derive_stream, StreamKey, StreamTag};
use crate::linalg::{Matrix, Vector};
use crate::parallel::Workers;
use crate::stats::fit::ScanCurve;
use crate::stats::ks::{ks_gaussian_test, ks_gaussian_test_lattice, GofError, GofTestResult};
use crate::summary::{mean_estimate, Estimate};
use crate::walk::{
    local_drift, quenched_mean_exact, quenched_mean_mc, scaled_index, velocity_and_covariance, walker_seed,
    Centering, CenteringKind, ExactPropagator, QuenchedMeanCurve, WalkError, Walker,
};

/// Bootstrap resamples behind variance-scan standard errors.
pub const BOOTSTRAP_RESAMPLES: usize = 200;
/// Averaged one-step samples drawn when a model has no closed-form velocity.
pub const VELOCITY_PREPASS_SAMPLES: usize = 1_000_000;

/// Centering velocity and where it came from.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CenteringVelocity {
    pub value: Vector,
    pub source: VelocitySource,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VelocitySource {
    Analytic,
    Estimated { samples: usize },
}

/// The analytic `v` when the model has one, otherwise a Monte Carlo pre-pass
/// of [`VELOCITY_PREPASS_SAMPLES`] averaged steps.
pub fn centering_velocity(ensemble: &Ensemble, workers: &Workers) -> CenteringVelocity {
    match ensemble.spec().moments() {
        Some(m) => CenteringVelocity { value: m.velocity, source: VelocitySource::Analytic },
        None => {
            let est = velocity_and_covariance(ensemble, VELOCITY_PREPASS_SAMPLES / 100, 100, workers);
            CenteringVelocity { value: est.velocity, source: VelocitySource::Estimated { samples: est.samples } }
        }
    }
}

/// `phi(x) = E[g(omega) . g(T^{0,x} omega)]` with `g = D - v`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhiEstimate {
    pub points: Vec<Vector>,
    pub values: Vec<Estimate>,
    /// `v-hat`: mean local drift at the origin over the replicas.
    pub velocity: Vector,
    /// `phi-hat` against `|x|`.
    pub curve: ScanCurve,
    pub replicas: usize,
}

impl PhiEstimate {
    pub fn at(&self, x: &Vector) -> Option<Estimate> {
        self.points.iter().position(|p| p == x).map(|i| self.values[i])
    }
}

/// `phi-hat(x) = sum_i g_i(0) . g_i(x) / (N - 1)` over environment replicas
/// `0..replicas`, centred at the replica mean of `D(omega)`.
pub fn estimate_phi(ensemble: &Ensemble, points: &[Vector], replicas: usize, workers: &Workers) -> PhiEstimate {
    assert!(replicas >= 2, "phi needs at least two replicas");
    let d = ensemble.dim();
    let drifts: Vec<(Vector, Vec<Vector>)> = workers.map(replicas, |i| {
        let env = ensemble.environment(i as u64);
        (local_drift(&env), points.iter().map(|x| env.query(0, x).mean()).collect())
    });
    let mut velocity = Vector::zeros(d);
    for (g0, _) in &drifts {
        velocity += *g0;
    }
    velocity = velocity * (1.0 / replicas as f64);
    let nf = replicas as f64;
    let values: Vec<Estimate> = (0..points.len())
        .map(|j| {
            let products: Vec<f64> = drifts.iter().map(|(g0, gx)| (*g0 - velocity).dot(&(gx[j] - velocity))).collect();
            let e = mean_estimate(&products);
            Estimate { value: e.value * nf / (nf - 1.0), std_error: e.std_error }
        })
        .collect();
    let curve = ScanCurve::new(
        points.iter().map(|x| x.norm_sq().sqrt()).collect(),
        values.iter().map(|e| e.value).collect(),
        values.iter().map(|e| e.std_error).collect(),
    )
    .with_fit();
    PhiEstimate { points: points.to_vec(), values, velocity, curve, replicas }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MeanSource {
    Exact,
    MonteCarlo { walks: usize },
}

/// `Var(E^omega_0[X_n])` across environment replicas.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VarianceScan {
    pub n_grid: Vec<usize>,
    pub curve: ScanCurve,
    pub method: MeanSource,
    pub replicas: usize,
    /// `E^omega_0[X_n]` per replica and grid point.
    #[serde(skip)]
    pub replica_means: Vec<Vec<Vector>>,
}

/// Quenched means of `env` at every grid time by exact propagation.
pub fn exact_means_on_grid(env: &Environment, n_grid: &[usize]) -> Result<Vec<Vector>, WalkError> {
    let mut prop = ExactPropagator::new(env, &Vector::zeros(env.dim()))?;
    let mut out = Vec::with_capacity(n_grid.len());
    for &n in n_grid {
        while (prop.time() as usize) < n {
            prop.step()?;
        }
        out.push(prop.distribution().mean());
    }
    Ok(out)
}

fn replica_means(
    ensemble: &Ensemble,
    n_grid: &[usize],
    replicas: usize,
    method: MeanSource,
    workers: &Workers,
) -> Result<Vec<Vec<Vector>>, WalkError> {
    if n_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(WalkError::InvalidArgument("time grid must be strictly increasing".into()));
    }
    let d = ensemble.dim();
    match method {
        MeanSource::Exact => workers
            .map(replicas, |i| exact_means_on_grid(&ensemble.environment(i as u64), n_grid))
            .into_iter()
            .collect(),
        MeanSource::MonteCarlo { walks } => {
            let serial = Workers::serial();
            workers
                .map(replicas, |i| {
                    let env = ensemble.environment(i as u64);
                    quenched_mean_mc(&env, Vector::zeros(d), n_grid, walks, ensemble.walk_seed(i as u64, 0), &serial)
                        .map(|c| c.means)
                })
                .into_iter()
                .collect()
        }
    }
}

/// `sum_i |m_i - m-bar|^2 / (N - 1)` over the selected replicas.
fn spread(means: &[Vector], pick: impl Iterator<Item = usize> + Clone) -> f64 {
    let count = pick.clone().count();
    let mut bar = Vector::zeros(means[0].dim());
    for i in pick.clone() {
        bar += means[i];
    }
    bar = bar * (1.0 / count as f64);
    pick.map(|i| (means[i] - bar).norm_sq()).sum::<f64>() / (count as f64 - 1.0)
}

/// Variance of the quenched mean against `n`, standard errors from
/// [`BOOTSTRAP_RESAMPLES`] replica bootstrap resamples keyed by the ensemble
/// seed, and the fitted growth exponent.
pub fn variance_scan(
    ensemble: &Ensemble,
    n_grid: &[usize],
    replicas: usize,
    method: MeanSource,
    workers: &Workers,
) -> Result<VarianceScan, WalkError> {
    if replicas < 2 {
        return Err(WalkError::InvalidArgument("variance needs at least two replicas".into()));
    }
    let means = replica_means(ensemble, n_grid, replicas, method, workers)?;
    let mut estimates = Vec::with_capacity(n_grid.len());
    let mut errors = Vec::with_capacity(n_grid.len());
    let mut stream = derive_stream(StreamKey::new(ensemble.master_seed(), 0, &[], StreamTag::BOOTSTRAP));
    let resamples: Vec<Vec<usize>> = (0..BOOTSTRAP_RESAMPLES)
        .map(|_| (0..replicas).map(|_| stream.next_below(replicas as u64) as usize).collect())
        .collect();
    for g in 0..n_grid.len() {
        let column: Vec<Vector> = means.iter().map(|m| m[g]).collect();
        estimates.push(spread(&column, 0..replicas));
        let boot: Vec<f64> = resamples.iter().map(|idx| spread(&column, idx.iter().copied())).collect();
        let e = mean_estimate(&boot);
        errors.push(e.std_error * (BOOTSTRAP_RESAMPLES as f64).sqrt());
    }
    let curve = ScanCurve::new(n_grid.iter().map(|&n| n as f64).collect(), estimates, errors).with_fit();
    Ok(VarianceScan { n_grid: n_grid.to_vec(), curve, method, replicas, replica_means: means })
}

/// Both sides of `E|E^omega_0[X_n] - n v|^2 = sum_{k<n} E_0[phi(Y_k)]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IdentityRow {
    pub n: usize,
    pub lhs: Estimate,
    pub rhs: Estimate,
    pub residual: f64,
    pub combined_se: f64,
}

impl IdentityRow {
    pub fn z(&self) -> f64 {
        if self.residual == 0.0 {
            0.0
        } else {
            self.residual.abs() / self.combined_se
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub rows: Vec<IdentityRow>,
    pub env_replicas: usize,
    pub y_replicas: usize,
    /// Distinct `Y` values at which `phi` was estimated.
    pub phi_points: usize,
}

fn lattice_key(y: &Vector) -> Result<Vec<i64>, WalkError> {
    y.as_slice()
        .iter()
        .map(|&c| if c.fract() == 0.0 { Ok(c as i64) } else { Err(WalkError::OffLatticeStart(y.as_slice().to_vec())) })
        .collect()
}

/// Left side from exact quenched means over environment replicas
/// `0..env_replicas`; right side from `y_replicas` difference chains (on the
/// disjoint replicas that follow) composed with `phi-hat` on the same
/// environment replicas as the left side. The combined standard error adds
/// the left-side error, the chain error, and the `phi-hat` errors weighted by
/// the expected visit counts, in quadrature.
pub fn variance_identity_check(
    ensemble: &Ensemble,
    n_values: &[usize],
    env_replicas: usize,
    y_replicas: usize,
    workers: &Workers,
) -> Result<IdentityCheck, WalkError> {
    let mut grid = n_values.to_vec();
    grid.sort_unstable();
    grid.dedup();
    if grid.first() == Some(&0) || grid.is_empty() {
        return Err(WalkError::InvalidArgument("identity times must be positive".into()));
    }
    if env_replicas < 2 || y_replicas < 1 {
        return Err(WalkError::InvalidArgument("need at least two environment replicas and one chain".into()));
    }
    let n_max = *grid.last().unwrap();
    let d = ensemble.dim();
    let means = replica_means(ensemble, &grid, env_replicas, MeanSource::Exact, workers)?;

    let chains: Vec<Vec<Vector>> = workers.map(y_replicas, |i| {
        let mut c = DiffChain::new(ensemble, Vector::zeros(d), DiffChainKind::SameEnv, (env_replicas + i) as u64);
        let mut ys = Vec::with_capacity(n_max);
        ys.push(c.value());
        for _ in 1..n_max {
            ys.push(c.step());
        }
        ys
    });
    let mut keys: BTreeMap<Vec<i64>, Vector> = BTreeMap::new();
    for ys in &chains {
        for y in ys {
            keys.entry(lattice_key(y)?).or_insert(*y);
        }
    }
    let points: Vec<Vector> = keys.values().copied().collect();
    let phi = estimate_phi(ensemble, &points, env_replicas, workers);
    let index: BTreeMap<Vec<i64>, usize> = keys.keys().cloned().enumerate().map(|(i, k)| (k, i)).collect();
    let chain_idx: Vec<Vec<usize>> = chains
        .iter()
        .map(|ys| ys.iter().map(|y| index[&lattice_key(y).expect("checked")]).collect())
        .collect();

    let mut rows = Vec::with_capacity(grid.len());
    for (g, &n) in grid.iter().enumerate() {
        let column: Vec<Vector> = means.iter().map(|m| m[g]).collect();
        let lhs_value = spread(&column, 0..env_replicas);
        let mut bar = Vector::zeros(d);
        column.iter().for_each(|m| bar += *m);
        bar = bar * (1.0 / env_replicas as f64);
        let nf = env_replicas as f64;
        let sq: Vec<f64> = column.iter().map(|m| (*m - bar).norm_sq() * nf / (nf - 1.0)).collect();
        let lhs = Estimate { value: lhs_value, std_error: mean_estimate(&sq).std_error };

        let per_chain: Vec<f64> = chain_idx.iter().map(|ix| ix[..n].iter().map(|&j| phi.values[j].value).sum()).collect();
        let chain_est = mean_estimate(&per_chain);
        let mut visits = vec![0.0; points.len()];
        for ix in &chain_idx {
            for &j in &ix[..n] {
                visits[j] += 1.0 / y_replicas as f64;
            }
        }
        let phi_err: f64 = visits.iter().zip(&phi.values).map(|(v, e)| v * e.std_error).sum();
        let rhs_se = (chain_est.std_error.powi(2) + phi_err.powi(2)).sqrt();
        let rhs = Estimate { value: chain_est.value, std_error: rhs_se };
        rows.push(IdentityRow {
            n,
            lhs,
            rhs,
            residual: lhs.value - rhs.value,
            combined_se: (lhs.std_error.powi(2) + rhs_se.powi(2)).sqrt(),
        });
    }
    Ok(IdentityCheck { rows, env_replicas, y_replicas, phi_points: points.len() })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MarginalTest {
    pub t: f64,
    pub coordinate: usize,
    /// Spacing of the lattice the rescaled sample lives on, when it does.
    pub lattice_spacing: Option<f64>,
    pub result: GofTestResult,
}

/// Spacing `h` with every value in `min + h Z`, for integer-valued samples
/// taking at least two values.
pub fn integer_lattice_spacing(values: &[f64]) -> Option<f64> {
    if values.iter().any(|v| v.fract() != 0.0 || v.abs() > 9.0e15) {
        return None;
    }
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min) as i64;
    let g = values.iter().fold(0u64, |g, &v| gcd(g, (v as i64 - lo) as u64));
    (g > 0).then_some(g as f64)
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CovarianceRow {
    pub s: f64,
    pub t: f64,
    pub coordinate: usize,
    /// Mean of `B_j(s) B_j(t)` over the walks.
    pub estimate: Estimate,
    pub target: f64,
}

impl CovarianceRow {
    pub fn within(&self, n_se: f64) -> bool {
        self.estimate.within(self.target, n_se)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FcltCentering {
    Velocity,
    QuenchedMean,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FcltReport {
    pub env_seed: u64,
    pub epsilon: f64,
    pub centering: CenteringKind,
    pub walks: usize,
    pub marginals: Vec<MarginalTest>,
    pub covariances: Vec<CovarianceRow>,
}

impl FcltReport {
    pub fn min_p_value(&self) -> f64 {
        self.marginals.iter().map(|m| m.result.p_value).fold(1.0, f64::min)
    }

    pub fn marginals_pass(&self, alpha: f64) -> bool {
        self.marginals.iter().all(|m| m.result.passes(alpha))
    }
}

/// Finite-dimensional checks of the rescaled quenched walk in one fixed
/// environment: KS tests of each coordinate of `B(t)` against
/// `Normal(0, eps [t/eps] D_jj)` and the mixed moments `E[B_j(s) B_j(t)]`
/// against `eps [min(s,t)/eps] D_jj`. When the walk lives on an integer
/// lattice the KS test uses the lattice continuity correction. Quenched-mean
/// centering requires exact propagation.
#[allow(clippy::too_many_arguments)]
pub fn fclt_check(
    env: &Environment,
    epsilon: f64,
    times: &[f64],
    walks: usize,
    walk_base_seed: u64,
    diffusion: &Matrix,
    velocity: Vector,
    centering: FcltCentering,
    covariance_pairs: &[(f64, f64)],
    workers: &Workers,
) -> Result<FcltReport, FcltError> {
    let d = env.dim();
    let mut needed: Vec<usize> = times.iter().map(|&t| scaled_index(t, epsilon)).collect();
    for &(s, t) in covariance_pairs {
        needed.push(scaled_index(s, epsilon));
        needed.push(scaled_index(t, epsilon));
    }
    needed.sort_unstable();
    needed.dedup();
    let n_max = needed.last().copied().unwrap_or(0);
    let curve: Option<QuenchedMeanCurve> = match centering {
        FcltCentering::Velocity => None,
        FcltCentering::QuenchedMean => Some(quenched_mean_exact(env, n_max)?),
    };
    let center = match &curve {
        None => Centering::Velocity(velocity),
        Some(c) => Centering::QuenchedMean(c),
    };
    let offsets: Vec<Vector> = needed.iter().map(|&n| center.at(n)).collect::<Result<_, _>>()?;
    let scale = epsilon.sqrt();
    // values[w][i] = B at needed[i] for walk w
    let positions: Vec<Vec<Vector>> = workers.map(walks, |w| {
        let mut walker = Walker::new(env, Vector::zeros(d), walker_seed(walk_base_seed, w as u64));
        let mut out = Vec::with_capacity(needed.len());
        for &n in &needed {
            while (walker.time() as usize) < n {
                walker.step();
            }
            out.push(walker.position());
        }
        out
    });
    let values: Vec<Vec<Vector>> = positions
        .iter()
        .map(|p| p.iter().zip(&offsets).map(|(x, c)| (*x - *c) * scale).collect())
        .collect();
    let slot = |t: f64| needed.binary_search(&scaled_index(t, epsilon)).expect("time registered");
    let mut marginals = Vec::new();
    for &t in times {
        let i = slot(t);
        for j in 0..d {
            let xs: Vec<f64> = values.iter().map(|v| v[i][j]).collect();
            let raw: Vec<f64> = positions.iter().map(|p| p[i][j]).collect();
            let var = epsilon * needed[i] as f64 * diffusion.get(j, j);
            let lattice_spacing = integer_lattice_spacing(&raw).map(|h| h * scale);
            let result = match lattice_spacing {
                Some(h) => ks_gaussian_test_lattice(&xs, 0.0, var, h)?,
                None => ks_gaussian_test(&xs, 0.0, var)?,
            };
            marginals.push(MarginalTest { t, coordinate: j, lattice_spacing, result });
        }
    }
    let mut covariances = Vec::new();
    for &(s, t) in covariance_pairs {
        let (a, b) = (slot(s), slot(t));
        for j in 0..d {
            let prods: Vec<f64> = values.iter().map(|v| v[a][j] * v[b][j]).collect();
            let m = needed[a].min(needed[b]) as f64;
            covariances.push(CovarianceRow {
                s,
                t,
                coordinate: j,
                estimate: mean_estimate(&prods),
                target: epsilon * m * diffusion.get(j, j),
            });
        }
    }
    Ok(FcltReport { env_seed: env.seed(), epsilon, centering: center.kind(), walks, marginals, covariances })
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum FcltError {
    #[error(transparent)]
    Walk(#[from] WalkError),
    #[error(transparent)]
    Gof(#[from] GofError),
}

/// `n^{-1/2} max_{k<=n} |E^omega_0[X_k] - k v|` per replica.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MaxDriftScan {
    pub n_grid: Vec<usize>,
    pub per_replica: Vec<Vec<f64>>,
    /// Cross-replica mean.
    pub curve: ScanCurve,
    /// Per replica: last grid value below half the first.
    pub halved: Vec<bool>,
}

impl MaxDriftScan {
    pub fn halved_count(&self) -> usize {
        self.halved.iter().filter(|&&h| h).count()
    }
}

pub fn max_drift_check(
    ensemble: &Ensemble,
    replicas: usize,
    n_grid: &[usize],
    velocity: Vector,
    workers: &Workers,
) -> Result<MaxDriftScan, WalkError> {
    if n_grid.is_empty() || n_grid[0] == 0 || n_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(WalkError::InvalidArgument("n grid must be positive and strictly increasing".into()));
    }
    let n_max = *n_grid.last().unwrap();
    let d = ensemble.dim();
    let per_replica: Vec<Vec<f64>> = workers
        .map(replicas, |i| -> Result<Vec<f64>, WalkError> {
            let env = ensemble.environment(i as u64);
            let mut prop = ExactPropagator::new(&env, &Vector::zeros(d))?;
            let mut running: f64 = 0.0;
            let mut out = Vec::with_capacity(n_grid.len());
            let mut g = 0;
            for k in 1..=n_max {
                prop.step()?;
                let dev = prop.distribution().mean() - velocity * k as f64;
                running = running.max(dev.norm_sq().sqrt());
                if k == n_grid[g] {
                    out.push(running / (k as f64).sqrt());
                    g += 1;
                }
            }
            Ok(out)
        })
        .into_iter()
        .collect::<Result<_, _>>()?;
    let mut estimates = Vec::new();
    let mut errors = Vec::new();
    for g in 0..n_grid.len() {
        let e = mean_estimate(&per_replica.iter().map(|r| r[g]).collect::<Vec<_>>());
        estimates.push(e.value);
        errors.push(e.std_error);
    }
    let halved = per_replica.iter().map(|r| r[r.len() - 1] < 0.5 * r[0]).collect();
    Ok(MaxDriftScan {
        n_grid: n_grid.to_vec(),
        curve: ScanCurve::new(n_grid.iter().map(|&n| n as f64).collect(), estimates, errors),
        per_replica,
        halved,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CrossTermRow {
    pub k: usize,
    pub l: usize,
    pub estimate: Estimate,
}

/// `E[g(T^{k,X_k} omega) . g(T^{l,X~_l} omega)]` for two independent walks
/// in one environment, `g = D - v`, averaged over environments and walks.
pub fn cross_term_check(
    ensemble: &Ensemble,
    pairs: &[(usize, usize)],
    replicas: usize,
    velocity: Vector,
    workers: &Workers,
) -> Vec<CrossTermRow> {
    let horizon = pairs.iter().map(|&(k, l)| k.max(l)).max().unwrap_or(0);
    let d = ensemble.dim();
    let samples: Vec<Vec<f64>> = workers.map(replicas, |i| {
        let env = ensemble.environment(i as u64);
        let mut a = Walker::new(&env, Vector::zeros(d), ensemble.walk_seed(i as u64, 0));
        let mut b = Walker::new(&env, Vector::zeros(d), ensemble.walk_seed(i as u64, 1));
        let mut ga = Vec::with_capacity(horizon + 1);
        let mut gb = Vec::with_capacity(horizon + 1);
        for _ in 0..=horizon {
            ga.push(a.current_law().mean() - velocity);
            gb.push(b.current_law().mean() - velocity);
            a.step();
            b.step();
        }
        pairs.iter().map(|&(k, l)| ga[k].dot(&gb[l])).collect()
    });
    pairs
        .iter()
        .enumerate()
        .map(|(p, &(k, l))| CrossTermRow { k, l, estimate: mean_estimate(&samples.iter().map(|s| s[p]).collect::<Vec<_>>()) })
        .collect()
}
