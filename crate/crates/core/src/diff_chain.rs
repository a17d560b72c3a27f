//! The difference chains of two walks started at time 0.
//!
//! `Y_k = X~_k - X_k` with both walks in one environment is a Markov chain
//! under the averaged measure; `Y-bar_k` uses independent environments for
//! the two walks and is a classical symmetric random walk.

use serde::Serialize;
use thiserror::Error;

use crate::env::{Ensemble, Environment};
use crate::field::{derive_stream, Stream, StreamKey, StreamTag};
use crate::linalg::Vector;
use crate::parallel::Workers;
use crate::stats::{ScanCurve, ExponentFit};
use crate::summary::{mean_estimate, Estimate};
use crate::walk::quenched_step;

/// Default step cap for exit-time runs.
pub const DEFAULT_STEP_CAP: u64 = 1_000_000;
/// Largest number of starting points used on an escape shell.
pub const MAX_SHELL_STARTS: usize = 64;
/// Fewest complete excursions an excursion scan accepts.
pub const MIN_EXCURSIONS: usize = 10;

#[derive(Debug, Error, PartialEq)]
pub enum DiffChainError {
    #[error("every one of {replicas} runs hit the step cap before leaving B_{r}")]
    AllCapped { r: f64, replicas: usize },
    #[error("only {found} complete excursions observed, need at least {MIN_EXCURSIONS}")]
    InsufficientExcursions { found: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DiffChainKind {
    /// `Y`: both walks in the same environment.
    SameEnv,
    /// `Y-bar`: the second walk uses an independent companion environment.
    IndependentEnv,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiffChainPath {
    pub values: Vec<Vector>,
    pub kind: DiffChainKind,
    pub start: Vector,
}

impl DiffChainPath {
    pub fn increments(&self) -> Vec<Vector> {
        self.values.windows(2).map(|w| w[1] - w[0]).collect()
    }
}

/// Two walkers `X` (from 0) and `X~` (from `x0`) advanced in lockstep.
#[derive(Clone, Debug)]
pub struct DiffChain {
    env: Environment,
    other_env: Environment,
    x: Vector,
    x_tilde: Vector,
    stream: Stream,
    stream_tilde: Stream,
    time: i64,
}

impl DiffChain {
    /// Chain for environment replica `replica` of `ensemble`, walker seeds
    /// `walk_seed(replica, 0)` and `walk_seed(replica, 1)`.
    pub fn new(ensemble: &Ensemble, x0: Vector, kind: DiffChainKind, replica: u64) -> Self {
        let env = ensemble.environment(replica);
        let other_env = match kind {
            DiffChainKind::SameEnv => env.clone(),
            DiffChainKind::IndependentEnv => ensemble.companion_environment(replica),
        };
        Self::from_parts(env, other_env, x0, ensemble.walk_seed(replica, 0), ensemble.walk_seed(replica, 1))
    }

    /// Chain from explicit environments and walker seeds. Equal seeds and a
    /// shared environment with `x0 = 0` give `Y == 0`.
    pub fn from_parts(env: Environment, other_env: Environment, x0: Vector, seed: u64, seed_tilde: u64) -> Self {
        let key = |s| derive_stream(StreamKey::new(s, 0, &[], StreamTag::WALK));
        Self {
            x: Vector::zeros(env.dim()),
            env,
            other_env,
            x_tilde: x0,
            stream: key(seed),
            stream_tilde: key(seed_tilde),
            time: 0,
        }
    }

    #[inline]
    pub fn value(&self) -> Vector {
        self.x_tilde - self.x
    }

    pub fn time(&self) -> i64 {
        self.time
    }

    #[inline]
    pub fn step(&mut self) -> Vector {
        self.x = quenched_step(&self.env, self.time, &self.x, &mut self.stream);
        self.x_tilde = quenched_step(&self.other_env, self.time, &self.x_tilde, &mut self.stream_tilde);
        self.time += 1;
        self.value()
    }
}

pub fn simulate_diff_chain(ensemble: &Ensemble, x0: Vector, steps: usize, kind: DiffChainKind, replica: u64) -> DiffChainPath {
    let mut chain = DiffChain::new(ensemble, x0, kind, replica);
    let mut values = Vec::with_capacity(steps + 1);
    values.push(chain.value());
    for _ in 0..steps {
        values.push(chain.step());
    }
    DiffChainPath { values, kind, start: x0 }
}

/// Closed box `B_r = [-r, r]^d`.
#[inline]
pub fn in_box(y: &Vector, r: f64) -> bool {
    y.sup_norm() <= r
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExitRecord {
    pub r: f64,
    /// First `k` with `Y_k` outside `B_r`, or the cap when `capped`.
    pub exit_time: u64,
    pub capped: bool,
}

/// Exit records of one chain from `0` for every radius in `r_grid`, all read
/// off a single run that stops at the exit from the largest box or the cap.
pub fn exit_records(chain: &mut DiffChain, r_grid: &[f64], step_cap: u64) -> Vec<ExitRecord> {
    let mut out: Vec<Option<u64>> = vec![None; r_grid.len()];
    let mut pending = r_grid.len();
    let mut k = 0u64;
    let mut y = chain.value();
    loop {
        let s = y.sup_norm();
        for (i, &r) in r_grid.iter().enumerate() {
            if out[i].is_none() && s > r {
                out[i] = Some(k);
                pending -= 1;
            }
        }
        if pending == 0 || k == step_cap {
            break;
        }
        y = chain.step();
        k += 1;
    }
    r_grid
        .iter()
        .zip(out)
        .map(|(&r, t)| match t {
            Some(t) => ExitRecord { r, exit_time: t, capped: false },
            None => ExitRecord { r, exit_time: step_cap, capped: true },
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExitScan {
    /// Mean exit time over uncapped runs against `r`, with a log-log fit.
    pub curve: ScanCurve,
    pub capped_fraction: Vec<f64>,
    pub replicas: usize,
    pub step_cap: u64,
}

/// `E_0[U_r]` for each `r` in `r_grid` from `replicas` chains started at 0.
/// Capped runs are counted in `capped_fraction` and left out of the mean.
pub fn exit_time_scan(
    ensemble: &Ensemble,
    r_grid: &[f64],
    replicas: usize,
    step_cap: u64,
    kind: DiffChainKind,
    workers: &Workers,
) -> Result<ExitScan, DiffChainError> {
    if r_grid.is_empty() || r_grid.iter().any(|&r| !(r >= 0.0)) || replicas == 0 {
        return Err(DiffChainError::InvalidArgument("need a nonempty grid of radii and at least one replica".into()));
    }
    let d = ensemble.dim();
    let runs = workers.map(replicas, |i| {
        let mut chain = DiffChain::new(ensemble, Vector::zeros(d), kind, i as u64);
        exit_records(&mut chain, r_grid, step_cap)
    });
    let mut estimates = Vec::with_capacity(r_grid.len());
    let mut errors = Vec::with_capacity(r_grid.len());
    let mut capped_fraction = Vec::with_capacity(r_grid.len());
    for (g, &r) in r_grid.iter().enumerate() {
        let times: Vec<f64> = runs.iter().filter(|rec| !rec[g].capped).map(|rec| rec[g].exit_time as f64).collect();
        if times.is_empty() {
            return Err(DiffChainError::AllCapped { r, replicas });
        }
        let e = mean_estimate(&times);
        estimates.push(e.value);
        errors.push(e.std_error);
        capped_fraction.push(1.0 - times.len() as f64 / replicas as f64);
    }
    Ok(ExitScan {
        curve: ScanCurve::new(r_grid.to_vec(), estimates, errors).with_fit(),
        capped_fraction,
        replicas,
        step_cap,
    })
}

/// Entrance and exit times of `B` along one chain of `steps` steps.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExcursionRecord {
    /// `V_0^in = 0, V_1^in, ...`
    pub entries: Vec<u64>,
    /// `V_1^out, V_2^out, ...`
    pub exits: Vec<u64>,
}

impl ExcursionRecord {
    /// Lengths `V_j^in - V_j^out` of the complete excursions.
    pub fn lengths(&self) -> Vec<u64> {
        self.exits.iter().zip(&self.entries[1..]).map(|(o, i)| i - o).collect()
    }

    /// `0 = V_0^in < V_1^out < V_1^in < V_2^out < ...`
    pub fn is_interleaved(&self) -> bool {
        if self.entries.first() != Some(&0) {
            return false;
        }
        let mut merged = Vec::with_capacity(self.entries.len() + self.exits.len());
        for j in 0..self.entries.len().max(self.exits.len()) {
            if let Some(&e) = self.entries.get(j) {
                merged.push(e);
            }
            if let Some(&o) = self.exits.get(j) {
                merged.push(o);
            }
        }
        let counts_ok = self.exits.len() == self.entries.len() || self.exits.len() + 1 == self.entries.len();
        counts_ok && merged.windows(2).all(|w| w[0] < w[1])
    }
}

/// Record the excursions of a chain (which must start inside `B_radius`)
/// out of the closed box over `steps` steps.
pub fn record_excursions(chain: &mut DiffChain, radius: f64, steps: u64) -> ExcursionRecord {
    let mut entries = vec![0u64];
    let mut exits = Vec::new();
    let mut inside = in_box(&chain.value(), radius);
    debug_assert!(inside, "excursion recording starts inside the box");
    for k in 1..=steps {
        let now = in_box(&chain.step(), radius);
        if inside && !now {
            exits.push(k);
        } else if !inside && now {
            entries.push(k);
        }
        inside = now;
    }
    ExcursionRecord { entries, exits }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExcursionScan {
    pub steps: u64,
    pub epsilon: f64,
    /// Box radius `steps^epsilon`.
    pub radius: f64,
    /// Nominal mixing order `p` the run is reported against; `p * epsilon <= 1`.
    pub nominal_p: f64,
    pub p_epsilon: f64,
    pub complete_excursions: usize,
    /// Excursions begun in the first half of the run.
    pub tail_sample: usize,
    /// `P{length >= a}` against `a`; the fitted exponent is the negated slope.
    pub tail: ScanCurve,
    pub tail_exponent: Option<ExponentFit>,
    pub interleaving_ok: bool,
}

/// Excursions of `Y` out of `B_{n^eps}` over runs of `n` steps.
///
/// The tail `P{length >= a}` is estimated from excursions that leave the box
/// during the first `n / 2` steps, so every length up to `n / 2` is observed
/// in full (an unfinished excursion still counts towards `length >= a` for
/// every `a` it has already reached). Grid points must not exceed `n / 2`.
pub fn excursion_scan(
    ensemble: &Ensemble,
    n: u64,
    epsilon: f64,
    nominal_p: f64,
    a_grid: &[f64],
    replicas: usize,
    workers: &Workers,
) -> Result<ExcursionScan, DiffChainError> {
    if !(epsilon > 0.0) || !(nominal_p > 0.0) {
        return Err(DiffChainError::InvalidArgument("epsilon and p must be positive".into()));
    }
    let p_epsilon = nominal_p * epsilon;
    if p_epsilon > 1.0 + 1e-12 {
        return Err(DiffChainError::InvalidArgument(format!("p * epsilon = {p_epsilon} exceeds 1")));
    }
    let half = n / 2;
    if a_grid.iter().any(|&a| !(a >= 1.0) || a > half as f64) {
        return Err(DiffChainError::InvalidArgument(format!("tail grid must lie in [1, {half}]")));
    }
    let radius = (n as f64).powf(epsilon);
    let d = ensemble.dim();
    let records = workers.map(replicas, |i| {
        let mut chain = DiffChain::new(ensemble, Vector::zeros(d), DiffChainKind::SameEnv, i as u64);
        record_excursions(&mut chain, radius, n)
    });
    let complete: usize = records.iter().map(|r| r.lengths().len()).sum();
    if complete < MIN_EXCURSIONS {
        return Err(DiffChainError::InsufficientExcursions { found: complete });
    }
    let interleaving_ok = records.iter().all(|r| r.is_interleaved());
    // Observed (possibly censored) lengths of excursions begun by n / 2.
    let mut observed = Vec::new();
    for rec in &records {
        for (j, &out) in rec.exits.iter().enumerate() {
            if out > half {
                break;
            }
            observed.push(rec.entries.get(j + 1).copied().unwrap_or(n) - out);
        }
    }
    let m = observed.len() as f64;
    let mut estimates = Vec::with_capacity(a_grid.len());
    let mut errors = Vec::with_capacity(a_grid.len());
    for &a in a_grid {
        let s = observed.iter().filter(|&&l| l as f64 >= a).count() as f64 / m;
        estimates.push(s);
        errors.push((s * (1.0 - s) / m).sqrt());
    }
    let tail = ScanCurve::new(a_grid.to_vec(), estimates, errors).with_fit();
    let tail_exponent = tail.fit.as_ref().map(ExponentFit::negated);
    Ok(ExcursionScan {
        steps: n,
        epsilon,
        radius,
        nominal_p,
        p_epsilon,
        complete_excursions: complete,
        tail_sample: observed.len(),
        tail,
        tail_exponent,
        interleaving_ok,
    })
}

/// `E_0[sum_{k<n} 1{Y_k in B_{n^eps}}]` for each `n` in `n_grid`, with the
/// growth exponent fitted on log-log scale.
pub fn occupation_time(
    ensemble: &Ensemble,
    n_grid: &[usize],
    epsilon: f64,
    replicas: usize,
    workers: &Workers,
) -> Result<ScanCurve, DiffChainError> {
    if n_grid.is_empty() || n_grid.windows(2).any(|w| w[0] >= w[1]) || n_grid[0] == 0 {
        return Err(DiffChainError::InvalidArgument("n grid must be positive and strictly increasing".into()));
    }
    if !(epsilon > 0.0) {
        return Err(DiffChainError::InvalidArgument("epsilon must be positive".into()));
    }
    let n_max = *n_grid.last().unwrap();
    let d = ensemble.dim();
    let counts: Vec<Vec<f64>> = workers.map(replicas, |i| {
        let mut chain = DiffChain::new(ensemble, Vector::zeros(d), DiffChainKind::SameEnv, i as u64);
        let mut norms = Vec::with_capacity(n_max);
        norms.push(chain.value().sup_norm());
        for _ in 1..n_max {
            norms.push(chain.step().sup_norm());
        }
        n_grid
            .iter()
            .map(|&n| {
                let r = (n as f64).powf(epsilon);
                norms[..n].iter().filter(|&&s| s <= r).count() as f64
            })
            .collect()
    });
    let mut estimates = Vec::with_capacity(n_grid.len());
    let mut errors = Vec::with_capacity(n_grid.len());
    for g in 0..n_grid.len() {
        let e = mean_estimate(&counts.iter().map(|c| c[g]).collect::<Vec<_>>());
        estimates.push(e.value);
        errors.push(e.std_error);
    }
    Ok(ScanCurve::new(n_grid.iter().map(|&n| n as f64).collect(), estimates, errors).with_fit())
}

/// Whether a chain started at `start` leaves `B_r` within `budget` steps
/// without entering `B_{r0}`. A start outside `B_r` has already left.
pub fn escapes(chain: &mut DiffChain, r: f64, r0: f64, budget: u64) -> bool {
    let mut y = chain.value();
    if !in_box(&y, r) {
        return true;
    }
    for _ in 0..budget {
        y = chain.step();
        let s = y.sup_norm();
        if s <= r0 {
            return false;
        }
        if s > r {
            return true;
        }
    }
    false
}

/// Integer points of the shell `B_r \ B_{r0}` in lexicographic order, thinned
/// to at most [`MAX_SHELL_STARTS`] by taking every `k`-th point.
pub fn shell_starts(dim: usize, r: f64, r0: f64) -> Vec<Vector> {
    let hi = r.floor() as i64;
    let side = (2 * hi + 1) as usize;
    let total = side.pow(dim as u32);
    let mut points = Vec::new();
    for mut idx in 0..total {
        let mut v = Vector::zeros(dim);
        for j in 0..dim {
            v[j] = (idx % side) as f64 - hi as f64;
            idx /= side;
        }
        if v.sup_norm() > r0 {
            points.push(v);
        }
    }
    let stride = points.len().div_ceil(MAX_SHELL_STARTS).max(1);
    points.into_iter().step_by(stride).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EscapeEstimate {
    pub r: f64,
    pub r0: f64,
    pub time_budget: u64,
    pub starts: Vec<Vector>,
    pub per_start: Vec<Estimate>,
    /// The smallest per-start estimate (the infimum over the shell).
    pub min: Estimate,
    pub mean: f64,
}

/// Escape probability from one start, chain replicas `offset..offset + replicas`.
pub fn escape_probability_from(
    ensemble: &Ensemble,
    start: Vector,
    r: f64,
    r0: f64,
    budget: u64,
    replicas: usize,
    offset: u64,
    workers: &Workers,
) -> Estimate {
    let hits = workers.map(replicas, |i| {
        let mut chain = DiffChain::new(ensemble, start, DiffChainKind::SameEnv, offset + i as u64);
        f64::from(u8::from(escapes(&mut chain, r, r0, budget)))
    });
    mean_estimate(&hits)
}

/// Escape-without-reentry probabilities over the shell design of
/// [`shell_starts`]; start `j` uses chain replicas `j * replicas ..`.
pub fn exit_escape_probability(
    ensemble: &Ensemble,
    r: f64,
    r0: f64,
    time_budget: u64,
    replicas: usize,
    workers: &Workers,
) -> Result<EscapeEstimate, DiffChainError> {
    if !(r0 >= 0.0 && r0 < r) {
        return Err(DiffChainError::InvalidArgument(format!("need 0 <= r0 < r, got r0 = {r0}, r = {r}")));
    }
    let starts = shell_starts(ensemble.dim(), r, r0);
    if starts.is_empty() {
        return Err(DiffChainError::InvalidArgument("shell contains no lattice points".into()));
    }
    let per_start: Vec<Estimate> = starts
        .iter()
        .enumerate()
        .map(|(j, &x)| escape_probability_from(ensemble, x, r, r0, time_budget, replicas, (j * replicas) as u64, workers))
        .collect();
    let min = *per_start
        .iter()
        .min_by(|a, b| a.value.total_cmp(&b.value))
        .expect("nonempty");
    let mean = per_start.iter().map(|e| e.value).sum::<f64>() / per_start.len() as f64;
    Ok(EscapeEstimate { r, r0, time_budget, starts, per_start, min, mean })
}
