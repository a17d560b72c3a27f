//! Experiment drivers: config in, report out.

use thiserror::Error;

use super::config::*;
use super::report::{Report, Row, Verdict};
use crate::diff_chain::{self, DiffChain, DiffChainError, DiffChainKind};
use crate::env::{Ensemble, Model, ModelSpec, Moments};
use crate::linalg::{Matrix, Vector};
use crate::parallel::Workers;
use crate::stats::{self, ExponentFit, FcltCentering, FcltError, MeanSource, ScanCurve};
use crate::summary::Estimate;
use crate::walk::{self, WalkError};

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Walk(#[from] WalkError),
    #[error(transparent)]
    DiffChain(#[from] DiffChainError),
    #[error(transparent)]
    Fclt(#[from] FcltError),
}

/// Run one experiment. The report depends on the config and seed only.
pub fn run(config: &ExperimentConfig, workers: &Workers) -> Result<Report, RunError> {
    let spec = config.model_spec()?;
    let moments = spec.moments().ok_or_else(|| ConfigError::Invalid("model has no closed-form moments".into()))?;
    let ensemble = Ensemble::new(spec.clone(), config.master_seed);
    let mut out = Output::default();
    match &config.params {
        ExperimentParams::Moments(p) => moments_exp(&ensemble, &moments, p, workers, &mut out),
        ExperimentParams::VarianceScan(p) => variance_exp(&ensemble, p, workers, &mut out)?,
        ExperimentParams::PhiDecay(p) => phi_exp(&ensemble, &moments, p, workers, &mut out),
        ExperimentParams::IdentityCheck(p) => identity_exp(&ensemble, p, workers, &mut out)?,
        ExperimentParams::Fclt(p) => {
            let diffusion = match p.diffusion {
                DiffusionName::Averaged => moments.diffusion,
                DiffusionName::Quenched => moments.quenched_diffusion(),
            };
            let centering = match p.centering {
                CenteringName::Velocity => FcltCentering::Velocity,
                CenteringName::QuenchedMean => FcltCentering::QuenchedMean,
            };
            let fp = FcltPlan { env_seeds: p.env_seeds, epsilon: p.epsilon, t: &p.t, walks: p.walks, alpha: p.alpha };
            let pairs: Vec<(f64, f64)> = p.covariance_pairs.iter().map(|&[s, t]| (s, t)).collect();
            let runs = fclt_runs(&ensemble, &moments, &fp, &diffusion, centering, &pairs, "fclt", workers, &mut out)?;
            let passing = runs.iter().filter(|r| r.marginals_pass(p.alpha)).count();
            out.verdict(Verdict::new(
                "marginals pass",
                passing >= p.min_pass,
                passing as f64,
                format!(">= {} of {} environments at alpha = {}", p.min_pass, p.env_seeds, p.alpha),
            ));
            if !pairs.is_empty() {
                let tol = p.covariance_tolerance_se;
                let good = runs.iter().filter(|r| r.covariances.iter().all(|c| c.within(tol))).count();
                out.verdict(Verdict::new(
                    "increment covariance",
                    good >= p.min_pass,
                    good as f64,
                    format!(">= {} of {} environments within {tol} SE", p.min_pass, p.env_seeds),
                ));
            }
        }
        ExperimentParams::MaxDrift(p) => max_drift_exp(&ensemble, &moments, p, workers, &mut out)?,
        ExperimentParams::YchainExit(p) => exit_exp(&ensemble, p, workers, &mut out)?,
        ExperimentParams::YchainExcursion(p) => excursion_exp(&ensemble, p, workers, &mut out)?,
        ExperimentParams::Occupation(p) => {
            let curve = diff_chain::occupation_time(&ensemble, &p.n, p.epsilon, p.replicas, workers)?;
            out.curve("occupation", "mean_occupation", &curve);
            let fit = out.fit("occupation", &curve);
            out.verdict(Verdict::new(
                "occupation exponent",
                fit.is_some_and(|f| f.exponent < p.exponent_max),
                fit.map_or(f64::NAN, |f| f.exponent),
                format!("< {}", p.exponent_max),
            ));
        }
        ExperimentParams::Counterexample(p) => counterexample_exp(&ensemble, &moments, p, workers, &mut out)?,
    }
    Ok(Report::new(config, spec.name().to_string(), out.rows, out.verdicts))
}

#[derive(Default)]
struct Output {
    rows: Vec<Row>,
    verdicts: Vec<Verdict>,
}

impl Output {
    fn row(&mut self, r: Row) {
        self.rows.push(r);
    }

    fn verdict(&mut self, v: Verdict) {
        self.verdicts.push(v);
    }

    fn curve(&mut self, section: &str, metric: &str, c: &ScanCurve) {
        for i in 0..c.len() {
            self.row(Row::new(section, metric, c.estimates[i]).at(c.grid[i]).se(c.standard_errors[i]));
        }
    }

    /// Fit rows for `curve`; returns the fit when one exists.
    fn fit(&mut self, section: &str, c: &ScanCurve) -> Option<ExponentFit> {
        if let Some(f) = c.fit {
            self.row(Row::new(section, "fit_exponent", f.exponent).se(f.std_error));
            self.row(Row::new(section, "fit_ci_low", f.ci_low));
            self.row(Row::new(section, "fit_ci_high", f.ci_high));
            self.row(Row::new(section, "fit_points", f.points_used as f64));
        }
        c.fit
    }
}

fn moments_exp(ens: &Ensemble, m: &Moments, p: &MomentsParams, workers: &Workers, out: &mut Output) {
    let est = walk::velocity_and_covariance(ens, p.env_replicas, p.walks_per_env, workers);
    let d = ens.dim();
    let tol = p.tolerance_se;
    let mut worst_v: f64 = 0.0;
    for j in 0..d {
        let e = Estimate { value: est.velocity[j], std_error: est.velocity_se[j] };
        worst_v = worst_v.max(e.z_score(m.velocity[j]));
        out.row(Row::new("velocity", "v", e.value).coord(j).se(e.std_error).reference(m.velocity[j]));
    }
    let mut worst_d: f64 = 0.0;
    for i in 0..d {
        for j in 0..d {
            let e = Estimate { value: est.diffusion.get(i, j), std_error: est.diffusion_se.get(i, j) };
            worst_d = worst_d.max(e.z_score(m.diffusion.get(i, j)));
            out.row(
                Row::new("diffusion", "D", e.value)
                    .at(i as f64)
                    .coord(j)
                    .se(e.std_error)
                    .reference(m.diffusion.get(i, j)),
            );
        }
    }
    out.row(Row::new("samples", "count", est.samples as f64));
    out.verdict(Verdict::new("velocity matches closed form", worst_v <= tol, worst_v, format!("max |z| <= {tol}")));
    out.verdict(Verdict::new("diffusion matches closed form", worst_d <= tol, worst_d, format!("max |z| <= {tol}")));
}

fn variance_exp(ens: &Ensemble, p: &VarianceScanParams, workers: &Workers, out: &mut Output) -> Result<(), RunError> {
    let method = match p.method {
        MeanMethodName::Exact => MeanSource::Exact,
        MeanMethodName::MonteCarlo => MeanSource::MonteCarlo { walks: p.walks },
    };
    let scan = stats::variance_scan(ens, &p.n, p.replicas, method, workers)?;
    out.curve("variance", "var_quenched_mean", &scan.curve);
    let fit = out.fit("variance", &scan.curve);
    let observed = fit.map_or(f64::NAN, |f| f.exponent);
    if let Some(lo) = p.exponent_min {
        out.verdict(Verdict::new("exponent lower bound", fit.is_some_and(|f| f.exponent >= lo), observed, format!(">= {lo}")));
    }
    if let Some(hi) = p.exponent_max {
        out.verdict(Verdict::new("exponent upper bound", fit.is_some_and(|f| f.exponent <= hi), observed, format!("<= {hi}")));
    }
    Ok(())
}

/// Closed-form `phi` at distance `s` along the first axis, where the cell
/// structure makes it known: the origin always, separate cells (zero), and
/// the fully correlated model (constant).
pub fn phi_reference(spec: &ModelSpec, s: f64) -> Option<f64> {
    let trace = spec.moments()?.drift_covariance.trace();
    if s == 0.0 {
        return Some(trace);
    }
    match spec.model() {
        Model::FullyCorrelated { .. } => Some(trace),
        Model::LatticeProduct { .. } | Model::DiracField { .. } if s.abs() >= 1.0 => Some(0.0),
        Model::FiniteRange { range, .. } if s.abs() >= *range => Some(0.0),
        _ => None,
    }
}

fn phi_exp(ens: &Ensemble, _m: &Moments, p: &PhiParams, workers: &Workers, out: &mut Output) {
    let d = ens.dim();
    let points: Vec<Vector> = p.distances.iter().map(|&s| Vector::along_first_axis(d, s)).collect();
    let phi = stats::estimate_phi(ens, &points, p.replicas, workers);
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    for (s, e) in p.distances.iter().zip(&phi.values) {
        let mut row = Row::new("phi", "phi", e.value).at(*s).se(e.std_error);
        if let Some(r) = phi_reference(ens.spec(), *s) {
            row = row.reference(r);
            worst = worst.max(e.z_score(r));
            checked += 1;
        }
        out.row(row);
    }
    if checked > 0 {
        let tol = p.tolerance_se;
        out.verdict(Verdict::new("phi matches closed form", worst <= tol, worst, format!("max |z| <= {tol} over {checked} points")));
    }
}

fn identity_exp(ens: &Ensemble, p: &IdentityParams, workers: &Workers, out: &mut Output) -> Result<(), RunError> {
    let check = stats::variance_identity_check(ens, &p.n, p.env_replicas, p.y_replicas, workers)?;
    let mut worst: f64 = 0.0;
    for r in &check.rows {
        let n = r.n as f64;
        out.row(Row::new("identity", "lhs", r.lhs.value).at(n).se(r.lhs.std_error));
        out.row(Row::new("identity", "rhs", r.rhs.value).at(n).se(r.rhs.std_error));
        out.row(Row::new("identity", "residual", r.residual).at(n).se(r.combined_se));
        worst = worst.max(r.z());
    }
    out.row(Row::new("identity", "phi_points", check.phi_points as f64));
    let tol = p.tolerance_se;
    out.verdict(Verdict::new("identity residuals", worst <= tol, worst, format!("max |z| <= {tol}")));
    Ok(())
}

struct FcltPlan<'a> {
    env_seeds: usize,
    epsilon: f64,
    t: &'a [f64],
    walks: usize,
    alpha: f64,
}

#[allow(clippy::too_many_arguments)]
fn fclt_runs(
    ens: &Ensemble,
    m: &Moments,
    plan: &FcltPlan,
    diffusion: &Matrix,
    centering: FcltCentering,
    pairs: &[(f64, f64)],
    section: &str,
    workers: &Workers,
    out: &mut Output,
) -> Result<Vec<stats::FcltReport>, RunError> {
    let mut runs = Vec::with_capacity(plan.env_seeds);
    for s in 0..plan.env_seeds as u64 {
        let env = ens.environment(s);
        let rep = stats::fclt_check(
            &env,
            plan.epsilon,
            plan.t,
            plan.walks,
            ens.walk_seed(s, 0),
            diffusion,
            m.velocity,
            centering,
            pairs,
            workers,
        )?;
        for mt in &rep.marginals {
            let base = |metric: &str, v: f64| Row::new(section, metric, v).replica(s).at(mt.t).coord(mt.coordinate);
            out.row(base("ks_statistic", mt.result.statistic));
            out.row(base("ks_p_value", mt.result.p_value).reference(plan.alpha));
        }
        for c in &rep.covariances {
            out.row(
                Row::new(section, "covariance", c.estimate.value)
                    .replica(s)
                    .at2(c.s, c.t)
                    .coord(c.coordinate)
                    .se(c.estimate.std_error)
                    .reference(c.target),
            );
        }
        runs.push(rep);
    }
    Ok(runs)
}

fn max_drift_exp(ens: &Ensemble, m: &Moments, p: &MaxDriftParams, workers: &Workers, out: &mut Output) -> Result<(), RunError> {
    let scan = stats::max_drift_check(ens, p.replicas, &p.n, m.velocity, workers)?;
    for (i, r) in scan.per_replica.iter().enumerate() {
        for (g, v) in r.iter().enumerate() {
            out.row(Row::new("max_drift", "scaled_max_drift", *v).replica(i as u64).at(scan.n_grid[g] as f64));
        }
    }
    out.curve("max_drift", "mean_scaled_max_drift", &scan.curve);
    let halved = scan.halved_count();
    let (passed, need) = match p.expect {
        DriftExpectation::Decay => (halved >= p.min_pass, format!(">= {} of {} halve", p.min_pass, p.replicas)),
        DriftExpectation::NoDecay => (halved < p.min_pass, format!("< {} of {} halve", p.min_pass, p.replicas)),
    };
    out.verdict(Verdict::new("max drift decay", passed, halved as f64, need));
    Ok(())
}

fn exit_exp(ens: &Ensemble, p: &YchainExitParams, workers: &Workers, out: &mut Output) -> Result<(), RunError> {
    let scan = diff_chain::exit_time_scan(ens, &p.r, p.replicas, p.step_cap, DiffChainKind::SameEnv, workers)?;
    out.curve("exit", "mean_exit_time", &scan.curve);
    for (r, f) in p.r.iter().zip(&scan.capped_fraction) {
        out.row(Row::new("exit", "capped_fraction", *f).at(*r));
    }
    let fit = out.fit("exit", &scan.curve);
    let slope = fit.map_or(f64::NAN, |f| f.exponent);
    out.verdict(Verdict::new(
        "exit time slope",
        fit.is_some_and(|f| f.exponent >= p.slope_min && f.exponent <= p.slope_max),
        slope,
        format!("in [{}, {}]", p.slope_min, p.slope_max),
    ));
    out.verdict(Verdict::new("exit time envelope", fit.is_some_and(|f| f.exponent <= p.envelope), slope, format!("<= {}", p.envelope)));

    if p.symmetry_samples > 0 {
        let d = ens.dim();
        let first = p.replicas as u64;
        let steps: Vec<Vector> = workers.map(p.symmetry_samples, |i| {
            DiffChain::new(ens, Vector::zeros(d), DiffChainKind::SameEnv, first + i as u64).step()
        });
        let mut worst: f64 = 0.0;
        let mut all = true;
        for j in 0..d {
            let xs: Vec<f64> = steps.iter().map(|y| y[j]).collect();
            let sym = stats::symmetry_check(&xs, p.symmetry_alpha);
            out.row(Row::new("symmetry", "two_sample_distance", sym.distance).coord(j).reference(sym.critical_value));
            worst = worst.max(sym.distance / sym.critical_value);
            all &= sym.passes();
        }
        out.verdict(Verdict::new("one-step symmetry", all, worst, format!("distance / critical value <= 1 at alpha = {}", p.symmetry_alpha)));
    }

    if !p.escape_r.is_empty() {
        let mut lowest = f64::INFINITY;
        for &r in &p.escape_r {
            let budget = (p.escape_budget_factor * r.powi(3)).ceil().max(1.0) as u64;
            let e = diff_chain::exit_escape_probability(ens, r, p.escape_r0, budget, p.escape_replicas, workers)?;
            out.row(Row::new("escape", "min_escape_probability", e.min.value).at(r).se(e.min.std_error));
            out.row(Row::new("escape", "mean_escape_probability", e.mean).at(r));
            out.row(Row::new("escape", "r_times_min", r * e.min.value).at(r));
            lowest = lowest.min(r * e.min.value);
        }
        out.verdict(Verdict::new("escape probability times r stays positive", lowest > 0.0, lowest, "> 0"));
    }
    Ok(())
}

fn excursion_exp(ens: &Ensemble, p: &ExcursionParams, workers: &Workers, out: &mut Output) -> Result<(), RunError> {
    let scan = diff_chain::excursion_scan(ens, p.n, p.epsilon, p.nominal_p, &p.a, p.replicas, workers)?;
    out.row(Row::new("excursion", "radius", scan.radius));
    out.row(Row::new("excursion", "p_epsilon", scan.p_epsilon));
    out.row(Row::new("excursion", "complete_excursions", scan.complete_excursions as f64));
    out.row(Row::new("excursion", "tail_sample", scan.tail_sample as f64));
    out.curve("excursion", "tail_probability", &scan.tail);
    out.fit("excursion", &scan.tail);
    let exponent = scan.tail_exponent.map_or(f64::NAN, |f| f.exponent);
    out.verdict(Verdict::new(
        "excursion tail exponent",
        scan.tail_exponent.is_some_and(|f| f.exponent >= p.exponent_min && f.exponent <= p.exponent_max),
        exponent,
        format!("in [{}, {}]", p.exponent_min, p.exponent_max),
    ));
    out.verdict(Verdict::new("entry and exit times interleave", scan.interleaving_ok, f64::from(u8::from(scan.interleaving_ok)), "= 1"));
    Ok(())
}

fn counterexample_exp(ens: &Ensemble, m: &Moments, p: &CounterexampleParams, workers: &Workers, out: &mut Output) -> Result<(), RunError> {
    let plan = FcltPlan { env_seeds: p.env_seeds, epsilon: p.epsilon, t: &p.t, walks: p.walks, alpha: p.alpha };
    let pairs = [(0.5, 1.0)];
    let velocity = fclt_runs(ens, m, &plan, &m.diffusion, FcltCentering::Velocity, &pairs, "velocity_centred", workers, out)?;
    let quenched_d = m.quenched_diffusion();
    let quenched = fclt_runs(ens, m, &plan, &quenched_d, FcltCentering::QuenchedMean, &pairs, "quenched_mean_centred", workers, out)?;
    let fails = velocity.iter().filter(|r| !r.marginals_pass(p.alpha)).count();
    let passes = quenched.iter().filter(|r| r.marginals_pass(p.alpha)).count();
    out.verdict(Verdict::new(
        "velocity-centred path rejected",
        fails >= p.min_pass,
        fails as f64,
        format!(">= {} of {} environments fail at alpha = {}", p.min_pass, p.env_seeds, p.alpha),
    ));
    out.verdict(Verdict::new(
        "quenched-mean-centred path accepted",
        passes >= p.min_pass,
        passes as f64,
        format!(">= {} of {} environments pass at alpha = {}", p.min_pass, p.env_seeds, p.alpha),
    ));
    Ok(())
}
