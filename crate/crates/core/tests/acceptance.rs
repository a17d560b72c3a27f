//! Acceptance run: one PASS/FAIL line per criterion, then a single assertion.
//!
//! Seeds come from the shipped configs and are never tuned after the fact.
//! Runtime limits are stated for four cores; on fewer cores they stretch by
//! `4 / cores`, since the expensive criteria parallelize over replicas.

use std::path::Path;
use std::time::{Duration, Instant};

use rwre_lab::experiment::{load_config, run, ExperimentConfig, ExperimentKind, Report};
use rwre_lab::stats::calibration::{fit_ci_coverage, ks_type_one_error};
use rwre_lab::walk::{
    quenched_mean_exact, quenched_mean_mc, scaled_path, simulate_averaged_path, simulate_quenched_path, Centering, ExactPropagator,
};
use rwre_lab::{BiasLaw, Displacement, Ensemble, Interpolation, JumpLaw, ModelSpec, SiteFamily, Vector, Workers};

mod common;

struct Line {
    passed: bool,
    detail: String,
}

fn cores() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn workers() -> Workers {
    Workers::new(cores())
}

fn config(name: &str) -> ExperimentConfig {
    load_config(&Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)).unwrap()
}

fn report(name: &str) -> Report {
    run(&config(name), &workers()).unwrap()
}

fn verdict(r: &Report, name: &str) -> (bool, f64) {
    let v = r.verdict(name).unwrap_or_else(|| panic!("{}: no verdict {name}", r.experiment));
    (v.passed, v.observed)
}

fn determinism() -> Line {
    let mut bad = Vec::new();
    for kind in ExperimentKind::ALL {
        let c = rwre_lab::experiment::parse_config(&common::small_config(kind, 2024)).unwrap();
        let runs: Vec<String> = [1, 1, 8, 8].iter().map(|&w| run(&c, &Workers::new(w)).unwrap().to_json()).collect();
        if runs.iter().any(|r| *r != runs[0]) {
            bad.push(kind.name());
        }
    }
    Line { passed: bad.is_empty(), detail: format!("10 experiment types x workers {{1, 8}} x 2 runs; differing: {bad:?}") }
}

fn moments() -> Line {
    let r = report("moments.toml");
    let (v_ok, v_z) = verdict(&r, "velocity matches closed form");
    let (d_ok, d_z) = verdict(&r, "diffusion matches closed form");
    Line { passed: v_ok && d_ok, detail: format!("|z(v)| = {v_z:.2}, |z(D)| = {d_z:.2} (limit 4) at 1e5 walks") }
}

fn exact_vs_mc() -> Line {
    let uniform = SiteFamily::NearestNeighbor { bias: BiasLaw::STANDARD_UNIFORM };
    let specs = [
        ModelSpec::lattice_product(1, uniform.clone(), true).unwrap(),
        ModelSpec::lattice_product(2, SiteFamily::NearestNeighbor { bias: BiasLaw::TwoPoint { low: 0.2, high: 0.9 } }, false).unwrap(),
        ModelSpec::finite_range(1, 2.5, uniform.clone(), Interpolation::Nearest).unwrap(),
        ModelSpec::fully_correlated(1, uniform).unwrap(),
    ];
    let grid = [1, 2, 4, 8, 16, 32];
    let mut worst: f64 = 0.0;
    let mut checks = 0;
    for (i, spec) in specs.into_iter().enumerate() {
        let ens = Ensemble::new(spec, 300 + i as u64);
        let env = ens.environment(0);
        let d = env.dim();
        let exact = quenched_mean_exact(&env, 32).unwrap();
        let mc = quenched_mean_mc(&env, Vector::zeros(d), &grid, 100_000, ens.walk_seed(0, 0), &workers()).unwrap();
        for (g, &n) in grid.iter().enumerate() {
            let e = exact.mean_at(n).unwrap();
            for j in 0..d {
                let se = mc.standard_errors[g][j];
                let diff = (mc.means[g][j] - e[j]).abs();
                worst = worst.max(if diff == 0.0 { 0.0 } else { diff / se });
                checks += 1;
            }
        }
    }
    Line { passed: worst <= 4.0, detail: format!("max |z| = {worst:.2} over {checks} components (4 lattice models, n <= 32, M = 1e5)") }
}

fn identity() -> Line {
    let c = config("identity-check.toml");
    let r = run(&c, &workers()).unwrap();
    let (ok, worst) = verdict(&r, "identity residuals");
    let n1 = r.rows.iter().find(|row| row.metric == "residual" && row.x == Some(1.0)).unwrap();
    let lhs1 = r.rows.iter().find(|row| row.metric == "lhs" && row.x == Some(1.0)).unwrap();
    let exact = n1.value.abs() <= 1e-12 * lhs1.value.abs().max(1.0);
    Line {
        passed: ok && exact,
        detail: format!("max |residual| / SE = {worst:.2} at n in {{1, 4, 8}} (limit 4); n = 1 residual {:.1e}", n1.value),
    }
}

fn dichotomy() -> Line {
    let fc = report("variance-scan-fully-correlated.toml");
    let mix = report("variance-scan.toml");
    let fit = |r: &Report| {
        let get = |m: &str| r.rows.iter().find(|row| row.metric == m).map(|row| row.value);
        (get("fit_exponent"), get("fit_ci_low"), get("fit_ci_high"))
    };
    let (Some(e_fc), Some(lo_fc), Some(hi_fc)) = fit(&fc) else { return Line { passed: false, detail: "no fit (fully correlated)".into() } };
    let (Some(e_mix), Some(lo_mix), Some(hi_mix)) = fit(&mix) else { return Line { passed: false, detail: "no fit (mixing)".into() } };
    let passed = (0.9..=1.1).contains(&e_fc) && e_mix < 0.9 && hi_mix < lo_fc;
    Line {
        passed,
        detail: format!("fully correlated {e_fc:.3} [{lo_fc:.3}, {hi_fc:.3}], mixing {e_mix:.3} [{lo_mix:.3}, {hi_mix:.3}]"),
    }
}

fn fclt() -> Line {
    let mix = report("fclt.toml");
    let (m_ok, m_n) = verdict(&mix, "marginals pass");
    let (c_ok, c_n) = verdict(&mix, "increment covariance");
    let ce = report("counterexample.toml");
    let (b_ok, b_n) = verdict(&ce, "velocity-centred path rejected");
    let (bt_ok, bt_n) = verdict(&ce, "quenched-mean-centred path accepted");
    Line {
        passed: m_ok && c_ok && b_ok && bt_ok,
        detail: format!(
            "mixing: KS passes in {m_n}/10, covariance in {c_n}/10; counterexample: B rejected in {b_n}/10, B~ accepted in {bt_n}/10 (need 8)"
        ),
    }
}

fn max_drift() -> Line {
    let (mix_ok, mix_n) = verdict(&report("max-drift.toml"), "max drift decay");
    let (fc_ok, fc_n) = verdict(&report("max-drift-fully-correlated.toml"), "max drift decay");
    Line { passed: mix_ok && fc_ok, detail: format!("halved by n = 4096: mixing {mix_n}/10 (need >= 8), counterexample {fc_n}/10 (need < 8)") }
}

fn ychain() -> Line {
    let exit = report("ychain-exit.toml");
    let (sym_ok, sym) = verdict(&exit, "one-step symmetry");
    let (slope_ok, slope) = verdict(&exit, "exit time slope");
    let (env_ok, _) = verdict(&exit, "exit time envelope");
    let exc = report("ychain-excursion.toml");
    let (tail_ok, tail) = verdict(&exc, "excursion tail exponent");
    let (il_ok, _) = verdict(&exc, "entry and exit times interleave");
    let (occ_ok, occ) = verdict(&report("occupation.toml"), "occupation exponent");
    Line {
        passed: sym_ok && slope_ok && env_ok && tail_ok && il_ok && occ_ok,
        detail: format!(
            "symmetry D/c = {sym:.2}; exit slope {slope:.3} in [1.6, 2.4] and <= 13; tail exponent {tail:.3} in [0.35, 0.65]; occupation exponent {occ:.3} < 1"
        ),
    }
}

fn degenerate() -> Line {
    let spec = ModelSpec::dirac(1, Displacement::Sign).unwrap();
    let ens = Ensemble::new(spec, 77);
    let mut problems = Vec::new();
    let eps = 1.0 / 256.0;
    for i in 0..20u64 {
        let env = ens.environment(i);
        let mut prop = ExactPropagator::new(&env, &Vector::zeros(1)).unwrap();
        for _ in 0..256 {
            prop.step().unwrap();
            let dist = prop.distribution();
            let m = dist.mean();
            let var = dist.expect(|x| (x[0] - m[0]).powi(2));
            if dist.support_size() != 1 || var != 0.0 {
                problems.push(format!("env {i}: quenched variance {var}"));
                break;
            }
        }
        let curve = quenched_mean_exact(&env, 256).unwrap();
        let path = simulate_quenched_path(&env, Vector::zeros(1), 256, ens.walk_seed(i, 0));
        let b = scaled_path(&path, eps, &[0.25, 0.5, 1.0], Centering::QuenchedMean(&curve)).unwrap();
        if b.values.iter().any(|v| v[0] != 0.0) {
            problems.push(format!("env {i}: B~ = {:?}", b.values));
        }
    }
    // Gaussian points leave the lattice; the quenched law is still a point mass.
    let gauss = Ensemble::new(ModelSpec::dirac(2, Displacement::Gaussian { std: 1.5 }).unwrap(), 78);
    let env = gauss.environment(0);
    let mc = quenched_mean_mc(&env, Vector::zeros(2), &[10, 100], 50, 5, &Workers::serial()).unwrap();
    if mc.standard_errors.iter().any(|s| *s != Vector::zeros(2)) {
        problems.push("gaussian displacements: walks disagree".into());
    }
    // Averaged walk: a simple random walk, E[X_n^2] = n exactly.
    let n = 400;
    let sq: Vec<f64> = (0..4000u64).map(|r| simulate_averaged_path(&ens, n, r).positions[n][0].powi(2)).collect();
    let e = rwre_lab::summary::mean_estimate(&sq);
    let diffusive = e.within(n as f64, 4.0);
    let law = ens.environment(0).query(0, &Vector::zeros(1));
    let point_mass = matches!(law, JumpLaw::Dirac { .. });
    Line {
        passed: problems.is_empty() && diffusive && point_mass,
        detail: format!("quenched variance 0 and B~ = 0 in 20 envs: {}; averaged E[X_400^2] = {:.1} +- {:.1} (target 400)", problems.is_empty(), e.value, e.std_error),
    }
}

fn calibration() -> Line {
    let ks = ks_type_one_error(400, 1000, 0.01, 31, &workers());
    let fit = fit_ci_coverage(400, 0.5, 0.05, 9, 32);
    let passed = (0.005..=0.05).contains(&ks.rate()) && fit.rate() >= 0.9;
    Line { passed, detail: format!("KS type-I rate {:.4} in [0.005, 0.05]; fit CI coverage {:.3} >= 0.90", ks.rate(), fit.rate()) }
}

#[test]
fn acceptance() {
    let criteria: [(&str, u64, fn() -> Line); 10] = [
        ("determinism", 0, determinism),
        ("moments", 10, moments),
        ("exact vs Monte Carlo quenched mean", 30, exact_vs_mc),
        ("variance identity", 120, identity),
        ("growth dichotomy", 300, dichotomy),
        ("quenched invariance principle", 600, fclt),
        ("max-drift decay", 180, max_drift),
        ("difference-chain structure", 300, ychain),
        ("degenerate regimes", 5, degenerate),
        ("self-calibration", 0, calibration),
    ];
    let stretch = (4.0 / cores() as f64).max(1.0);
    println!("{} core(s): runtime limits x {stretch}", cores());
    let mut failed = Vec::new();
    for (i, (name, limit, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let line = f();
        let took = start.elapsed();
        let limit = *limit as f64 * stretch;
        let in_time = limit == 0.0 || took <= Duration::from_secs_f64(limit);
        let passed = line.passed && in_time;
        let limit_text = if limit == 0.0 { String::new() } else { format!(" / limit {limit} s") };
        println!(
            "criterion {:>2} {} {name}: {} [{:.1} s{limit_text}]",
            i + 1,
            if passed { "PASS" } else { "FAIL" },
            line.detail,
            took.as_secs_f64()
        );
        if !passed {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "criteria failed: {failed:?}");
}
