//! Library results against independent test-side computations.

use std::collections::BTreeMap;

use rwre_lab::diff_chain::{exit_time_scan, DiffChainKind};
use rwre_lab::field::JumpLaw;
use rwre_lab::stats::{variance_scan, MeanSource};
use rwre_lab::walk::quenched_mean_exact;
use rwre_lab::{BiasLaw, Ensemble, Environment, ModelSpec, SiteFamily, Vector, Workers};

const LOW: f64 = 0.2;
const HIGH: f64 = 0.7;

fn two_point() -> SiteFamily {
    SiteFamily::NearestNeighbor { bias: BiasLaw::TwoPoint { low: LOW, high: HIGH } }
}

/// Sites `(k, x)` reachable by time `n`, in a fixed order.
fn sites(n: usize) -> Vec<(usize, i64)> {
    (0..n).flat_map(|k| (0..=k as i64).map(move |j| (k, 2 * j - k as i64))).collect()
}

/// `E^omega_0[X_n]` by dynamic programming over the light cone, where
/// `p(k, x)` is the probability of a `+1` step.
fn cone_mean(n: usize, p: impl Fn(usize, i64) -> f64) -> f64 {
    let mut dist: BTreeMap<i64, f64> = BTreeMap::from([(0, 1.0)]);
    for k in 0..n {
        let mut next = BTreeMap::new();
        for (&x, &m) in &dist {
            let q = p(k, x);
            *next.entry(x + 1).or_insert(0.0) += m * q;
            *next.entry(x - 1).or_insert(0.0) += m * (1.0 - q);
        }
        dist = next;
    }
    dist.iter().map(|(&x, &m)| x as f64 * m).sum()
}

/// Mean and variance of `E^omega_0[X_n]` by enumerating every environment on
/// the light cone (each site low or high with probability 1/2).
fn enumerate(n: usize) -> (f64, f64) {
    let s = sites(n);
    let index: BTreeMap<(usize, i64), usize> = s.iter().enumerate().map(|(i, &k)| (k, i)).collect();
    let total = 1u64 << s.len();
    let (mut m1, mut m2) = (0.0, 0.0);
    for mask in 0..total {
        let m = cone_mean(n, |k, x| if mask >> index[&(k, x)] & 1 == 1 { HIGH } else { LOW });
        m1 += m;
        m2 += m * m;
    }
    let w = 1.0 / total as f64;
    (m1 * w, m2 * w - (m1 * w).powi(2))
}

#[test]
fn two_point_enumeration_matches_the_variance_identity() {
    let mean_p = 0.5 * (LOW + HIGH);
    let var_p = 0.25 * (HIGH - LOW).powi(2);
    let v = 2.0 * mean_p - 1.0;
    // phi(0) = Var(2p - 1); distinct sites are independent, so phi(y) = 0 off 0.
    let phi0 = 4.0 * var_p;
    // Y stays at 0 when both walks step together.
    let stay0 = mean_p * mean_p + var_p + (1.0 - mean_p).powi(2) + var_p;
    let leave_each = 0.5 * (1.0 - stay0);
    let step_each = mean_p * (1.0 - mean_p);
    for n in 1..=5 {
        let (mean, var) = enumerate(n);
        assert!((mean - n as f64 * v).abs() < 1e-12, "n = {n}: mean {mean}");
        // sum_{k<n} P(Y_k = 0) phi(0) via the Y chain on 2Z.
        let mut y: BTreeMap<i64, f64> = BTreeMap::from([(0, 1.0)]);
        let mut rhs = 0.0;
        for _ in 0..n {
            rhs += phi0 * y.get(&0).copied().unwrap_or(0.0);
            let mut next = BTreeMap::new();
            for (&z, &m) in &y {
                let (up, down) = if z == 0 { (leave_each, leave_each) } else { (step_each, step_each) };
                *next.entry(z + 2).or_insert(0.0) += m * up;
                *next.entry(z - 2).or_insert(0.0) += m * down;
                *next.entry(z).or_insert(0.0) += m * (1.0 - up - down);
            }
            y = next;
        }
        assert!((var - rhs).abs() < 1e-12, "n = {n}: enumeration {var}, chain sum {rhs}");
    }
}

#[test]
fn two_point_variance_scan_agrees_with_enumeration() {
    let grid = [1, 2, 3, 4, 5];
    let ens = Ensemble::new(ModelSpec::lattice_product(1, two_point(), true).unwrap(), 21);
    let scan = variance_scan(&ens, &grid, 4000, MeanSource::Exact, &Workers::new(2)).unwrap();
    for (g, &n) in grid.iter().enumerate() {
        let (_, var) = enumerate(n);
        let (est, se) = (scan.curve.estimates[g], scan.curve.standard_errors[g]);
        assert!((est - var).abs() <= 4.0 * se, "n = {n}: {est} +- {se} vs {var}");
    }
}

#[test]
fn exact_propagation_matches_cone_recursion() {
    for seed in 0..5 {
        let env = Environment::lattice_product(seed, 1, two_point(), true).unwrap();
        let curve = quenched_mean_exact(&env, 12).unwrap();
        for n in [1usize, 2, 5, 12] {
            let want = cone_mean(n, |k, x| {
                let law = env.query(k as i64, &Vector::from_slice(&[x as f64]));
                let JumpLaw::Atomic { atoms } = &law else { panic!("atomic law expected") };
                atoms.iter().filter(|a| a.point[0] > 0.0).map(|a| a.weight).sum()
            });
            let got = curve.mean_at(n).unwrap()[0];
            assert!((got - want).abs() < 1e-12, "seed {seed}, n = {n}: {got} vs {want}");
        }
    }
}

#[test]
fn fully_correlated_quenched_mean_variance_is_n_over_three() {
    let spec = ModelSpec::fully_correlated(1, SiteFamily::NearestNeighbor { bias: BiasLaw::STANDARD_UNIFORM }).unwrap();
    let grid = [4, 16, 64, 256];
    let scan = variance_scan(&Ensemble::new(spec, 5), &grid, 3000, MeanSource::Exact, &Workers::new(2)).unwrap();
    for (g, &n) in grid.iter().enumerate() {
        let (est, se) = (scan.curve.estimates[g], scan.curve.standard_errors[g]);
        let want = n as f64 / 3.0;
        assert!((est - want).abs() <= 4.0 * se, "n = {n}: {est} +- {se} vs {want}");
    }
}

/// `E_0[U_r]` for a birth-death chain on `2Z` that moves `+-2` with
/// probability `q0` each from 0 and `q` each elsewhere, by solving the
/// absorption equations (Thomas algorithm).
fn exact_exit_time(r: f64, q0: f64, q: f64) -> f64 {
    let m = r.floor() as i64 / 2;
    let states: Vec<i64> = (-m..=m).collect();
    let len = states.len();
    let (mut a, mut b, mut c, mut d) = (vec![0.0; len], vec![0.0; len], vec![0.0; len], vec![1.0; len]);
    for (i, &k) in states.iter().enumerate() {
        let p = if k == 0 { q0 } else { q };
        b[i] = 2.0 * p;
        if i > 0 {
            a[i] = -p;
        }
        if i + 1 < len {
            c[i] = -p;
        }
    }
    for i in 1..len {
        let w = a[i] / b[i - 1];
        b[i] -= w * c[i - 1];
        d[i] -= w * d[i - 1];
    }
    let mut x = vec![0.0; len];
    x[len - 1] = d[len - 1] / b[len - 1];
    for i in (0..len - 1).rev() {
        x[i] = (d[i] - c[i] * x[i + 1]) / b[i];
    }
    x[m as usize]
}

fn check_exit_times(family: SiteFamily, q0: f64, q: f64) {
    let ens = Ensemble::new(ModelSpec::lattice_product(1, family, true).unwrap(), 17);
    let r = [2.0, 4.0, 8.0, 16.0];
    let scan = exit_time_scan(&ens, &r, 4000, 1_000_000, DiffChainKind::SameEnv, &Workers::new(2)).unwrap();
    for (g, &ri) in r.iter().enumerate() {
        let want = exact_exit_time(ri, q0, q);
        let (est, se) = (scan.curve.estimates[g], scan.curve.standard_errors[g]);
        assert!((est - want).abs() <= 4.0 * se, "r = {ri}: {est} +- {se} vs {want}");
    }
}

#[test]
fn y_exit_times_match_absorption_for_uniform_biases() {
    // From 0 both walks share a coin: P(Y_1 = 2) = E[p(1 - p)] = 1/6.
    check_exit_times(SiteFamily::NearestNeighbor { bias: BiasLaw::STANDARD_UNIFORM }, 1.0 / 6.0, 0.25);
}

#[test]
fn y_exit_times_match_absorption_for_fair_coin() {
    let fair = JumpLaw::atomic([(Vector::from_slice(&[1.0]), 0.5), (Vector::from_slice(&[-1.0]), 0.5)]).unwrap();
    check_exit_times(SiteFamily::Fixed(fair), 0.25, 0.25);
}

#[test]
fn exit_time_slope_oracle_is_inside_the_window() {
    let r = [4.0f64, 8.0, 16.0, 32.0];
    let ys: Vec<f64> = r.iter().map(|&ri| exact_exit_time(ri, 1.0 / 6.0, 0.25).ln()).collect();
    let xs: Vec<f64> = r.iter().map(|ri| ri.ln()).collect();
    let (mx, my) = (xs.iter().sum::<f64>() / 4.0, ys.iter().sum::<f64>() / 4.0);
    let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>() / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
    assert!((1.6..=2.4).contains(&slope), "{slope}");
    assert!((slope - 1.611).abs() < 1e-3, "{slope}");
}
