//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::Rng;

use excesslab::extremal::{compactify, extract_mass_at_infinity, maximize, objective_tilde, MaximizeOptions};
use excesslab::functionals::{delta, minkowski_g, minkowski_g_prime};
use excesslab::inequalities::{
    check_chebyshev_integral, check_excess_holder, check_excess_minkowski, check_lemma_abc_bound,
    check_lemma_abc_monotone, check_lyapunov, check_young, sweep, SweepConfig,
};
use excesslab::sample::{random_joint, random_marginal, substream, InstanceShape};
use excesslab::scalar_analysis::{
    bernoulli_second_derivative, delta_t, f_of_t, h_chain, h_sum, measure_bernoulli_second_derivative,
    substitution_identity,
};
use excesslab::search::{minkowski_counterexample, paper_counterexample, ViolationCertificate};
use excesslab::{Axis, Exponents, MassAtInfinity};

const SWEEP_TRIALS: usize = 100_000;
const SWEEP_BUDGET: Duration = Duration::from_secs(60);
const CERT_PAIRS: [(f64, f64); 12] = [
    (2.5, 0.25), (2.5, 0.5), (2.5, 1.0),
    (3.0, 0.25), (3.0, 0.5), (3.0, 1.0),
    (4.0, 0.25), (4.0, 0.5), (4.0, 1.0),
    (10.0, 0.25), (10.0, 0.5), (10.0, 1.0),
];
const SECOND_DERIVATIVE_REL: f64 = 1e-3;
const P_GRID: usize = 19;
const S_GRID: usize = 2000;
const S_MAX: f64 = 50.0;
const H_FLOOR: f64 = -1e-12;
const LEMMA_INSTANCES: usize = 1000;
const COMPACT_INSTANCES: usize = 1000;
const COMPACT_TOL: f64 = 1e-10;
const ROUND_TRIP_TOL: f64 = 1e-12;
const SPECS: usize = 100;
const RESTARTS: usize = 64;
const N_SUPPORT: usize = 6;
const VALUE_CEILING: f64 = 1e-6;
const FEASIBILITY_TOL: f64 = 1e-8;
const LAGRANGE_TOL: f64 = 1e-4;
const DERIVATIVE_INSTANCES: usize = 100;
const ORIGIN_TOL: f64 = 1e-4;
const CONVEXITY_FLOOR: f64 = -1e-8;
const BASELINE_TRIALS: usize = 10_000;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn sweep_criterion() -> Outcome {
    let start = Instant::now();
    let s = sweep(&SweepConfig { trials: SWEEP_TRIALS, seed: 1, ..SweepConfig::default() }).map_err(err)?;
    let elapsed = start.elapsed();
    ensure(s.violations == 0, || format!("{} violations, worst relative gap {:e}", s.violations, s.worst_gap))?;
    ensure(elapsed <= SWEEP_BUDGET, || format!("took {elapsed:?}"))?;
    Ok(format!("{} trials, 0 violations, worst relative gap {:.3e}, {:.1?}", s.trials, s.worst_gap, elapsed))
}

fn certificate(p: f64, theta: f64) -> Result<(), String> {
    let e = Exponents::new(p, theta).map_err(err)?;
    let check = |name: &str, c: excesslab::Result<ViolationCertificate>| -> Result<(), String> {
        let c = c.map_err(|x| format!("{name}: {x}"))?;
        c.verify().map_err(|x| format!("{name}: {x}"))
    };
    let holder = check("second inequality", paper_counterexample(&e));
    let mink = check("first inequality", minkowski_counterexample(&e));
    let closed = bernoulli_second_derivative(&e).map_err(err)?;
    let measured = measure_bernoulli_second_derivative(&e).map_err(err)?;
    let derivative = ensure((measured - closed).abs() <= SECOND_DERIVATIVE_REL * closed.abs(), || {
        format!("delta''(0+) measured {measured:e}, closed form {closed:e}")
    });
    let fails: Vec<String> = [holder, mink, derivative].into_iter().filter_map(Result::err).collect();
    ensure(fails.is_empty(), || fails.join("; "))
}

fn counterexample_criterion() -> Outcome {
    let mut fails = Vec::new();
    for (p, theta) in CERT_PAIRS {
        if let Err(e) = certificate(p, theta) {
            fails.push(format!("(p {p}, theta {theta}) {e}"));
        }
    }
    let third = bernoulli_second_derivative(&Exponents::new(3.0, 1.0).map_err(err)?).map_err(err)?;
    if (third - 1.0f64 / 3.0).abs() > 1e-15 {
        fails.push(format!("p = 3, theta = 1 gives {third}, not 1/3"));
    }
    ensure(fails.is_empty(), || format!("{} of {} pairs: {}", fails.len(), CERT_PAIRS.len(), fails.join(" | ")))?;
    Ok(format!("{} pairs certified for both inequalities", CERT_PAIRS.len()))
}

fn scalar_criterion() -> Outcome {
    let mut min_h = f64::INFINITY;
    for i in 0..P_GRID {
        let p = 1.05 + 0.05 * i as f64;
        let zero = h_chain(p, 0.0).map_err(err)?.h;
        let rounding = 8.0 * f64::EPSILON * h_sum(p).terms().iter().map(|t| t.0.abs()).sum::<f64>();
        ensure(zero.abs() <= rounding, || format!("p {p}: h(0) = {zero:e}"))?;
        for j in 0..S_GRID {
            let s = S_MAX * j as f64 / (S_GRID - 1) as f64;
            let c = h_chain(p, s).map_err(err)?;
            min_h = min_h.min(c.h);
            ensure(c.h >= H_FLOOR, || format!("p {p}, s {s}: h = {:e}", c.h))?;
            ensure(c.h2_prime > 0.0, || format!("p {p}, s {s}: h2' = {:e}", c.h2_prime))?;
            let r = substitution_identity(p, s).map_err(err)?;
            ensure(r.holds, || format!("p {p}, s {s}: substitution identity gap {:e}", r.gap))?;
        }
    }
    Ok(format!("{P_GRID} x {S_GRID} grid, min h {min_h:.3e}"))
}

fn lemma_criterion() -> Outcome {
    let grid: Vec<f64> = (1..=40).map(|i| 0.05 * (i * i) as f64).collect();
    let mut worst_slope = f64::NEG_INFINITY;
    for k in 0..LEMMA_INSTANCES {
        let mut rng = substream(4, k as u64);
        let d = random_joint(&mut rng, InstanceShape::new(8, 10.0));
        let p = rng.gen_range(1.01..1.99);
        let e = Exponents::new(p, 1.0).map_err(err)?;
        let gamma = rng.gen_range(0.05..5.0);
        let shift = rng.gen_range(0.0..1.0);
        let b_grid: Vec<f64> = grid.iter().map(|b| b + shift).collect();
        let r = check_lemma_abc_monotone(&d, &e, gamma, &b_grid).map_err(err)?;
        worst_slope = worst_slope.max(r.lhs);
        ensure(r.holds, || format!("instance {k}: {r:?}"))?;
        let (b, c) = (rng.gen_range(0.0..20.0), rng.gen_range(0.0..20.0));
        let m = MassAtInfinity::new(0.0, b, c).map_err(err)?;
        let m = MassAtInfinity { a: rng.gen_range(0.0..=1.0) * m.holder_bound(&e), ..m };
        let r = check_lemma_abc_bound(&d, &e, &m).map_err(err)?;
        ensure(r.holds, || format!("instance {k}: {r:?}"))?;
    }
    Ok(format!("{LEMMA_INSTANCES} instances, largest slope {worst_slope:.3e}"))
}

fn compactify_criterion() -> Outcome {
    let mut worst = 0f64;
    for k in 0..COMPACT_INSTANCES {
        let mut rng = substream(5, k as u64);
        let d = random_joint(&mut rng, InstanceShape::new(8, 10.0).positive());
        let e = Exponents::new(rng.gen_range(1.01..4.0), 1.0).map_err(err)?;
        let (pt, spec) = compactify(&d, &e).map_err(err)?;
        let (lhs, rhs) = (objective_tilde(&pt, &spec, &e).map_err(err)?, delta(&d, &e).map_err(err)?);
        let defect = (lhs - rhs).abs() / 1f64.max(rhs.abs());
        worst = worst.max(defect);
        ensure(defect <= COMPACT_TOL, || format!("instance {k}: {lhs:e} vs {rhs:e}"))?;
        let (back, m) = extract_mass_at_infinity(&pt, &e).map_err(err)?;
        ensure(m == MassAtInfinity::zero() && back.approx_eq(&d, ROUND_TRIP_TOL), || format!("instance {k}: round trip gave {back:?}, {m:?}"))?;
    }
    Ok(format!("{COMPACT_INSTANCES} distributions, worst relative defect {worst:.3e}, round trips exact"))
}

fn extremal_criterion() -> Outcome {
    let (mut worst_v, mut worst_f, mut worst_l) = (f64::NEG_INFINITY, 0f64, 0f64);
    let mut record = |r: &excesslab::extremal::MaximizeResult, label: &str| -> Result<(), String> {
        worst_f = worst_f.max(r.feasibility_residual);
        worst_l = worst_l.max(r.lagrange_residual);
        ensure(r.feasible && r.feasibility_residual <= FEASIBILITY_TOL, || format!("{label}: feasibility {:e}", r.feasibility_residual))?;
        ensure(r.lagrange_residual <= LAGRANGE_TOL, || format!("{label}: Lagrange residual {:e}", r.lagrange_residual))
    };
    for k in 0..SPECS {
        let mut rng = substream(6, k as u64);
        let d = random_joint(&mut rng, InstanceShape::new(4, 10.0).positive());
        let p = [1.25, 1.5, 1.75][k % 3];
        let e = Exponents::new(p, 1.0).map_err(err)?;
        let (_, spec) = compactify(&d, &e).map_err(err)?;
        let opts = MaximizeOptions { n_support: N_SUPPORT, restarts: RESTARTS, seed: k as u64, ..Default::default() };
        let r = maximize(&spec, &e, &opts).map_err(err)?;
        worst_v = worst_v.max(r.value);
        ensure(r.value <= VALUE_CEILING, || format!("spec {k} (p {p}): value {:e}", r.value))?;
        record(&r, &format!("spec {k}"))?;
    }
    let e = Exponents::new(3.0, 1.0).map_err(err)?;
    let cert = paper_counterexample(&e).map_err(err)?;
    let (_, spec) = compactify(&cert.dist().map_err(err)?, &e).map_err(err)?;
    let opts = MaximizeOptions { n_support: N_SUPPORT, restarts: RESTARTS, ..Default::default() };
    let r = maximize(&spec, &e, &opts).map_err(err)?;
    ensure(r.value > 0.0, || format!("p = 3 spec: value {:e}", r.value))?;
    record(&r, "p = 3 spec")?;
    Ok(format!(
        "{SPECS} specs, largest value {worst_v:.3e}; p = 3 value {:.4e}; worst feasibility {worst_f:.2e}, Lagrange {worst_l:.2e}",
        r.value
    ))
}

fn derivative_criterion() -> Outcome {
    let mut worst = 0f64;
    for k in 0..DERIVATIVE_INSTANCES {
        let mut rng = substream(7, k as u64);
        let d = random_joint(&mut rng, InstanceShape::new(8, 10.0).positive());
        let e = Exponents::new(rng.gen_range(1.01..4.0), rng.gen_range(0.0..=1.0)).map_err(err)?;
        let t = rng.gen_range(0.05..2.0);
        let h = 1e-5;
        let fd = (minkowski_g(&d, &e, t + h).map_err(err)? - minkowski_g(&d, &e, t - h).map_err(err)?) / (2.0 * h);
        let closed = minkowski_g_prime(&d, &e, t).map_err(err)?;
        let allowed = 1e-6f64.max(1e-4 * closed.abs());
        worst = worst.max((fd - closed).abs() / allowed);
        ensure((fd - closed).abs() <= allowed, || format!("instance {k}: g' {closed:e}, difference quotient {fd:e}"))?;

        let x = loop {
            let x = random_marginal(&mut rng, InstanceShape::new(8, 10.0).positive());
            if x.values().iter().any(|v| (v - x.values()[0]).abs() > 1e-2) {
                break x;
            }
        };
        let sc = 1f64.max(x.values().iter().zip(x.weights()).map(|(v, w)| w * v.powf(e.p())).sum());
        let dt = |t: f64| delta_t(&x, &e, t).map_err(err);
        let slope = (-3.0 * dt(0.0)? + 4.0 * dt(h)? - dt(2.0 * h)?) / (2.0 * h);
        ensure(dt(0.0)?.abs() <= ORIGIN_TOL * sc && slope.abs() <= ORIGIN_TOL * sc, || {
            format!("instance {k}: delta(0) {:e}, delta'(0+) {slope:e}", dt(0.0).unwrap_or(f64::NAN))
        })?;

        let p = rng.gen_range(1.01..1.99);
        let f = |t: f64| f_of_t(&x, p, t).map_err(err);
        for i in 1..80 {
            let t = 0.125 * i as f64;
            let second = f(t - 0.125)? - 2.0 * f(t)? + f(t + 0.125)?;
            ensure(second >= CONVEXITY_FLOOR, || format!("instance {k}: f second difference {second:e} at {t}"))?;
        }
    }
    Ok(format!("{DERIVATIVE_INSTANCES} instances, worst g' error {worst:.3e} of allowance"))
}

fn baseline_criterion() -> Outcome {
    let mut counts = [0usize; 5];
    for k in 0..BASELINE_TRIALS {
        let mut rng = substream(8, k as u64);
        let d = random_joint(&mut rng, InstanceShape::new(8, 10.0));
        let e = Exponents::new(rng.gen_range(1.01..6.0), 0.0).map_err(err)?;
        let reports = [check_excess_holder(&d, &e), check_excess_minkowski(&d, &e)];
        for (i, r) in reports.into_iter().enumerate() {
            let r = r.map_err(err)?;
            ensure(r.holds, || format!("trial {k}: {r:?}"))?;
            counts[i] += 1;
        }
        let pos = random_joint(&mut rng, InstanceShape::new(8, 10.0).positive());
        let grid: Vec<f64> = (1..=16).map(|i| 0.25 * i as f64).collect();
        let r = check_lyapunov(&pos, Axis::X, &grid).map_err(err)?;
        ensure(r.holds, || format!("trial {k}: {r:?}"))?;
        counts[2] += 1;
        let r = check_young(rng.gen_range(0.0..10.0), rng.gen_range(0.0..10.0), &e).map_err(err)?;
        ensure(r.holds, || format!("trial {k}: {r:?}"))?;
        counts[3] += 1;
        let n = rng.gen_range(1..=8);
        let mut z: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..10.0)).collect();
        z.sort_by(f64::total_cmp);
        let table = |rng: &mut rand_chacha::ChaCha20Rng| {
            let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
            v.sort_by(f64::total_cmp);
            v
        };
        let (fz, gz) = (table(&mut rng), table(&mut rng));
        let w = excesslab::sample::random_weights(&mut rng, n);
        let r = check_chebyshev_integral(&z, &fz, &gz, &w).map_err(err)?;
        ensure(r.holds, || format!("trial {k}: {r:?}"))?;
        counts[4] += 1;
    }
    Ok(format!(
        "Hölder {}, Minkowski {}, Lyapunov {}, Young {}, Chebyshev {} trials without violation",
        counts[0], counts[1], counts[2], counts[3], counts[4]
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("excess inequalities hold for p in [1.01, 2]", sweep_criterion),
        ("certified violations for p > 2", counterexample_criterion),
        ("scalar chain on the (p, s) grid", scalar_criterion),
        ("mass-at-infinity lemma", lemma_criterion),
        ("compactification identities", compactify_criterion),
        ("extremal consistency", extremal_criterion),
        ("derivative identities", derivative_criterion),
        ("classical baselines", baseline_criterion),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("criterion {} PASS [{secs:.1}s] {name}: {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {} FAIL [{secs:.1}s] {name}: {msg}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
