//! Checkers for the two excess inequalities, their classical `theta = 0`
//! cases and the auxiliary inequalities used along the way.

mod sweep;

pub use sweep::{sweep, SweepConfig, SweepSummary, WorstInstance};

use crate::dist::{power, Axis, Exponents, JointDistribution, Marginal};
use crate::error::{Error, Result};
use crate::functionals::{
    cov_like, delta, delta_abc, excess, excess_of_sum, gap_tolerance, mixed_moment, moment, GapReport, Inequality,
    MassAtInfinity,
};
use crate::scalar::Real;

/// Slope bound for the monotonicity of `d(B)`.
pub const SLOPE_TOL: f64 = 1e-8;
/// Tolerance of the identity behind the `theta` reduction.
pub const IDENTITY_TOL: f64 = 1e-10;

/// `C_{p,theta}(X, Y) <= excess(X)^(p-1) excess(Y)`.
pub fn check_excess_holder<T: Real>(dist: &JointDistribution<T>, e: &Exponents<T>) -> Result<GapReport<T>> {
    let ex = excess(dist, Axis::X, e)?;
    let ey = excess(dist, Axis::Y, e)?;
    let rhs = power(ex, e.p() - T::one()) * ey;
    Ok(GapReport::new(Inequality::Holder, cov_like(dist, e), rhs, Some(*e)))
}

/// `excess(X + Y) <= excess(X) + excess(Y)`.
pub fn check_excess_minkowski<T: Real>(dist: &JointDistribution<T>, e: &Exponents<T>) -> Result<GapReport<T>> {
    let lhs = excess_of_sum(dist, e, T::one())?;
    let rhs = excess(dist, Axis::X, e)? + excess(dist, Axis::Y, e)?;
    Ok(GapReport::new(Inequality::Minkowski, lhs, rhs, Some(*e)))
}

/// Log-convexity of `r -> E Z^r` over consecutive grid triples `r < m < s`:
/// `m_m^(s-r) <= m_r^(s-m) m_s^(m-r)`. The worst triple is reported.
///
/// Triples touching an infinite moment are skipped and counted in the
/// `infinite_triples` detail. For `r = 1, m = 2, s = 3` this is
/// `m_2^2 <= m_1 m_3`; the triple `(0, 1, p)` gives `||Z||_1 <= ||Z||_p`.
pub fn check_lyapunov<T: Real>(dist: &JointDistribution<T>, axis: Axis, r_grid: &[T]) -> Result<GapReport<T>> {
    if r_grid.len() < 3 {
        return Err(Error::Precondition("Lyapunov grid needs at least three points".into()));
    }
    if r_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Precondition("Lyapunov grid must be strictly increasing".into()));
    }
    let moments: Vec<T> = r_grid.iter().map(|&r| moment(dist, axis, r)).collect();
    let mut worst: Option<GapReport<T>> = None;
    let mut skipped = 0usize;
    for i in 0..r_grid.len() - 2 {
        let (r, m, s) = (r_grid[i], r_grid[i + 1], r_grid[i + 2]);
        let (mr, mm, ms) = (moments[i], moments[i + 1], moments[i + 2]);
        if !(mr.is_finite() && mm.is_finite() && ms.is_finite()) {
            skipped += 1;
            continue;
        }
        let lhs = power(mm, s - r);
        let rhs = power(mr, s - m) * power(ms, m - r);
        let report = GapReport::new(Inequality::Lyapunov, lhs, rhs, None);
        if worst.as_ref().map_or(true, |w| report.relative_gap() > w.relative_gap()) {
            worst = Some(report);
        }
    }
    let report = worst.unwrap_or_else(|| GapReport::new(Inequality::Lyapunov, T::zero(), T::zero(), None));
    Ok(report.detail("infinite_triples", T::lit(skipped as f64)))
}

/// Chebyshev's integral inequality `E f(Z) E g(Z) <= E f(Z) g(Z)` for `f`, `g`
/// nondecreasing along `z`. Tables that are not monotone are rejected.
pub fn check_chebyshev_integral<T: Real>(z: &[T], f: &[T], g: &[T], weights: &[T]) -> Result<GapReport<T>> {
    let n = z.len();
    if n == 0 || f.len() != n || g.len() != n || weights.len() != n {
        return Err(Error::Precondition("Chebyshev tables must be nonempty and of equal length".into()));
    }
    if weights.iter().any(|w| !(*w > T::zero())) {
        return Err(Error::Precondition("Chebyshev weights must be positive".into()));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| z[a].partial_cmp(&z[b]).unwrap_or(std::cmp::Ordering::Equal));
    for pair in order.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let same = z[a] == z[b];
        if (same && (f[a] != f[b] || g[a] != g[b])) || f[b] < f[a] || g[b] < g[a] {
            return Err(Error::Precondition("f and g must be nondecreasing functions of z".into()));
        }
    }
    let total = weights.iter().fold(T::zero(), |s, &w| s + w);
    let (mut ef, mut eg, mut efg) = (T::zero(), T::zero(), T::zero());
    for i in 0..n {
        let w = weights[i] / total;
        ef = ef + w * f[i];
        eg = eg + w * g[i];
        efg = efg + w * f[i] * g[i];
    }
    Ok(GapReport::new(Inequality::Chebyshev, ef * eg, efg, None))
}

/// Young's inequality `ab <= a^p / p + b^q / q`.
pub fn check_young<T: Real>(a: T, b: T, e: &Exponents<T>) -> Result<GapReport<T>> {
    if !(a >= T::zero() && b >= T::zero()) {
        return Err(Error::Precondition("Young's inequality needs a, b >= 0".into()));
    }
    let rhs = power(a, e.p()) / e.p() + power(b, e.q()) / e.q();
    Ok(GapReport::new(Inequality::Young, a * b, rhs, Some(*e)))
}

/// `d(B) = Delta_{p; gamma B, B, gamma^p B}(X, Y)`.
pub fn lemma_d<T: Real>(dist: &JointDistribution<T>, e: &Exponents<T>, gamma: T, b: T) -> Result<T> {
    let m = MassAtInfinity { a: gamma * b, b, c: power(gamma, e.p()) * b };
    delta_abc(dist, e, &m)
}

/// Closed form `d'(B) = gamma - c / q - gamma^p c^(-p/q) / p` with
/// `c = ((gamma^p B + S_Y) / (B + S_X))^(1/p)`, `S_Z = E Z^p - (E Z)^p`.
pub fn lemma_d_prime<T: Real>(dist: &JointDistribution<T>, e: &Exponents<T>, gamma: T, b: T) -> T {
    let one = Exponents::new(e.p(), T::one()).expect("p already validated");
    let sx = power(excess(dist, Axis::X, &one).unwrap_or(T::zero()), e.p());
    let sy = power(excess(dist, Axis::Y, &one).unwrap_or(T::zero()), e.p());
    let gp = power(gamma, e.p());
    let c = power((gp * b + sy) / (b + sx), e.p().recip());
    gamma - c / e.q() - gp * power(c, -e.p() / e.q()) / e.p()
}

/// `d(B)` is nonincreasing on `b_grid` and bounded by `d(0) = Delta_p`.
///
/// `lhs` is the largest finite-difference slope of `d`, `rhs` is zero and the
/// tolerance is [`SLOPE_TOL`]. Details record `max_d_minus_d0`, the largest
/// closed-form slope and the worst mismatch between the closed form and a
/// central difference.
pub fn check_lemma_abc_monotone<T: Real>(
    dist: &JointDistribution<T>,
    e: &Exponents<T>,
    gamma: T,
    b_grid: &[T],
) -> Result<GapReport<T>> {
    if !(gamma > T::zero()) {
        return Err(Error::Precondition("gamma must be positive".into()));
    }
    if b_grid.is_empty() || b_grid.iter().any(|b| !(*b > T::zero())) || b_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Precondition("B grid must be positive and strictly increasing".into()));
    }
    let d0 = lemma_d(dist, e, gamma, T::zero())?;
    let mut values = vec![d0];
    for &b in b_grid {
        values.push(lemma_d(dist, e, gamma, b)?);
    }
    let mut nodes = vec![T::zero()];
    nodes.extend_from_slice(b_grid);

    let mut max_slope = T::neg_infinity();
    for i in 0..nodes.len() - 1 {
        let slope = (values[i + 1] - values[i]) / (nodes[i + 1] - nodes[i]);
        max_slope = max_slope.max(slope);
    }
    let max_above = values.iter().skip(1).fold(T::neg_infinity(), |m, &v| m.max(v - d0));
    let bound_ok = max_above <= gap_tolerance(d0, d0);

    let mut max_closed = T::neg_infinity();
    let mut mismatch = T::zero();
    for &b in b_grid {
        let closed = lemma_d_prime(dist, e, gamma, b);
        max_closed = max_closed.max(closed);
        let h = T::lit(1e-5) * b;
        let fd = (lemma_d(dist, e, gamma, b + h)? - lemma_d(dist, e, gamma, b - h)?) / (h + h);
        let err = (fd - closed).abs() / T::one().max(closed.abs());
        mismatch = mismatch.max(err);
    }
    let derivative_ok = max_closed <= T::lit(SLOPE_TOL) && mismatch <= T::lit(1e-4);

    Ok(GapReport::with_tol(Inequality::LemmaAbc, max_slope, T::zero(), T::lit(SLOPE_TOL), Some(*e))
        .detail("max_d_minus_d0", max_above)
        .detail("max_closed_form_slope", max_closed)
        .detail("derivative_mismatch", mismatch)
        .require(bound_ok && derivative_ok))
}

/// `Delta_{p;A,B,C}(X, Y) <= Delta_p(X, Y)` for `A <= B^(1/q) C^(1/p)`.
pub fn check_lemma_abc_bound<T: Real>(
    dist: &JointDistribution<T>,
    e: &Exponents<T>,
    m: &MassAtInfinity<T>,
) -> Result<GapReport<T>> {
    let bound = m.holder_bound(e);
    if m.a > bound * (T::one() + T::lit(1e-12)) {
        return Err(Error::Precondition(format!("A = {} exceeds B^(1/q) C^(1/p) = {}", m.a, bound)));
    }
    let one = e.with_theta(T::one())?;
    Ok(GapReport::new(Inequality::LemmaAbc, delta_abc(dist, e, m)?, delta(dist, &one)?, Some(*e)))
}

/// `Delta_{p,theta}(X, Y) = Delta_{p;A,B,C}(theta X, theta Y)` with
/// `A = (1 - theta^p) E X^(p-1) Y`, `B = (1 - theta^p) E X^p`,
/// `C = (1 - theta^p) E Y^p`, followed by `Delta_{p,theta}(X, Y) <= Delta_p(theta X, theta Y)`.
///
/// The report compares the two sides of the bound; the identity residual
/// is the `identity_residual` detail and must stay within [`IDENTITY_TOL`].
pub fn check_theta_reduction<T: Real>(dist: &JointDistribution<T>, e: &Exponents<T>) -> Result<GapReport<T>> {
    let p = e.p();
    let k = T::one() - e.theta_pow();
    let m = MassAtInfinity {
        a: k * mixed_moment(dist, p),
        b: k * moment(dist, Axis::X, p),
        c: k * moment(dist, Axis::Y, p),
    };
    let shrunk = dist.scaled(e.theta())?;
    let one = e.with_theta(T::one())?;
    let lhs = delta(dist, e)?;
    let reduced = delta_abc(&shrunk, e, &m)?;
    let rhs = delta(&shrunk, &one)?;
    let residual = (lhs - reduced).abs();
    let identity_ok = residual <= T::lit(IDENTITY_TOL) * (T::one() + lhs.abs());
    Ok(GapReport::new(Inequality::ThetaReduction, lhs, rhs, Some(*e))
        .detail("identity_residual", residual)
        .require(identity_ok))
}

/// For `Y = kX + t` with `k <= 0` and `p <= 2`:
/// `E X^(p-1) Y <= E X^(p-1) E Y <= E^(p-1) X E Y`, hence `Delta_p(X, Y) <= 0`.
///
/// `lhs` and `rhs` are the outer terms; the `middle`, `delta` and per-link
/// gaps are attached as details.
pub fn check_negative_slope_reduction<T: Real>(
    x: &Marginal<T>,
    k: T,
    t: T,
    e: &Exponents<T>,
) -> Result<GapReport<T>> {
    if k > T::zero() {
        return Err(Error::Precondition(format!("slope k = {k} must be <= 0")));
    }
    if e.p() > T::lit(2.0) {
        return Err(Error::Precondition("the reduction needs p <= 2".into()));
    }
    let dist = x.pair_with(|v| k * v + t).map_err(|_| {
        Error::Precondition(format!("kX + t must be nonnegative on the support (k = {k}, t = {t})"))
    })?;
    let pm1 = e.p() - T::one();
    let lhs = mixed_moment(&dist, e.p());
    let ex = moment(&dist, Axis::X, T::one());
    let ey = moment(&dist, Axis::Y, T::one());
    let middle = moment(&dist, Axis::X, pm1) * ey;
    let rhs = power(ex, pm1) * ey;
    let first = GapReport::new(Inequality::NegativeSlope, lhs, middle, None);
    let second = GapReport::new(Inequality::NegativeSlope, middle, rhs, None);
    let d = delta(&dist, &e.with_theta(T::one())?)?;
    Ok(GapReport::new(Inequality::NegativeSlope, lhs, rhs, Some(*e))
        .detail("middle", middle)
        .detail("first_gap", first.gap)
        .detail("second_gap", second.gap)
        .detail("delta", d)
        .require(first.holds && second.holds && d <= gap_tolerance(d, d)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample::{random_joint, substream, InstanceShape};

    fn ex(p: f64, theta: f64) -> Exponents {
        Exponents::new(p, theta).unwrap()
    }

    fn two_point() -> JointDistribution {
        JointDistribution::from_triples(&[(1.0, 1.0, 0.5), (3.0, 3.0, 0.5)]).unwrap()
    }

    #[test]
    fn holder_examples() {
        let mut rng = substream(11, 0);
        for _ in 0..200 {
            let d = random_joint(&mut rng, InstanceShape::new(6, 5.0));
            assert!(check_excess_holder(&d, &ex(2.0, 1.0)).unwrap().holds);
            assert!(check_excess_holder(&d, &ex(1.7, 0.0)).unwrap().holds);
        }
        let d = JointDistribution::from_triples(&[(0.0, 0.1, 0.5), (1.0, 1.1, 0.5)]).unwrap();
        let r = check_excess_holder(&d, &ex(3.0, 1.0)).unwrap();
        assert!(!r.holds && r.gap > 1e-3);
    }

    #[test]
    fn minkowski_examples() {
        let mut rng = substream(12, 0);
        for _ in 0..200 {
            let d = random_joint(&mut rng, InstanceShape::new(6, 5.0));
            assert!(check_excess_minkowski(&d, &ex(1.4, 0.0)).unwrap().holds);
        }
        let d = JointDistribution::from_triples(&[(0.5, 1.5, 0.3), (2.0, 6.0, 0.7)]).unwrap();
        let r = check_excess_minkowski(&d, &ex(1.8, 1.0)).unwrap();
        assert!(r.holds && r.gap.abs() <= r.tol);
        // Y = t(X + c) with X Bernoulli(1/2), t = 1/64, c = 1/8.
        let (t, c) = (1.0 / 64.0, 0.125);
        let d = JointDistribution::from_triples(&[(0.0, t * c, 0.5), (1.0, t * (1.0 + c), 0.5)]).unwrap();
        assert!(!check_excess_minkowski(&d, &ex(3.0, 1.0)).unwrap().holds);
    }

    #[test]
    fn lyapunov_examples() {
        let r = check_lyapunov(&two_point(), Axis::X, &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!((r.lhs, r.rhs), (25.0, 28.0));
        assert!(r.holds);
        let pm = JointDistribution::point(2.5, 1.0).unwrap();
        let grid: Vec<f64> = (1..=16).map(|i| 0.25 * i as f64).collect();
        let r = check_lyapunov(&pm, Axis::X, &grid).unwrap();
        assert!(r.holds && r.gap.abs() <= 1e-9 * r.rhs);
        let bern = JointDistribution::from_triples(&[(0.0, 0.0, 0.5), (1.0, 1.0, 0.5)]).unwrap();
        let r = check_lyapunov(&bern, Axis::X, &[-1.0, 0.5, 1.0, 2.0]).unwrap();
        assert_eq!(r.detail_value("infinite_triples"), Some(1.0));
        assert!(r.holds);
        assert!(check_lyapunov(&bern, Axis::X, &[1.0, 2.0]).is_err());
    }

    #[test]
    fn chebyshev_examples() {
        let r = check_chebyshev_integral(&[1.0, 3.0], &[1.0, 3.0], &[1.0, 3.0], &[0.5, 0.5]).unwrap();
        assert_eq!((r.lhs, r.rhs), (4.0, 5.0));
        let r = check_chebyshev_integral(&[1.0, 3.0], &[1.0, 3.0], &[2.0, 2.0], &[0.5, 0.5]).unwrap();
        assert_eq!(r.gap, 0.0);
        assert!(check_chebyshev_integral(&[1.0, 3.0], &[1.0, 3.0], &[3.0, 1.0], &[0.5, 0.5]).is_err());
    }

    #[test]
    fn young_examples() {
        let r = check_young(1.0, 1.0, &ex(1.7, 0.0)).unwrap();
        assert!(r.holds && r.gap.abs() < 1e-15);
        assert!(check_young(0.0, 2.0, &ex(1.7, 0.0)).unwrap().holds);
        let r = check_young(2.0, 3.0, &ex(1.5, 0.0)).unwrap();
        assert_eq!(r.lhs, 6.0);
        assert!((r.rhs - 10.885_618_083_164_127).abs() < 1e-12);
    }

    #[test]
    fn lemma_abc_examples() {
        let d = JointDistribution::from_triples(&[(0.5, 2.0, 0.3), (1.5, 0.2, 0.5), (3.0, 1.0, 0.2)]).unwrap();
        let grid: Vec<f64> = (1..=40).map(|i| 0.05 * i as f64 * i as f64).collect();
        for gamma in [0.2, 1.0, 3.0] {
            let r = check_lemma_abc_monotone(&d, &ex(1.5, 1.0), gamma, &grid).unwrap();
            assert!(r.holds, "{r:?}");
        }
        let constant = JointDistribution::from_triples(&[(2.0, 0.5, 0.4), (2.0, 1.5, 0.6)]).unwrap();
        let r = check_lemma_abc_monotone(&constant, &ex(1.3, 1.0), 0.7, &grid).unwrap();
        assert!(r.holds && r.detail_value("max_d_minus_d0").unwrap() <= 1e-12);
        let m = MassAtInfinity::new(0.3, 0.4, 0.9).unwrap();
        let bounded = MassAtInfinity { a: m.holder_bound(&ex(1.5, 1.0)), ..m };
        assert!(check_lemma_abc_bound(&d, &ex(1.5, 1.0), &bounded).unwrap().holds);
        let too_big = MassAtInfinity { a: 10.0, ..m };
        assert!(check_lemma_abc_bound(&d, &ex(1.5, 1.0), &too_big).is_err());
    }

    #[test]
    fn theta_reduction_examples() {
        let d = JointDistribution::from_triples(&[(0.5, 2.0, 0.3), (1.5, 0.2, 0.7)]).unwrap();
        let r = check_theta_reduction(&d, &ex(1.5, 1.0)).unwrap();
        assert_eq!(r.lhs, r.rhs);
        let r = check_theta_reduction(&d, &ex(1.5, 0.0)).unwrap();
        assert!(r.holds && r.rhs == 0.0);
        let mut rng = substream(13, 0);
        for _ in 0..200 {
            let d = random_joint(&mut rng, InstanceShape::new(6, 3.0));
            let r = check_theta_reduction(&d, &ex(1.5, 0.5)).unwrap();
            assert!(r.holds, "{r:?}");
        }
    }

    #[test]
    fn negative_slope_examples() {
        let x = Marginal::new(vec![0.5, 2.0, 3.0], vec![0.2, 0.5, 0.3]).unwrap();
        assert!(check_negative_slope_reduction(&x, 0.0, 1.3, &ex(1.5, 1.0)).unwrap().holds);
        let bern = Marginal::new(vec![0.0, 1.0], vec![0.5, 0.5]).unwrap();
        assert!(check_negative_slope_reduction(&bern, -1.0, 1.0, &ex(1.5, 1.0)).unwrap().holds);
        let c = Marginal::new(vec![2.0], vec![1.0]).unwrap();
        let r = check_negative_slope_reduction(&c, -0.5, 3.0, &ex(1.7, 1.0)).unwrap();
        assert!(r.holds && r.gap.abs() < 1e-14);
        assert!(check_negative_slope_reduction(&bern, -1.0, 0.5, &ex(1.5, 1.0)).is_err());
        assert!(check_negative_slope_reduction(&bern, 1.0, 0.5, &ex(1.5, 1.0)).is_err());
    }
}
