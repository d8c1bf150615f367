//! One-dimensional certificates behind the `Y = X + t` reduction.
//!
//! For a marginal `X` and shift `t`, `delta(t) = Delta_p(X, X + t)` is
//! concave with maximum `0` at `t = 0` when `1 < p <= 2`. That reduces to
//! convexity of `f(t) = (E(X+t)^p - (E X + t)^p)^(1/p)`, i.e. to
//! `H = (m_p - 1)(m_{p-2} - 1) - (1 - m_{p-1})^2 >= 0` for moments of a
//! law normalised to mean one, and finally to `h(s) >= 0` for an explicit
//! sum of exponentials. `h`, `h1`, `h2` and `h2'` are evaluated by exact
//! term-wise differentiation of [`ExpSum`]s.

use serde::Serialize;

use crate::dist::{power, Atom, Exponents, JointDistribution, Marginal};
use crate::error::{Error, Result};
use crate::functionals::{clamped_root, delta, GapReport, Inequality};
use crate::scalar::Real;
use crate::DoubleDouble;

/// Tolerance of the Lyapunov chain for a realised [`MomentQuad`].
pub const CHAIN_TOL: f64 = 1e-12;
/// Tolerance of the substitution identity, relative to `1 + |h|`.
pub const SUBSTITUTION_TOL: f64 = 1e-10;

/// `sum_k c_k exp(a_k s)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpSum<T = f64> {
    terms: Vec<(T, T)>,
}

impl<T: Real> ExpSum<T> {
    /// Terms as `(coefficient, rate)` pairs.
    pub fn new(terms: Vec<(T, T)>) -> Self {
        Self { terms }
    }

    pub fn terms(&self) -> &[(T, T)] {
        &self.terms
    }

    pub fn eval(&self, s: T) -> T {
        self.terms.iter().fold(T::zero(), |acc, &(c, a)| acc + if a.is_zero() { c } else { c * (a * s).exp() })
    }

    /// Exact derivative; constant terms drop out.
    pub fn derivative(&self) -> Self {
        Self { terms: self.terms.iter().filter(|(_, a)| !a.is_zero()).map(|&(c, a)| (c * a, a)).collect() }
    }

    /// Product with `exp(rate s)`.
    pub fn times_exp(&self, rate: T) -> Self {
        Self { terms: self.terms.iter().map(|&(c, a)| (c, a + rate)).collect() }
    }
}

fn check_open_unit_p<T: Real>(p: T) -> Result<()> {
    if p > T::one() && p < T::lit(2.0) {
        Ok(())
    } else {
        Err(Error::Precondition(format!("p = {p} must lie in (1, 2)")))
    }
}

/// `h(s) = 2e^{(2-p)(p-1)s} - e^{(3-p)(p-1)s} - e^{(2-p)ps} + e^s - 1`.
pub fn h_sum<T: Real>(p: T) -> ExpSum<T> {
    let one = T::one();
    let (two, three) = (T::lit(2.0), T::lit(3.0));
    ExpSum::new(vec![
        (two, (two - p) * (p - one)),
        (-one, (three - p) * (p - one)),
        (-one, (two - p) * p),
        (one, one),
        (-one, T::zero()),
    ])
}

/// `h1 = h' e^{(p-2)(p-1)s}`.
pub fn h1_sum<T: Real>(p: T) -> ExpSum<T> {
    h_sum(p).derivative().times_exp((p - T::lit(2.0)) * (p - T::one()))
}

/// `h2 = h1' e^{-(3 - 3p + p^2)s}`.
pub fn h2_sum<T: Real>(p: T) -> ExpSum<T> {
    h1_sum(p).derivative().times_exp(-(T::lit(3.0) - T::lit(3.0) * p + p * p))
}

/// `h2'(s) = (2-p)^2 (p-1)^2 (p e^{-(p-1)^2 s} + (3-p) e^{-(2-p)^2 s})`.
pub fn h2_prime_closed<T: Real>(p: T, s: T) -> T {
    let a = T::lit(2.0) - p;
    let b = p - T::one();
    a * a * b * b * (p * (-(b * b) * s).exp() + (T::lit(3.0) - p) * (-(a * a) * s).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HChain<T = f64> {
    pub h: T,
    pub h1: T,
    pub h2: T,
    pub h2_prime: T,
}

/// `(h, h1, h2, h2')` at `s`, all from term-wise derivatives.
pub fn h_chain<T: Real>(p: T, s: T) -> Result<HChain<T>> {
    check_open_unit_p(p)?;
    if !(s >= T::zero()) {
        return Err(Error::Precondition(format!("s = {s} must be >= 0")));
    }
    let h2 = h2_sum(p);
    Ok(HChain { h: h_sum(p).eval(s), h1: h1_sum(p).eval(s), h2: h2.eval(s), h2_prime: h2.derivative().eval(s) })
}

/// Moments `m_p`, `m_{p-1}`, `m_{p-2}` of a law with mean one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentQuad<T = f64> {
    pub m_p: T,
    pub m_pm1: T,
    pub m_pm2: T,
}

impl<T: Real> MomentQuad<T> {
    pub fn new(m_p: T, m_pm1: T, m_pm2: T) -> Self {
        Self { m_p, m_pm1, m_pm2 }
    }

    /// Moments of `Y / E Y` for a strictly positive marginal `Y`.
    pub fn from_marginal(y: &Marginal<T>, p: T) -> Result<Self> {
        if !(y.min() > T::zero()) {
            return Err(Error::Precondition("moment quad needs strictly positive values".into()));
        }
        let w = y.weights();
        let v = y.values();
        let mean = v.iter().zip(w).fold(T::zero(), |s, (&x, &w)| s + w * x);
        let m = |r: T| v.iter().zip(w).fold(T::zero(), |s, (&x, &w)| s + w * power(x / mean, r));
        let quad = Self { m_p: m(p), m_pm1: m(p - T::one()), m_pm2: m(p - T::lit(2.0)) };
        quad.check_chain(p)?;
        Ok(quad)
    }

    /// Moments of `(X + t) / E(X + t)`.
    pub fn from_shift(x: &Marginal<T>, t: T, p: T) -> Result<Self> {
        let shifted = Marginal::new(x.values().iter().map(|&v| v + t).collect(), x.weights().to_vec())?;
        Self::from_marginal(&shifted, p)
    }

    /// `m_{p-1} <= 1`, `1 <= m_{p-1}^{p-1} m_p^{2-p}`, `1 <= m_{p-2}^{p-1} m_{p-1}^{2-p}`.
    pub fn check_chain(&self, p: T) -> Result<()> {
        let tol = T::lit(CHAIN_TOL);
        let two = T::lit(2.0);
        let links = [
            T::one() - self.m_pm1,
            power(self.m_pm1, p - T::one()) * power(self.m_p, two - p) - T::one(),
            power(self.m_pm2, p - T::one()) * power(self.m_pm1, two - p) - T::one(),
        ];
        for (i, l) in links.iter().enumerate() {
            if *l < -tol {
                return Err(Error::Precondition(format!("Lyapunov link {} violated by {}", i + 1, -*l)));
            }
        }
        Ok(())
    }
}

/// `H = (m_p - 1)(m_{p-2} - 1) - (1 - m_{p-1})^2` for mean-one moments.
pub fn h_quad<T: Real>(q: &MomentQuad<T>, _p: T) -> T {
    let d = T::one() - q.m_pm1;
    (q.m_p - T::one()) * (q.m_pm2 - T::one()) - d * d
}

fn check_star_args<T: Real>(m: T, p: T) -> Result<()> {
    check_open_unit_p(p)?;
    if !(m >= T::one() - T::lit(CHAIN_TOL)) || !m.is_finite() {
        return Err(Error::Precondition(format!("moment argument {m} must be >= 1")));
    }
    Ok(())
}

/// `m_* = m_p^{-(2-p)/(p-1)}`.
pub fn m_star<T: Real>(m_p: T, p: T) -> Result<T> {
    check_star_args(m_p, p)?;
    Ok(power(m_p, -(T::lit(2.0) - p) / (p - T::one())))
}

/// `m_** = m_{p-2}^{-(p-1)/(2-p)}`.
pub fn m_star_star<T: Real>(m_pm2: T, p: T) -> Result<T> {
    check_star_args(m_pm2, p)?;
    Ok(power(m_pm2, -(p - T::one()) / (T::lit(2.0) - p)))
}

/// `H_* = (m_p - 1)(m_p^{(2-p)^2/(p-1)^2} - 1) - (1 - m_*)^2`.
pub fn h_star<T: Real>(m_p: T, p: T) -> Result<T> {
    let ms = m_star(m_p, p)?;
    let r = (T::lit(2.0) - p) / (p - T::one());
    let d = T::one() - ms;
    Ok((m_p - T::one()) * (power(m_p, r * r) - T::one()) - d * d)
}

/// `H_** = (m_{p-2}^{(p-1)^2/(2-p)^2} - 1)(m_{p-2} - 1) - (1 - m_**)^2`.
pub fn h_star_star<T: Real>(m_pm2: T, p: T) -> Result<T> {
    let mss = m_star_star(m_pm2, p)?;
    let r = (p - T::one()) / (T::lit(2.0) - p);
    let d = T::one() - mss;
    Ok((power(m_pm2, r * r) - T::one()) * (m_pm2 - T::one()) - d * d)
}

/// `m_pm2` paired with `m_p` by `m_p^{(2-p)^2} = m_pm2^{(p-1)^2}`.
pub fn corresponding_m_pm2<T: Real>(m_p: T, p: T) -> T {
    let r = (T::lit(2.0) - p) / (p - T::one());
    power(m_p, r * r)
}

/// Which reduced certificate bounds `H` for a realised quad.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Branch {
    /// `m_p^{(2-p)^2} <= m_{p-2}^{(p-1)^2}`, so `m_* >= m_**` and `H >= H_*`.
    Star,
    /// Otherwise `H >= H_**`.
    StarStar,
}

/// The applicable branch and its lower bound for `H`.
pub fn branch_bound<T: Real>(q: &MomentQuad<T>, p: T) -> Result<(Branch, T)> {
    let two = T::lit(2.0);
    let lhs = power(q.m_p, (two - p) * (two - p));
    let rhs = power(q.m_pm2, (p - T::one()) * (p - T::one()));
    if lhs <= rhs {
        Ok((Branch::Star, h_star(q.m_p, p)?))
    } else {
        Ok((Branch::StarStar, h_star_star(q.m_pm2, p)?))
    }
}

/// `H_*(e^{(p-1)^2 s}) e^{-2(p-2)(p-1)s} = h(s)` within `1e-10 (1 + |h|)`.
pub fn substitution_identity<T: Real>(p: T, s: T) -> Result<GapReport<T>> {
    check_open_unit_p(p)?;
    let b = p - T::one();
    let m_p = (b * b * s).exp();
    let lhs = h_star(m_p, p)? * (-T::lit(2.0) * (p - T::lit(2.0)) * b * s).exp();
    let rhs = h_sum(p).eval(s);
    let tol = T::lit(SUBSTITUTION_TOL) * (T::one() + rhs.abs());
    let residual = (lhs - rhs).abs();
    let exponents = Exponents::new(p, T::one())?;
    Ok(GapReport::with_tol(Inequality::Substitution, residual, T::zero(), tol, Some(exponents))
        .detail("h_star_scaled", lhs)
        .detail("h", rhs))
}

fn check_shift<T: Real>(x: &Marginal<T>, t: T) -> Result<()> {
    if !(t >= -x.min()) {
        return Err(Error::Precondition(format!("shift t = {t} leaves X + t negative (min x = {})", x.min())));
    }
    Ok(())
}

/// `delta(t) = Delta_{p,theta}(X, X + t)`, defined for `X + t >= 0`.
pub fn delta_t<T: Real>(x: &Marginal<T>, e: &Exponents<T>, t: T) -> Result<T> {
    check_shift(x, t)?;
    let atoms = x.values().iter().zip(x.weights()).map(|(&v, &w)| Atom::new(v, (v + t).max(T::zero()), w)).collect();
    delta(&JointDistribution::new(atoms)?, e)
}

/// `f(t) = (E(X+t)^p - (E X + t)^p)^(1/p)`.
pub fn f_of_t<T: Real>(x: &Marginal<T>, p: T, t: T) -> Result<T> {
    check_shift(x, t)?;
    let (mut mp, mut m1) = (T::zero(), T::zero());
    for (&v, &w) in x.values().iter().zip(x.weights()) {
        let y = (v + t).max(T::zero());
        mp = mp + w * power(y, p);
        m1 = m1 + w * y;
    }
    clamped_root(mp - power(m1, p), mp, p.recip())
}

/// Closed form of `delta''(0+)` for `X ~ Bernoulli(1/2)`:
/// `(p-1) theta^p / (2^p - 2 theta^p)` for `p > 2` and
/// `-(1 - theta^2) / (2 - theta^2)` for `p = 2`.
pub fn bernoulli_second_derivative<T: Real>(e: &Exponents<T>) -> Result<T> {
    let (p, theta) = (e.p(), e.theta());
    let two = T::lit(2.0);
    if !(theta > T::zero()) {
        return Err(Error::Precondition("theta must be positive".into()));
    }
    if p < two {
        return Err(Error::Precondition(format!("closed form needs p >= 2, got {p}")));
    }
    if p == two {
        let t2 = theta * theta;
        return Ok(-(T::one() - t2) / (two - t2));
    }
    let tp = e.theta_pow();
    let den = power(two, p) - two * tp;
    if !(den > T::zero()) {
        return Err(Error::Degenerate(format!("denominator 2^p - 2 theta^p = {den} is not positive")));
    }
    Ok((p - T::one()) * tp / den)
}

/// Step used by [`measure_bernoulli_second_derivative`]: `10^-k` with
/// `k = ceil(8 / min(p - 2, 2))` clamped to `[5, 12]`.
///
/// The `t^p` contribution of the atom at zero makes the stencil error scale
/// like `h^(p-2)`, so the step shrinks as `p` approaches 2.
pub fn bernoulli_fd_step(p: f64) -> f64 {
    let gap = (p - 2.0).min(2.0);
    let k = if gap > 0.0 { (8.0 / gap).ceil().clamp(5.0, 12.0) } else { 12.0 };
    10f64.powi(-(k as i32))
}

/// One-sided second difference `(2 d0 - 5 d1 + 4 d2 - d3) / h^2` of
/// `delta(t)` at `0+` for `X ~ Bernoulli(1/2)`, evaluated in double-double.
pub fn measure_bernoulli_second_derivative(e: &Exponents<f64>) -> Result<f64> {
    let x = Marginal::new(vec![DoubleDouble::ZERO, DoubleDouble::ONE], vec![DoubleDouble::lit(0.5); 2])?;
    let ed: Exponents<DoubleDouble> = e.cast();
    let h = DoubleDouble::lit(bernoulli_fd_step(e.p()));
    let d = |k: f64| delta_t(&x, &ed, h * DoubleDouble::lit(k));
    let (d0, d1, d2, d3) = (d(0.0)?, d(1.0)?, d(2.0)?, d(3.0)?);
    let two = DoubleDouble::lit(2.0);
    let v = (two * d0 - DoubleDouble::lit(5.0) * d1 + DoubleDouble::lit(4.0) * d2 - d3) / (h * h);
    Ok(v.to_f64_lossy())
}
