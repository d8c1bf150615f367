//! Norms, moments, excesses and the gap functionals built from them.
//!
//! With `E` the expectation under a [`JointDistribution`]:
//!
//! * `excess_{p,theta}(Z) = (E Z^p - theta^p (E Z)^p)^(1/p)`
//! * `C_{p,theta}(X, Y) = E X^(p-1) Y - theta^p (E X)^(p-1) E Y`
//! * `Delta_{p,theta}(X, Y) = C_{p,theta}(X, Y) - excess(X)^(p-1) excess(Y)`
//!
//! A gap is "left side minus right side", so an inequality holds when its
//! gap is at most the tolerance `1e-9 * max(1, |lhs|, |rhs|)`.

use std::fmt;

use serde::Serialize;

use crate::dist::{power, Atom, Axis, Exponents, JointDistribution};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Relative slack below zero that an excess radicand may show from rounding.
pub const RADICAND_TOL: f64 = 1e-12;
/// Relative tolerance of [`GapReport::holds`].
pub const GAP_TOL: f64 = 1e-9;

/// `tol = 1e-9 * max(1, |lhs|, |rhs|)`.
pub fn gap_tolerance<T: Real>(lhs: T, rhs: T) -> T {
    T::lit(GAP_TOL) * T::one().max(lhs.abs()).max(rhs.abs())
}

/// Which inequality a [`GapReport`] refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Inequality {
    /// `excess(X + Y) <= excess(X) + excess(Y)`.
    #[serde(rename = "1st")]
    Minkowski,
    /// `C(X, Y) <= excess(X)^(p-1) excess(Y)`.
    #[serde(rename = "2nd")]
    Holder,
    Lyapunov,
    Chebyshev,
    Young,
    LemmaAbc,
    ThetaReduction,
    NegativeSlope,
    Substitution,
}

impl Inequality {
    pub fn as_str(&self) -> &'static str {
        match self {
            Inequality::Minkowski => "1st",
            Inequality::Holder => "2nd",
            Inequality::Lyapunov => "lyapunov",
            Inequality::Chebyshev => "chebyshev",
            Inequality::Young => "young",
            Inequality::LemmaAbc => "lemma_abc",
            Inequality::ThetaReduction => "theta_reduction",
            Inequality::NegativeSlope => "negative_slope",
            Inequality::Substitution => "substitution",
        }
    }
}

impl fmt::Display for Inequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Inequality {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "1st" | "minkowski" => Inequality::Minkowski,
            "2nd" | "holder" => Inequality::Holder,
            "lyapunov" => Inequality::Lyapunov,
            "chebyshev" => Inequality::Chebyshev,
            "young" => Inequality::Young,
            "lemma_abc" => Inequality::LemmaAbc,
            "theta_reduction" => Inequality::ThetaReduction,
            "negative_slope" => Inequality::NegativeSlope,
            "substitution" => Inequality::Substitution,
            other => return Err(Error::Precondition(format!("unknown inequality label {other:?}"))),
        })
    }
}

/// Named auxiliary number attached to a report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Detail<T = f64> {
    pub name: String,
    pub value: T,
}

/// One checked instance of an inequality `lhs <= rhs`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapReport<T = f64> {
    pub label: Inequality,
    pub exponents: Option<Exponents<T>>,
    pub lhs: T,
    pub rhs: T,
    pub gap: T,
    pub tol: T,
    pub holds: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub details: Vec<Detail<T>>,
}

impl<T: Real> GapReport<T> {
    pub fn new(label: Inequality, lhs: T, rhs: T, exponents: Option<Exponents<T>>) -> Self {
        Self::with_tol(label, lhs, rhs, gap_tolerance(lhs, rhs), exponents)
    }

    pub fn with_tol(label: Inequality, lhs: T, rhs: T, tol: T, exponents: Option<Exponents<T>>) -> Self {
        let gap = lhs - rhs;
        Self { label, exponents, lhs, rhs, gap, tol, holds: gap <= tol, details: Vec::new() }
    }

    pub fn detail(mut self, name: &str, value: T) -> Self {
        self.details.push(Detail { name: name.to_string(), value });
        self
    }

    /// Forces `holds = false` when `ok` is false.
    pub fn require(mut self, ok: bool) -> Self {
        self.holds &= ok;
        self
    }

    pub fn detail_value(&self, name: &str) -> Option<T> {
        self.details.iter().find(|d| d.name == name).map(|d| d.value)
    }

    /// `gap / max(1, |lhs|, |rhs|)`.
    pub fn relative_gap(&self) -> T {
        self.gap / T::one().max(self.lhs.abs()).max(self.rhs.abs())
    }

    pub fn cast<U: Real>(&self) -> GapReport<U> {
        GapReport {
            label: self.label,
            exponents: self.exponents.map(|e| e.cast()),
            lhs: crate::scalar::cast(self.lhs),
            rhs: crate::scalar::cast(self.rhs),
            gap: crate::scalar::cast(self.gap),
            tol: crate::scalar::cast(self.tol),
            holds: self.holds,
            details: self
                .details
                .iter()
                .map(|d| Detail { name: d.name.clone(), value: crate::scalar::cast(d.value) })
                .collect(),
        }
    }
}

/// `A`, `B`, `C`: contributions of indices whose probability weight vanished.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct MassAtInfinity<T = f64> {
    pub a: T,
    pub b: T,
    pub c: T,
}

impl<T: Real> MassAtInfinity<T> {
    pub fn zero() -> Self {
        Self { a: T::zero(), b: T::zero(), c: T::zero() }
    }

    pub fn new(a: T, b: T, c: T) -> Result<Self> {
        for v in [a, b, c] {
            if !(v >= T::zero()) || !v.is_finite() {
                return Err(Error::Precondition(format!("mass at infinity component {v} must be finite and >= 0")));
            }
        }
        Ok(Self { a, b, c })
    }

    /// `B^(1/q) C^(1/p)`, the largest `A` compatible with Hölder.
    pub fn holder_bound(&self, e: &Exponents<T>) -> T {
        power(self.b, e.q().recip()) * power(self.c, e.p().recip())
    }
}

/// Takes the `1/p`-th root of a radicand, clamping rounding noise at zero.
pub fn clamped_root<T: Real>(radicand: T, scale: T, exponent: T) -> Result<T> {
    if radicand >= T::zero() {
        return Ok(power(radicand, exponent));
    }
    if radicand > -T::lit(RADICAND_TOL) * scale.abs().max(T::min_positive_value()) {
        return Ok(T::zero());
    }
    Err(Error::NegativeRadicand { value: radicand.to_f64_lossy(), scale: scale.to_f64_lossy() })
}

/// `E f(atom)`.
#[inline]
fn mean_of<T: Real, F: Fn(&Atom<T>) -> T>(dist: &JointDistribution<T>, f: F) -> T {
    dist.atoms().iter().fold(T::zero(), |s, a| s + a.w * f(a))
}

/// `(E Z^p, E Z)` for `Z = f(atom)`.
#[inline]
fn moments_p1<T: Real, F: Fn(&Atom<T>) -> T>(dist: &JointDistribution<T>, p: T, f: F) -> (T, T) {
    dist.atoms().iter().fold((T::zero(), T::zero()), |(mp, m1), a| {
        let z = f(a);
        (mp + a.w * power(z, p), m1 + a.w * z)
    })
}

/// `(radicand, scale)` of the excess of `Z = f(atom)`.
fn excess_radicand<T: Real, F: Fn(&Atom<T>) -> T>(dist: &JointDistribution<T>, e: &Exponents<T>, f: F) -> (T, T) {
    let (mp, m1) = moments_p1(dist, e.p(), f);
    (mp - e.theta_pow() * power(m1, e.p()), mp)
}

fn excess_of<T: Real, F: Fn(&Atom<T>) -> T>(dist: &JointDistribution<T>, e: &Exponents<T>, f: F) -> Result<T> {
    let (rad, scale) = excess_radicand(dist, e, f);
    clamped_root(rad, scale, e.p().recip())
}

/// `(E Z^r)^(1/r)`.
pub fn p_norm<T: Real>(dist: &JointDistribution<T>, axis: Axis, r: T) -> Result<T> {
    if !(r >= T::one()) {
        return Err(Error::NormOrder(r.to_f64_lossy()));
    }
    Ok(power(moment(dist, axis, r), r.recip()))
}

/// `E Z^r`; exactly one for `r = 0` and infinite for `r < 0` when `P(Z = 0) > 0`.
pub fn moment<T: Real>(dist: &JointDistribution<T>, axis: Axis, r: T) -> T {
    if r.is_zero() {
        return T::one();
    }
    mean_of(dist, |a| power(a.coord(axis), r))
}

/// The `(p, theta)`-excess of one coordinate.
pub fn excess<T: Real>(dist: &JointDistribution<T>, axis: Axis, e: &Exponents<T>) -> Result<T> {
    excess_of(dist, e, |a| a.coord(axis))
}

/// Excess of `X + t Y`.
pub fn excess_of_sum<T: Real>(dist: &JointDistribution<T>, e: &Exponents<T>, t: T) -> Result<T> {
    excess_of(dist, e, |a| a.x + t * a.y)
}

/// `E X^(p-1) Y`.
pub fn mixed_moment<T: Real>(dist: &JointDistribution<T>, p: T) -> T {
    let pm1 = p - T::one();
    mean_of(dist, |a| power(a.x, pm1) * a.y)
}

/// `C_{p,theta}(X, Y)`.
pub fn cov_like<T: Real>(dist: &JointDistribution<T>, e: &Exponents<T>) -> T {
    let pm1 = e.p() - T::one();
    let (mixed, ex, ey) = dist.atoms().iter().fold((T::zero(), T::zero(), T::zero()), |(m, x, y), a| {
        (m + a.w * power(a.x, pm1) * a.y, x + a.w * a.x, y + a.w * a.y)
    });
    mixed - e.theta_pow() * power(ex, pm1) * ey
}

/// `C_{p,theta}(X + tY, Y)`.
fn cov_like_shifted<T: Real>(dist: &JointDistribution<T>, e: &Exponents<T>, t: T) -> T {
    let pm1 = e.p() - T::one();
    let (mixed, ez, ey) = dist.atoms().iter().fold((T::zero(), T::zero(), T::zero()), |(m, z, y), a| {
        let zi = a.x + t * a.y;
        (m + a.w * power(zi, pm1) * a.y, z + a.w * zi, y + a.w * a.y)
    });
    mixed - e.theta_pow() * power(ez, pm1) * ey
}

/// `Delta_{p,theta}(X, Y)`, the gap of the Hölder-type inequality.
pub fn delta<T: Real>(dist: &JointDistribution<T>, e: &Exponents<T>) -> Result<T> {
    let ex = excess(dist, Axis::X, e)?;
    let ey = excess(dist, Axis::Y, e)?;
    Ok(cov_like(dist, e) - power(ex, e.p() - T::one()) * ey)
}

/// `Delta_{p;A,B,C}(X, Y)`:
/// `A + E X^(p-1) Y - E^(p-1) X E Y - (B + E X^p - E^p X)^(1/q) (C + E Y^p - E^p Y)^(1/p)`.
///
/// The interpolation weight of `e` is ignored.
pub fn delta_abc<T: Real>(dist: &JointDistribution<T>, e: &Exponents<T>, m: &MassAtInfinity<T>) -> Result<T> {
    let p = e.p();
    let pm1 = p - T::one();
    let mut acc = [T::zero(); 5];
    for a in dist.atoms() {
        acc[0] = acc[0] + a.w * power(a.x, pm1) * a.y;
        acc[1] = acc[1] + a.w * a.x;
        acc[2] = acc[2] + a.w * a.y;
        acc[3] = acc[3] + a.w * power(a.x, p);
        acc[4] = acc[4] + a.w * power(a.y, p);
    }
    let [mixed, ex, ey, exp_, eyp] = acc;
    let rx = clamped_root(m.b + exp_ - power(ex, p), m.b + exp_, e.q().recip())?;
    let ry = clamped_root(m.c + eyp - power(ey, p), m.c + eyp, p.recip())?;
    Ok(m.a + mixed - power(ex, pm1) * ey - rx * ry)
}

/// `g(t) = excess(X + tY) - excess(X) - t excess(Y)`.
pub fn minkowski_g<T: Real>(dist: &JointDistribution<T>, e: &Exponents<T>, t: T) -> Result<T> {
    if !(t >= T::zero()) {
        return Err(Error::Precondition(format!("minkowski_g needs t >= 0, got {t}")));
    }
    let ez = excess_of_sum(dist, e, t)?;
    let ex = excess(dist, Axis::X, e)?;
    let ey = excess(dist, Axis::Y, e)?;
    Ok(ez - ex - t * ey)
}

/// `g'(t) = C(X + tY, Y) excess(X + tY)^(1-p) - excess(Y)`.
///
/// Fails with [`Error::Degenerate`] when `X + tY` has zero excess.
pub fn minkowski_g_prime<T: Real>(dist: &JointDistribution<T>, e: &Exponents<T>, t: T) -> Result<T> {
    if !(t >= T::zero()) {
        return Err(Error::Precondition(format!("minkowski_g_prime needs t >= 0, got {t}")));
    }
    let (rad, scale) = excess_radicand(dist, e, |a| a.x + t * a.y);
    if rad <= T::lit(16.0) * T::epsilon() * scale {
        return Err(Error::Degenerate(format!("excess of X + tY vanishes at t = {t}")));
    }
    let ez = power(rad, e.p().recip());
    let ey = excess(dist, Axis::Y, e)?;
    Ok(cov_like_shifted(dist, e, t) * power(ez, T::one() - e.p()) - ey)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bern() -> JointDistribution {
        JointDistribution::from_triples(&[(0.0, 0.0, 0.5), (1.0, 1.0, 0.5)]).unwrap()
    }

    fn two_point() -> JointDistribution {
        JointDistribution::from_triples(&[(1.0, 1.0, 0.5), (3.0, 3.0, 0.5)]).unwrap()
    }

    fn ex(p: f64, theta: f64) -> Exponents {
        Exponents::new(p, theta).unwrap()
    }

    #[test]
    fn norms_and_moments() {
        assert!((p_norm(&bern(), Axis::X, 2.0).unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(p_norm(&bern(), Axis::X, 1.0).unwrap(), 0.5);
        let pm = JointDistribution::<f64>::point(3.0, 1.0).unwrap();
        for r in [1.0, 1.5, 2.0, 7.0] {
            assert!((p_norm(&pm, Axis::X, r).unwrap() - 3.0).abs() < 1e-14);
        }
        assert_eq!(p_norm(&bern(), Axis::X, 0.5), Err(Error::NormOrder(0.5)));
        assert_eq!(moment(&bern(), Axis::Y, 0.0), 1.0);
        assert_eq!(moment(&bern(), Axis::X, -1.0), f64::INFINITY);
        assert_eq!(moment(&two_point(), Axis::X, 2.0), 5.0);
    }

    #[test]
    fn excess_values() {
        let e0 = ex(2.5, 0.0);
        assert_eq!(excess(&two_point(), Axis::X, &e0).unwrap(), p_norm(&two_point(), Axis::X, 2.5).unwrap());
        let pm = JointDistribution::point(1.7, 0.2).unwrap();
        assert_eq!(excess(&pm, Axis::X, &ex(1.3, 1.0)).unwrap(), 0.0);
        assert!((excess(&bern(), Axis::X, &ex(2.0, 1.0)).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn radicand_clamp() {
        assert_eq!(clamped_root(-1e-14, 1.0, 0.5).unwrap(), 0.0);
        assert!(matches!(clamped_root(-1e-6, 1.0, 0.5), Err(Error::NegativeRadicand { .. })));
    }

    #[test]
    fn cov_like_values() {
        assert!((cov_like(&two_point(), &ex(2.0, 1.0)) - 1.0).abs() < 1e-15);
        let pm = JointDistribution::point(2.0, 2.0).unwrap();
        assert!(cov_like(&pm, &ex(1.7, 1.0)).abs() < 1e-14);
        assert!((cov_like(&bern(), &ex(1.5, 0.0)) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn delta_values() {
        for p in [1.2, 1.5, 2.0] {
            assert!(delta(&two_point(), &ex(p, 1.0)).unwrap().abs() < 1e-12);
        }
        assert!(delta(&bern(), &ex(1.5, 0.0)).unwrap().abs() < 1e-15);
        // X ~ Bernoulli(1/2), Y = X + 0.1, p = 3; reference value from a 40-digit evaluation.
        let d = JointDistribution::from_triples(&[(0.0, 0.1, 0.5), (1.0, 1.1, 0.5)]).unwrap();
        let v = delta(&d, &ex(3.0, 1.0)).unwrap();
        assert!((v - 1.503_036_556_520_850e-3).abs() < 1e-15, "{v}");
    }

    #[test]
    fn delta_abc_values() {
        let d = JointDistribution::from_triples(&[(0.5, 2.0, 0.3), (1.5, 0.2, 0.7)]).unwrap();
        let e = ex(1.6, 0.4);
        let base = delta(&d, &e.with_theta(1.0).unwrap()).unwrap();
        assert!((delta_abc(&d, &e, &MassAtInfinity::zero()).unwrap() - base).abs() < 1e-14);
        let m = MassAtInfinity::new(0.3, 0.0, 0.0).unwrap();
        assert!((delta_abc(&d, &e, &m).unwrap() - base - 0.3).abs() < 1e-14);
    }

    #[test]
    fn minkowski_function() {
        let d = JointDistribution::from_triples(&[(0.5, 2.0, 0.3), (1.5, 0.2, 0.7)]).unwrap();
        let e = ex(1.5, 0.6);
        assert_eq!(minkowski_g(&d, &e, 0.0).unwrap(), 0.0);
        for t in [0.3, 1.0, 4.0] {
            assert!(minkowski_g(&d, &ex(1.5, 0.0), t).unwrap() <= 1e-12);
        }
        assert!(minkowski_g(&bern(), &ex(1.5, 1.0), 1.0).unwrap() <= 1e-12);
        assert!(minkowski_g(&d, &e, -1.0).is_err());
        assert!(minkowski_g_prime(&two_point(), &ex(1.5, 1.0), 0.0).unwrap().abs() < 1e-12);
        let pm = JointDistribution::point(1.0, 1.0).unwrap();
        assert!(matches!(minkowski_g_prime(&pm, &ex(1.5, 1.0), 0.5), Err(Error::Degenerate(_))));
    }

    #[test]
    fn gap_report_tolerance() {
        let r = GapReport::new(Inequality::Holder, 2.0 + 1e-9, 2.0, None);
        assert!(r.holds);
        let r = GapReport::new(Inequality::Holder, 2.0 + 3e-9, 2.0, None);
        assert!(!r.holds);
        assert_eq!(r.gap, r.lhs - r.rhs);
        assert_eq!("2nd".parse::<Inequality>().unwrap(), Inequality::Holder);
        assert_eq!(Inequality::Minkowski.to_string(), "1st");
    }
}
