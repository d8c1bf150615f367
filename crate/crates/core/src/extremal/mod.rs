//! The compactified extremal problem.
//!
//! A finite joint law `(x_i, y_i, w_i)` is mapped to `u_i = x_i^p w_i`,
//! `v_i = y_i^p w_i`, `w_i`, so that `E X = sum u^(1/p) w^(1/q)`,
//! `E X^p = sum u` and `E X^(p-1) Y = sum u^(1/q) v^(1/p)`. Fixing the four
//! moments `m11 = E X`, `m1p = E X^p`, `m21 = E Y`, `m2p = E Y^p` leaves the
//! objective
//!
//! `D(U, V, W) = sum u^(1/q) v^(1/p) - m11^(p-1) m21 - (m1p - m11^p)^(1/q) (m2p - m21^p)^(1/p)`
//!
//! on a compact set. Indices with `w_i = 0` but `u_i + v_i > 0` carry mass
//! that escaped to infinity; [`extract_mass_at_infinity`] collects it into
//! `(A, B, C)`.
//!
//! Stationarity on fixed supports reads, with multipliers
//! `(alpha, lambda, mu, nu, rho, tau)`:
//!
//! 1. `alpha (p-1) u^(-1/p) v^(1/p) = lambda u^(-1/q) w^(1/q) + nu` on `I_U`
//! 2. `alpha u^(1/q) v^(-1/q) = mu v^(-1/q) w^(1/q) + rho` on `I_V`
//! 3. `0 = lambda u^(1/p) w^(-1/p) + mu v^(1/p) w^(-1/p) + tau` on `I_W`
//!
//! and, multiplied by `u_i` and `v_i`,
//!
//! 4. `alpha (p-1) u^(1/q) v^(1/p) = lambda u^(1/p) w^(1/q) + nu u`
//! 5. `alpha u^(1/q) v^(1/p) = mu v^(1/p) w^(1/q) + rho v`.

mod optimize;

pub use optimize::{maximize, MaximizeOptions, MaximizeResult};

use nalgebra::DMatrix;
use serde::Serialize;

use crate::dist::{power, Atom, Exponents, JointDistribution, SupportIndex, MIN_WEIGHT};
use crate::error::{Error, Result};
use crate::functionals::{clamped_root, delta, MassAtInfinity};
use crate::scalar::Real;

/// Relative feasibility tolerance of a [`CompactifiedPoint`].
pub const FEASIBILITY_TOL: f64 = 1e-8;
/// Below this value of `u_i` or `v_i` the multiplied forms 4 and 5 replace 1 and 2.
pub const SINGULARITY_GUARD: f64 = 1e-12;

/// The four moments fixed in the extremal problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentSpec<T = f64> {
    pub m11: T,
    pub m1p: T,
    pub m21: T,
    pub m2p: T,
}

impl<T: Real> MomentSpec<T> {
    pub fn new(m11: T, m1p: T, m21: T, m2p: T) -> Result<Self> {
        for (name, v) in [("m11", m11), ("m1p", m1p), ("m21", m21), ("m2p", m2p)] {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(Error::Precondition(format!("{name} = {v} must be positive and finite")));
            }
        }
        Ok(Self { m11, m1p, m21, m2p })
    }

    /// Moments of a distribution; fails when a moment vanishes.
    pub fn from_dist(dist: &JointDistribution<T>, p: T) -> Result<Self> {
        let m = |f: &dyn Fn(&Atom<T>) -> T| dist.atoms().iter().fold(T::zero(), |s, a| s + a.w * f(a));
        Self::new(m(&|a| a.x), m(&|a| power(a.x, p)), m(&|a| a.y), m(&|a| power(a.y, p)))
    }

    /// `(m1p - m11^p, m2p - m21^p)`; both must be nonnegative for feasibility.
    pub fn lyapunov_slack(&self, p: T) -> (T, T) {
        (self.m1p - power(self.m11, p), self.m2p - power(self.m21, p))
    }

    /// Lyapunov feasibility up to a relative rounding allowance of `1e-12`.
    pub fn is_feasible(&self, p: T) -> bool {
        let (sx, sy) = self.lyapunov_slack(p);
        let tol = T::lit(1e-12);
        sx >= -tol * self.m1p && sy >= -tol * self.m2p
    }

    /// `m11^(p-1) m21 + (m1p - m11^p)^(1/q) (m2p - m21^p)^(1/p)`, the part of
    /// the objective that does not vary over the feasible set.
    pub fn constant_term(&self, e: &Exponents<T>) -> Result<T> {
        let p = e.p();
        let (sx, sy) = self.lyapunov_slack(p);
        let rx = clamped_root(sx, self.m1p, e.q().recip())?;
        let ry = clamped_root(sy, self.m2p, p.recip())?;
        Ok(power(self.m11, p - T::one()) * self.m21 + rx * ry)
    }
}

/// A point `(U, V, W)` of the compactified problem.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompactifiedPoint<T = f64> {
    pub u: Vec<T>,
    pub v: Vec<T>,
    pub w: Vec<T>,
}

/// Which of the three coordinate vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Coordinate {
    U,
    V,
    W,
}

impl<T: Real> CompactifiedPoint<T> {
    pub fn new(u: Vec<T>, v: Vec<T>, w: Vec<T>) -> Result<Self> {
        if u.is_empty() || u.len() != v.len() || u.len() != w.len() {
            return Err(Error::Precondition("U, V, W must be nonempty and of equal length".into()));
        }
        for (index, &z) in u.iter().chain(&v).chain(&w).enumerate() {
            if !z.is_finite() {
                return Err(Error::NonFinite { index: index % u.len(), value: z.to_f64_lossy() });
            }
            if z < T::zero() {
                return Err(Error::NegativeCoordinate { index: index % u.len(), value: z.to_f64_lossy() });
            }
        }
        Ok(Self { u, v, w })
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    pub fn support(&self, which: Coordinate) -> SupportIndex {
        match which {
            Coordinate::U => SupportIndex::of(&self.u),
            Coordinate::V => SupportIndex::of(&self.v),
            Coordinate::W => SupportIndex::of(&self.w),
        }
    }

    /// `I_U` and `I_V` both meet `I_W`.
    pub fn supports_intersect(&self) -> bool {
        let w = self.support(Coordinate::W);
        self.support(Coordinate::U).intersects(&w) && self.support(Coordinate::V).intersects(&w)
    }

    /// `(sum u^(1/p) w^(1/q), sum v^(1/p) w^(1/q))`.
    pub fn first_moments(&self, e: &Exponents<T>) -> (T, T) {
        let (ip, iq) = (e.p().recip(), e.q().recip());
        let mut s = (T::zero(), T::zero());
        for i in 0..self.len() {
            let wq = power(self.w[i], iq);
            s.0 = s.0 + power(self.u[i], ip) * wq;
            s.1 = s.1 + power(self.v[i], ip) * wq;
        }
        s
    }

    /// `sum u^(1/q) v^(1/p)`.
    pub fn dot_term(&self, e: &Exponents<T>) -> T {
        let (ip, iq) = (e.p().recip(), e.q().recip());
        (0..self.len()).fold(T::zero(), |s, i| s + power(self.u[i], iq) * power(self.v[i], ip))
    }

    /// Signed relative defects of the five constraints, in the order
    /// `sum w`, `sum u`, `sum v`, `sum u^(1/p) w^(1/q)`, `sum v^(1/p) w^(1/q)`.
    pub fn constraint_defects(&self, spec: &MomentSpec<T>, e: &Exponents<T>) -> [T; 5] {
        let sum = |z: &[T]| z.iter().fold(T::zero(), |s, &v| s + v);
        let (g4, g5) = self.first_moments(e);
        [
            sum(&self.w) - T::one(),
            (sum(&self.u) - spec.m1p) / spec.m1p,
            (sum(&self.v) - spec.m2p) / spec.m2p,
            (g4 - spec.m11) / spec.m11,
            (g5 - spec.m21) / spec.m21,
        ]
    }

    /// Largest absolute relative constraint defect.
    pub fn feasibility_residual(&self, spec: &MomentSpec<T>, e: &Exponents<T>) -> T {
        self.constraint_defects(spec, e).iter().fold(T::zero(), |m, d| m.max(d.abs()))
    }

    pub fn cast<U: Real>(&self) -> CompactifiedPoint<U> {
        let c = |z: &[T]| z.iter().map(|&v| crate::scalar::cast(v)).collect();
        CompactifiedPoint { u: c(&self.u), v: c(&self.v), w: c(&self.w) }
    }
}

/// Multipliers of the stationarity system; `tau` belongs to `sum w = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LagrangeMultipliers<T = f64> {
    pub alpha: T,
    pub lambda: T,
    pub mu: T,
    pub nu: T,
    pub rho: T,
    pub tau: T,
}

impl<T: Real> LagrangeMultipliers<T> {
    /// Rejects the all-zero vector.
    pub fn new(alpha: T, lambda: T, mu: T, nu: T, rho: T, tau: T) -> Result<Self> {
        let m = Self { alpha, lambda, mu, nu, rho, tau };
        if m.as_array().iter().all(|v| v.is_zero()) {
            return Err(Error::Precondition("Lagrange multipliers must not all vanish".into()));
        }
        if m.as_array().iter().any(|v| !v.is_finite()) {
            return Err(Error::Precondition("Lagrange multipliers must be finite".into()));
        }
        Ok(m)
    }

    pub fn from_array(a: [T; 6]) -> Result<Self> {
        Self::new(a[0], a[1], a[2], a[3], a[4], a[5])
    }

    pub fn as_array(&self) -> [T; 6] {
        [self.alpha, self.lambda, self.mu, self.nu, self.rho, self.tau]
    }

    pub fn norm_inf(&self) -> T {
        self.as_array().iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    fn norm2(&self) -> T {
        self.as_array().iter().fold(T::zero(), |s, v| s + *v * *v).sqrt()
    }
}

/// Equation family of a stationarity residual, numbered as in the module docs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Family {
    One,
    Two,
    Three,
    Four,
    Five,
}

/// One residual: `lhs - rhs` of an equation at an index, plus the same value
/// divided by `|row| |multipliers|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Residual<T = f64> {
    pub index: usize,
    pub family: Family,
    pub value: T,
    pub scaled: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LagrangeResiduals<T = f64> {
    pub residuals: Vec<Residual<T>>,
}

impl<T: Real> LagrangeResiduals<T> {
    pub fn max_scaled(&self) -> T {
        self.residuals.iter().fold(T::zero(), |m, r| m.max(r.scaled.abs()))
    }

    pub fn max_abs(&self) -> T {
        self.residuals.iter().fold(T::zero(), |m, r| m.max(r.value.abs()))
    }

    pub fn family(&self, f: Family) -> impl Iterator<Item = &Residual<T>> {
        self.residuals.iter().filter(move |r| r.family == f)
    }
}

/// Coefficients of `(alpha, lambda, mu, nu, rho, tau)` in `lhs - rhs` of every
/// applicable equation.
pub fn lagrange_rows<T: Real>(point: &CompactifiedPoint<T>, e: &Exponents<T>) -> Vec<(usize, Family, [T; 6])> {
    let (ip, iq) = (e.p().recip(), e.q().recip());
    let pm1 = e.p() - T::one();
    let guard = T::lit(SINGULARITY_GUARD);
    let z = T::zero();
    let mut rows = Vec::new();
    for i in 0..point.len() {
        let (u, v, w) = (point.u[i], point.v[i], point.w[i]);
        if u > z {
            if u >= guard {
                rows.push((i, Family::One, [
                    pm1 * power(u, -ip) * power(v, ip),
                    -power(u, -iq) * power(w, iq),
                    z,
                    -T::one(),
                    z,
                    z,
                ]));
            } else {
                rows.push((i, Family::Four, [
                    pm1 * power(u, iq) * power(v, ip),
                    -power(u, ip) * power(w, iq),
                    z,
                    -u,
                    z,
                    z,
                ]));
            }
        }
        if v > z {
            if v >= guard {
                rows.push((i, Family::Two, [
                    power(u, iq) * power(v, -iq),
                    z,
                    -power(v, -iq) * power(w, iq),
                    z,
                    -T::one(),
                    z,
                ]));
            } else {
                rows.push((i, Family::Five, [
                    power(u, iq) * power(v, ip),
                    z,
                    -power(v, ip) * power(w, iq),
                    z,
                    -v,
                    z,
                ]));
            }
        }
        if w > z {
            rows.push((i, Family::Three, [
                z,
                power(u, ip) * power(w, -ip),
                power(v, ip) * power(w, -ip),
                z,
                z,
                T::one(),
            ]));
        }
    }
    rows
}

/// Residuals of the stationarity system at `point` for given multipliers.
pub fn lagrange_residuals<T: Real>(
    point: &CompactifiedPoint<T>,
    mult: &LagrangeMultipliers<T>,
    e: &Exponents<T>,
) -> LagrangeResiduals<T> {
    let m = mult.as_array();
    let mnorm = mult.norm2();
    let residuals = lagrange_rows(point, e)
        .into_iter()
        .map(|(index, family, row)| {
            let value = (0..6).fold(T::zero(), |s, k| s + row[k] * m[k]);
            let rnorm = row.iter().fold(T::zero(), |s, c| s + *c * *c).sqrt();
            let scale = rnorm * mnorm;
            let scaled = if scale > T::zero() { value / scale } else { value };
            Residual { index, family, value, scaled }
        })
        .collect();
    LagrangeResiduals { residuals }
}

/// Least-squares multipliers: the unit vector minimising the residuals of
/// the row-normalised system. Returns the multipliers and the largest scaled
/// residual.
pub fn fit_multipliers(point: &CompactifiedPoint<f64>, e: &Exponents<f64>) -> Result<(LagrangeMultipliers<f64>, f64)> {
    let rows = lagrange_rows(point, e);
    let usable: Vec<[f64; 6]> = rows
        .iter()
        .filter_map(|(_, _, r)| {
            let n = r.iter().map(|c| c * c).sum::<f64>().sqrt();
            (n > 0.0 && n.is_finite()).then(|| r.map(|c| c / n))
        })
        .collect();
    if usable.is_empty() {
        return Err(Error::Degenerate("no stationarity equation applies".into()));
    }
    // Pad to at least six rows so the full right singular basis is returned.
    let nrows = usable.len().max(6);
    let a = DMatrix::from_fn(nrows, 6, |i, j| usable.get(i).map_or(0.0, |r| r[j]));
    let svd = a.svd(false, true);
    let vt = svd.v_t.ok_or_else(|| Error::Degenerate("SVD failed".into()))?;
    let (k, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |(bi, bv), (i, &s)| if s < bv { (i, s) } else { (bi, bv) });
    let mut m = [0.0; 6];
    for j in 0..6 {
        m[j] = vt[(k, j)];
    }
    // Fix the sign so that the first clearly nonzero entry is positive.
    if let Some(first) = m.iter().find(|v| v.abs() > 1e-12) {
        if *first < 0.0 {
            m.iter_mut().for_each(|v| *v = -*v);
        }
    }
    let mult = LagrangeMultipliers::from_array(m)?;
    let res = lagrange_residuals(point, &mult, e).max_scaled();
    Ok((mult, res))
}

/// Maps a distribution to the compactified problem.
///
/// The objective at the image equals `Delta_p` of the distribution.
pub fn compactify<T: Real>(dist: &JointDistribution<T>, e: &Exponents<T>) -> Result<(CompactifiedPoint<T>, MomentSpec<T>)> {
    let p = e.p();
    let atoms = dist.atoms();
    let point = CompactifiedPoint {
        u: atoms.iter().map(|a| power(a.x, p) * a.w).collect(),
        v: atoms.iter().map(|a| power(a.y, p) * a.w).collect(),
        w: atoms.iter().map(|a| a.w).collect(),
    };
    Ok((point, MomentSpec::from_dist(dist, p)?))
}

/// `sum u^(1/q) v^(1/p) - m11^(p-1) m21 - (m1p - m11^p)^(1/q) (m2p - m21^p)^(1/p)`.
pub fn objective_tilde<T: Real>(point: &CompactifiedPoint<T>, spec: &MomentSpec<T>, e: &Exponents<T>) -> Result<T> {
    if !spec.is_feasible(e.p()) {
        let (sx, sy) = spec.lyapunov_slack(e.p());
        return Err(Error::NegativeRadicand { value: sx.min(sy).to_f64_lossy(), scale: spec.m1p.max(spec.m2p).to_f64_lossy() });
    }
    Ok(point.dot_term(e) - spec.constant_term(e)?)
}

/// Splits a point into the law on `I_W` and the mass at infinity
/// `A = sum u^(1/q) v^(1/p)`, `B = sum u`, `C = sum v` over `i` outside `I_W`.
///
/// Weights below the data model's minimum are treated as zero.
pub fn extract_mass_at_infinity<T: Real>(
    point: &CompactifiedPoint<T>,
    e: &Exponents<T>,
) -> Result<(JointDistribution<T>, MassAtInfinity<T>)> {
    let (ip, iq) = (e.p().recip(), e.q().recip());
    let mut atoms = Vec::new();
    let mut m = MassAtInfinity::zero();
    for i in 0..point.len() {
        let (u, v, w) = (point.u[i], point.v[i], point.w[i]);
        if w >= T::lit(MIN_WEIGHT) {
            atoms.push(Atom::new(power(u / w, ip), power(v / w, ip), w));
        } else {
            m.a = m.a + power(u, iq) * power(v, ip);
            m.b = m.b + u;
            m.c = m.c + v;
        }
    }
    if atoms.is_empty() {
        return Err(Error::Degenerate("no index carries positive weight".into()));
    }
    Ok((JointDistribution::normalized(atoms)?, m))
}

/// The cases of the `mu = 0` analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DegenerateCase {
    /// `rho = 0 != alpha`: `E X^(p-1) Y = 0`.
    Subcase1_1,
    /// `rho = alpha = lambda = nu = 0`: forces `tau = 0`, impossible.
    Subsubcase1_2_1,
    /// `rho = alpha = 0 != lambda`: `X` is constant.
    Subsubcase1_2_2a,
    /// `rho = alpha = lambda = 0 != nu`: `X = 0`.
    Subsubcase1_2_2b,
    /// `rho != 0 = lambda`: `Y = cX`.
    Subcase2_1,
    /// `rho != 0 != lambda`: `X` is constant.
    Subcase2_2,
}

impl DegenerateCase {
    pub fn label(&self) -> &'static str {
        match self {
            DegenerateCase::Subcase1_1 => "1.1",
            DegenerateCase::Subsubcase1_2_1 => "1.2.1",
            DegenerateCase::Subsubcase1_2_2a => "1.2.2a",
            DegenerateCase::Subsubcase1_2_2b => "1.2.2b",
            DegenerateCase::Subcase2_1 => "2.1",
            DegenerateCase::Subcase2_2 => "2.2",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Classification<T = f64> {
    pub case: DegenerateCase,
    /// Whether the structural conclusion holds on the point's law.
    pub verified: bool,
    /// Fitted `c` in `Y = cX` for subcase 2.1.
    pub c: Option<T>,
    /// `Delta_p` of the law on `I_W`.
    pub delta: T,
    pub conclusion: String,
}

/// Relative tolerance for the structural checks of [`classify_degenerate`].
pub const STRUCTURE_TOL: f64 = 1e-6;

/// Classifies multipliers with `mu = 0` and checks the case's conclusion on the
/// law `(X, Y)` reconstructed on `I_W`. `zero_tol` defaults to
/// `1e-7 * max |multiplier|`.
pub fn classify_degenerate<T: Real>(
    point: &CompactifiedPoint<T>,
    mult: &LagrangeMultipliers<T>,
    e: &Exponents<T>,
    zero_tol: Option<T>,
) -> Result<Classification<T>> {
    let tol = zero_tol.unwrap_or_else(|| T::lit(1e-7) * mult.norm_inf());
    let zero = |v: T| v.abs() <= tol;
    if mult.as_array().iter().all(|&v| zero(v)) {
        return Err(Error::Precondition("all multipliers vanish within zero_tol".into()));
    }
    if !zero(mult.mu) {
        return Err(Error::Precondition("mu is not zero; (9) gives Y = kX + t instead".into()));
    }
    let case = if zero(mult.rho) {
        if !zero(mult.alpha) {
            DegenerateCase::Subcase1_1
        } else if zero(mult.lambda) && zero(mult.nu) {
            DegenerateCase::Subsubcase1_2_1
        } else if !zero(mult.lambda) {
            DegenerateCase::Subsubcase1_2_2a
        } else {
            DegenerateCase::Subsubcase1_2_2b
        }
    } else if zero(mult.lambda) {
        DegenerateCase::Subcase2_1
    } else {
        DegenerateCase::Subcase2_2
    };

    let (dist, _) = extract_mass_at_infinity(point, e)?;
    let one = e.with_theta(T::one())?;
    let d = delta(&dist, &one)?;
    let xs: Vec<T> = dist.atoms().iter().map(|a| a.x).collect();
    let ys: Vec<T> = dist.atoms().iter().map(|a| a.y).collect();
    let xmax = xs.iter().fold(T::zero(), |m, &v| m.max(v));
    let xmin = xs.iter().fold(T::infinity(), |m, &v| m.min(v));
    let ymax = ys.iter().fold(T::zero(), |m, &v| m.max(v));
    let stol = T::lit(STRUCTURE_TOL);
    let pm1 = e.p() - T::one();
    let mut c = None;
    let (verified, conclusion) = match case {
        DegenerateCase::Subcase1_1 => {
            let scale = power(xmax, pm1) * ymax;
            let worst = xs.iter().zip(&ys).fold(T::zero(), |m, (&x, &y)| m.max(power(x, pm1) * y));
            (worst <= stol * scale.max(T::one()), "E X^(p-1) Y = 0".to_string())
        }
        DegenerateCase::Subsubcase1_2_1 => (true, "contradiction: tau = 0 as well".to_string()),
        DegenerateCase::Subsubcase1_2_2a | DegenerateCase::Subcase2_2 => {
            (xmax - xmin <= stol * xmax.max(T::one()), "X is constant".to_string())
        }
        DegenerateCase::Subsubcase1_2_2b => (xmax <= stol, "X = 0".to_string()),
        DegenerateCase::Subcase2_1 => {
            let sxx = xs.iter().fold(T::zero(), |s, &x| s + x * x);
            let sxy = xs.iter().zip(&ys).fold(T::zero(), |s, (&x, &y)| s + x * y);
            if sxx > T::zero() {
                let cf = sxy / sxx;
                c = Some(cf);
                let worst = xs.iter().zip(&ys).fold(T::zero(), |m, (&x, &y)| m.max((y - cf * x).abs()));
                (worst <= stol * ymax.max(T::one()), format!("Y = c X with c = {cf}"))
            } else {
                (ymax <= stol, "X = 0 and Y = 0".to_string())
            }
        }
    };
    Ok(Classification { case, verified: verified && d <= stol * T::one().max(d.abs()), c, delta: d, conclusion })
}
