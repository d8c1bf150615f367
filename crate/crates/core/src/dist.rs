//! Finite joint distributions of two nonnegative random variables.
//!
//! Every random variable in the crate lives on a finite probability space:
//! a list of atoms `(x, y, w)` with `w > 0` and `sum w = 1`. Powers follow
//! the conventions `0^0 = 1`, `0^a = +inf` for `a < 0` and `0 * inf = 0`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{cast, Real};

/// Hölder conjugate tolerance: `|1/p + 1/q - 1|` must not exceed this.
pub const CONJUGATE_TOL: f64 = 1e-12;
/// Largest weight-sum defect that is silently renormalised.
pub const RENORMALIZE_TOL: f64 = 1e-9;
/// Smallest admissible atom weight.
pub const MIN_WEIGHT: f64 = 1e-15;

/// The exponent `p > 1`, its conjugate `q = p / (p - 1)` and the
/// interpolation weight `theta` in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Exponents<T = f64> {
    p: T,
    q: T,
    theta: T,
}

impl<T: Real> Exponents<T> {
    pub fn new(p: T, theta: T) -> Result<Self> {
        if !(p > T::one()) || !p.is_finite() {
            return Err(Error::ExponentTooSmall(p.to_f64_lossy()));
        }
        if !(theta >= T::zero() && theta <= T::one()) {
            return Err(Error::ThetaOutOfRange(theta.to_f64_lossy()));
        }
        let q = p / (p - T::one());
        debug_assert!((p.recip() + q.recip() - T::one()).abs() <= T::lit(CONJUGATE_TOL));
        Ok(Self { p, q, theta })
    }

    pub fn p(&self) -> T {
        self.p
    }

    pub fn q(&self) -> T {
        self.q
    }

    pub fn theta(&self) -> T {
        self.theta
    }

    /// Same `p`, different `theta`.
    pub fn with_theta(&self, theta: T) -> Result<Self> {
        Self::new(self.p, theta)
    }

    /// `theta^p`, the weight on the centring term.
    pub fn theta_pow(&self) -> T {
        power(self.theta, self.p)
    }

    pub fn cast<U: Real>(&self) -> Exponents<U> {
        let p: U = cast(self.p);
        Exponents { p, q: p / (p - U::one()), theta: cast(self.theta) }
    }
}

/// `base^exponent` for `base >= 0` with `0^0 = 1` and `0^a = +inf`, `a < 0`.
#[inline]
pub fn power<T: Real>(base: T, exponent: T) -> T {
    if base.is_zero() {
        if exponent.is_zero() {
            T::one()
        } else if exponent < T::zero() {
            T::infinity()
        } else {
            T::zero()
        }
    } else {
        base.powf(exponent)
    }
}

/// Product with the convention `0 * inf = 0`.
#[inline]
pub fn mul_convention<T: Real>(a: T, b: T) -> T {
    if a.is_zero() || b.is_zero() {
        T::zero()
    } else {
        a * b
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom<T = f64> {
    pub x: T,
    pub y: T,
    pub w: T,
}

impl<T: Real> Atom<T> {
    pub fn new(x: T, y: T, w: T) -> Self {
        Self { x, y, w }
    }

    #[inline]
    pub fn coord(&self, axis: Axis) -> T {
        match axis {
            Axis::X => self.x,
            Axis::Y => self.y,
        }
    }
}

/// A finite joint law of `(X, Y)` with strictly positive weights.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution<T = f64> {
    atoms: Vec<Atom<T>>,
}

impl<T: Real> JointDistribution<T> {
    /// Validates and, when the weight sum is within `1e-9` of one,
    /// renormalises the atoms. Atom order is preserved.
    pub fn new(atoms: Vec<Atom<T>>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::EmptyDistribution);
        }
        let mut sum = T::zero();
        for (index, a) in atoms.iter().enumerate() {
            for v in [a.x, a.y, a.w] {
                if !v.is_finite() {
                    return Err(Error::NonFinite { index, value: v.to_f64_lossy() });
                }
            }
            for v in [a.x, a.y] {
                if v < T::zero() {
                    return Err(Error::NegativeCoordinate { index, value: v.to_f64_lossy() });
                }
            }
            if !(a.w > T::zero()) {
                return Err(Error::NonPositiveWeight { index, value: a.w.to_f64_lossy() });
            }
            if a.w < T::lit(MIN_WEIGHT) {
                return Err(Error::WeightTooSmall { index, value: a.w.to_f64_lossy() });
            }
            sum = sum + a.w;
        }
        if (sum - T::one()).abs() > T::lit(RENORMALIZE_TOL) {
            return Err(Error::WeightSum(sum.to_f64_lossy()));
        }
        let atoms = if sum == T::one() {
            atoms
        } else {
            atoms.into_iter().map(|a| Atom { w: a.w / sum, ..a }).collect()
        };
        Ok(Self { atoms })
    }

    /// Builds a distribution from `(x, y, w)` triples.
    pub fn from_triples(triples: &[(T, T, T)]) -> Result<Self> {
        Self::new(triples.iter().map(|&(x, y, w)| Atom::new(x, y, w)).collect())
    }

    /// Normalises arbitrary positive weights, then validates.
    pub fn normalized(mut atoms: Vec<Atom<T>>) -> Result<Self> {
        let sum = atoms.iter().fold(T::zero(), |s, a| s + a.w);
        if !(sum > T::zero()) || !sum.is_finite() {
            return Err(Error::WeightSum(sum.to_f64_lossy()));
        }
        for a in &mut atoms {
            a.w = a.w / sum;
        }
        Self::new(atoms)
    }

    /// Point mass at `(x, y)`.
    pub fn point(x: T, y: T) -> Result<Self> {
        Self::new(vec![Atom::new(x, y, T::one())])
    }

    pub fn atoms(&self) -> &[Atom<T>] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// `E f(X, Y)`.
    #[inline]
    pub fn expect<F: Fn(T, T) -> T>(&self, f: F) -> T {
        self.atoms.iter().fold(T::zero(), |s, a| s + mul_convention(a.w, f(a.x, a.y)))
    }

    pub fn values(&self, axis: Axis) -> impl Iterator<Item = T> + '_ {
        self.atoms.iter().map(move |a| a.coord(axis))
    }

    /// New values on the same weights. Rejects negative or non-finite output.
    pub fn map_values<F: Fn(&Atom<T>) -> (T, T)>(&self, f: F) -> Result<Self> {
        let mut atoms = Vec::with_capacity(self.atoms.len());
        for (index, a) in self.atoms.iter().enumerate() {
            let (x, y) = f(a);
            for v in [x, y] {
                if !v.is_finite() {
                    return Err(Error::NonFinite { index, value: v.to_f64_lossy() });
                }
                if v < T::zero() {
                    return Err(Error::NegativeCoordinate { index, value: v.to_f64_lossy() });
                }
            }
            atoms.push(Atom { x, y, w: a.w });
        }
        Ok(Self { atoms })
    }

    /// `(X, Y) -> (cX, cY)`.
    pub fn scaled(&self, c: T) -> Result<Self> {
        self.map_values(|a| (c * a.x, c * a.y))
    }

    /// `(X, Y) -> (Y, X)`.
    pub fn swapped(&self) -> Self {
        Self { atoms: self.atoms.iter().map(|a| Atom { x: a.y, y: a.x, w: a.w }).collect() }
    }

    pub fn marginal(&self, axis: Axis) -> Marginal<T> {
        Marginal {
            values: self.values(axis).collect(),
            weights: self.atoms.iter().map(|a| a.w).collect(),
        }
    }

    pub fn cast<U: Real>(&self) -> JointDistribution<U> {
        JointDistribution {
            atoms: self.atoms.iter().map(|a| Atom { x: cast(a.x), y: cast(a.y), w: cast(a.w) }).collect(),
        }
    }

    /// Multiset equality of atoms with a per-field tolerance.
    pub fn approx_eq(&self, other: &Self, tol: T) -> bool {
        if self.len() != other.len() {
            return false;
        }
        let close = |a: &Atom<T>, b: &Atom<T>| {
            (a.x - b.x).abs() <= tol && (a.y - b.y).abs() <= tol && (a.w - b.w).abs() <= tol
        };
        let mut used = vec![false; other.len()];
        self.atoms.iter().all(|a| {
            match other.atoms.iter().enumerate().position(|(j, b)| !used[j] && close(a, b)) {
                Some(j) => {
                    used[j] = true;
                    true
                }
                None => false,
            }
        })
    }
}

impl JointDistribution<f64> {
    pub fn from_json(text: &str) -> Result<Self> {
        let file: DistributionFile = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        file.into_distribution()
    }

    pub fn to_file(&self) -> DistributionFile {
        DistributionFile { atoms: self.atoms.clone() }
    }
}

/// On-disk form: `{"atoms": [{"x": .., "y": .., "w": ..}, ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistributionFile {
    pub atoms: Vec<Atom<f64>>,
}

impl DistributionFile {
    pub fn into_distribution(self) -> Result<JointDistribution<f64>> {
        JointDistribution::new(self.atoms)
    }
}

/// One coordinate of a distribution: values with their weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Marginal<T = f64> {
    values: Vec<T>,
    weights: Vec<T>,
}

impl<T: Real> Marginal<T> {
    /// Validated through [`JointDistribution::new`] with `y = x`.
    pub fn new(values: Vec<T>, weights: Vec<T>) -> Result<Self> {
        if values.len() != weights.len() {
            return Err(Error::Precondition("values and weights differ in length".into()));
        }
        let joint = JointDistribution::new(
            values.iter().zip(&weights).map(|(&v, &w)| Atom::new(v, v, w)).collect(),
        )?;
        Ok(joint.marginal(Axis::X))
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn min(&self) -> T {
        self.values.iter().copied().fold(T::infinity(), T::min)
    }

    /// Joint law of `(X, g(X))`.
    pub fn pair_with<F: Fn(T) -> T>(&self, g: F) -> Result<JointDistribution<T>> {
        let atoms = self.values.iter().zip(&self.weights).map(|(&x, &w)| Atom::new(x, g(x), w)).collect();
        JointDistribution { atoms }.map_values(|a| (a.x, a.y))
    }

    pub fn cast<U: Real>(&self) -> Marginal<U> {
        Marginal {
            values: self.values.iter().map(|&v| cast(v)).collect(),
            weights: self.weights.iter().map(|&v| cast(v)).collect(),
        }
    }
}

/// Positions where a coordinate vector is strictly positive.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct SupportIndex {
    indices: Vec<usize>,
}

impl SupportIndex {
    pub fn of<T: Real>(values: &[T]) -> Self {
        Self { indices: values.iter().enumerate().filter(|(_, v)| **v > T::zero()).map(|(i, _)| i).collect() }
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.binary_search(&i).is_ok()
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.indices.iter().copied()
    }

    pub fn intersects(&self, other: &SupportIndex) -> bool {
        self.indices.iter().any(|i| other.contains(*i))
    }
}
