//! Excess Minkowski and Hölder functionals for finite joint distributions.
//!
//! For `p > 1`, `q = p / (p - 1)` and `theta` in `[0, 1]`:
//!
//! - `E_{p,theta}(Z) = (E Z^p - theta^p (E Z)^p)^(1/p)`
//! - `C_{p,theta}(X, Y) = E X^(p-1) Y - theta^p (E X)^(p-1) E Y`
//! - first inequality: `E(X + Y) <= E(X) + E(Y)`
//! - second inequality: `C(X, Y) <= E(X)^(p-1) E(Y)`
//!
//! Both hold for `p` in `(1, 2]` and fail for every `p > 2`, `theta > 0`.
//! Numerical code is generic over [`Real`], implemented for `f32`, `f64` and
//! [`DoubleDouble`].

pub mod ddouble;
pub mod dist;
pub mod error;
pub mod extremal;
pub mod functionals;
pub mod inequalities;
pub mod report;
pub mod sample;
pub mod scalar;
pub mod scalar_analysis;
pub mod search;
pub mod shrink;

pub use ddouble::DoubleDouble;
pub use dist::{Atom, Axis, Exponents, JointDistribution, Marginal, SupportIndex};
pub use error::{Error, Result};
pub use functionals::{GapReport, Inequality, MassAtInfinity};
pub use scalar::Real;

pub type Dist = JointDistribution<f64>;
pub type DistF32 = JointDistribution<f32>;
pub type DistDD = JointDistribution<DoubleDouble>;
pub type Exp = Exponents<f64>;
pub type ExpF32 = Exponents<f32>;
pub type ExpDD = Exponents<DoubleDouble>;
pub type Report = GapReport<f64>;
pub type ReportDD = GapReport<DoubleDouble>;
