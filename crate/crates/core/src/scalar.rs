//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive};

use crate::ddouble::DoubleDouble;

/// A real scalar: `f32`, `f64` or [`DoubleDouble`].
pub trait Real: Float + FromPrimitive + Debug + Display + Send + Sync + 'static {
    /// Converts an `f64` constant into this scalar type.
    #[inline]
    fn lit(v: f64) -> Self {
        <Self as num_traits::NumCast>::from(v).expect("f64 constants are representable")
    }

    /// Nearest `f64`.
    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}
impl Real for DoubleDouble {}

/// Converts between scalar types through `f64` for primitive floats and
/// exactly for `f64 -> DoubleDouble`.
#[inline]
pub fn cast<S: Real, T: Real>(v: S) -> T {
    T::lit(v.to_f64_lossy())
}
