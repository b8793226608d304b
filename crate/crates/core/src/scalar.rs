//! Scalar abstractions.
//!
//! Analytic code is written against [`Real`], implemented for `f32` and `f64`.
//! Threshold arithmetic on root data only needs an ordered field, captured by
//! [`Field`], so it also runs on exact rationals such as [`num_rational::Rational64`].

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, Num, NumAssign};

/// Floating point type used by every analytic module: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + NumAssign + Default + Debug + Display + Send + Sync + 'static
{
    /// Converts an `f64` literal into `Self`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in every Real type")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable as a float")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Ordered field used by the root-data threshold formulas.
///
/// Blanket-implemented, so `f64`, `f32` and `Ratio<i64>` all qualify.
pub trait Field: Num + Clone + PartialOrd + FromPrimitive + Debug {}

impl<S: Num + Clone + PartialOrd + FromPrimitive + Debug> Field for S {}
