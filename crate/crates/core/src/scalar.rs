//! Scalar abstraction shared by every geometric routine.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Floating point type the library can run on: `f32` or `f64`.
///
/// The thresholds are the per-type absolute/relative cut-offs used by the
/// degeneracy tests. They are tuned for `f64`; the `f32` values are scaled to
/// its machine epsilon.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Relative wedge-norm threshold below which a triple is collinear.
    fn collinear_tol() -> Self;
    /// Relative distance below which two points coincide.
    fn coincident_tol() -> Self;
    /// Rounding slack tolerated in cosines and nonnegative energy terms.
    fn rounding_slack() -> Self;

    /// Converts an `f64` literal. Every literal used in the crate is
    /// representable in both supported types.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    fn collinear_tol() -> Self {
        1e-13
    }
    fn coincident_tol() -> Self {
        1e-14
    }
    fn rounding_slack() -> Self {
        1e-12
    }
}

impl Scalar for f32 {
    fn collinear_tol() -> Self {
        1e-6
    }
    fn coincident_tol() -> Self {
        1e-7
    }
    fn rounding_slack() -> Self {
        1e-5
    }
}
