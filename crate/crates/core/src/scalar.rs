//! Scalar abstraction shared by the numerics kernel and the physics layers.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Real floating-point scalar the whole crate is generic over.
///
/// The associated tolerances are the global thresholds of the dense kernel.
/// They are tied to the precision of the type, so `f32` gets looser values.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + NumAssign
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Pivots below `pivot_tolerance() * ‖A‖∞` make a matrix singular.
    fn pivot_tolerance() -> Self;
    /// Relative size below which a triangular diagonal entry counts as zero
    /// when determining the dimension of a kernel.
    fn kernel_tolerance() -> Self;

    /// Converts an `f64` literal. Panics only if the target type cannot
    /// represent finite doubles, which no supported type does.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 literal")
    }
}

impl Real for f64 {
    fn pivot_tolerance() -> Self {
        1e-14
    }
    fn kernel_tolerance() -> Self {
        1e-10
    }
}

impl Real for f32 {
    fn pivot_tolerance() -> Self {
        1e-6
    }
    fn kernel_tolerance() -> Self {
        1e-4
    }
}

/// Shorthand for `Complex<R>` built from two reals.
#[inline]
pub fn c<R: Real>(re: R, im: R) -> Complex<R> {
    Complex::new(re, im)
}

/// Real number embedded in the complex plane.
#[inline]
pub fn re<R: Real>(x: R) -> Complex<R> {
    Complex::new(x, R::zero())
}

/// The imaginary unit.
#[inline]
pub fn i<R: Real>() -> Complex<R> {
    Complex::new(R::zero(), R::one())
}

/// `true` when both parts are finite.
#[inline]
pub fn is_finite<R: Real>(z: Complex<R>) -> bool {
    z.re.is_finite() && z.im.is_finite()
}
