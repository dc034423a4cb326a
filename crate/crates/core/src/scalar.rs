//! Scalar abstraction: the whole crate is generic over the real scalar type.
//!
//! Every numerical routine is written against [`Scalar`], which is satisfied
//! by `f32` and `f64`. Complex arithmetic uses `num_complex::Complex<T>`
//! throughout. The crate root exports concrete aliases for the common case.

use std::fmt;
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Real scalar type underlying all matrices, rates, and frequencies.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + NumAssign
    + Sum
    + fmt::Debug
    + fmt::Display
    + fmt::LowerExp
    + Default
    + Send
    + Sync
    + 'static
{
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Convert an `f64` constant to the working scalar type.
///
/// Values below the target type's range saturate toward zero (e.g. `1e-300`
/// becomes `0.0f32`), which is the desired behavior for tolerance constants.
#[inline]
pub fn real<T: Scalar>(x: f64) -> T {
    T::from_f64(x).unwrap_or_else(|| {
        if x > 0.0 {
            T::infinity()
        } else {
            T::neg_infinity()
        }
    })
}

/// Complex number over the working scalar.
pub type C<T> = Complex<T>;

/// `x + 0i`.
#[inline]
pub fn cr<T: Scalar>(x: T) -> C<T> {
    Complex::new(x, T::zero())
}

/// `re + im·i`.
#[inline]
pub fn c<T: Scalar>(re: T, im: T) -> C<T> {
    Complex::new(re, im)
}

/// The imaginary unit.
#[inline]
pub fn ci<T: Scalar>() -> C<T> {
    Complex::new(T::zero(), T::one())
}
