//! Scalar abstraction for the series layer.
//!
//! The power-series recurrences run over any field-like scalar: `f64`
//! (default), `f32`, or exact rationals (`num_rational::BigRational`) when a
//! test needs bit-exact coefficient identities. Grid-level numerics are pinned
//! to [`Real`] at the crate root.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Concrete scalar used by all grid-level numerics.
pub type Real = f64;

/// Exact coefficient type for the rational recurrence mode.
pub type Rational = BigRational;

/// Field-like scalar for series coefficients.
pub trait Coeff:
    Clone
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + std::fmt::Debug
{
    fn from_int(n: i64) -> Self;

    /// Exact ratio of two small integers.
    fn ratio(num: i64, den: i64) -> Self {
        Self::from_int(num) / Self::from_int(den)
    }

    fn to_f64(&self) -> f64;

    fn abs_f64(&self) -> f64 {
        self.to_f64().abs()
    }
}

impl Coeff for f64 {
    fn from_int(n: i64) -> Self {
        n as f64
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Coeff for f32 {
    fn from_int(n: i64) -> Self {
        n as f32
    }
    fn to_f64(&self) -> f64 {
        f64::from(*self)
    }
}

impl Coeff for BigRational {
    fn from_int(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }
    fn ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_is_exact_for_rationals() {
        let r = Rational::ratio(15, 4);
        assert_eq!(r, Rational::new(BigInt::from(15), BigInt::from(4)));
        assert_eq!(Coeff::to_f64(&r), 3.75);
    }

    #[test]
    fn float_ratio_rounds_once() {
        assert_eq!(f64::ratio(3, 2), 1.5);
        assert_eq!(f64::ratio(-9, 16), -0.5625);
    }
}
