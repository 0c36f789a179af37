//! Numeric modes: `f64` for speed, `BigRational` for exact arithmetic.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + PartialOrd
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Send
    + Sync
{
    fn from_ratio(num: u128, den: u128) -> Self;
    fn to_f64(&self) -> f64;
    /// Whether a table total counts as one (exact in rational mode).
    fn is_unit_total(&self) -> bool;
}

impl Scalar for f64 {
    fn from_ratio(num: u128, den: u128) -> f64 {
        num as f64 / den as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn is_unit_total(&self) -> bool {
        (self - 1.0).abs() <= 1e-12
    }
}

impl Scalar for BigRational {
    fn from_ratio(num: u128, den: u128) -> BigRational {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn is_unit_total(&self) -> bool {
        self.is_one()
    }
}
