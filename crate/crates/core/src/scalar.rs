//! Exact scalar abstraction.
//!
//! Everything in the linear-arithmetic engine is generic over [`Scalar`], an
//! exact ordered field. Floating point types are deliberately not
//! implementors: entailment and Farkas certificates are only meaningful with
//! exact arithmetic.

use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Num, Signed};

pub trait Scalar:
    Clone + Ord + Hash + Debug + Display + FromStr + Num + Signed + Send + Sync + 'static
{
    fn from_i64(v: i64) -> Self;

    /// Numerator as an integral scalar.
    fn numer_part(&self) -> Self;

    /// Denominator (always positive) as an integral scalar.
    fn denom_part(&self) -> Self;

    /// Greatest common divisor of two integral scalars; non-negative.
    fn int_gcd(a: &Self, b: &Self) -> Self;

    /// Largest integer not above `self`.
    fn floor_part(&self) -> Self;

    fn is_integral(&self) -> bool {
        self.denom_part().is_one()
    }

    fn int_lcm(a: &Self, b: &Self) -> Self {
        if a.is_zero() || b.is_zero() {
            return Self::zero();
        }
        let g = Self::int_gcd(a, b);
        (a.clone() / g * b.clone()).abs()
    }
}

impl<T> Scalar for Ratio<T>
where
    T: Clone
        + Integer
        + Signed
        + Hash
        + Debug
        + Display
        + FromStr
        + From<i64>
        + Send
        + Sync
        + 'static,
{
    fn from_i64(v: i64) -> Self {
        Ratio::from_integer(T::from(v))
    }

    fn numer_part(&self) -> Self {
        Ratio::from_integer(self.numer().clone())
    }

    fn denom_part(&self) -> Self {
        Ratio::from_integer(self.denom().clone())
    }

    fn floor_part(&self) -> Self {
        self.floor()
    }

    fn int_gcd(a: &Self, b: &Self) -> Self {
        debug_assert!(a.is_integer() && b.is_integer());
        Ratio::from_integer(a.numer().gcd(b.numer()))
    }
}

/// Convenience constructor used throughout tests and builders.
pub fn int<S: Scalar>(v: i64) -> S {
    S::from_i64(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::Rational64;

    #[test]
    fn gcd_lcm_on_bigrational() {
        let a: Ratio<BigInt> = int(12);
        let b: Ratio<BigInt> = int(-18);
        assert_eq!(Scalar::int_gcd(&a, &b), int::<Ratio<BigInt>>(6));
        assert_eq!(Scalar::int_lcm(&a, &b), int::<Ratio<BigInt>>(36));
    }

    #[test]
    fn parts_on_rational64() {
        let x = Rational64::new(-3, 4);
        assert_eq!(x.numer_part(), int(-3));
        assert_eq!(x.denom_part(), int(4));
        assert!(!x.is_integral());
        assert!(int::<Rational64>(5).is_integral());
    }
}
