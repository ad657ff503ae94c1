//! Scalar traits the lattice code is generic over.
//!
//! Storage and arithmetic on [`Matrix`](crate::lattice::Matrix) only need
//! [`Scalar`]. The normal-form algorithms need exact Euclidean division and
//! therefore ask for [`IntScalar`]; rational solves use `Ratio<T>` on top of
//! an `IntScalar`.
//!
//! Fixed-width integers (`i64`, `i128`) satisfy [`IntScalar`] and are fine
//! for small inputs, but nothing guards against overflow. The crate-level
//! aliases use `BigInt`.

use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};

/// Anything a matrix can hold.
pub trait Scalar: Clone + Debug + Display + PartialEq + Num + Send + Sync + 'static {}

impl<T> Scalar for T where T: Clone + Debug + Display + PartialEq + Num + Send + Sync + 'static {}

/// A Euclidean integer type.
pub trait IntScalar: Scalar + Integer + Signed + Hash + FromPrimitive + ToPrimitive {
    fn from_int(v: i64) -> Self {
        <Self as FromPrimitive>::from_i64(v).expect("i64 fits every integer scalar")
    }

    fn from_uint(v: u64) -> Self {
        <Self as FromPrimitive>::from_u64(v).expect("u64 fits every integer scalar")
    }

    /// Exponent of `l` in `self`; zero input yields `None`.
    fn valuation(&self, l: &Self) -> Option<u32> {
        if self.is_zero() {
            return None;
        }
        let mut n = self.abs();
        let mut v = 0;
        while (n.clone() % l.clone()).is_zero() {
            n = n / l.clone();
            v += 1;
        }
        Some(v)
    }

    fn pow_u32(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = acc * self.clone();
        }
        acc
    }
}

impl<T> IntScalar for T where T: Scalar + Integer + Signed + Hash + FromPrimitive + ToPrimitive {}

/// Rational numbers over an integer scalar.
pub type Rational<T> = Ratio<T>;

/// Trial-division primality test. Desk-scale inputs only.
pub fn is_prime<T: IntScalar>(n: &T) -> bool {
    let two = T::from_int(2);
    if *n < two {
        return false;
    }
    let mut d = two;
    while d.clone() * d.clone() <= *n {
        if (n.clone() % d.clone()).is_zero() {
            return false;
        }
        d = d + T::one();
    }
    true
}

/// Distinct prime divisors of `|n|` in increasing order. Zero and units
/// have none.
pub fn prime_divisors<T: IntScalar>(n: &T) -> Vec<T> {
    let mut n = n.abs();
    let mut out = Vec::new();
    if n.is_zero() {
        return out;
    }
    let mut d = T::from_int(2);
    while d.clone() * d.clone() <= n {
        if (n.clone() % d.clone()).is_zero() {
            out.push(d.clone());
            while (n.clone() % d.clone()).is_zero() {
                n = n / d.clone();
            }
        }
        d = d + T::one();
    }
    if n > T::one() {
        out.push(n);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn primes_and_valuations() {
        assert!(is_prime(&7i64));
        assert!(!is_prime(&1i64));
        assert!(!is_prime(&91i64));
        assert_eq!(
            prime_divisors(&BigInt::from(360)),
            vec![2, 3, 5]
                .into_iter()
                .map(BigInt::from)
                .collect::<Vec<_>>()
        );
        assert_eq!(prime_divisors(&-1i64), Vec::<i64>::new());
        assert_eq!(48i64.valuation(&2), Some(4));
        assert_eq!(0i64.valuation(&2), None);
        assert_eq!(3i64.pow_u32(4), 81);
    }
}
