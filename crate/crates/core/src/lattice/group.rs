use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::{is_prime, prime_divisors, IntScalar};

use super::matrix::Matrix;
use super::snf::smith_normal_form;

/// A finitely generated torsion abelian group `Z/d_1 + ... + Z/d_k`,
/// `d_1 | ... | d_k`, `d_i >= 2`, optionally extended by `divisible_rank`
/// copies of `Q/Z`.
///
/// The divisible part only shows up for kernels of non-injective maps
/// tensored with `Q/Z`; everything that is an honest finite group has
/// `divisible_rank == 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FinAb<T> {
    invariant_factors: Vec<T>,
    divisible_rank: usize,
}

impl<T: IntScalar> FinAb<T> {
    pub fn trivial() -> Self {
        Self {
            invariant_factors: Vec::new(),
            divisible_rank: 0,
        }
    }

    pub fn cyclic(n: T) -> Self {
        Self::from_orders([n])
    }

    /// Direct sum of cyclic groups of the given orders, brought into
    /// invariant-factor form. Orders of absolute value one (or zero) are
    /// dropped; use [`FinAb::with_divisible_rank`] for `Q/Z` summands.
    pub fn from_orders(orders: impl IntoIterator<Item = T>) -> Self {
        let orders: Vec<T> = orders
            .into_iter()
            .map(|d| d.abs())
            .filter(|d| *d > T::one())
            .collect();
        if orders.len() <= 1 {
            return Self {
                invariant_factors: orders,
                divisible_rank: 0,
            };
        }
        let s = smith_normal_form(&Matrix::diagonal(&orders));
        Self {
            invariant_factors: s.torsion_factors(),
            divisible_rank: 0,
        }
    }

    /// Validating constructor for an explicit chain.
    pub fn from_invariant_factors(factors: Vec<T>, divisible_rank: usize) -> Result<Self> {
        if let Some(d) = factors.iter().find(|d| **d < T::from_int(2)) {
            return Err(Error::InvalidInput(format!(
                "invariant factor {d} is below 2"
            )));
        }
        if factors.windows(2).any(|w| !w[1].is_multiple_of(&w[0])) {
            return Err(Error::InvalidInput(
                "invariant factors do not form a divisibility chain".into(),
            ));
        }
        Ok(Self {
            invariant_factors: factors,
            divisible_rank,
        })
    }

    pub fn with_divisible_rank(mut self, rank: usize) -> Self {
        self.divisible_rank = rank;
        self
    }

    pub fn invariant_factors(&self) -> &[T] {
        &self.invariant_factors
    }

    pub fn divisible_rank(&self) -> usize {
        self.divisible_rank
    }

    /// The finite part, forgetting any `Q/Z` summands.
    pub fn torsion(&self) -> Self {
        Self {
            invariant_factors: self.invariant_factors.clone(),
            divisible_rank: 0,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.divisible_rank == 0
    }

    pub fn is_trivial(&self) -> bool {
        self.invariant_factors.is_empty() && self.divisible_rank == 0
    }

    /// Order of the group, `None` when a divisible part is present.
    pub fn order(&self) -> Option<T> {
        self.is_finite().then(|| {
            self.invariant_factors
                .iter()
                .fold(T::one(), |a, d| a * d.clone())
        })
    }

    pub fn exponent(&self) -> T {
        self.invariant_factors
            .last()
            .cloned()
            .unwrap_or_else(T::one)
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        let mut g = Self::from_orders(
            self.invariant_factors
                .iter()
                .chain(&other.invariant_factors)
                .cloned(),
        );
        g.divisible_rank = self.divisible_rank + other.divisible_rank;
        g
    }

    pub fn sum_all<'a>(groups: impl IntoIterator<Item = &'a Self>) -> Self
    where
        T: 'a,
    {
        groups
            .into_iter()
            .fold(Self::trivial(), |acc, g| acc.direct_sum(g))
    }

    /// Primes dividing the order of the torsion part.
    pub fn primes(&self) -> Vec<T> {
        prime_divisors(&self.exponent())
    }

    /// The `l`-primary component. Rejects groups with a divisible part.
    pub fn l_part(&self, l: &T) -> Result<Self> {
        if !self.is_finite() {
            return Err(Error::DivisiblePart(self.divisible_rank));
        }
        if !is_prime(l) {
            return Err(Error::NotPrime(l.to_string()));
        }
        let factors = self
            .invariant_factors
            .iter()
            .filter_map(|d| {
                let v = d.valuation(l).unwrap_or(0);
                (v > 0).then(|| l.pow_u32(v))
            })
            .collect();
        Ok(Self {
            invariant_factors: factors,
            divisible_rank: 0,
        })
    }

    /// The subgroup `G[n]` of elements killed by `n > 0`.
    pub fn killed_by(&self, n: &T) -> Self {
        let torsion = self.invariant_factors.iter().map(|d| d.gcd(n));
        let divisible = std::iter::repeat_n(n.clone(), self.divisible_rank);
        Self::from_orders(torsion.chain(divisible))
    }

    /// Everything except the `p`-primary component. `p = 0` returns the
    /// torsion part unchanged.
    pub fn prime_to_part(&self, p: &T) -> Self {
        if p.is_zero() {
            return self.torsion();
        }
        Self::from_orders(self.invariant_factors.iter().map(|d| {
            let v = d.valuation(p).unwrap_or(0);
            d.clone() / p.pow_u32(v)
        }))
    }
}

impl<T: IntScalar> fmt::Display for FinAb<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut parts: Vec<String> = self
            .invariant_factors
            .iter()
            .map(|d| format!("Z/{d}"))
            .collect();
        match self.divisible_rank {
            0 => {}
            1 => parts.push("Q/Z".into()),
            k => parts.push(format!("(Q/Z)^{k}")),
        }
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    type G = FinAb<BigInt>;

    fn g(orders: &[i64]) -> G {
        G::from_orders(orders.iter().map(|&o| BigInt::from(o)))
    }

    fn chain(f: &[i64]) -> Vec<BigInt> {
        f.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn canonical_chain() {
        assert_eq!(g(&[2, 3]).invariant_factors(), chain(&[6]).as_slice());
        assert_eq!(g(&[4, 2, 1]).invariant_factors(), chain(&[2, 4]).as_slice());
        assert_eq!(g(&[6, 4]).invariant_factors(), chain(&[2, 12]).as_slice());
        assert!(g(&[1, 1]).is_trivial());
        assert!(G::from_invariant_factors(chain(&[2, 3]), 0).is_err());
    }

    #[test]
    fn l_parts() {
        let six = g(&[6]);
        assert_eq!(six.l_part(&BigInt::from(2)).unwrap(), g(&[2]));
        assert!(g(&[2, 4]).l_part(&BigInt::from(3)).unwrap().is_trivial());
        // Z/12 + Z/2 = Z/2 + Z/12; its 2-part is Z/2 + Z/4.
        assert_eq!(g(&[12, 2]).l_part(&BigInt::from(2)).unwrap(), g(&[4, 2]));
        assert!(matches!(
            six.clone().with_divisible_rank(1).l_part(&BigInt::from(2)),
            Err(Error::DivisiblePart(1))
        ));
        assert!(six.l_part(&BigInt::from(4)).is_err());
    }

    #[test]
    fn prime_to_part_and_display() {
        assert_eq!(g(&[12]).prime_to_part(&BigInt::from(2)), g(&[3]));
        assert_eq!(g(&[12]).prime_to_part(&BigInt::from(0)), g(&[12]));
        assert_eq!(g(&[2, 2]).to_string(), "Z/2 + Z/2");
        assert_eq!(G::trivial().with_divisible_rank(2).to_string(), "(Q/Z)^2");
        assert_eq!(G::trivial().to_string(), "0");
    }
}
