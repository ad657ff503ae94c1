//! Degeneration data and the three toric-additivity verdicts.

use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::lattice::{
    cokernel, is_injective, is_surjective, rank, smith_normal_form, solve_rational, to_integral,
    to_rational, Matrix,
};
use crate::scalar::{is_prime, prime_divisors};
use crate::{Group, Int, IntMatrix};

/// One generic point of the boundary divisor.
///
/// `specialization` is `sp_i : X -> X_i` (`rank x mu`); `pairing` is
/// `phi_i : X'_i -> X_i^dual` written in dual bases (`rank x rank'_i`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Branch {
    pub name: String,
    pub rank: usize,
    pub specialization: IntMatrix,
    pub pairing: IntMatrix,
}

/// Character lattices on the dual side: `X'` and `sp'_i : X' -> X'_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualSide {
    pub rank: usize,
    pub branch_ranks: Vec<usize>,
    pub specializations: Vec<IntMatrix>,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub enum DualData {
    /// `X' = X`, `sp' = sp`: the principally polarized convention.
    #[default]
    SelfDual,
    Explicit(DualSide),
    /// The input declared the dual side as unknown.
    Unknown,
}

/// `lambda : X -> X'` and `lambda_i : X_i -> X'_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polarization {
    pub closed_point: IntMatrix,
    pub branches: Vec<IntMatrix>,
}

/// A user-supplied stratum lattice for the branch set `branches`:
/// `embedding : Y -> sum_{j in J} X_j` injective and
/// `specialization : X -> Y` with `embedding * specialization` equal to the
/// restricted purity map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StratumOverride {
    pub branches: Vec<usize>,
    pub embedding: IntMatrix,
    pub specialization: IntMatrix,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegenDatum {
    pub name: String,
    /// 0 or a prime.
    pub residue_char: Int,
    pub abelian_rank: usize,
    /// `mu = rank X`.
    pub closed_rank: usize,
    pub branches: Vec<Branch>,
    pub dual: DualData,
    pub polarization: Option<Polarization>,
    pub strata: Vec<StratumOverride>,
}

/// A violated datum invariant; `branch` is zero-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub invariant: String,
    pub branch: Option<usize>,
}

impl Violation {
    fn global(invariant: impl Into<String>) -> Self {
        Self {
            invariant: invariant.into(),
            branch: None,
        }
    }

    fn at(branch: usize, invariant: impl Into<String>) -> Self {
        Self {
            invariant: invariant.into(),
            branch: Some(branch),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.branch {
            Some(i) => write!(f, "branch {}: {}", i + 1, self.invariant),
            None => write!(f, "{}", self.invariant),
        }
    }
}

/// Primes `l` at which `l`-toric additivity fails.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FailingPrimes {
    Finite(Vec<Int>),
    /// Not weakly toric additive: every prime fails.
    All,
}

impl FailingPrimes {
    pub fn is_empty(&self) -> bool {
        matches!(self, FailingPrimes::Finite(v) if v.is_empty())
    }

    pub fn contains(&self, l: &Int) -> bool {
        match self {
            FailingPrimes::Finite(v) => v.contains(l),
            FailingPrimes::All => true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub toric_additive: bool,
    pub weakly_toric_additive: bool,
    pub failing_primes: FailingPrimes,
    pub purity_cokernel: Group,
    pub purity_free_rank: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankProfile {
    pub mu: usize,
    pub branch_ranks: Vec<usize>,
    pub deficit: usize,
}

impl DegenDatum {
    pub fn n(&self) -> usize {
        self.branches.len()
    }

    pub fn branch_ranks(&self) -> Vec<usize> {
        self.branches.iter().map(|b| b.rank).collect()
    }

    /// `d = alpha + mu`.
    pub fn dimension(&self) -> usize {
        self.abelian_rank + self.closed_rank
    }

    pub fn is_self_dual(&self) -> bool {
        matches!(self.dual, DualData::SelfDual)
    }

    /// The dual side, derived from the polarization when not given.
    pub fn dual_side(&self) -> Result<DualSide> {
        match &self.dual {
            DualData::SelfDual => Ok(DualSide {
                rank: self.closed_rank,
                branch_ranks: self.branch_ranks(),
                specializations: self
                    .branches
                    .iter()
                    .map(|b| b.specialization.clone())
                    .collect(),
            }),
            DualData::Explicit(side) => Ok(side.clone()),
            DualData::Unknown => {
                let pol = self.polarization.as_ref().ok_or(Error::NoDualData)?;
                derive_dual_side(self, pol)
            }
        }
    }

    pub fn validate(&self) -> std::result::Result<(), Vec<Violation>> {
        let v = violations(self);
        if v.is_empty() {
            Ok(())
        } else {
            Err(v)
        }
    }

    /// [`DegenDatum::validate`] as a `Result` with the crate error type.
    pub fn validated(&self) -> Result<()> {
        self.validate()
            .map_err(|v| Error::InvalidDatum(v.iter().map(ToString::to_string).collect()))
    }
}

/// `sp'_i = lambda_i sp_i lambda^-1`, required to be integral.
fn derive_dual_side(datum: &DegenDatum, pol: &Polarization) -> Result<DualSide> {
    let lambda = to_rational(&pol.closed_point);
    let mut specializations = Vec::new();
    let mut branch_ranks = Vec::new();
    for (b, li) in datum.branches.iter().zip(&pol.branches) {
        let rhs = to_rational(&li.checked_mul(&b.specialization)?);
        // X lambda = rhs, i.e. lambda^t X^t = rhs^t
        let x = solve_rational(&lambda.transpose(), &rhs.transpose())?.transpose();
        if x.checked_mul(&lambda)? != rhs {
            return Err(Error::InvalidInput(
                "polarization does not determine the dual side".into(),
            ));
        }
        let x = to_integral(&x).ok_or_else(|| {
            Error::InvalidInput(
                "dual specialization derived from the polarization is not integral".into(),
            )
        })?;
        branch_ranks.push(li.nrows());
        specializations.push(x);
    }
    Ok(DualSide {
        rank: pol.closed_point.nrows(),
        branch_ranks,
        specializations,
    })
}

fn violations(d: &DegenDatum) -> Vec<Violation> {
    let mut out = Vec::new();
    let p = &d.residue_char;
    if p.is_negative() || (!p.is_zero() && !is_prime(p)) {
        out.push(Violation::global(
            "residue characteristic is neither 0 nor a prime",
        ));
    }
    let mu = d.closed_rank;
    let mut shapes_ok = true;
    for (i, b) in d.branches.iter().enumerate() {
        if b.specialization.nrows() != b.rank || b.specialization.ncols() != mu {
            out.push(Violation::at(
                i,
                format!("specialization must be {}x{mu}", b.rank),
            ));
            shapes_ok = false;
        } else if !is_surjective(&b.specialization) {
            out.push(Violation::at(i, "specialization not surjective"));
        }
    }
    if shapes_ok {
        let total: usize = d.branches.iter().map(|b| b.rank).sum();
        if mu > total {
            out.push(Violation::global(
                "closed-point toric rank exceeds the sum of branch ranks",
            ));
        } else if !is_injective(&purity_matrix(d)) {
            out.push(Violation::global("purity map not injective"));
        }
    }

    let dual = match (&d.dual, &d.polarization) {
        (DualData::Unknown, None) => None,
        _ => match d.dual_side() {
            Ok(side) => Some(side),
            Err(e) => {
                out.push(Violation::global(format!("dual side unavailable: {e}")));
                None
            }
        },
    };
    if let DualData::Explicit(side) = &d.dual {
        if side.branch_ranks.len() != d.n() || side.specializations.len() != d.n() {
            out.push(Violation::global(
                "dual side must list one specialization per branch",
            ));
        } else {
            let mut ok = true;
            for (i, (s, &r)) in side
                .specializations
                .iter()
                .zip(&side.branch_ranks)
                .enumerate()
            {
                if s.nrows() != r || s.ncols() != side.rank {
                    out.push(Violation::at(
                        i,
                        format!("dual specialization must be {r}x{}", side.rank),
                    ));
                    ok = false;
                } else if !is_surjective(s) {
                    out.push(Violation::at(i, "dual specialization not surjective"));
                }
            }
            if ok
                && !is_injective(
                    &Matrix::vstack(&side.specializations, side.rank).expect("shapes checked"),
                )
            {
                out.push(Violation::global("dual purity map not injective"));
            }
            if side.rank != mu {
                out.push(Violation::global(
                    "dual closed-point rank differs from the primal rank",
                ));
            }
        }
    }

    for (i, b) in d.branches.iter().enumerate() {
        let dual_rank = dual.as_ref().and_then(|s| s.branch_ranks.get(i).copied());
        let expected_cols = dual_rank.unwrap_or(b.pairing.ncols());
        if b.pairing.nrows() != b.rank || b.pairing.ncols() != expected_cols {
            out.push(Violation::at(
                i,
                format!("pairing must be {}x{expected_cols}", b.rank),
            ));
            continue;
        }
        if !b.pairing.is_square() || !is_injective(&b.pairing) {
            out.push(Violation::at(i, "pairing not injective"));
            continue;
        }
        if d.is_self_dual() && d.polarization.is_none() {
            if let Err(v) = validate_pairing(&b.pairing, &IntMatrix::identity(b.rank)) {
                out.push(Violation::at(i, v));
            }
        }
    }

    if let Some(pol) = &d.polarization {
        out.extend(polarization_violations(d, pol, dual.as_ref()));
    }

    for (k, s) in d.strata.iter().enumerate() {
        if let Some(v) = stratum_override_violation(d, s) {
            out.push(Violation::global(format!(
                "stratum override {}: {v}",
                k + 1
            )));
        }
    }
    out
}

fn polarization_violations(
    d: &DegenDatum,
    pol: &Polarization,
    dual: Option<&DualSide>,
) -> Vec<Violation> {
    let mut out = Vec::new();
    let mu = d.closed_rank;
    let lam = &pol.closed_point;
    let dual_mu = dual.map_or(lam.nrows(), |s| s.rank);
    if lam.nrows() != dual_mu || lam.ncols() != mu {
        out.push(Violation::global(format!(
            "polarization must be {dual_mu}x{mu}"
        )));
        return out;
    }
    if !is_injective(lam) {
        out.push(Violation::global("polarization not injective"));
    }
    if pol.branches.len() != d.n() {
        out.push(Violation::global(
            "polarization must list one map per branch",
        ));
        return out;
    }
    for (i, (b, li)) in d.branches.iter().zip(&pol.branches).enumerate() {
        let dual_rank = dual.map_or(li.nrows(), |s| s.branch_ranks[i]);
        if li.nrows() != dual_rank || li.ncols() != b.rank {
            out.push(Violation::at(
                i,
                format!("branch polarization must be {dual_rank}x{}", b.rank),
            ));
            continue;
        }
        if !is_injective(li) {
            out.push(Violation::at(i, "branch polarization not injective"));
            continue;
        }
        if b.pairing.ncols() == li.nrows() {
            if let Err(v) = validate_pairing(&b.pairing, li) {
                out.push(Violation::at(i, v));
            }
        }
        if let Some(side) = dual {
            let lhs = side.specializations[i].checked_mul(lam);
            let rhs = li.checked_mul(&b.specialization);
            if let (Ok(l), Ok(r)) = (lhs, rhs) {
                if l != r {
                    out.push(Violation::at(
                        i,
                        "polarization incompatible with specialization",
                    ));
                }
            }
        }
    }
    out
}

fn stratum_override_violation(d: &DegenDatum, s: &StratumOverride) -> Option<String> {
    if s.branches.iter().any(|&j| j >= d.n()) {
        return Some("branch index out of range".into());
    }
    let target: usize = s.branches.iter().map(|&j| d.branches[j].rank).sum();
    if s.embedding.nrows() != target
        || s.specialization.ncols() != d.closed_rank
        || s.embedding.ncols() != s.specialization.nrows()
    {
        return Some("inconsistent shapes".into());
    }
    if !is_injective(&s.embedding) {
        return Some("embedding not injective".into());
    }
    let restricted = restricted_purity(d, &s.branches);
    match s.embedding.checked_mul(&s.specialization) {
        Ok(m) if m == restricted => None,
        _ => Some("embedding after specialization differs from the restricted purity map".into()),
    }
}

/// `phi * lambda` symmetric and positive definite.
pub fn validate_pairing(phi: &IntMatrix, lambda: &IntMatrix) -> std::result::Result<(), String> {
    let m = phi.checked_mul(lambda).map_err(|e| e.to_string())?;
    if !m.is_square() {
        return Err("pairing not square".into());
    }
    if !m.is_symmetric() {
        return Err("pairing not symmetric".into());
    }
    if !m.is_positive_definite() {
        return Err("pairing not positive definite".into());
    }
    Ok(())
}

/// `X -> sum X_i`, the vertical stack of the specializations.
pub fn purity_matrix(d: &DegenDatum) -> IntMatrix {
    restricted_purity(d, &(0..d.n()).collect::<Vec<_>>())
}

/// The purity map followed by the projection onto the branches in `subset`.
pub fn restricted_purity(d: &DegenDatum, subset: &[usize]) -> IntMatrix {
    let blocks: Vec<IntMatrix> = subset
        .iter()
        .map(|&j| d.branches[j].specialization.clone())
        .collect();
    Matrix::vstack(&blocks, d.closed_rank).expect("specializations share the closed-point rank")
}

pub fn analyze(d: &DegenDatum) -> Verdict {
    let purity = purity_matrix(d);
    let (coker, free) = cokernel(&purity);
    let weak = free == 0;
    let failing = if weak {
        let mut primes = prime_divisors(&coker.exponent());
        primes.retain(|l| *l != d.residue_char);
        FailingPrimes::Finite(primes)
    } else {
        FailingPrimes::All
    };
    Verdict {
        toric_additive: weak && coker.is_trivial(),
        weakly_toric_additive: weak,
        failing_primes: failing,
        purity_cokernel: coker,
        purity_free_rank: free,
    }
}

pub(crate) fn check_prime(l: &Int, p: &Int) -> Result<()> {
    if !is_prime(l) {
        return Err(Error::NotPrime(l.to_string()));
    }
    if l == p {
        return Err(Error::PrimeEqualsResidueChar(l.to_string()));
    }
    Ok(())
}

pub fn is_l_toric_additive(d: &DegenDatum, l: &Int) -> Result<bool> {
    check_prime(l, &d.residue_char)?;
    let purity = purity_matrix(d);
    if !purity.is_square() {
        return Ok(false);
    }
    let s = smith_normal_form(&purity);
    Ok(s.rank == purity.nrows() && s.invariant_factors().iter().all(|f| !f.is_multiple_of(l)))
}

pub fn toric_rank_profile(d: &DegenDatum) -> RankProfile {
    let branch_ranks = d.branch_ranks();
    let total: usize = branch_ranks.iter().sum();
    RankProfile {
        mu: d.closed_rank,
        deficit: total.saturating_sub(d.closed_rank),
        branch_ranks,
    }
}

/// Swap the primal and dual sides.
pub fn dual_datum(d: &DegenDatum) -> Result<DegenDatum> {
    if d.is_self_dual() {
        let mut out = d.clone();
        out.name = format!("{} (dual)", d.name);
        return Ok(out);
    }
    let side = d.dual_side()?;
    let branches = d
        .branches
        .iter()
        .zip(&side.specializations)
        .zip(&side.branch_ranks)
        .map(|((b, sp), &r)| Branch {
            name: b.name.clone(),
            rank: r,
            specialization: sp.clone(),
            pairing: b.pairing.transpose(),
        })
        .collect();
    let primal = DualSide {
        rank: d.closed_rank,
        branch_ranks: d.branch_ranks(),
        specializations: d
            .branches
            .iter()
            .map(|b| b.specialization.clone())
            .collect(),
    };
    let polarization = d.polarization.as_ref().map(dual_polarization).transpose()?;
    Ok(DegenDatum {
        name: format!("{} (dual)", d.name),
        residue_char: d.residue_char.clone(),
        abelian_rank: d.abelian_rank,
        closed_rank: side.rank,
        branches,
        dual: DualData::Explicit(primal),
        polarization,
        strata: Vec::new(),
    })
}

/// `lambda' = delta lambda^-1` with one scalar `delta` clearing every
/// denominator, so the compatibilities and positivity transfer.
fn dual_polarization(pol: &Polarization) -> Result<Polarization> {
    let maps: Vec<&IntMatrix> = std::iter::once(&pol.closed_point)
        .chain(&pol.branches)
        .collect();
    let mut delta = Int::one();
    for m in &maps {
        if !m.is_square() {
            return Err(Error::InvalidInput("polarization is not square".into()));
        }
        let det = m.determinant()?.abs();
        if det.is_zero() {
            return Err(Error::NotInjective("polarization".into()));
        }
        delta = delta.lcm(&det);
    }
    let invert = |m: &IntMatrix| -> Result<IntMatrix> {
        let scaled = to_rational(&IntMatrix::identity(m.nrows()).scale(&delta));
        let inv = solve_rational(&to_rational(m), &scaled)?;
        to_integral(&inv)
            .ok_or_else(|| Error::InvalidInput("polarization inverse not integral".into()))
    };
    Ok(Polarization {
        closed_point: invert(&pol.closed_point)?,
        branches: pol.branches.iter().map(invert).collect::<Result<_>>()?,
    })
}

/// Rank of the purity matrix, for callers that only need the count.
pub fn purity_rank(d: &DegenDatum) -> usize {
    rank(&purity_matrix(d))
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    fn int(v: i64) -> Int {
        Int::from(v)
    }

    #[test]
    fn example_verdicts() {
        let d = example_3_4();
        assert!(d.validate().is_ok());
        assert_eq!(purity_matrix(&d), m(&[&[2, 1], &[0, 1]]));
        let v = analyze(&d);
        assert!(v.weakly_toric_additive && !v.toric_additive);
        assert_eq!(v.failing_primes, FailingPrimes::Finite(vec![int(2)]));
        assert_eq!(v.purity_cokernel, Group::cyclic(int(2)));
        assert!(is_l_toric_additive(&d, &int(3)).unwrap());
        assert!(!is_l_toric_additive(&d, &int(2)).unwrap());
    }

    #[test]
    fn tate_u1u2_is_not_weakly_additive() {
        let d = datum(
            1,
            vec![branch("1", &[&[1]], &[&[1]]), branch("2", &[&[1]], &[&[1]])],
        );
        assert_eq!(purity_matrix(&d), m(&[&[1], &[1]]));
        let v = analyze(&d);
        assert!(!v.weakly_toric_additive);
        assert_eq!(v.failing_primes, FailingPrimes::All);
        let p = toric_rank_profile(&d);
        assert_eq!(
            (p.mu, p.branch_ranks.clone(), p.deficit),
            (1, vec![1, 1], 1)
        );
    }

    #[test]
    fn small_divisors_are_additive() {
        let d = datum(2, vec![]);
        assert!(analyze(&datum(0, vec![])).toric_additive);
        assert!(is_l_toric_additive(&datum(0, vec![]), &int(5)).unwrap());
        assert!(d.validate().is_err());
        let one = datum(1, vec![branch("1", &[&[1]], &[&[3]])]);
        assert!(analyze(&one).toric_additive);
    }

    #[test]
    fn violations_are_named() {
        let d = datum(1, vec![branch("1", &[&[2]], &[&[1]])]);
        let v = d.validate().unwrap_err();
        assert!(v
            .iter()
            .any(|v| v.invariant == "specialization not surjective" && v.branch == Some(0)));
        let d = datum(1, vec![branch("1", &[&[1]], &[&[-1]])]);
        let v = d.validate().unwrap_err();
        assert!(v
            .iter()
            .any(|v| v.invariant == "pairing not positive definite"));
        assert!(matches!(
            is_l_toric_additive(&example_3_4(), &int(4)),
            Err(Error::NotPrime(_))
        ));
        let mut p = example_3_4();
        p.residue_char = int(2);
        assert!(matches!(
            is_l_toric_additive(&p, &int(2)),
            Err(Error::PrimeEqualsResidueChar(_))
        ));
    }

    #[test]
    fn pairing_validation_messages() {
        let id = IntMatrix::identity(2);
        assert_eq!(
            validate_pairing(&m(&[&[1]]), &IntMatrix::identity(1)),
            Ok(())
        );
        assert_eq!(
            validate_pairing(&m(&[&[1, 2], &[0, 1]]), &id).unwrap_err(),
            "pairing not symmetric"
        );
        assert_eq!(
            validate_pairing(&m(&[&[1, 2], &[2, 1]]), &id).unwrap_err(),
            "pairing not positive definite"
        );
    }

    #[test]
    fn dual_of_self_dual_is_unchanged() {
        let d = example_3_4();
        let dd = dual_datum(&d).unwrap();
        assert_eq!(dd.branches, d.branches);
        let mut u = d.clone();
        u.dual = DualData::Unknown;
        assert!(matches!(dual_datum(&u), Err(Error::NoDualData)));
    }

    #[test]
    fn polarization_by_two() {
        // lambda = 2, lambda_i = 2, phi_i = (1): phi_i lambda_i = (2) is SPD.
        let mut d = datum(1, vec![branch("1", &[&[1]], &[&[1]])]);
        d.dual = DualData::Unknown;
        d.polarization = Some(Polarization {
            closed_point: m(&[&[2]]),
            branches: vec![m(&[&[2]])],
        });
        assert!(d.validate().is_ok(), "{:?}", d.validate());
        let dd = dual_datum(&d).unwrap();
        assert!(dd.validate().is_ok(), "{:?}", dd.validate());
        assert_eq!(analyze(&dd), analyze(&d));
    }
}
