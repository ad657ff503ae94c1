//! Stratum lattices, monodromy along traits, and component groups.

use crate::degeneration::{
    analyze, check_prime, restricted_purity, Branch, DegenDatum, DualData, DualSide, Polarization,
    StratumOverride,
};
use crate::error::{Error, Result};
use crate::lattice::{
    cokernel, column_basis, is_injective, solve_integral, torsion_kernel_qz, Matrix,
};
use crate::{Group, Int, IntMatrix};

pub use crate::degeneration::validate_pairing;

/// Multiplicities `a_i` of a trait along each branch.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TraitProfile(pub Vec<u64>);

impl TraitProfile {
    pub fn new(multiplicities: Vec<u64>) -> Self {
        Self(multiplicities)
    }

    pub fn ones(n: usize) -> Self {
        Self(vec![1; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn active(&self) -> Vec<usize> {
        (0..self.0.len()).filter(|&i| self.0[i] > 0).collect()
    }

    pub fn is_transversal(&self) -> bool {
        self.0.iter().all(|&a| a <= 1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StratumSource {
    Derived,
    Supplied,
}

/// Character lattice `Y` of the stratum where exactly the branches in `J`
/// meet.
///
/// `embedding : Y -> sum_{j in J} X_j` is injective and
/// `embedding * specialization` is the restricted purity map `X -> sum X_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StratumLattice {
    pub branches: Vec<usize>,
    pub rank: usize,
    pub embedding: IntMatrix,
    pub specialization: IntMatrix,
    pub restricted_purity: IntMatrix,
    pub source: StratumSource,
    /// Derived for a proper subset of a datum that is not toric additive.
    pub heuristic: bool,
}

pub const HEURISTIC_STRATUM: &str = "derived stratum \u{2014} heuristic";
pub const MISSES_DIVISOR: &str = "trait misses the divisor";

fn normalize_subset(n: usize, subset: &[usize]) -> Result<Vec<usize>> {
    let mut j = subset.to_vec();
    j.sort_unstable();
    j.dedup();
    if let Some(&bad) = j.iter().find(|&&i| i >= n) {
        return Err(Error::InvalidInput(format!(
            "branch index {} out of range",
            bad + 1
        )));
    }
    Ok(j)
}

/// The stratum lattice for `subset` on the primal side.
///
/// `Y` is the image of `X` under the restricted purity map. An explicit
/// override for the same branch set takes precedence.
pub fn stratum_lattice(datum: &DegenDatum, subset: &[usize]) -> Result<StratumLattice> {
    let j = normalize_subset(datum.n(), subset)?;
    if let Some(o) = datum
        .strata
        .iter()
        .find(|o| normalize_subset(datum.n(), &o.branches).ok().as_ref() == Some(&j))
    {
        return Ok(StratumLattice {
            rank: o.embedding.ncols(),
            embedding: o.embedding.clone(),
            specialization: o.specialization.clone(),
            restricted_purity: restricted_purity(datum, &j),
            branches: j,
            source: StratumSource::Supplied,
            heuristic: false,
        });
    }
    let proper = !j.is_empty() && j.len() < datum.n();
    let heuristic = proper && !analyze(datum).toric_additive;
    derive_stratum(&restricted_purity(datum, &j), j, heuristic)
}

fn derive_stratum(r: &IntMatrix, branches: Vec<usize>, heuristic: bool) -> Result<StratumLattice> {
    let (embedding, specialization) = if is_injective(r) {
        (r.clone(), IntMatrix::identity(r.ncols()))
    } else {
        let b = column_basis(r);
        let s = solve_integral(&b, r)?;
        (b, s)
    };
    Ok(StratumLattice {
        branches,
        rank: embedding.ncols(),
        embedding,
        specialization,
        restricted_purity: r.clone(),
        source: StratumSource::Derived,
        heuristic,
    })
}

/// The stratum lattice `Y'` on the dual side.
pub fn dual_stratum_lattice(datum: &DegenDatum, subset: &[usize]) -> Result<StratumLattice> {
    if datum.is_self_dual() {
        return stratum_lattice(datum, subset);
    }
    let side = datum.dual_side()?;
    let j = normalize_subset(datum.n(), subset)?;
    let blocks: Vec<IntMatrix> = j.iter().map(|&i| side.specializations[i].clone()).collect();
    let r = Matrix::vstack(&blocks, side.rank)?;
    let proper = !j.is_empty() && j.len() < datum.n();
    let heuristic = proper && !analyze(datum).toric_additive;
    derive_stratum(&r, j, heuristic)
}

/// The datum seen from the stratum of `subset`: closed point `Y`, branches
/// `j in J` with specializations the blocks of the embedding.
pub fn sub_datum(datum: &DegenDatum, subset: &[usize]) -> Result<DegenDatum> {
    let y = stratum_lattice(datum, subset)?;
    let branches = split_embedding(datum, &y)?
        .into_iter()
        .zip(&y.branches)
        .map(|(sp, &j)| Branch {
            specialization: sp,
            ..datum.branches[j].clone()
        })
        .collect();
    let dual = match &datum.dual {
        DualData::SelfDual => DualData::SelfDual,
        DualData::Unknown if datum.polarization.is_none() => DualData::Unknown,
        _ => {
            let y2 = dual_stratum_lattice(datum, subset)?;
            let side = datum.dual_side()?;
            DualData::Explicit(DualSide {
                rank: y2.rank,
                branch_ranks: y2.branches.iter().map(|&j| side.branch_ranks[j]).collect(),
                specializations: split_rows(
                    &y2.embedding,
                    &y2.branches
                        .iter()
                        .map(|&j| side.branch_ranks[j])
                        .collect::<Vec<_>>(),
                ),
            })
        }
    };
    let polarization = match (&datum.polarization, &dual) {
        (Some(pol), DualData::Explicit(side)) => restrict_polarization(pol, &y, side),
        (Some(pol), DualData::SelfDual) => {
            let side = DualSide {
                rank: y.rank,
                branch_ranks: y.branches.iter().map(|&j| datum.branches[j].rank).collect(),
                specializations: split_embedding(datum, &y)?,
            };
            restrict_polarization(pol, &y, &side)
        }
        _ => None,
    };
    Ok(DegenDatum {
        name: format!(
            "{} restricted to {:?}",
            datum.name,
            y.branches.iter().map(|j| j + 1).collect::<Vec<_>>()
        ),
        residue_char: datum.residue_char.clone(),
        abelian_rank: datum.abelian_rank,
        closed_rank: y.rank,
        branches,
        dual,
        polarization,
        strata: Vec::new(),
    })
}

fn split_embedding(datum: &DegenDatum, y: &StratumLattice) -> Result<Vec<IntMatrix>> {
    let ranks: Vec<usize> = y.branches.iter().map(|&j| datum.branches[j].rank).collect();
    Ok(split_rows(&y.embedding, &ranks))
}

fn split_rows(m: &IntMatrix, sizes: &[usize]) -> Vec<IntMatrix> {
    let mut start = 0;
    sizes
        .iter()
        .map(|&s| {
            let block = m.select_rows(start..start + s);
            start += s;
            block
        })
        .collect()
}

/// `lambda_Y` with `B' lambda_Y = diag(lambda_j) B`, kept only when integral.
fn restrict_polarization(
    pol: &Polarization,
    y: &StratumLattice,
    side: &DualSide,
) -> Option<Polarization> {
    let lambdas: Vec<IntMatrix> = y
        .branches
        .iter()
        .map(|&j| pol.branches[j].clone())
        .collect();
    let b2 = Matrix::vstack(&side.specializations, side.rank).ok()?;
    let rhs = Matrix::block_diagonal(&lambdas)
        .checked_mul(&y.embedding)
        .ok()?;
    let lam = solve_integral(&b2, &rhs).ok()?;
    Some(Polarization {
        closed_point: lam,
        branches: lambdas,
    })
}

/// Monodromy pairing of a trait, on the stratum of its active branches.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComposedPairing {
    pub profile: TraitProfile,
    pub active: Vec<usize>,
    pub stratum: StratumLattice,
    pub dual_stratum: StratumLattice,
    /// `phi_f : Y' -> Y^dual`.
    pub phi: IntMatrix,
    pub warnings: Vec<String>,
}

/// `phi_f = B^t diag(a_j phi_j) B'` over the active branches.
pub fn compose_trait(datum: &DegenDatum, profile: &TraitProfile) -> Result<ComposedPairing> {
    if profile.len() != datum.n() {
        return Err(Error::InvalidInput(format!(
            "profile has {} entries for {} branches",
            profile.len(),
            datum.n()
        )));
    }
    let active = profile.active();
    let stratum = stratum_lattice(datum, &active)?;
    let dual_stratum = dual_stratum_lattice(datum, &active)?;
    let blocks: Vec<IntMatrix> = active
        .iter()
        .map(|&j| datum.branches[j].pairing.scale(&Int::from(profile.0[j])))
        .collect();
    let middle = Matrix::block_diagonal(&blocks);
    let phi = stratum
        .embedding
        .transpose()
        .checked_mul(&middle)?
        .checked_mul(&dual_stratum.embedding)?;
    let mut warnings = Vec::new();
    if active.is_empty() && datum.n() > 0 {
        warnings.push(MISSES_DIVISOR.to_string());
    }
    if stratum.heuristic || dual_stratum.heuristic {
        warnings.push(HEURISTIC_STRATUM.to_string());
    }
    Ok(ComposedPairing {
        profile: profile.clone(),
        active,
        stratum,
        dual_stratum,
        phi,
        warnings,
    })
}

/// `coker phi`, checked against `ker(phi tensor Q/Z)`.
pub fn component_group(phi: &IntMatrix) -> Result<Group> {
    if !phi.is_square() {
        return Err(Error::DegeneratePairing(format!(
            "{}x{} pairing is not square",
            phi.nrows(),
            phi.ncols()
        )));
    }
    if !is_injective(phi) {
        return Err(Error::DegeneratePairing("pairing is not injective".into()));
    }
    let (coker, free) = cokernel(phi);
    let kernel = torsion_kernel_qz(phi);
    assert_eq!(free, 0);
    assert_eq!(
        coker, kernel,
        "cokernel and Q/Z-kernel of a square injective map disagree"
    );
    Ok(coker)
}

/// `psi_i = sp_i^t phi_i sp'_i : X' -> X^dual`.
pub fn psi_maps(datum: &DegenDatum) -> Result<Vec<IntMatrix>> {
    let side = datum.dual_side()?;
    datum
        .branches
        .iter()
        .zip(&side.specializations)
        .map(|(b, sp2)| {
            b.specialization
                .transpose()
                .checked_mul(&b.pairing)?
                .checked_mul(sp2)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosedPointBound {
    /// `l`-part of the torsion of `ker(stack(psi) tensor Q/Z)`.
    pub group: Group,
    pub divisible_rank: usize,
}

/// Upper bound for the `l`-part of the closed-point component group.
pub fn closed_point_bound(datum: &DegenDatum, l: &Int) -> Result<ClosedPointBound> {
    check_prime(l, &datum.residue_char)?;
    let side = datum.dual_side()?;
    let stack = Matrix::vstack(&psi_maps(datum)?, side.rank)?;
    let kernel = torsion_kernel_qz(&stack);
    let group = kernel.torsion().l_part(l)?;
    if datum.n() == 1 {
        let direct = component_group(&datum.branches[0].pairing)?.l_part(l)?;
        assert_eq!(
            group, direct,
            "single-branch bound differs from the branch component group"
        );
    }
    Ok(ClosedPointBound {
        group,
        divisible_rank: kernel.divisible_rank(),
    })
}

/// The stratum override that reproduces the derived lattice for `subset`.
pub fn derived_override(datum: &DegenDatum, subset: &[usize]) -> Result<StratumOverride> {
    let y = stratum_lattice(datum, subset)?;
    Ok(StratumOverride {
        branches: y.branches,
        embedding: y.embedding,
        specialization: y.specialization,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::degeneration::fixtures::*;
    use crate::degeneration::purity_matrix;

    fn int(v: i64) -> Int {
        Int::from(v)
    }

    #[test]
    fn example_family() {
        let d = example_3_4();
        for (a, b) in [(1, 1), (2, 3), (5, 1)] {
            let c = compose_trait(&d, &TraitProfile::new(vec![a, b])).unwrap();
            let (a, b) = (a as i64, b as i64);
            assert_eq!(c.phi, m(&[&[4 * a, 2 * a], &[2 * a, a + b]]));
            assert!(c.warnings.is_empty());
        }
        let c = compose_trait(&d, &TraitProfile::new(vec![1, 0])).unwrap();
        assert_eq!(c.phi, m(&[&[1]]));
        assert_eq!(c.stratum.rank, 1);
        assert!(c.warnings.iter().any(|w| w == HEURISTIC_STRATUM));
        let c = compose_trait(&d, &TraitProfile::new(vec![0, 0])).unwrap();
        assert_eq!(c.phi.nrows(), 0);
        assert_eq!(component_group(&c.phi).unwrap(), Group::trivial());
        assert!(c.warnings.iter().any(|w| w == MISSES_DIVISOR));
    }

    #[test]
    fn strata() {
        let d = example_3_4();
        assert_eq!(stratum_lattice(&d, &[]).unwrap().rank, 0);
        let full = stratum_lattice(&d, &[0, 1]).unwrap();
        assert_eq!(full.rank, 2);
        assert_eq!(full.embedding, purity_matrix(&d));
        assert!(!full.heuristic);
        let tate = datum(
            1,
            vec![branch("1", &[&[1]], &[&[1]]), branch("2", &[&[1]], &[&[1]])],
        );
        let y = stratum_lattice(&tate, &[1]).unwrap();
        assert_eq!((y.rank, y.embedding.clone()), (1, m(&[&[1]])));
    }

    #[test]
    fn image_not_saturation() {
        // Y for J = {1} must be sp_1(X) = X_1 even when sp_1 is not identity.
        let d = datum(
            2,
            vec![
                branch("1", &[&[2, 1]], &[&[1]]),
                branch("2", &[&[0, 1]], &[&[1]]),
            ],
        );
        let y = stratum_lattice(&d, &[0]).unwrap();
        assert_eq!(y.embedding, m(&[&[1]]));
        assert_eq!(y.specialization, m(&[&[2, 1]]));
    }

    #[test]
    fn component_groups() {
        assert_eq!(component_group(&m(&[&[5]])).unwrap(), Group::cyclic(int(5)));
        assert_eq!(
            component_group(&m(&[&[4, 2], &[2, 2]])).unwrap(),
            Group::from_orders([int(2), int(2)])
        );
        assert!(component_group(&IntMatrix::identity(3))
            .unwrap()
            .is_trivial());
        assert!(matches!(
            component_group(&m(&[&[1, 1], &[1, 1]])),
            Err(Error::DegeneratePairing(_))
        ));
        assert!(matches!(
            component_group(&m(&[&[1, 1]])),
            Err(Error::DegeneratePairing(_))
        ));
    }

    #[test]
    fn closed_point_bounds() {
        let one = datum(1, vec![branch("1", &[&[1]], &[&[3]])]);
        assert_eq!(
            closed_point_bound(&one, &int(3)).unwrap().group,
            Group::cyclic(int(3))
        );
        assert!(closed_point_bound(&datum(0, vec![]), &int(2))
            .unwrap()
            .group
            .is_trivial());
        let d = example_3_4();
        let psi = psi_maps(&d).unwrap();
        assert_eq!(psi[0], m(&[&[4, 2], &[2, 1]]));
        assert_eq!(psi[1], m(&[&[0, 0], &[0, 1]]));
        assert_eq!(
            closed_point_bound(&d, &int(2)).unwrap().group,
            Group::cyclic(int(2))
        );
        assert!(closed_point_bound(&d, &int(3)).unwrap().group.is_trivial());
    }

    #[test]
    fn sub_datum_of_additive_datum_is_additive() {
        let d = datum(
            2,
            vec![
                branch("1", &[&[1, 0]], &[&[2]]),
                branch("2", &[&[0, 1]], &[&[3]]),
            ],
        );
        let s = sub_datum(&d, &[1]).unwrap();
        assert!(s.validate().is_ok());
        assert!(analyze(&s).toric_additive);
        assert_eq!(s.closed_rank, 1);
    }
}
