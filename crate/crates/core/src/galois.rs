//! A Z-model of the l-adic Tate module with its inertia action, used as an
//! independent oracle for l-toric additivity and component groups.
//!
//! `T = X^dual + C + X'` with `C` of rank `2 alpha` carrying the trivial
//! action. Each inertia generator acts by `sigma_i = 1 + N_i` where `N_i`
//! sends the `X'` block to the `X^dual` block through `psi_i`.

use num_traits::{One, Zero};

use crate::degeneration::{check_prime, DegenDatum};
use crate::error::{Error, Result};
use crate::lattice::{
    image_basis, index_of, kernel_saturated, lattice_sum, rank, same_span, smith_normal_form,
    solve_integral, sublattice_quotient, Index, Matrix,
};
use crate::monodromy::{psi_maps, TraitProfile};
use crate::{Group, Int, IntMatrix};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepChecks {
    pub nilpotents_annihilate: bool,
    pub unipotent: bool,
    pub commute: bool,
    pub fixed_rank: usize,
    pub fixed_rank_expected: usize,
    pub fixed_equals_finite_part: bool,
}

impl RepChecks {
    pub fn all_hold(&self) -> bool {
        self.nilpotents_annihilate
            && self.unipotent
            && self.commute
            && self.fixed_rank == self.fixed_rank_expected
            && self.fixed_equals_finite_part
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaloisRep {
    pub l: Int,
    /// Relative dimension `d = alpha + mu`.
    pub d: usize,
    pub mu: usize,
    pub alpha: usize,
    pub dual_mu: usize,
    pub nilpotents: Vec<IntMatrix>,
    /// Basis of `T^t` (the `X^dual` block).
    pub toric: IntMatrix,
    /// Basis of `T^f` (the `X^dual + C` blocks).
    pub finite: IntMatrix,
    /// Basis of `T^G`, the common kernel of the `N_i`.
    pub fixed: IntMatrix,
    pub checks: RepChecks,
}

impl GaloisRep {
    pub fn rank(&self) -> usize {
        self.mu + 2 * self.alpha + self.dual_mu
    }

    pub fn sigma(&self, i: usize) -> IntMatrix {
        IntMatrix::identity(self.rank())
            .checked_add(&self.nilpotents[i])
            .expect("square")
    }

    fn stack(&self, which: impl Iterator<Item = usize>) -> IntMatrix {
        let blocks: Vec<IntMatrix> = which.map(|j| self.nilpotents[j].clone()).collect();
        Matrix::vstack(&blocks, self.rank()).expect("nilpotents share a shape")
    }
}

fn unit_block(size: usize, offset: usize, total: usize) -> IntMatrix {
    let mut m = IntMatrix::zeros(total, size);
    m.set_block(offset, 0, &IntMatrix::identity(size));
    m
}

pub fn build_rep(datum: &DegenDatum, l: &Int) -> Result<GaloisRep> {
    check_prime(l, &datum.residue_char)?;
    let side = datum.dual_side()?;
    let (mu, alpha, dual_mu) = (datum.closed_rank, datum.abelian_rank, side.rank);
    let t = mu + 2 * alpha + dual_mu;
    let nilpotents: Vec<IntMatrix> = psi_maps(datum)?
        .into_iter()
        .map(|psi| {
            let mut n = IntMatrix::zeros(t, t);
            n.set_block(0, mu + 2 * alpha, &psi);
            n
        })
        .collect();
    let toric = unit_block(mu, 0, t);
    let finite = unit_block(mu + 2 * alpha, 0, t);
    let stack = Matrix::vstack(&nilpotents, t)?;
    let fixed = kernel_saturated(&stack);

    let mut annihilate = true;
    let mut commute = true;
    for a in &nilpotents {
        for b in &nilpotents {
            let ab = a.checked_mul(b)?;
            annihilate &= ab.is_zero();
            commute &= ab == b.checked_mul(a)?;
        }
    }
    let unipotent = nilpotents
        .iter()
        .all(|n| n.checked_mul(n).map(|m| m.is_zero()).unwrap_or(false));
    let checks = RepChecks {
        nilpotents_annihilate: annihilate,
        unipotent,
        commute,
        fixed_rank: fixed.ncols(),
        fixed_rank_expected: 2 * datum.dimension() - mu,
        fixed_equals_finite_part: same_span(&fixed, &finite),
    };
    Ok(GaloisRep {
        l: l.clone(),
        d: datum.dimension(),
        mu,
        alpha,
        dual_mu,
        nilpotents,
        toric,
        finite,
        fixed,
        checks,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StarReport {
    /// Rank of `T^{sum_{j != i} I_j}` for each `i`.
    pub fixed_ranks: Vec<usize>,
    pub index: Index<Int>,
    pub holds: bool,
}

/// Condition star(l): `T` is the sum over `i` of the vectors fixed by every
/// `sigma_j`, `j != i`, up to index prime to `l`.
pub fn star_details(rep: &GaloisRep) -> Result<StarReport> {
    let n = rep.nilpotents.len();
    if n == 0 {
        return Ok(StarReport {
            fixed_ranks: Vec::new(),
            index: Index::Finite(Int::one()),
            holds: true,
        });
    }
    let parts: Vec<IntMatrix> = (0..n)
        .map(|i| kernel_saturated(&rep.stack((0..n).filter(move |&j| j != i))))
        .collect();
    let (_, index) = lattice_sum(&parts, rep.rank())?;
    let holds = index.coprime_to(&rep.l);
    Ok(StarReport {
        fixed_ranks: parts.iter().map(|p| p.ncols()).collect(),
        index,
        holds,
    })
}

pub fn star_condition(rep: &GaloisRep) -> Result<bool> {
    Ok(star_details(rep)?.holds)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecompositionReport {
    pub holds: bool,
    pub reason: Option<String>,
    pub failing_block: Option<usize>,
    /// Index of `alpha_i(V_i)` in its block, per branch.
    pub block_indices: Vec<Index<Int>>,
    pub sum_index: Option<Index<Int>>,
}

impl DecompositionReport {
    fn fail(reason: impl Into<String>) -> Self {
        Self {
            holds: false,
            reason: Some(reason.into()),
            failing_block: None,
            block_indices: Vec::new(),
            sum_index: None,
        }
    }
}

/// Tries to split `T / T^G` as a direct sum of submodules `V_i`, each fixed
/// by `sigma_j` for `j != i` and stable under `sigma_i`, up to index prime to
/// `l`.
///
/// `alpha_i : T / T^G -> N_i(T)` is `N_i` in coordinates of a basis of its
/// image; stacked, these play the role of the purity map. `V_i` is the
/// common kernel of the `alpha_j`, `j != i`.
pub fn decomposition_check(rep: &GaloisRep) -> Result<DecompositionReport> {
    let n = rep.nilpotents.len();
    let t = rep.rank();
    if n == 0 {
        return Ok(DecompositionReport {
            holds: true,
            reason: None,
            failing_block: None,
            block_indices: Vec::new(),
            sum_index: Some(Index::Finite(Int::one())),
        });
    }
    let f = rep.fixed.ncols();
    let q_rank = t - f;
    let s = smith_normal_form(&rep.fixed);
    let quotient = s.left.select_rows(f..t);
    let section = s.left_inverse.select_cols(f..t);

    let mut alphas = Vec::with_capacity(n);
    for nil in &rep.nilpotents {
        let image = image_basis(nil);
        let coords = solve_integral(&image, &nil.checked_mul(&section)?)?;
        alphas.push(coords);
    }
    let total: usize = alphas.iter().map(|a| a.nrows()).sum();
    if total != q_rank {
        return Ok(DecompositionReport::fail(format!(
            "image ranks sum to {total}, quotient has rank {q_rank}"
        )));
    }
    let alpha = Matrix::vstack(&alphas, q_rank)?;
    let det = alpha.determinant()?;
    if det.is_zero() {
        return Ok(DecompositionReport::fail("induced purity map is singular"));
    }

    let mut block_indices = Vec::with_capacity(n);
    let mut pieces = Vec::with_capacity(n);
    let mut failing_block = None;
    let mut reason = None;
    for i in 0..n {
        let others: Vec<IntMatrix> = (0..n)
            .filter(|&j| j != i)
            .map(|j| alphas[j].clone())
            .collect();
        let v = kernel_saturated(&Matrix::vstack(&others, q_rank)?);
        let lifted = section.checked_mul(&v)?;
        let fixed_by_others = (0..n).filter(|&j| j != i).all(|j| {
            rep.nilpotents[j]
                .checked_mul(&lifted)
                .map(|m| m.is_zero())
                .unwrap_or(false)
        });
        let stable = quotient
            .checked_mul(&rep.nilpotents[i].checked_mul(&lifted)?)?
            .is_zero();
        if !(fixed_by_others && stable) && reason.is_none() {
            reason = Some(format!("block {} is not invariant", i + 1));
            failing_block = Some(i);
        }
        let idx = if alphas[i].nrows() == v.ncols() {
            index_of(&alphas[i].checked_mul(&v)?)
        } else {
            Index::Infinite
        };
        if !idx.coprime_to(&rep.l) && failing_block.is_none() {
            failing_block = Some(i);
            reason = Some(format!("block {} has index {idx} in its summand", i + 1));
        }
        block_indices.push(idx);
        pieces.push(v);
    }
    let (_, sum_index) = lattice_sum(&pieces, q_rank)?;
    if reason.is_none() && !sum_index.coprime_to(&rep.l) {
        reason = Some(format!("the blocks span a sublattice of index {sum_index}"));
    }
    Ok(DecompositionReport {
        holds: reason.is_none(),
        reason,
        failing_block,
        block_indices,
        sum_index: Some(sum_index),
    })
}

/// `{x : N x = 0 mod l^r} / (ker N + l^r T)` for the nilpotent blocks in
/// `stack`.
fn torsion_quotient(stack: &IntMatrix, t: usize, modulus: &Int) -> Result<Group> {
    let rows = stack.nrows();
    let system = Matrix::hstack(
        &[stack.clone(), IntMatrix::identity(rows).scale(modulus)],
        rows,
    )?;
    let solutions = image_basis(&kernel_saturated(&system).select_rows(0..t));
    let trivial = Matrix::hstack(
        &[
            kernel_saturated(stack),
            IntMatrix::identity(t).scale(modulus),
        ],
        t,
    )?;
    let (group, free) = sublattice_quotient(&solutions, &trivial)?;
    debug_assert_eq!(free, 0);
    Ok(group)
}

/// `Phi[l^r]` along a trait: the trait's generator acts by
/// `1 + sum a_i N_i`.
pub fn torsion_phi_group(rep: &GaloisRep, profile: &TraitProfile, r: u32) -> Result<Group> {
    if r == 0 {
        return Err(Error::InvalidInput("r must be at least 1".into()));
    }
    if profile.len() != rep.nilpotents.len() {
        return Err(Error::InvalidInput(format!(
            "profile has {} entries for {} branches",
            profile.len(),
            rep.nilpotents.len()
        )));
    }
    let t = rep.rank();
    let mut nf = IntMatrix::zeros(t, t);
    for (a, n) in profile.0.iter().zip(&rep.nilpotents) {
        nf = nf.checked_add(&n.scale(&Int::from(*a)))?;
    }
    torsion_quotient(&nf, t, &num_traits::pow(rep.l.clone(), r as usize))
}

/// `Phi[l^r]` at the closed point, with the full inertia group acting.
pub fn closed_point_phi(rep: &GaloisRep, r: u32) -> Result<Group> {
    if r == 0 {
        return Err(Error::InvalidInput("r must be at least 1".into()));
    }
    let n = rep.nilpotents.len();
    torsion_quotient(
        &rep.stack(0..n),
        rep.rank(),
        &num_traits::pow(rep.l.clone(), r as usize),
    )
}

/// Smallest `r >= 1` with `l^r > bound`.
pub fn minimal_exponent(l: &Int, bound: &Int) -> u32 {
    let mut r = 1;
    let mut power = l.clone();
    while &power <= bound {
        power *= l;
        r += 1;
    }
    r
}

/// Whether the synthesized rep's star condition and the lattice verdict at
/// `l` agree, for callers that only need the boolean triple.
pub fn oracle_triple(datum: &DegenDatum, l: &Int) -> Result<(bool, bool, bool)> {
    let rep = build_rep(datum, l)?;
    let star = star_condition(&rep)?;
    let decomposition = decomposition_check(&rep)?.holds;
    let lattice = crate::degeneration::is_l_toric_additive(datum, l)?;
    Ok((star, decomposition, lattice))
}

/// Rank of the fixed part `T^G`.
pub fn fixed_rank(rep: &GaloisRep) -> usize {
    rep.rank() - rank(&rep.stack(0..rep.nilpotents.len()))
}
