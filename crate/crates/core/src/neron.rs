//! The Psi group, Kummer rescaling, the Psi -> Upsilon map along a
//! transversal trait, and the converse certificate.

use num_integer::Integer;
use num_traits::{One, Zero};

use crate::degeneration::{analyze, DegenDatum};
use crate::error::{Error, Result};
use crate::lattice::{
    cokernel, image_basis, index_of, is_injective, is_surjective, is_unimodular, kernel_saturated,
    lattice_sum, same_span, smith_normal_form, solve_rational, sublattice_quotient, to_integral,
    to_rational, torsion_kernel_qz, Index, Matrix,
};
use crate::monodromy::{component_group, compose_trait, stratum_lattice, TraitProfile};
use crate::{Group, Int, IntMatrix, RatMatrix};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PsiGroup {
    pub components: Vec<Group>,
    pub total: Group,
    pub order: Int,
}

pub fn psi_group(datum: &DegenDatum) -> Result<PsiGroup> {
    let components = datum
        .branches
        .iter()
        .map(|b| component_group(&b.pairing))
        .collect::<Result<Vec<_>>>()?;
    let total = Group::sum_all(&components);
    let order = components.iter().fold(Int::one(), |acc, g| {
        acc * g.order().expect("component groups are finite")
    });
    Ok(PsiGroup {
        components,
        total,
        order,
    })
}

fn check_kummer(datum: &DegenDatum, m: &[u64]) -> Result<()> {
    if m.len() != datum.n() {
        return Err(Error::InvalidInput(format!(
            "{} Kummer factors for {} branches",
            m.len(),
            datum.n()
        )));
    }
    if let Some(i) = m.iter().position(|&x| x == 0) {
        return Err(Error::InvalidInput(format!(
            "Kummer factor for branch {} must be positive",
            i + 1
        )));
    }
    let p = &datum.residue_char;
    if !p.is_zero() {
        if let Some(&bad) = m.iter().find(|&&x| !Int::from(x).gcd(p).is_one()) {
            return Err(Error::WildRescaling {
                m: bad.to_string(),
                p: p.to_string(),
            });
        }
    }
    Ok(())
}

/// Same lattices and specializations, `phi_i` replaced by `m_i phi_i`.
pub fn kummer_rescale(datum: &DegenDatum, m: &[u64]) -> Result<DegenDatum> {
    check_kummer(datum, m)?;
    let mut out = datum.clone();
    for (b, &mi) in out.branches.iter_mut().zip(m) {
        b.pairing = b.pairing.scale(&Int::from(mi));
    }
    out.name = format!("{} rescaled by {:?}", datum.name, m);
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchFixedPoints {
    /// `Psi'_i = ker(m_i phi_i tensor Q/Z)`.
    pub rescaled: Group,
    /// Elements of `Psi'_i` killed by `phi_i`, as computed on generators.
    pub killed_by_pairing: Group,
    /// Invariants: prime-to-`p` part of the above plus the `p`-part of `Psi'_i`.
    pub fixed: Group,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KummerFixedPoints {
    pub branches: Vec<BranchFixedPoints>,
    pub rescaled_psi: Group,
    pub fixed: Group,
    pub psi: Group,
    pub equals_psi: bool,
}

/// The subgroup of `ker(M tensor Q/Z)` killed by `h`, computed on the
/// generators `V e_k / d_k` coming from the Smith form of `M`.
pub fn kernel_under(m: &IntMatrix, h: &IntMatrix) -> Result<Group> {
    let s = smith_normal_form(m);
    if s.rank < m.ncols() {
        return Err(Error::DegeneratePairing(
            "presentation needs an injective map".into(),
        ));
    }
    let k = m.ncols();
    let d: Vec<Int> = (0..k).map(|i| s.diagonal[(i, i)].clone()).collect();
    let e = d.iter().fold(Int::one(), |acc, x| acc.lcm(x));
    let scale = Matrix::diagonal(&d.iter().map(|x| e.clone() / x).collect::<Vec<_>>());
    let w = h.checked_mul(&s.right)?.checked_mul(&scale)?;
    let rows = w.nrows();
    let system = Matrix::hstack(&[w, IntMatrix::identity(rows).scale(&e)], rows)?;
    let kernel = kernel_saturated(&system);
    let l = image_basis(&kernel.select_rows(0..k));
    let (group, free) = sublattice_quotient(&l, &Matrix::diagonal(&d))?;
    debug_assert_eq!(free, 0);
    Ok(group)
}

pub fn psi_fixed_points(datum: &DegenDatum, m: &[u64]) -> Result<KummerFixedPoints> {
    let rescaled = kummer_rescale(datum, m)?;
    let p = &datum.residue_char;
    let mut branches = Vec::new();
    for (b, b2) in datum.branches.iter().zip(&rescaled.branches) {
        let psi_prime = component_group(&b2.pairing)?;
        let killed = kernel_under(&b2.pairing, &b.pairing)?;
        let direct = torsion_kernel_qz(&b.pairing).prime_to_part(p);
        assert_eq!(
            killed.prime_to_part(p),
            direct,
            "invariants disagree with ker(phi tensor Q/Z)"
        );
        let fixed = if p.is_zero() {
            killed.clone()
        } else {
            killed.prime_to_part(p).direct_sum(&psi_prime.l_part(p)?)
        };
        branches.push(BranchFixedPoints {
            rescaled: psi_prime,
            killed_by_pairing: killed,
            fixed,
        });
    }
    let rescaled_psi = Group::sum_all(branches.iter().map(|b| &b.rescaled));
    let fixed = Group::sum_all(branches.iter().map(|b| &b.fixed));
    let psi = psi_group(datum)?.total;
    let equals_psi = fixed == psi;
    Ok(KummerFixedPoints {
        branches,
        rescaled_psi,
        fixed,
        psi,
        equals_psi,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurjectivityReport {
    pub upsilon: Group,
    pub psi_active: Group,
    /// Images of the generators of `Psi` (one column per generator, in
    /// branch order) in the invariant-factor coordinates of `Upsilon`.
    pub map_matrix: IntMatrix,
    pub upsilon_factors: Vec<Int>,
    pub psi_factors: Vec<Int>,
    pub surjective: bool,
}

/// The Step 5 map `Psi -> Upsilon` for a transversal trait on a toric
/// additive datum, on cokernel presentations: `Phi_j = X_j^dual / im phi_j`,
/// `Upsilon = Y^dual / im phi_f`, and the map is `B^t` restricted to the
/// active blocks.
pub fn trait_surjectivity_check(
    datum: &DegenDatum,
    profile: &TraitProfile,
) -> Result<SurjectivityReport> {
    if !analyze(datum).toric_additive {
        return Err(Error::NotToricAdditive);
    }
    if !profile.is_transversal() {
        return Err(Error::NonTransversal(format!("{:?}", profile.0)));
    }
    let composed = compose_trait(datum, profile)?;
    let upsilon = component_group(&composed.phi)?;
    let sf = smith_normal_form(&composed.phi);
    let upsilon_rows: Vec<usize> = (0..sf.rank)
        .filter(|&k| !sf.diagonal[(k, k)].is_one())
        .collect();
    let upsilon_factors: Vec<Int> = upsilon_rows
        .iter()
        .map(|&k| sf.diagonal[(k, k)].clone())
        .collect();
    let bt = composed.stratum.embedding.transpose();

    let mut columns: Vec<Vec<Int>> = Vec::new();
    let mut psi_factors = Vec::new();
    let mut active_groups = Vec::new();
    let mut offset = 0;
    for (j, b) in datum.branches.iter().enumerate() {
        let s = smith_normal_form(&b.pairing);
        let is_active = composed.active.contains(&j);
        if is_active {
            active_groups.push(component_group(&b.pairing)?);
        }
        for k in (0..s.rank).filter(|&k| !s.diagonal[(k, k)].is_one()) {
            psi_factors.push(s.diagonal[(k, k)].clone());
            let mut col = vec![Int::zero(); upsilon_rows.len()];
            if is_active {
                let generator = s.left_inverse.col(k);
                let mut v = vec![Int::zero(); bt.ncols()];
                v[offset..offset + b.rank].clone_from_slice(&generator);
                let image = sf.left.apply(&bt.apply(&v));
                for (r, &row) in upsilon_rows.iter().enumerate() {
                    col[r] = image[row].mod_floor(&upsilon_factors[r]);
                }
            }
            columns.push(col);
        }
        if is_active {
            offset += b.rank;
        }
    }
    let map_matrix = Matrix::from_fn(upsilon_rows.len(), columns.len(), |i, j| {
        columns[j][i].clone()
    });
    let relations = Matrix::diagonal(&upsilon_factors);
    let surjective = index_of(&Matrix::hstack(
        &[map_matrix.clone(), relations],
        upsilon_rows.len(),
    )?)
    .is_one();
    Ok(SurjectivityReport {
        upsilon,
        psi_active: Group::sum_all(&active_groups),
        map_matrix,
        upsilon_factors,
        psi_factors,
        surjective,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConverseVerdict {
    TaCertified,
    HypothesisFailed,
    IntegralityFailed,
    /// The hypothesis holds and theta is integral, yet a claim of the proof
    /// (idempotency, kernel decomposition, A invertible) fails.
    ProofClaimFailed,
}

impl ConverseVerdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            ConverseVerdict::TaCertified => "TA-certified",
            ConverseVerdict::HypothesisFailed => "hypothesis-failed",
            ConverseVerdict::IntegralityFailed => "integrality-failed",
            ConverseVerdict::ProofClaimFailed => "proof-claim-failed",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConverseCertificate {
    pub a: IntMatrix,
    pub block_pairing: IntMatrix,
    pub image_equal: bool,
    pub coker_at_psi: (Group, usize),
    pub coker_at_psi_a: (Group, usize),
    pub hypothesis_holds: bool,
    pub theta: Option<RatMatrix>,
    pub chi1: Option<IntMatrix>,
    pub chi2: Option<IntMatrix>,
    pub idempotent: bool,
    pub sums_to_identity: bool,
    pub kernel_index: Index<Int>,
    pub kernel_decomposition: bool,
    pub a_isomorphism: bool,
    pub p_restricted_isomorphism: bool,
    pub verdict: ConverseVerdict,
}

pub fn converse_check(
    p: &IntMatrix,
    q: &IntMatrix,
    psi1: &IntMatrix,
    psi2: &IntMatrix,
) -> Result<ConverseCertificate> {
    let mu = p.ncols();
    if q.ncols() != mu {
        return Err(Error::Shape(format!(
            "P has source rank {mu}, Q has {}",
            q.ncols()
        )));
    }
    if psi1.nrows() != p.nrows() || psi2.nrows() != q.nrows() {
        return Err(Error::Shape(
            "pairings must match the targets of P and Q".into(),
        ));
    }
    for (name, m) in [("P", p), ("Q", q)] {
        if !is_surjective(m) {
            return Err(Error::NotSurjective(name.into()));
        }
    }
    for (name, m) in [("Psi_1", psi1), ("Psi_2", psi2)] {
        if !m.is_positive_definite() {
            return Err(Error::NotPositiveDefinite(name.into()));
        }
    }
    let a = Matrix::vstack(&[p.clone(), q.clone()], mu)?;
    if !is_injective(&a) {
        return Err(Error::NotInjective("A = [P; Q]".into()));
    }
    let block = Matrix::block_diagonal(&[psi1.clone(), psi2.clone()]);
    let at_psi = a.transpose().checked_mul(&block)?;
    let at_psi_a = at_psi.checked_mul(&a)?;
    let image_equal = same_span(&at_psi, &at_psi_a);
    let coker_at_psi = cokernel(&at_psi);
    let coker_at_psi_a = cokernel(&at_psi_a);
    let hypothesis_holds = image_equal && coker_at_psi == coker_at_psi_a;

    let kp = kernel_saturated(p);
    let kq = kernel_saturated(q);
    let (_, kernel_index) = lattice_sum(&[kp.clone(), kq.clone()], mu)?;
    let kernel_decomposition = kernel_index.is_one() && kp.ncols() + kq.ncols() == mu;
    let a_isomorphism = is_unimodular(&a);
    let pk = p.checked_mul(&kq)?;
    let p_restricted_isomorphism = is_unimodular(&pk);

    let mut cert = ConverseCertificate {
        a,
        block_pairing: block,
        image_equal,
        coker_at_psi,
        coker_at_psi_a,
        hypothesis_holds,
        theta: None,
        chi1: None,
        chi2: None,
        idempotent: false,
        sums_to_identity: false,
        kernel_index,
        kernel_decomposition,
        a_isomorphism,
        p_restricted_isomorphism,
        verdict: ConverseVerdict::HypothesisFailed,
    };
    if !hypothesis_holds {
        return Ok(cert);
    }
    let theta = solve_rational(
        &to_rational(
            &cert
                .a
                .transpose()
                .checked_mul(&cert.block_pairing)?
                .checked_mul(&cert.a)?,
        ),
        &to_rational(&at_psi),
    )?;
    cert.theta = Some(theta.clone());
    let Some(theta) = to_integral(&theta) else {
        cert.verdict = ConverseVerdict::IntegralityFailed;
        return Ok(cert);
    };
    let r1 = p.nrows();
    let chi1 = theta.select_cols(0..r1).checked_mul(p)?;
    let chi2 = theta.select_cols(r1..theta.ncols()).checked_mul(q)?;
    cert.idempotent = chi1.checked_mul(&chi1)? == chi1 && chi2.checked_mul(&chi2)? == chi2;
    cert.sums_to_identity = chi1.checked_add(&chi2)?.is_identity();
    cert.chi1 = Some(chi1);
    cert.chi2 = Some(chi2);
    let all_claims = cert.idempotent
        && cert.sums_to_identity
        && cert.kernel_decomposition
        && cert.a_isomorphism
        && cert.p_restricted_isomorphism;
    cert.verdict = if all_claims {
        ConverseVerdict::TaCertified
    } else {
        ConverseVerdict::ProofClaimFailed
    };
    Ok(cert)
}

/// Converse inputs of a principally polarized datum: `P = sp_1`,
/// `Psi_1 = phi_1`, `Q` the specialization onto the stratum of branches
/// `2..n`, `Psi_2` the pairing restricted to that stratum.
pub fn converse_inputs(datum: &DegenDatum) -> Result<(IntMatrix, IntMatrix, IntMatrix, IntMatrix)> {
    if !datum.is_self_dual() {
        return Err(Error::InvalidInput(
            "the converse check needs a principally polarized datum".into(),
        ));
    }
    let mu = datum.closed_rank;
    if datum.n() == 0 {
        return Ok((
            IntMatrix::zeros(0, mu),
            IntMatrix::zeros(0, mu),
            IntMatrix::zeros(0, 0),
            IntMatrix::zeros(0, 0),
        ));
    }
    let first = &datum.branches[0];
    let rest: Vec<usize> = (1..datum.n()).collect();
    let y2 = stratum_lattice(datum, &rest)?;
    let blocks: Vec<IntMatrix> = rest
        .iter()
        .map(|&j| datum.branches[j].pairing.clone())
        .collect();
    let psi2 = y2
        .embedding
        .transpose()
        .checked_mul(&Matrix::block_diagonal(&blocks))?
        .checked_mul(&y2.embedding)?;
    Ok((
        first.specialization.clone(),
        y2.specialization,
        first.pairing.clone(),
        psi2,
    ))
}

pub fn converse_for_datum(datum: &DegenDatum) -> Result<ConverseCertificate> {
    let (p, q, psi1, psi2) = converse_inputs(datum)?;
    converse_check(&p, &q, &psi1, &psi2)
}
