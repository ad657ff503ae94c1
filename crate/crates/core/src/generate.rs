//! Seeded random generators for datums, graphs, and lattice maps.

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::curves::{DualGraph, Edge};
use crate::degeneration::{Branch, DegenDatum, DualData, DualSide, Polarization};
use crate::lattice::{is_injective, is_surjective, Matrix};
use crate::{Int, IntMatrix};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize, bound: i64) -> IntMatrix {
    Matrix::from_fn(rows, cols, |_, _| Int::from(rng.gen_range(-bound..=bound)))
}

/// A surjection `Z^cols -> Z^rows`, `rows <= cols`, entries in `[-bound, bound]`.
pub fn random_surjection<R: Rng>(rng: &mut R, rows: usize, cols: usize, bound: i64) -> IntMatrix {
    assert!(rows <= cols, "no surjection from a smaller lattice");
    loop {
        let m = random_matrix(rng, rows, cols, bound);
        if is_surjective(&m) {
            return m;
        }
    }
}

/// A unimodular matrix and its inverse, from a few elementary operations.
pub fn random_unimodular<R: Rng>(rng: &mut R, n: usize, steps: usize) -> (IntMatrix, IntMatrix) {
    let mut u = IntMatrix::identity(n);
    let mut inv = IntMatrix::identity(n);
    if n < 2 {
        return (u, inv);
    }
    for _ in 0..steps {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let c = Int::from(rng.gen_range(-1..=1i64));
        // u <- E u with E = 1 + c e_ij, inv <- inv E^-1.
        u.add_row_multiple(i, j, &c);
        inv.add_col_multiple(j, i, &(-c));
    }
    for k in 0..n {
        if rng.gen_bool(0.25) {
            u.negate_row(k);
            inv.negate_col(k);
        }
    }
    (u, inv)
}

/// Symmetric, strictly diagonally dominant, positive diagonal: positive
/// definite. Off-diagonal entries in `[-2, 2]`.
pub fn random_spd<R: Rng>(rng: &mut R, n: usize) -> IntMatrix {
    let mut m = IntMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..i {
            let v = Int::from(rng.gen_range(-2..=2i64));
            m[(i, j)] = v.clone();
            m[(j, i)] = v;
        }
    }
    for i in 0..n {
        let off: Int = (0..n)
            .filter(|&j| j != i)
            .map(|j| num_traits::Signed::abs(&m[(i, j)]))
            .sum();
        m[(i, i)] = off + Int::from(rng.gen_range(1..=3i64));
    }
    m
}

#[derive(Clone, Copy, Debug)]
pub struct DatumShape {
    pub max_rank: usize,
    pub max_branches: usize,
    pub entry_bound: i64,
}

impl Default for DatumShape {
    fn default() -> Self {
        Self {
            max_rank: 4,
            max_branches: 3,
            entry_bound: 3,
        }
    }
}

fn base_datum(name: String, mu: usize, branches: Vec<Branch>) -> DegenDatum {
    DegenDatum {
        name,
        residue_char: Int::from(0),
        abelian_rank: 0,
        closed_rank: mu,
        branches,
        dual: DualData::SelfDual,
        polarization: None,
        strata: Vec::new(),
    }
}

/// A principally polarized datum with random surjective specializations
/// and an injective purity map. Toric additivity is not controlled.
pub fn random_datum<R: Rng>(rng: &mut R, shape: DatumShape) -> DegenDatum {
    if rng.gen_bool(0.05) {
        let n = rng.gen_range(0..=shape.max_branches);
        let empty = (0..n).map(|i| Branch {
            name: (i + 1).to_string(),
            rank: 0,
            specialization: IntMatrix::zeros(0, 0),
            pairing: IntMatrix::zeros(0, 0),
        });
        return base_datum("random".into(), 0, empty.collect());
    }
    loop {
        let mu = rng.gen_range(1..=shape.max_rank);
        let n = rng.gen_range(1..=shape.max_branches);
        // Half the time the ranks add up to mu, so the purity map is square.
        let ranks: Vec<usize> = if n <= mu && rng.gen_bool(0.5) {
            composition(rng, mu, n)
        } else {
            (0..n).map(|_| rng.gen_range(1..=mu)).collect()
        };
        if ranks.iter().sum::<usize>() < mu {
            continue;
        }
        let branches: Vec<Branch> = ranks
            .iter()
            .enumerate()
            .map(|(i, &r)| Branch {
                name: (i + 1).to_string(),
                rank: r,
                specialization: random_surjection(rng, r, mu, shape.entry_bound),
                pairing: random_spd(rng, r),
            })
            .collect();
        let d = base_datum("random".into(), mu, branches);
        if is_injective(&crate::degeneration::purity_matrix(&d)) {
            return d;
        }
    }
}

/// Random positive parts summing to `total`.
fn composition<R: Rng>(rng: &mut R, total: usize, parts: usize) -> Vec<usize> {
    let mut out = vec![1; parts];
    for _ in parts..total {
        out[rng.gen_range(0..parts)] += 1;
    }
    out
}

/// A toric additive datum: the purity map is a random unimodular matrix
/// cut into blocks.
pub fn random_ta_datum<R: Rng>(rng: &mut R, shape: DatumShape) -> DegenDatum {
    let mu = rng.gen_range(1..=shape.max_rank);
    let n = rng.gen_range(1..=shape.max_branches.min(mu));
    let ranks = composition(rng, mu, n);
    let (u, _) = random_unimodular(rng, mu, 3 * mu);
    let mut start = 0;
    let branches = ranks
        .iter()
        .enumerate()
        .map(|(i, &r)| {
            let sp = u.select_rows(start..start + r);
            start += r;
            Branch {
                name: (i + 1).to_string(),
                rank: r,
                specialization: sp,
                pairing: random_spd(rng, r),
            }
        })
        .collect();
    base_datum("random toric additive".into(), mu, branches)
}

/// A datum with an explicit dual side and a polarization of degree
/// `degree`: `lambda = d U`, `lambda_i = d V_i`, `sp'_i = V_i sp_i U^-1`,
/// `phi_i = S_i V_i^-1` with `S_i` positive definite.
pub fn random_polarized_datum<R: Rng>(rng: &mut R, shape: DatumShape, degree: i64) -> DegenDatum {
    let primal = random_datum(rng, shape);
    let mu = primal.closed_rank;
    let d = Int::from(degree);
    let (u, u_inv) = random_unimodular(rng, mu, 2 * mu);
    let mut branches = Vec::new();
    let mut dual_specs = Vec::new();
    let mut lambdas = Vec::new();
    for b in &primal.branches {
        let (v, v_inv) = random_unimodular(rng, b.rank, 2 * b.rank);
        let s = random_spd(rng, b.rank);
        dual_specs.push(
            v.checked_mul(&b.specialization)
                .and_then(|m| m.checked_mul(&u_inv))
                .expect("shapes agree"),
        );
        lambdas.push(v.scale(&d));
        branches.push(Branch {
            pairing: s.checked_mul(&v_inv).expect("square"),
            ..b.clone()
        });
    }
    DegenDatum {
        name: "random polarized".into(),
        dual: DualData::Explicit(DualSide {
            rank: mu,
            branch_ranks: primal.branch_ranks(),
            specializations: dual_specs,
        }),
        polarization: Some(Polarization {
            closed_point: u.scale(&d),
            branches: lambdas,
        }),
        branches,
        ..primal
    }
}

#[derive(Clone, Copy, Debug)]
pub struct GraphShape {
    pub max_vertices: usize,
    pub max_edges: usize,
    pub max_branches: usize,
    pub max_multiplicity: u64,
}

impl Default for GraphShape {
    fn default() -> Self {
        Self {
            max_vertices: 4,
            max_edges: 8,
            max_branches: 3,
            max_multiplicity: 2,
        }
    }
}

fn random_label<R: Rng>(rng: &mut R, branches: usize, max: u64) -> BTreeMap<usize, u64> {
    loop {
        let label: BTreeMap<usize, u64> = (0..branches)
            .map(|i| (i, rng.gen_range(0..=max)))
            .filter(|&(_, m)| m > 0)
            .collect();
        if !label.is_empty() {
            return label;
        }
    }
}

/// A connected labelled graph: a random spanning tree plus extra edges,
/// loops and multi-edges included.
pub fn random_graph<R: Rng>(rng: &mut R, shape: GraphShape) -> DualGraph {
    let v = rng.gen_range(1..=shape.max_vertices.min(shape.max_edges + 1));
    let branches = rng.gen_range(1..=shape.max_branches);
    let total = rng.gen_range((v - 1).max(1)..=shape.max_edges);
    let mut edges = Vec::with_capacity(total);
    for k in 1..v {
        edges.push(Edge {
            ends: (rng.gen_range(0..k), k),
            label: random_label(rng, branches, shape.max_multiplicity),
        });
    }
    while edges.len() < total {
        let ends = (rng.gen_range(0..v), rng.gen_range(0..v));
        edges.push(Edge {
            ends,
            label: random_label(rng, branches, shape.max_multiplicity),
        });
    }
    // Shuffle edge order so the spanning tree is not always the first edges.
    for k in (1..edges.len()).rev() {
        let j = rng.gen_range(0..=k);
        edges.swap(k, j);
    }
    DualGraph {
        name: "random graph".into(),
        genera: (0..v).map(|_| rng.gen_range(0..=1)).collect(),
        edges,
    }
}
