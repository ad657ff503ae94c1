#![allow(dead_code)]

use std::collections::BTreeMap;

use degenkit_core::curves::{DualGraph, Edge};
use degenkit_core::degeneration::{Branch, DegenDatum, DualData};
use degenkit_core::{Group, Int, IntMatrix};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub fn m(rows: &[&[i64]]) -> IntMatrix {
    IntMatrix::from_i64_rows(rows)
}

pub fn int(v: i64) -> Int {
    Int::from(v)
}

pub fn branch(name: &str, sp: &[&[i64]], phi: &[&[i64]]) -> Branch {
    let specialization = m(sp);
    Branch {
        name: name.into(),
        rank: specialization.nrows(),
        specialization,
        pairing: m(phi),
    }
}

pub fn datum(mu: usize, branches: Vec<Branch>) -> DegenDatum {
    DegenDatum {
        name: "test".into(),
        residue_char: Int::zero(),
        abelian_rank: 0,
        closed_rank: mu,
        branches,
        dual: DualData::SelfDual,
        polarization: None,
        strata: Vec::new(),
    }
}

pub fn example_3_4() -> DegenDatum {
    datum(
        2,
        vec![
            branch("1", &[&[2, 1]], &[&[1]]),
            branch("2", &[&[0, 1]], &[&[1]]),
        ],
    )
}

pub fn tate_u1u2() -> DegenDatum {
    datum(
        1,
        vec![branch("1", &[&[1]], &[&[1]]), branch("2", &[&[1]], &[&[1]])],
    )
}

pub fn product_tate() -> DegenDatum {
    datum(
        2,
        vec![
            branch("1", &[&[1, 0]], &[&[1]]),
            branch("2", &[&[0, 1]], &[&[1]]),
        ],
    )
}

pub fn edge(a: usize, b: usize, label: &[(usize, u64)]) -> Edge {
    Edge {
        ends: (a, b),
        label: label.iter().copied().collect::<BTreeMap<_, _>>(),
    }
}

/// A rational curve with two nodes, each smoothed along one branch: the
/// genus-2 deformation.
pub fn genus2_graph() -> DualGraph {
    DualGraph {
        name: "genus 2".into(),
        genera: vec![0],
        edges: vec![edge(0, 0, &[(0, 1)]), edge(0, 0, &[(1, 1)])],
    }
}

/// Determinant by cofactor expansion; deliberately naive.
pub fn cofactor_det(a: &[Vec<Int>]) -> Int {
    let n = a.len();
    if n == 0 {
        return Int::one();
    }
    if n == 1 {
        return a[0][0].clone();
    }
    let mut total = Int::zero();
    for j in 0..n {
        if a[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<Int>> = a[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|&(k, _)| k != j)
                    .map(|(_, v)| v.clone())
                    .collect()
            })
            .collect();
        let term = &a[0][j] * cofactor_det(&minor);
        if j % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    total
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// gcd of all `k x k` minors.
pub fn determinantal_divisor(a: &IntMatrix, k: usize) -> Int {
    let mut g = Int::zero();
    for rows in subsets(a.nrows(), k) {
        for cols in subsets(a.ncols(), k) {
            let sub: Vec<Vec<Int>> = rows
                .iter()
                .map(|&i| cols.iter().map(|&j| a[(i, j)].clone()).collect())
                .collect();
            g = g.gcd(&cofactor_det(&sub));
        }
    }
    g
}

/// Invariant factors from determinantal divisors `d_k = D_k / D_{k-1}`.
pub fn invariant_factors_by_minors(a: &IntMatrix) -> Vec<Int> {
    let mut out = Vec::new();
    let mut prev = Int::one();
    for k in 1..=a.nrows().min(a.ncols()) {
        let d = determinantal_divisor(a, k);
        if d.is_zero() {
            break;
        }
        out.push(&d / &prev);
        prev = d;
    }
    out
}

/// `|G[k]|` for `G` the sum of cyclic groups of the given orders.
pub fn count_killed_by(group: &Group, k: u64) -> u64 {
    group
        .invariant_factors()
        .iter()
        .map(|d| d.gcd(&Int::from(k)).to_u64().unwrap())
        .product()
}

/// `|{x in ((1/N)Z/Z)^k : M x = 0 mod Z, N' x = 0}|` for every `N' | N`,
/// by enumerating the grid. `N` must kill the kernel.
pub fn grid_kernel_counts(a: &IntMatrix, n: u64) -> BTreeMap<u64, u64> {
    let k = a.ncols();
    let mut counts: BTreeMap<u64, u64> = (1..=n)
        .filter(|d| n.is_multiple_of(*d))
        .map(|d| (d, 0))
        .collect();
    let total = n.pow(k as u32);
    for code in 0..total {
        let mut x = Vec::with_capacity(k);
        let mut c = code;
        for _ in 0..k {
            x.push(c % n);
            c /= n;
        }
        let in_kernel = (0..a.nrows()).all(|i| {
            let s: Int = (0..k).map(|j| &a[(i, j)] * Int::from(x[j])).sum();
            s.mod_floor(&Int::from(n)).is_zero()
        });
        if !in_kernel {
            continue;
        }
        let order = x.iter().fold(1u64, |acc, &xi| acc.lcm(&(n / xi.gcd(&n))));
        for (d, cnt) in counts.iter_mut() {
            if d % order == 0 {
                *cnt += 1;
            }
        }
    }
    counts
}

/// Smallest nonzero `|det|` over maximal square row-submatrices.
pub fn smallest_maximal_minor(a: &IntMatrix) -> Option<Int> {
    let k = a.ncols();
    subsets(a.nrows(), k)
        .into_iter()
        .map(|rows| {
            let sub: Vec<Vec<Int>> = rows
                .iter()
                .map(|&i| (0..k).map(|j| a[(i, j)].clone()).collect())
                .collect();
            cofactor_det(&sub).abs()
        })
        .filter(|d| !d.is_zero())
        .min()
}
