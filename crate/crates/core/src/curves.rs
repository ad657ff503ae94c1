//! Degeneration data of jacobians from labelled dual graphs.
//!
//! An edge labelled `{i: m}` is a node with local equation `xy = u_i^m`.
//! `X` is `H_1` of the graph with a fundamental-cycle basis; the branch
//! lattice `X_i` is `H_1` of the graph with every edge of multiplicity 0 at
//! `i` contracted, and `phi_i` is the intersection pairing weighted by the
//! multiplicities at `i`. Genera only contribute to the abelian rank.

use std::collections::{BTreeMap, VecDeque};

use num_traits::Zero;

use crate::degeneration::{
    analyze, is_l_toric_additive, toric_rank_profile, Branch, DegenDatum, DualData, RankProfile,
    Verdict,
};
use crate::error::{Error, Result};
use crate::lattice::Matrix;
use crate::{Int, IntMatrix};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub ends: (usize, usize),
    /// Zero-based branch index to multiplicity.
    pub label: BTreeMap<usize, u64>,
}

impl Edge {
    pub fn multiplicity(&self, branch: usize) -> u64 {
        self.label.get(&branch).copied().unwrap_or(0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualGraph {
    pub name: String,
    pub genera: Vec<u64>,
    pub edges: Vec<Edge>,
}

impl DualGraph {
    pub fn branch_count(&self) -> usize {
        self.edges
            .iter()
            .flat_map(|e| e.label.iter().filter(|(_, &m)| m > 0).map(|(&i, _)| i + 1))
            .max()
            .unwrap_or(0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.genera.is_empty() {
            return Err(Error::InvalidGraph("no vertices".into()));
        }
        let v = self.genera.len();
        for (k, e) in self.edges.iter().enumerate() {
            if e.ends.0 >= v || e.ends.1 >= v {
                return Err(Error::InvalidGraph(format!(
                    "edge {} has an endpoint out of range",
                    k + 1
                )));
            }
            if e.label.values().all(|&m| m == 0) {
                return Err(Error::InvalidGraph(format!(
                    "edge {} has an identically zero label",
                    k + 1
                )));
            }
        }
        if self.branch_count() == 0 {
            return Err(Error::InvalidGraph("no branch index is used".into()));
        }
        let all: Vec<usize> = (0..self.edges.len()).collect();
        let (_, count) = components(v, &self.edges, &all);
        if count != 1 {
            return Err(Error::InvalidGraph("graph is disconnected".into()));
        }
        Ok(())
    }
}

/// Connected components after contracting the given edges.
fn components(vertices: usize, edges: &[Edge], contract: &[usize]) -> (Vec<usize>, usize) {
    let mut parent: Vec<usize> = (0..vertices).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let next = p[y];
            p[y] = r;
            y = next;
        }
        r
    }
    for &k in contract {
        let (a, b) = edges[k].ends;
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    }
    let mut label = vec![usize::MAX; vertices];
    let mut next = 0;
    let comp: Vec<usize> = (0..vertices)
        .map(|x| {
            let r = find(&mut parent, x);
            if label[r] == usize::MAX {
                label[r] = next;
                next += 1;
            }
            label[r]
        })
        .collect();
    (comp, next)
}

/// Fundamental cycles of a BFS spanning tree from vertex 0, edges visited
/// in index order. Returns the cycle matrix (`edges.len() x genus`) and the
/// non-tree edges, one per cycle, in increasing order.
fn cycle_basis(vertices: usize, ends: &[(usize, usize)]) -> (IntMatrix, Vec<usize>) {
    let mut adjacency = vec![Vec::new(); vertices];
    for (k, &(a, b)) in ends.iter().enumerate() {
        adjacency[a].push(k);
        if a != b {
            adjacency[b].push(k);
        }
    }
    let mut parent_edge: Vec<Option<usize>> = vec![None; vertices];
    let mut depth = vec![usize::MAX; vertices];
    let mut tree = vec![false; ends.len()];
    depth[0] = 0;
    let mut queue = VecDeque::from([0]);
    while let Some(w) = queue.pop_front() {
        for &k in &adjacency[w] {
            let (a, b) = ends[k];
            let other = if a == w { b } else { a };
            if depth[other] == usize::MAX {
                depth[other] = depth[w] + 1;
                parent_edge[other] = Some(k);
                tree[k] = true;
                queue.push_back(other);
            }
        }
    }
    let up = |w: usize| -> (usize, usize, i64) {
        let k = parent_edge[w].expect("non-root vertex has a parent edge");
        let (a, b) = ends[k];
        if a == w {
            (k, b, 1)
        } else {
            (k, a, -1)
        }
    };
    let cotree: Vec<usize> = (0..ends.len()).filter(|&k| !tree[k]).collect();
    let mut c = IntMatrix::zeros(ends.len(), cotree.len());
    for (col, &k) in cotree.iter().enumerate() {
        let (a, b) = ends[k];
        c[(k, col)] = c[(k, col)].clone() + Int::from(1);
        // Return from b to a through the tree.
        let (mut x, mut y) = (b, a);
        while x != y {
            if depth[x] >= depth[y] {
                let (t, p, s) = up(x);
                c[(t, col)] = c[(t, col)].clone() + Int::from(s);
                x = p;
            } else {
                let (t, p, s) = up(y);
                c[(t, col)] = c[(t, col)].clone() - Int::from(s);
                y = p;
            }
        }
    }
    (c, cotree)
}

pub fn graph_to_datum(graph: &DualGraph) -> Result<DegenDatum> {
    graph.validate()?;
    let v = graph.genera.len();
    let ends: Vec<(usize, usize)> = graph.edges.iter().map(|e| e.ends).collect();
    let (cycles, _) = cycle_basis(v, &ends);
    let mu = cycles.ncols();
    let n = graph.branch_count();
    let mut branches = Vec::with_capacity(n);
    for i in 0..n {
        let zero: Vec<usize> = (0..graph.edges.len())
            .filter(|&k| graph.edges[k].multiplicity(i) == 0)
            .collect();
        let kept: Vec<usize> = (0..graph.edges.len())
            .filter(|&k| graph.edges[k].multiplicity(i) > 0)
            .collect();
        let (comp, count) = components(v, &graph.edges, &zero);
        let contracted: Vec<(usize, usize)> = kept
            .iter()
            .map(|&k| (comp[ends[k].0], comp[ends[k].1]))
            .collect();
        let (ci, cotree) = cycle_basis(count, &contracted);
        let projected = cycles.select_rows(kept.iter().copied());
        let specialization = projected.select_rows(cotree.iter().copied());
        let weights: Vec<Int> = kept
            .iter()
            .map(|&k| Int::from(graph.edges[k].multiplicity(i)))
            .collect();
        let pairing = ci
            .transpose()
            .checked_mul(&Matrix::diagonal(&weights))?
            .checked_mul(&ci)?;
        branches.push(Branch {
            name: (i + 1).to_string(),
            rank: ci.ncols(),
            specialization,
            pairing,
        });
    }
    Ok(DegenDatum {
        name: graph.name.clone(),
        residue_char: Int::zero(),
        abelian_rank: graph.genera.iter().sum::<u64>() as usize,
        closed_rank: mu,
        branches,
        dual: DualData::SelfDual,
        polarization: None,
        strata: Vec::new(),
    })
}

pub const TESTED_PRIMES: [i64; 4] = [2, 3, 5, 7];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveReport {
    pub datum: DegenDatum,
    pub verdict: Verdict,
    pub profile: RankProfile,
    pub l_toric_additive: Vec<(Int, bool)>,
    pub falsifications: Vec<String>,
}

pub fn curve_equivalences(graph: &DualGraph) -> Result<CurveReport> {
    let datum = graph_to_datum(graph)?;
    let mut falsifications = Vec::new();
    if let Err(v) = datum.validate() {
        for violation in v {
            falsifications.push(format!("constructed datum is invalid: {violation}"));
        }
    }
    let verdict = analyze(&datum);
    let profile = toric_rank_profile(&datum);
    if !verdict.purity_cokernel.is_trivial() {
        falsifications.push(format!(
            "purity cokernel has torsion {}",
            verdict.purity_cokernel
        ));
    }
    if verdict.weakly_toric_additive != verdict.toric_additive {
        falsifications.push("weakly toric additive but not toric additive".into());
    }
    let mut l_toric_additive = Vec::new();
    for l in TESTED_PRIMES.map(Int::from) {
        let holds = is_l_toric_additive(&datum, &l)?;
        if holds != verdict.toric_additive {
            falsifications.push(format!(
                "{l}-toric additivity disagrees with toric additivity"
            ));
        }
        l_toric_additive.push((l, holds));
    }
    Ok(CurveReport {
        datum,
        verdict,
        profile,
        l_toric_additive,
        falsifications,
    })
}

/// Inserts a genus-0 vertex in the middle of `edge`, splitting every
/// multiplicity between the two halves so the pairings are unchanged.
/// Needs at least two multiplicity units on the edge.
pub fn subdivide_edge(graph: &DualGraph, edge: usize) -> Result<DualGraph> {
    let e = graph
        .edges
        .get(edge)
        .ok_or_else(|| Error::InvalidGraph(format!("no edge {}", edge + 1)))?;
    let units: Vec<usize> = e
        .label
        .iter()
        .flat_map(|(&i, &m)| std::iter::repeat_n(i, m as usize))
        .collect();
    if units.len() < 2 {
        return Err(Error::InvalidGraph(
            "edge has fewer than two multiplicity units".into(),
        ));
    }
    let mut first = BTreeMap::new();
    let mut second = BTreeMap::new();
    for (k, &i) in units.iter().enumerate() {
        let half = if k % 2 == 0 { &mut first } else { &mut second };
        *half.entry(i).or_insert(0) += 1;
    }
    let mid = graph.genera.len();
    let mut out = graph.clone();
    out.genera.push(0);
    out.edges[edge] = Edge {
        ends: (e.ends.0, mid),
        label: first,
    };
    out.edges.push(Edge {
        ends: (mid, e.ends.1),
        label: second,
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn edge(a: usize, b: usize, label: &[(usize, u64)]) -> Edge {
        Edge {
            ends: (a, b),
            label: label.iter().copied().collect(),
        }
    }

    fn graph(genera: Vec<u64>, edges: Vec<Edge>) -> DualGraph {
        DualGraph {
            name: "g".into(),
            genera,
            edges,
        }
    }

    #[test]
    fn genus_two_deformation() {
        let g = graph(vec![0], vec![edge(0, 0, &[(0, 1)]), edge(0, 0, &[(1, 1)])]);
        let r = curve_equivalences(&g).unwrap();
        assert_eq!(
            (r.profile.mu, r.profile.branch_ranks.clone()),
            (2, vec![1, 1])
        );
        assert!(r.verdict.toric_additive);
        assert!(r.falsifications.is_empty());
    }

    #[test]
    fn tate_curve_over_u1u2() {
        let g = graph(vec![0], vec![edge(0, 0, &[(0, 1), (1, 1)])]);
        let r = curve_equivalences(&g).unwrap();
        assert_eq!(
            (r.profile.mu, r.profile.branch_ranks.clone()),
            (1, vec![1, 1])
        );
        assert!(!r.verdict.weakly_toric_additive && !r.verdict.toric_additive);
        assert_eq!(r.verdict.purity_free_rank, 1);
        assert!(r.falsifications.is_empty());
    }

    #[test]
    fn tree_has_no_toric_part() {
        let g = graph(vec![1, 1], vec![edge(0, 1, &[(0, 1)])]);
        let r = curve_equivalences(&g).unwrap();
        assert_eq!(r.profile.mu, 0);
        assert_eq!(r.datum.abelian_rank, 2);
        assert!(r.verdict.toric_additive);
    }

    #[test]
    fn banana_graph_pairing() {
        // Three edges between two vertices, all on branch 1 with
        // multiplicities 1, 2, 3: H_1 has rank 2.
        let g = graph(
            vec![0, 0],
            vec![
                edge(0, 1, &[(0, 1)]),
                edge(0, 1, &[(0, 2)]),
                edge(0, 1, &[(0, 3)]),
            ],
        );
        let d = graph_to_datum(&g).unwrap();
        assert_eq!(d.closed_rank, 2);
        assert!(d.validate().is_ok());
        let det = d.branches[0].pairing.determinant().unwrap();
        // Spanning-tree count weighted by multiplicities: 1*2 + 1*3 + 2*3.
        assert_eq!(det, Int::from(11));
    }

    #[test]
    fn rejects_bad_graphs() {
        let g = graph(vec![0, 0], vec![edge(0, 0, &[(0, 1)])]);
        assert!(matches!(graph_to_datum(&g), Err(Error::InvalidGraph(_))));
        let g = graph(vec![0], vec![edge(0, 0, &[(0, 0)])]);
        assert!(graph_to_datum(&g).is_err());
    }

    #[test]
    fn subdivision_keeps_pairings() {
        let g = graph(
            vec![0],
            vec![edge(0, 0, &[(0, 1), (1, 1)]), edge(0, 0, &[(1, 2)])],
        );
        let before = curve_equivalences(&g).unwrap();
        let after = curve_equivalences(&subdivide_edge(&g, 0).unwrap()).unwrap();
        assert_eq!(before.verdict, after.verdict);
        for (a, b) in before.datum.branches.iter().zip(&after.datum.branches) {
            assert_eq!(
                a.pairing.determinant().unwrap(),
                b.pairing.determinant().unwrap()
            );
        }
    }
}
