//! The JSON input format, version "1".
//!
//! A document carries either a `datum` or a `graph`. Matrices are row-major
//! arrays of arrays; entries are JSON integers or decimal strings (for
//! values outside 64 bits). Branches are numbered from 1, vertices from 0.

use std::collections::BTreeMap;
use std::fmt;

use degenkit_core::curves::{DualGraph, Edge};
use degenkit_core::degeneration::{
    Branch, DegenDatum, DualData, DualSide, Polarization, StratumOverride,
};
use degenkit_core::{Int, IntMatrix};
use num_traits::Zero;
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub const FORMAT_VERSION: &str = "1";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntLit(pub Int);

impl Serialize for IntLit {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match i64::try_from(&self.0) {
            Ok(v) => s.serialize_i64(v),
            Err(_) => s.serialize_str(&self.0.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for IntLit {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = IntLit;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an integer or a string of decimal digits")
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<IntLit, E> {
                Ok(IntLit(Int::from(v)))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<IntLit, E> {
                Ok(IntLit(Int::from(v)))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<IntLit, E> {
                v.trim()
                    .parse::<Int>()
                    .map(IntLit)
                    .map_err(|_| E::custom(format!("not an integer: {v:?}")))
            }
        }
        d.deserialize_any(V)
    }
}

pub type MatrixDoc = Vec<Vec<IntLit>>;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Document {
    pub format_version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub datum: Option<DatumDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph: Option<GraphDoc>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClosedPointDoc {
    pub rank: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BranchDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub rank: usize,
    pub specialization: MatrixDoc,
    pub pairing: MatrixDoc,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DualBranchDoc {
    pub rank: usize,
    pub specialization: MatrixDoc,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DualSideDoc {
    pub rank: usize,
    pub branches: Vec<DualBranchDoc>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DualDoc {
    /// `"self"` or `"unknown"`.
    Keyword(String),
    Explicit(DualSideDoc),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolarizationDoc {
    pub closed_point: MatrixDoc,
    pub branches: Vec<MatrixDoc>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StratumDoc {
    pub branches: Vec<usize>,
    pub embedding: MatrixDoc,
    pub specialization: MatrixDoc,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatumDoc {
    #[serde(default)]
    pub name: String,
    #[serde(default = "zero_lit")]
    pub residue_char: IntLit,
    #[serde(default)]
    pub abelian_rank: usize,
    pub closed_point: ClosedPointDoc,
    pub branches: Vec<BranchDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dual: Option<DualDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polarization: Option<PolarizationDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub strata: Vec<StratumDoc>,
}

fn zero_lit() -> IntLit {
    IntLit(Int::zero())
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexDoc {
    #[serde(default)]
    pub genus: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDoc {
    pub ends: [usize; 2],
    /// Branch number (from 1) to multiplicity.
    pub label: BTreeMap<String, u64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDoc {
    #[serde(default)]
    pub name: String,
    pub vertices: Vec<VertexDoc>,
    pub edges: Vec<EdgeDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Input {
    Datum(DegenDatum),
    Graph(DualGraph),
}

#[derive(Debug)]
pub struct SchemaError(pub String);

impl fmt::Display for SchemaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for SchemaError {}

fn err<T>(msg: impl Into<String>) -> Result<T, SchemaError> {
    Err(SchemaError(msg.into()))
}

fn matrix(doc: &MatrixDoc, rows: usize, cols: usize, what: &str) -> Result<IntMatrix, SchemaError> {
    if doc.len() != rows {
        return err(format!("{what}: expected {rows} rows, found {}", doc.len()));
    }
    if let Some((i, r)) = doc.iter().enumerate().find(|(_, r)| r.len() != cols) {
        return err(format!(
            "{what}: row {} has {} entries, expected {cols}",
            i + 1,
            r.len()
        ));
    }
    let rows_vec = doc
        .iter()
        .map(|r| r.iter().map(|x| x.0.clone()).collect())
        .collect();
    IntMatrix::from_rows_with_cols(rows_vec, cols).map_err(|e| SchemaError(format!("{what}: {e}")))
}

fn matrix_doc(m: &IntMatrix) -> MatrixDoc {
    m.to_rows()
        .into_iter()
        .map(|r| r.into_iter().map(IntLit).collect())
        .collect()
}

/// Parses a document; errors carry the JSON line and column.
pub fn parse(text: &str) -> Result<Input, SchemaError> {
    let doc: Document =
        serde_json::from_str(text).map_err(|e| SchemaError(format!("invalid JSON: {e}")))?;
    from_document(&doc)
}

pub fn from_document(doc: &Document) -> Result<Input, SchemaError> {
    if doc.format_version != FORMAT_VERSION {
        return err(format!(
            "unsupported format_version {:?}, expected {FORMAT_VERSION:?}",
            doc.format_version
        ));
    }
    match (&doc.datum, &doc.graph) {
        (Some(d), None) => datum_from_doc(d).map(Input::Datum),
        (None, Some(g)) => graph_from_doc(g).map(Input::Graph),
        (Some(_), Some(_)) => err("document has both a datum and a graph"),
        (None, None) => err("document has neither a datum nor a graph"),
    }
}

fn dual_ranks(d: &DatumDoc) -> Result<(usize, Vec<usize>), SchemaError> {
    match &d.dual {
        Some(DualDoc::Explicit(side)) => {
            if side.branches.len() != d.branches.len() {
                return err(format!(
                    "dual: {} branches listed for {} branches",
                    side.branches.len(),
                    d.branches.len()
                ));
            }
            Ok((side.rank, side.branches.iter().map(|b| b.rank).collect()))
        }
        _ => Ok((
            d.closed_point.rank,
            d.branches.iter().map(|b| b.rank).collect(),
        )),
    }
}

fn datum_from_doc(d: &DatumDoc) -> Result<DegenDatum, SchemaError> {
    let mu = d.closed_point.rank;
    let (dual_mu, dual_branch_ranks) = dual_ranks(d)?;
    let mut branches = Vec::with_capacity(d.branches.len());
    for (i, b) in d.branches.iter().enumerate() {
        let what = |field: &str| format!("branch {}: {field}", i + 1);
        branches.push(Branch {
            name: b.name.clone().unwrap_or_else(|| (i + 1).to_string()),
            rank: b.rank,
            specialization: matrix(&b.specialization, b.rank, mu, &what("specialization"))?,
            pairing: matrix(&b.pairing, b.rank, dual_branch_ranks[i], &what("pairing"))?,
        });
    }
    let dual = match &d.dual {
        None => DualData::SelfDual,
        Some(DualDoc::Keyword(k)) if k == "self" => DualData::SelfDual,
        Some(DualDoc::Keyword(k)) if k == "unknown" => DualData::Unknown,
        Some(DualDoc::Keyword(k)) => {
            return err(format!(
                "dual: unknown keyword {k:?}, expected \"self\" or \"unknown\""
            ))
        }
        Some(DualDoc::Explicit(side)) => DualData::Explicit(DualSide {
            rank: dual_mu,
            branch_ranks: dual_branch_ranks.clone(),
            specializations: side
                .branches
                .iter()
                .enumerate()
                .map(|(i, b)| {
                    matrix(
                        &b.specialization,
                        b.rank,
                        dual_mu,
                        &format!("dual branch {}: specialization", i + 1),
                    )
                })
                .collect::<Result<_, _>>()?,
        }),
    };
    let polarization = match &d.polarization {
        None => None,
        Some(p) => {
            if p.branches.len() != d.branches.len() {
                return err(format!(
                    "polarization: {} branch maps for {} branches",
                    p.branches.len(),
                    d.branches.len()
                ));
            }
            Some(Polarization {
                closed_point: matrix(&p.closed_point, dual_mu, mu, "polarization: closed_point")?,
                branches: p
                    .branches
                    .iter()
                    .enumerate()
                    .map(|(i, m)| {
                        matrix(
                            m,
                            dual_branch_ranks[i],
                            d.branches[i].rank,
                            &format!("polarization: branch {}", i + 1),
                        )
                    })
                    .collect::<Result<_, _>>()?,
            })
        }
    };
    let mut strata = Vec::new();
    for (k, s) in d.strata.iter().enumerate() {
        let what = |field: &str| format!("stratum {}: {field}", k + 1);
        let mut zero_based = Vec::with_capacity(s.branches.len());
        for &j in &s.branches {
            if j == 0 || j > d.branches.len() {
                return err(what(&format!("no branch {j}")));
            }
            zero_based.push(j - 1);
        }
        let target: usize = zero_based.iter().map(|&j| d.branches[j].rank).sum();
        let y = s.embedding.first().map_or(0, |r| r.len());
        strata.push(StratumOverride {
            branches: zero_based,
            embedding: matrix(&s.embedding, target, y, &what("embedding"))?,
            specialization: matrix(&s.specialization, y, mu, &what("specialization"))?,
        });
    }
    Ok(DegenDatum {
        name: d.name.clone(),
        residue_char: d.residue_char.0.clone(),
        abelian_rank: d.abelian_rank,
        closed_rank: mu,
        branches,
        dual,
        polarization,
        strata,
    })
}

fn graph_from_doc(g: &GraphDoc) -> Result<DualGraph, SchemaError> {
    let mut edges = Vec::with_capacity(g.edges.len());
    for (k, e) in g.edges.iter().enumerate() {
        let mut label = BTreeMap::new();
        for (name, &mult) in &e.label {
            let branch: usize = name.parse().ok().filter(|&b| b > 0).ok_or_else(|| {
                SchemaError(format!(
                    "edge {}: branch label {name:?} is not a positive integer",
                    k + 1
                ))
            })?;
            label.insert(branch - 1, mult);
        }
        edges.push(Edge {
            ends: (e.ends[0], e.ends[1]),
            label,
        });
    }
    Ok(DualGraph {
        name: g.name.clone(),
        genera: g.vertices.iter().map(|v| v.genus).collect(),
        edges,
    })
}

pub fn datum_document(d: &DegenDatum) -> Document {
    let dual = match &d.dual {
        DualData::SelfDual => None,
        DualData::Unknown => Some(DualDoc::Keyword("unknown".into())),
        DualData::Explicit(side) => Some(DualDoc::Explicit(DualSideDoc {
            rank: side.rank,
            branches: side
                .branch_ranks
                .iter()
                .zip(&side.specializations)
                .map(|(&rank, sp)| DualBranchDoc {
                    rank,
                    specialization: matrix_doc(sp),
                })
                .collect(),
        })),
    };
    let datum = DatumDoc {
        name: d.name.clone(),
        residue_char: IntLit(d.residue_char.clone()),
        abelian_rank: d.abelian_rank,
        closed_point: ClosedPointDoc {
            rank: d.closed_rank,
        },
        branches: d
            .branches
            .iter()
            .map(|b| BranchDoc {
                name: Some(b.name.clone()),
                rank: b.rank,
                specialization: matrix_doc(&b.specialization),
                pairing: matrix_doc(&b.pairing),
            })
            .collect(),
        dual,
        polarization: d.polarization.as_ref().map(|p| PolarizationDoc {
            closed_point: matrix_doc(&p.closed_point),
            branches: p.branches.iter().map(matrix_doc).collect(),
        }),
        strata: d
            .strata
            .iter()
            .map(|s| StratumDoc {
                branches: s.branches.iter().map(|j| j + 1).collect(),
                embedding: matrix_doc(&s.embedding),
                specialization: matrix_doc(&s.specialization),
            })
            .collect(),
    };
    Document {
        format_version: FORMAT_VERSION.into(),
        datum: Some(datum),
        graph: None,
    }
}

pub fn graph_document(g: &DualGraph) -> Document {
    let graph = GraphDoc {
        name: g.name.clone(),
        vertices: g.genera.iter().map(|&genus| VertexDoc { genus }).collect(),
        edges: g
            .edges
            .iter()
            .map(|e| EdgeDoc {
                ends: [e.ends.0, e.ends.1],
                label: e
                    .label
                    .iter()
                    .map(|(&i, &m)| ((i + 1).to_string(), m))
                    .collect(),
            })
            .collect(),
    };
    Document {
        format_version: FORMAT_VERSION.into(),
        datum: None,
        graph: Some(graph),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = r#"{
        "format_version": "1",
        "datum": {
            "name": "example",
            "closed_point": {"rank": 2},
            "branches": [
                {"rank": 1, "specialization": [[2, 1]], "pairing": [[1]]},
                {"rank": 1, "specialization": [[0, "1"]], "pairing": [[1]]}
            ]
        }
    }"#;

    #[test]
    fn parses_and_round_trips() {
        let Input::Datum(d) = parse(EXAMPLE).unwrap() else {
            panic!("expected a datum")
        };
        assert_eq!(
            d.branches[0].specialization,
            IntMatrix::from_i64_rows(&[&[2, 1]])
        );
        assert_eq!(d.dual, DualData::SelfDual);
        let text = serde_json::to_string(&datum_document(&d)).unwrap();
        assert_eq!(parse(&text).unwrap(), Input::Datum(d));
    }

    #[test]
    fn big_integers_survive_as_strings() {
        let big: Int = "123456789012345678901234567890".parse().unwrap();
        let v = serde_json::to_value(IntLit(big.clone())).unwrap();
        assert_eq!(v, serde_json::Value::String(big.to_string()));
        let back: IntLit = serde_json::from_value(v).unwrap();
        assert_eq!(back.0, big);
    }

    #[test]
    fn shape_errors_name_the_field() {
        let bad = EXAMPLE.replace("[[2, 1]]", "[[2, 1, 0]]");
        let e = parse(&bad).unwrap_err();
        assert_eq!(
            e.0,
            "branch 1: specialization: row 1 has 3 entries, expected 2"
        );
    }

    #[test]
    fn syntax_errors_carry_a_location() {
        let e = parse("{\"format_version\": \"1\",\n  \"datum\": }").unwrap_err();
        assert!(e.0.contains("line 2"), "{}", e.0);
    }

    #[test]
    fn graphs_number_branches_from_one() {
        let text = r#"{"format_version": "1", "graph": {"vertices": [{"genus": 0}],
            "edges": [{"ends": [0, 0], "label": {"1": 1, "2": 1}}]}}"#;
        let Input::Graph(g) = parse(text).unwrap() else {
            panic!("expected a graph")
        };
        assert_eq!(
            g.edges[0].label.keys().copied().collect::<Vec<_>>(),
            vec![0, 1]
        );
        let again = serde_json::to_string(&graph_document(&g)).unwrap();
        assert_eq!(parse(&again).unwrap(), Input::Graph(g));
    }
}
