//! Reports and their two renderings. The text form is generated from the
//! JSON value, so both always carry the same numbers.

use std::fmt::Write as _;

use degenkit_core::degeneration::{FailingPrimes, RankProfile, Verdict};
use degenkit_core::lattice::Index;
use degenkit_core::{Group, Int, IntMatrix, RatMatrix};
use serde::Serialize;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

pub const REPORT_VERSION: &str = "1";

#[derive(Clone, Debug, Serialize)]
pub struct InputEcho {
    pub file: String,
    pub sha256: String,
}

impl InputEcho {
    pub fn new(file: impl Into<String>, bytes: &[u8]) -> Self {
        Self {
            file: file.into(),
            sha256: hex::encode(Sha256::digest(bytes)),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub format_version: &'static str,
    pub command: &'static str,
    pub input: InputEcho,
    pub result: Map<String, Value>,
    pub warnings: Vec<String>,
    pub falsifications: Vec<String>,
}

impl Report {
    pub fn new(command: &'static str, input: InputEcho) -> Self {
        Self {
            format_version: REPORT_VERSION,
            command,
            input,
            result: Map::new(),
            warnings: Vec::new(),
            falsifications: Vec::new(),
        }
    }

    pub fn set(&mut self, key: &str, value: Value) {
        self.result.insert(key.to_string(), value);
    }

    pub fn warn(&mut self, w: impl Into<String>) {
        let w = w.into();
        if !self.warnings.contains(&w) {
            self.warnings.push(w);
        }
    }

    pub fn falsified(&self) -> bool {
        !self.falsifications.is_empty()
    }

    pub fn to_value(&self) -> Value {
        serde_json::to_value(self).expect("reports serialize")
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("== {} ({}) ==\n", self.input.file, self.command);
        let _ = writeln!(out, "sha256: {}", self.input.sha256);
        render_map(&mut out, &self.result, 0);
        for w in &self.warnings {
            let _ = writeln!(out, "warning: {w}");
        }
        for f in &self.falsifications {
            let _ = writeln!(out, "FALSIFIED: {f}");
        }
        out
    }
}

fn is_flat(v: &Value) -> bool {
    match v {
        Value::Array(items) => items.iter().all(is_flat),
        Value::Object(_) => false,
        _ => true,
    }
}

fn inline(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(items) => format!(
            "[{}]",
            items.iter().map(inline).collect::<Vec<_>>().join(", ")
        ),
        other => other.to_string(),
    }
}

fn render_map(out: &mut String, map: &Map<String, Value>, depth: usize) {
    let pad = "  ".repeat(depth);
    for (key, value) in map {
        match value {
            Value::Object(inner) => {
                let _ = writeln!(out, "{pad}{key}:");
                render_map(out, inner, depth + 1);
            }
            v if is_flat(v) => {
                let _ = writeln!(out, "{pad}{key}: {}", inline(v));
            }
            Value::Array(items) => {
                let _ = writeln!(out, "{pad}{key}:");
                for (i, item) in items.iter().enumerate() {
                    match item {
                        Value::Object(inner) => {
                            let _ = writeln!(out, "{pad}  - [{}]", i + 1);
                            render_map(out, inner, depth + 2);
                        }
                        other => {
                            let _ = writeln!(out, "{pad}  - {}", inline(other));
                        }
                    }
                }
            }
            _ => unreachable!("flat values are handled above"),
        }
    }
}

pub fn int(v: &Int) -> Value {
    match i64::try_from(v) {
        Ok(x) => json!(x),
        Err(_) => json!(v.to_string()),
    }
}

pub fn ints(vs: &[Int]) -> Value {
    Value::Array(vs.iter().map(int).collect())
}

pub fn matrix(m: &IntMatrix) -> Value {
    Value::Array(m.to_rows().iter().map(|r| ints(r)).collect())
}

pub fn rational_matrix(m: &RatMatrix) -> Value {
    Value::Array(
        m.to_rows()
            .iter()
            .map(|r| {
                Value::Array(
                    r.iter()
                        .map(|q| {
                            if q.is_integer() {
                                int(&q.to_integer())
                            } else {
                                json!(q.to_string())
                            }
                        })
                        .collect(),
                )
            })
            .collect(),
    )
}

pub fn group(g: &Group) -> Value {
    let mut m = Map::new();
    m.insert("invariant_factors".into(), ints(g.invariant_factors()));
    if g.divisible_rank() > 0 {
        m.insert("divisible_rank".into(), json!(g.divisible_rank()));
    }
    m.insert(
        "order".into(),
        g.order().map_or(json!("infinite"), |o| int(&o)),
    );
    m.insert("structure".into(), json!(g.to_string()));
    Value::Object(m)
}

pub fn index(i: &Index<Int>) -> Value {
    match i {
        Index::Finite(v) => int(v),
        Index::Infinite => json!("infinite"),
    }
}

pub fn one_based(v: &[usize]) -> Value {
    json!(v.iter().map(|i| i + 1).collect::<Vec<_>>())
}

pub fn verdict(v: &Verdict) -> Value {
    let failing = match &v.failing_primes {
        FailingPrimes::Finite(ps) => ints(ps),
        FailingPrimes::All => json!("all"),
    };
    json!({
        "toric_additive": v.toric_additive,
        "weakly_toric_additive": v.weakly_toric_additive,
        "failing_primes": failing,
        "purity_cokernel": group(&v.purity_cokernel),
        "purity_free_rank": v.purity_free_rank,
    })
}

pub fn rank_profile(p: &RankProfile) -> Value {
    json!({ "mu": p.mu, "branch_ranks": p.branch_ranks, "deficit": p.deficit })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_rendering_follows_the_json() {
        let mut r = Report::new("analyze", InputEcho::new("x.json", b"{}"));
        r.set(
            "matrix",
            matrix(&IntMatrix::from_i64_rows(&[&[4, 2], &[2, 2]])),
        );
        r.set(
            "group",
            group(&Group::from_orders([Int::from(2), Int::from(2)])),
        );
        r.warn("careful");
        let text = r.to_text();
        assert!(text.contains("matrix: [[4, 2], [2, 2]]"), "{text}");
        assert!(text.contains("  invariant_factors: [2, 2]"), "{text}");
        assert!(text.contains("  structure: Z/2 + Z/2"), "{text}");
        assert!(text.contains("warning: careful"));
        assert_eq!(r.to_value()["result"]["group"]["order"], json!(4));
    }

    #[test]
    fn digest_is_of_the_raw_bytes() {
        let e = InputEcho::new("f", b"abc");
        assert_eq!(
            e.sha256,
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
