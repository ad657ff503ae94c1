//! One function per subcommand, each turning an input into a report.

use degenkit_core::curves::{curve_equivalences, graph_to_datum};
use degenkit_core::degeneration::{analyze, purity_matrix, toric_rank_profile, DegenDatum};
use degenkit_core::galois::{
    build_rep, closed_point_phi, decomposition_check, minimal_exponent, star_details,
    torsion_phi_group,
};
use degenkit_core::monodromy::{
    closed_point_bound, component_group, compose_trait, StratumSource, TraitProfile,
};
use degenkit_core::neron::{
    converse_for_datum, converse_inputs, psi_fixed_points, psi_group, trait_surjectivity_check,
    ConverseVerdict,
};
use degenkit_core::{Error, Int};
use num_traits::Signed;
use serde_json::{json, Value};

use crate::report::{self, InputEcho, Report};
use crate::schema::{self, Input};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Analyze,
    Trait,
    Oracle,
    Converse,
    Psi,
    Curve,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Analyze => "analyze",
            Command::Trait => "trait",
            Command::Oracle => "oracle",
            Command::Converse => "converse",
            Command::Psi => "psi",
            Command::Curve => "curve",
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Options {
    pub profile: Option<Vec<u64>>,
    pub l: Option<Int>,
    pub r: Option<u32>,
    pub kummer: Option<Vec<u64>>,
}

/// Bad input: exit code 2, no report.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InputError(pub String);

impl From<Error> for InputError {
    fn from(e: Error) -> Self {
        InputError(e.to_string())
    }
}

type Outcome = Result<Report, InputError>;

pub fn evaluate(command: Command, file: &str, bytes: &[u8], opts: &Options) -> Outcome {
    let text =
        std::str::from_utf8(bytes).map_err(|e| InputError(format!("input is not UTF-8: {e}")))?;
    let input = schema::parse(text).map_err(|e| InputError(e.0))?;
    let mut report = Report::new(command.name(), InputEcho::new(file, bytes));
    if command == Command::Curve {
        let Input::Graph(graph) = input else {
            return Err(InputError("curve expects a graph document".into()));
        };
        curve(&mut report, &graph)?;
        return Ok(report);
    }
    let datum = match input {
        Input::Datum(d) => d,
        Input::Graph(g) => {
            report.warn("datum built from the dual graph");
            graph_to_datum(&g)?
        }
    };
    if let Err(violations) = datum.validate() {
        let list: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
        return Err(InputError(format!("invalid datum: {}", list.join("; "))));
    }
    summary(&mut report, &datum);
    match command {
        Command::Analyze => analyze_cmd(&mut report, &datum),
        Command::Trait => trait_cmd(&mut report, &datum, opts)?,
        Command::Oracle => oracle_cmd(&mut report, &datum, opts)?,
        Command::Converse => converse_cmd(&mut report, &datum)?,
        Command::Psi => psi_cmd(&mut report, &datum, opts)?,
        Command::Curve => unreachable!("handled above"),
    }
    Ok(report)
}

fn summary(report: &mut Report, d: &DegenDatum) {
    report.set("name", json!(d.name));
    report.set("residue_char", report::int(&d.residue_char));
    report.set("closed_rank", json!(d.closed_rank));
    report.set("abelian_rank", json!(d.abelian_rank));
    report.set("branches", json!(d.n()));
}

fn analyze_cmd(report: &mut Report, d: &DegenDatum) {
    report.set("purity_matrix", report::matrix(&purity_matrix(d)));
    report.set("verdict", report::verdict(&analyze(d)));
    report.set("rank_profile", report::rank_profile(&toric_rank_profile(d)));
}

fn profile_for(d: &DegenDatum, opts: &Options) -> Result<TraitProfile, InputError> {
    let p = opts
        .profile
        .clone()
        .ok_or_else(|| InputError("--profile is required".into()))?;
    if p.len() != d.n() {
        return Err(InputError(format!(
            "--profile has {} entries for {} branches",
            p.len(),
            d.n()
        )));
    }
    Ok(TraitProfile::new(p))
}

fn trait_cmd(report: &mut Report, d: &DegenDatum, opts: &Options) -> Result<(), InputError> {
    let profile = profile_for(d, opts)?;
    let composed = compose_trait(d, &profile)?;
    let upsilon = component_group(&composed.phi)?;
    report.set("profile", json!(profile.0));
    report.set("transversal", json!(profile.is_transversal()));
    report.set("active_branches", report::one_based(&composed.active));
    report.set(
        "stratum",
        json!({
            "rank": composed.stratum.rank,
            "source": match composed.stratum.source { StratumSource::Derived => "derived", StratumSource::Supplied => "supplied" },
            "heuristic": composed.stratum.heuristic || composed.dual_stratum.heuristic,
            "embedding": report::matrix(&composed.stratum.embedding),
        }),
    );
    report.set("phi", report::matrix(&composed.phi));
    report.set("component_group", report::group(&upsilon));
    if let Some(l) = &opts.l {
        report.set("l", report::int(l));
        report.set("l_part", report::group(&upsilon.l_part(l)?));
    }
    if analyze(d).toric_additive && profile.is_transversal() {
        let s = trait_surjectivity_check(d, &profile)?;
        report.set(
            "surjectivity",
            json!({
                "psi_active": report::group(&s.psi_active),
                "map": report::matrix(&s.map_matrix),
                "surjective": s.surjective,
            }),
        );
        if !s.surjective {
            report.falsifications.push(
                "the map from the active Psi components onto the trait group is not surjective"
                    .into(),
            );
        }
    }
    for w in &composed.warnings {
        report.warn(w.clone());
    }
    Ok(())
}

fn oracle_cmd(report: &mut Report, d: &DegenDatum, opts: &Options) -> Result<(), InputError> {
    let l = opts
        .l
        .clone()
        .ok_or_else(|| InputError("--l is required".into()))?;
    if opts.r == Some(0) {
        return Err(InputError("--r must be at least 1".into()));
    }
    let rep = build_rep(d, &l)?;
    let star = star_details(&rep)?;
    let dec = decomposition_check(&rep)?;
    let lattice = degenkit_core::degeneration::is_l_toric_additive(d, &l)?;
    let agree = star.holds == lattice && dec.holds == lattice;
    report.set("l", report::int(&l));
    report.set(
        "representation",
        json!({
            "rank": rep.rank(),
            "fixed_rank": rep.checks.fixed_rank,
            "fixed_rank_expected": rep.checks.fixed_rank_expected,
            "nilpotents_annihilate": rep.checks.nilpotents_annihilate,
            "unipotent": rep.checks.unipotent,
            "commute": rep.checks.commute,
            "fixed_equals_finite_part": rep.checks.fixed_equals_finite_part,
        }),
    );
    report.set(
        "additivity",
        json!({
            "lattice": lattice,
            "star": star.holds,
            "star_index": report::index(&star.index),
            "decomposition": dec.holds,
            "decomposition_failing_branch": dec.failing_block.map(|b| b + 1),
            "agree": agree,
        }),
    );
    if !rep.checks.all_hold() {
        report
            .falsifications
            .push("the synthesized representation fails its structural checks".into());
    }
    if !agree {
        report.falsifications.push(format!(
            "at l = {l}: lattice {lattice}, star {}, decomposition {}",
            star.holds, dec.holds
        ));
    }

    let bound = closed_point_bound(d, &l)?;
    let order = bound.group.order().expect("l-parts are finite");
    let r_closed = opts.r.unwrap_or_else(|| minimal_exponent(&l, &order));
    let level = num_traits::pow(l.clone(), r_closed as usize);
    let expected = bound.group.killed_by(&level);
    let galois = closed_point_phi(&rep, r_closed)?;
    report.set(
        "closed_point",
        json!({
            "r": r_closed,
            "bound": report::group(&expected),
            "divisible_rank": bound.divisible_rank,
            "galois": report::group(&galois),
            "equal": galois == expected,
        }),
    );
    if galois != expected {
        report.warn(format!(
            "closed-point group {galois} is strictly below the bound {expected}"
        ));
    }

    if opts.profile.is_some() {
        let profile = profile_for(d, opts)?;
        let composed = compose_trait(d, &profile)?;
        let lattice_group = component_group(&composed.phi)?.l_part(&l)?;
        let det = composed.phi.determinant()?.abs();
        let r_trait = opts.r.unwrap_or_else(|| minimal_exponent(&l, &det));
        let level = num_traits::pow(l.clone(), r_trait as usize);
        let expected = lattice_group.killed_by(&level);
        let galois = torsion_phi_group(&rep, &profile, r_trait)?;
        let equal = galois == expected;
        report.set(
            "trait",
            json!({
                "profile": profile.0,
                "r": r_trait,
                "lattice": report::group(&expected),
                "galois": report::group(&galois),
                "agree": equal,
            }),
        );
        if !equal {
            report.falsifications.push(format!(
                "trait {:?}: lattice gives {expected}, Tate module gives {galois}",
                profile.0
            ));
        }
        for w in &composed.warnings {
            report.warn(w.clone());
        }
    }
    Ok(())
}

fn converse_cmd(report: &mut Report, d: &DegenDatum) -> Result<(), InputError> {
    let (p, q, psi1, psi2) = converse_inputs(d)?;
    let c = converse_for_datum(d)?;
    let opt = |m: &Option<degenkit_core::IntMatrix>| m.as_ref().map_or(Value::Null, report::matrix);
    // Certifies X = X_1 + Y for Y the stratum of the remaining branches.
    report.set(
        "split",
        json!({ "p": [1], "q": (2..=d.n()).collect::<Vec<_>>() }),
    );
    report.set("p", report::matrix(&p));
    report.set("q", report::matrix(&q));
    report.set("psi1", report::matrix(&psi1));
    report.set("psi2", report::matrix(&psi2));
    report.set("a", report::matrix(&c.a));
    report.set("block_pairing", report::matrix(&c.block_pairing));
    report.set(
        "hypothesis",
        json!({
            "image_equal": c.image_equal,
            "coker_psi": report::group(&c.coker_at_psi.0),
            "coker_psi_free_rank": c.coker_at_psi.1,
            "coker_psi_a": report::group(&c.coker_at_psi_a.0),
            "coker_psi_a_free_rank": c.coker_at_psi_a.1,
            "holds": c.hypothesis_holds,
        }),
    );
    report.set(
        "theta",
        c.theta
            .as_ref()
            .map_or(Value::Null, report::rational_matrix),
    );
    report.set("chi1", opt(&c.chi1));
    report.set("chi2", opt(&c.chi2));
    report.set(
        "claims",
        json!({
            "idempotent": c.idempotent,
            "sums_to_identity": c.sums_to_identity,
            "kernel_index": report::index(&c.kernel_index),
            "kernel_decomposition": c.kernel_decomposition,
            "a_isomorphism": c.a_isomorphism,
            "p_restricted_isomorphism": c.p_restricted_isomorphism,
        }),
    );
    report.set("verdict", json!(c.verdict.as_str()));
    if c.verdict == ConverseVerdict::ProofClaimFailed {
        report.falsifications.push(
            "hypothesis holds with integral theta, yet a claim of the certificate fails".into(),
        );
    }
    Ok(())
}

fn psi_cmd(report: &mut Report, d: &DegenDatum, opts: &Options) -> Result<(), InputError> {
    let psi = psi_group(d)?;
    report.set(
        "components",
        Value::Array(psi.components.iter().map(report::group).collect()),
    );
    report.set("psi", report::group(&psi.total));
    if let Some(m) = &opts.kummer {
        if m.len() != d.n() {
            return Err(InputError(format!(
                "--kummer has {} entries for {} branches",
                m.len(),
                d.n()
            )));
        }
        let k = psi_fixed_points(d, m)?;
        report.set(
            "kummer",
            json!({
                "multipliers": m,
                "rescaled_components": k.branches.iter().map(|b| report::group(&b.rescaled)).collect::<Vec<_>>(),
                "rescaled_psi": report::group(&k.rescaled_psi),
                "fixed": report::group(&k.fixed),
                "equals_psi": k.equals_psi,
            }),
        );
        if !k.equals_psi {
            report.falsifications.push(format!(
                "fixed points {} differ from Psi {}",
                k.fixed, k.psi
            ));
        }
    }
    Ok(())
}

fn curve(report: &mut Report, graph: &degenkit_core::curves::DualGraph) -> Result<(), InputError> {
    let c = curve_equivalences(graph)?;
    summary(report, &c.datum);
    report.set("vertices", json!(graph.genera.len()));
    report.set("edges", json!(graph.edges.len()));
    report.set(
        "branch_data",
        Value::Array(
            c.datum
                .branches
                .iter()
                .map(|b| json!({ "rank": b.rank, "specialization": report::matrix(&b.specialization), "pairing": report::matrix(&b.pairing) }))
                .collect(),
        ),
    );
    report.set("verdict", report::verdict(&c.verdict));
    report.set("rank_profile", report::rank_profile(&c.profile));
    report.set(
        "l_toric_additive",
        Value::Array(
            c.l_toric_additive
                .iter()
                .map(|(l, holds)| json!({ "l": report::int(l), "holds": holds }))
                .collect(),
        ),
    );
    for f in c.falsifications {
        report.falsifications.push(f);
    }
    if report.falsified() {
        let doc = serde_json::to_string(&schema::graph_document(graph)).expect("graphs serialize");
        report.set("graph", json!(doc));
    }
    Ok(())
}
