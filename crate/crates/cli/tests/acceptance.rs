//! Acceptance gate: one line per criterion, non-zero exit if any fails.

use std::process::Command;
use std::time::{Duration, Instant};

use degenkit_core::curves::curve_equivalences;
use degenkit_core::degeneration::{analyze, is_l_toric_additive, DegenDatum};
use degenkit_core::galois::{
    build_rep, decomposition_check, minimal_exponent, star_condition, torsion_phi_group,
};
use degenkit_core::generate::{
    random_datum, random_graph, random_matrix, random_ta_datum, rng, DatumShape, GraphShape,
};
use degenkit_core::lattice::{cokernel, is_injective, smith_normal_form, torsion_kernel_qz, Index};
use degenkit_core::monodromy::{component_group, compose_trait, TraitProfile};
use degenkit_core::neron::{converse_check, converse_for_datum, psi_fixed_points, ConverseVerdict};
use degenkit_core::{Int, IntMatrix};
use num_integer::Integer;
use num_traits::Signed;
use rand::Rng;
use serde_json::{json, Value};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn cli(args: &[&str]) -> (Option<i32>, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_degenkit"))
        .args(args)
        .arg("--json")
        .env(
            "DEGENKIT_FIXTURES",
            concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures"),
        )
        .output()
        .expect("binary runs");
    let value = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (out.status.code(), value)
}

fn example_regression() -> Outcome {
    let (code, v) = cli(&["analyze", "example_3_4.json"]);
    let verdict = &v["result"]["verdict"];
    let pass = code == Some(0)
        && verdict["weakly_toric_additive"] == json!(true)
        && verdict["toric_additive"] == json!(false)
        && verdict["failing_primes"] == json!([2])
        && verdict["purity_cokernel"]["invariant_factors"] == json!([2])
        && verdict["purity_free_rank"] == json!(0);
    outcome(
        pass,
        format!(
            "weak={} TA={} failing={} cokernel={}",
            verdict["weakly_toric_additive"],
            verdict["toric_additive"],
            verdict["failing_primes"],
            verdict["purity_cokernel"]["structure"]
        ),
    )
}

fn trait_family() -> Outcome {
    let mut bad = Vec::new();
    for (a, b) in [(1i64, 1i64), (2, 3), (5, 1)] {
        let (code, v) = cli(&[
            "trait",
            "example_3_4.json",
            "--profile",
            &format!("{a},{b}"),
        ]);
        let expected = json!([[4 * a, 2 * a], [2 * a, a + b]]);
        if code != Some(0) || v["result"]["phi"] != expected {
            bad.push(format!("({a},{b}) gave {}", v["result"]["phi"]));
        }
    }
    outcome(
        bad.is_empty(),
        if bad.is_empty() {
            "3/3 profiles exact".into()
        } else {
            bad.join("; ")
        },
    )
}

fn three_examples() -> Outcome {
    let (c1, tate) = cli(&["analyze", "tate_u1u2.json"]);
    let (c2, product) = cli(&["analyze", "product_tate.json"]);
    let (c3, genus2) = cli(&["curve", "genus2_graph.json"]);
    let tate_ok =
        c1 == Some(0) && tate["result"]["verdict"]["weakly_toric_additive"] == json!(false);
    let product_ok = c2 == Some(0) && product["result"]["verdict"]["toric_additive"] == json!(true);
    let genus2_ok = c3 == Some(0)
        && genus2["result"]["rank_profile"]["mu"] == json!(2)
        && genus2["result"]["rank_profile"]["branch_ranks"] == json!([1, 1])
        && genus2["result"]["verdict"]["toric_additive"] == json!(true);
    outcome(tate_ok && product_ok && genus2_ok, format!("tate weak-TA false: {tate_ok}, product TA: {product_ok}, genus 2 mu=2, mu_i=1, TA: {genus2_ok}"))
}

const PRIMES: [i64; 3] = [2, 3, 5];

fn theorem_a_equals_b() -> Outcome {
    let mut r = rng(0xA0B);
    let (mut checked, mut disagreements, mut l_failing, mut not_weak, mut additive) =
        (0, 0, 0, 0, 0);
    for _ in 0..600 {
        let d = random_datum(&mut r, DatumShape::default());
        let l = Int::from(PRIMES[r.gen_range(0..3)]);
        let rep = build_rep(&d, &l).expect("valid prime");
        let star = star_condition(&rep).expect("star");
        let dec = decomposition_check(&rep).expect("decomposition").holds;
        let lattice = is_l_toric_additive(&d, &l).expect("lattice");
        if star != dec || dec != lattice {
            disagreements += 1;
        }
        let v = analyze(&d);
        match (v.toric_additive, v.weakly_toric_additive, lattice) {
            (true, _, _) => additive += 1,
            (false, false, _) => not_weak += 1,
            (false, true, false) => l_failing += 1,
            _ => {}
        }
        checked += 1;
    }
    outcome(
        disagreements == 0,
        format!("{checked} datums, {disagreements} disagreements ({additive} TA, {not_weak} not weakly TA, {l_failing} failing at the sampled l)"),
    )
}

fn component_group_oracle() -> Outcome {
    let mut r = rng(0xC0C);
    let (mut checked, mut disagreements) = (0, 0);
    while checked < 250 {
        let d = random_datum(&mut r, DatumShape::default());
        if d.n() == 0 || d.closed_rank == 0 {
            continue;
        }
        let profile = TraitProfile::new((0..d.n()).map(|_| r.gen_range(0..=1)).collect());
        if profile.active().is_empty() {
            continue;
        }
        let l = Int::from(PRIMES[r.gen_range(0..3)]);
        let phi = compose_trait(&d, &profile).expect("compose").phi;
        let det = phi.determinant().expect("square").abs();
        let level = minimal_exponent(&l, &det) + r.gen_range(0..=1);
        let expected = component_group(&phi)
            .expect("nondegenerate")
            .l_part(&l)
            .expect("prime");
        let rep = build_rep(&d, &l).expect("valid prime");
        if torsion_phi_group(&rep, &profile, level).expect("torsion") != expected {
            disagreements += 1;
        }
        checked += 1;
    }
    outcome(
        disagreements == 0,
        format!("{checked} tuples, {disagreements} disagreements"),
    )
}

fn coprime_multiplier(r: &mut impl Rng, p: &Int) -> u64 {
    loop {
        let m = r.gen_range(1..=12u64);
        if p == &Int::from(0) || Int::from(m).gcd(p) == Int::from(1) {
            return m;
        }
    }
}

fn kummer_lemma() -> Outcome {
    let mut r = rng(0x4B4);
    let (mut checked, mut failures) = (0, 0);
    for _ in 0..250 {
        let mut d = random_datum(&mut r, DatumShape::default());
        d.residue_char = Int::from([0, 2, 3, 5, 7][r.gen_range(0..5)]);
        let m: Vec<u64> = (0..d.n())
            .map(|_| coprime_multiplier(&mut r, &d.residue_char))
            .collect();
        if !psi_fixed_points(&d, &m).expect("tame").equals_psi {
            failures += 1;
        }
        checked += 1;
    }
    outcome(
        failures == 0,
        format!("{checked} pairs, {failures} with fixed points different from Psi"),
    )
}

fn multi_branch_ta(r: &mut impl Rng) -> DegenDatum {
    loop {
        let d = random_ta_datum(r, DatumShape::default());
        if d.n() >= 2 {
            return d;
        }
    }
}

fn converse_certificate() -> Outcome {
    let mut r = rng(0xC0E);
    let mut failures = Vec::new();
    let total = 250;
    for k in 0..total {
        let d = multi_branch_ta(&mut r);
        let c = converse_for_datum(&d).expect("self-dual");
        let ok = c.verdict == ConverseVerdict::TaCertified
            && c.idempotent
            && c.kernel_decomposition
            && c.kernel_index == Index::Finite(Int::from(1));
        if !ok {
            failures.push(k);
        }
    }
    let p = IntMatrix::from_i64_rows(&[&[2, 1]]);
    let q = IntMatrix::from_i64_rows(&[&[0, 1]]);
    let one = IntMatrix::from_i64_rows(&[&[1]]);
    let example = converse_check(&p, &q, &one, &one).expect("shapes").verdict;
    let pass = failures.is_empty() && example == ConverseVerdict::HypothesisFailed;
    outcome(
        pass,
        format!(
            "{}/{total} TA datums certified, example verdict {}",
            total - failures.len(),
            example.as_str()
        ),
    )
}

fn curve_equivalence() -> Outcome {
    let mut r = rng(0xC7E);
    let (mut checked, mut events, mut additive) = (0, Vec::new(), 0);
    for _ in 0..400 {
        let g = random_graph(&mut r, GraphShape::default());
        let report = curve_equivalences(&g).expect("connected graph");
        if !report.falsifications.is_empty() {
            events.push(format!("{:?}: {:?}", g, report.falsifications));
        }
        if report.verdict.toric_additive {
            additive += 1;
        }
        checked += 1;
    }
    let detail = format!(
        "{checked} graphs ({additive} TA), {} falsification events",
        events.len()
    );
    outcome(
        events.is_empty(),
        if events.is_empty() {
            detail
        } else {
            format!("{detail}: {}", events[0])
        },
    )
}

fn lattice_soundness() -> Outcome {
    let mut r = rng(0x5AF);
    let (mut checked, mut injective, mut failures) = (0, 0, 0);
    for _ in 0..1200 {
        let rows = r.gen_range(1..=6);
        let cols = r.gen_range(1..=6);
        let m = random_matrix(&mut r, rows, cols, 1_000_000);
        let s = smith_normal_form(&m);
        let product = s
            .left
            .checked_mul(&m)
            .and_then(|x| x.checked_mul(&s.right))
            .expect("shapes");
        if product != s.diagonal {
            failures += 1;
        }
        if is_injective(&m) {
            injective += 1;
            if torsion_kernel_qz(&m) != cokernel(&m.transpose()).0 {
                failures += 1;
            }
        }
        checked += 1;
    }
    outcome(
        failures == 0,
        format!("{checked} matrices ({injective} injective), {failures} failures"),
    )
}

fn main() {
    type Criterion = (&'static str, Duration, fn() -> Outcome);
    let criteria: [Criterion; 9] = [
        (
            "example regression",
            Duration::from_secs(1),
            example_regression,
        ),
        ("trait family", Duration::from_secs(1), trait_family),
        ("three examples", Duration::from_secs(5), three_examples),
        (
            "star = decomposition = lattice",
            Duration::from_secs(60),
            theorem_a_equals_b,
        ),
        (
            "component group oracle",
            Duration::from_secs(60),
            component_group_oracle,
        ),
        ("Kummer fixed points", Duration::from_secs(30), kummer_lemma),
        (
            "converse certificate",
            Duration::from_secs(30),
            converse_certificate,
        ),
        (
            "curve equivalences",
            Duration::from_secs(30),
            curve_equivalence,
        ),
        (
            "lattice soundness",
            Duration::from_secs(120),
            lattice_soundness,
        ),
    ];
    let mut failed = 0;
    for (k, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        let elapsed = start.elapsed();
        let pass = o.pass && elapsed < *limit;
        if !pass {
            failed += 1;
        }
        println!(
            "{} criterion {}: {name}: {} [{:.3}s, limit {}s]",
            if pass { "PASS" } else { "FAIL" },
            k + 1,
            o.detail,
            elapsed.as_secs_f64(),
            limit.as_secs()
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
