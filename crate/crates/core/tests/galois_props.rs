mod common;

use common::*;
use degenkit_core::degeneration::is_l_toric_additive;
use degenkit_core::galois::{
    build_rep, closed_point_phi, decomposition_check, minimal_exponent, oracle_triple,
    star_condition, torsion_phi_group,
};
use degenkit_core::generate::{random_datum, rng, DatumShape};
use degenkit_core::monodromy::{closed_point_bound, component_group, compose_trait, TraitProfile};
use degenkit_core::{Error, Group};
use num_traits::Signed;
use proptest::prelude::*;
use rand::Rng;

#[test]
fn example_fails_only_at_two() {
    let d = example_3_4();
    assert_eq!(oracle_triple(&d, &int(2)).unwrap(), (false, false, false));
    assert_eq!(oracle_triple(&d, &int(3)).unwrap(), (true, true, true));
    let rep = build_rep(&d, &int(2)).unwrap();
    assert!(rep.checks.all_hold());
    assert_eq!(decomposition_check(&rep).unwrap().failing_block, Some(0));
}

#[test]
fn tate_curve_fails_everywhere() {
    for l in [2, 3, 5] {
        let rep = build_rep(&tate_u1u2(), &int(l)).unwrap();
        assert!(!star_condition(&rep).unwrap());
    }
}

#[test]
fn bad_primes_are_rejected() {
    assert!(matches!(
        build_rep(&example_3_4(), &int(4)),
        Err(Error::NotPrime(_))
    ));
    let mut d = example_3_4();
    d.residue_char = int(3);
    assert!(matches!(
        build_rep(&d, &int(3)),
        Err(Error::PrimeEqualsResidueChar(_))
    ));
}

#[test]
fn exponents() {
    assert_eq!(minimal_exponent(&int(2), &int(1)), 1);
    assert_eq!(minimal_exponent(&int(2), &int(4)), 3);
    assert_eq!(minimal_exponent(&int(3), &int(0)), 1);
}

#[test]
fn example_trait_groups_through_the_tate_module() {
    let d = example_3_4();
    let rep = build_rep(&d, &int(2)).unwrap();
    // phi_f = [[4,2],[2,2]] has cokernel Z/2 + Z/2.
    let g = torsion_phi_group(&rep, &TraitProfile::ones(2), 3).unwrap();
    assert_eq!(g, Group::from_orders([int(2), int(2)]));
}

fn prime(r: &mut impl Rng) -> i64 {
    [2, 3, 5][r.gen_range(0..3)]
}

proptest! {
    #![proptest_config(ProptestConfig { max_global_rejects: 1 << 16, ..ProptestConfig::with_cases(128) })]

    #[test]
    fn the_three_verdicts_agree(seed in any::<u64>()) {
        let mut r = rng(seed);
        let d = random_datum(&mut r, DatumShape::default());
        let l = int(prime(&mut r));
        let rep = build_rep(&d, &l).unwrap();
        prop_assert!(rep.checks.all_hold(), "{:?}", rep.checks);
        let (star, dec, lat) = oracle_triple(&d, &l).unwrap();
        prop_assert_eq!(star, lat);
        prop_assert_eq!(dec, lat);
        prop_assert_eq!(lat, is_l_toric_additive(&d, &l).unwrap());
    }

    #[test]
    fn trait_torsion_matches_the_component_group(seed in any::<u64>()) {
        let mut r = rng(seed);
        let d = random_datum(&mut r, DatumShape::default());
        prop_assume!(d.n() > 0);
        let e = TraitProfile::new((0..d.n()).map(|_| r.gen_range(0..=1)).collect());
        prop_assume!(!e.active().is_empty());
        let l = int(prime(&mut r));
        let phi = compose_trait(&d, &e).unwrap().phi;
        let det = phi.determinant().unwrap().abs();
        let rr = minimal_exponent(&l, &det);
        let rep = build_rep(&d, &l).unwrap();
        let expected = component_group(&phi).unwrap().l_part(&l).unwrap();
        prop_assert_eq!(torsion_phi_group(&rep, &e, rr).unwrap(), expected.clone());
        prop_assert_eq!(torsion_phi_group(&rep, &e, rr + 1).unwrap(), expected.clone());
        // Below the stable level the quotient is the l^r-torsion.
        for small in 1..rr {
            let level = num_traits::pow(l.clone(), small as usize);
            prop_assert_eq!(torsion_phi_group(&rep, &e, small).unwrap(), expected.killed_by(&level));
        }
    }

    #[test]
    fn closed_point_torsion_matches_the_bound(seed in any::<u64>()) {
        let mut r = rng(seed);
        let d = random_datum(&mut r, DatumShape { max_rank: 3, ..DatumShape::default() });
        let l = int(prime(&mut r));
        let bound = closed_point_bound(&d, &l).unwrap();
        let order = bound.group.order().unwrap();
        let rep = build_rep(&d, &l).unwrap();
        let top = minimal_exponent(&l, &order);
        let g = closed_point_phi(&rep, top).unwrap();
        prop_assert_eq!(g, bound.group.clone());
        for small in 1..top {
            let level = num_traits::pow(l.clone(), small as usize);
            prop_assert_eq!(closed_point_phi(&rep, small).unwrap(), bound.group.killed_by(&level));
        }
    }
}
