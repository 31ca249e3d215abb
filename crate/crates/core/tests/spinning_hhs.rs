mod common;

use coarsequot::constants::q;
use coarsequot::groups::{cayley_ball, Presentation, DEFAULT_BALL_CAP};
use coarsequot::hhs::{
    build_quotient_structure, check_quotient_bounds, cs_translation, peripheral_audit, spinning_for,
    verify_hhs_axioms, AxiomBounds, HhsStructure,
};
use coarsequot::spinning::{
    build_quotient, certify_minimal, compare_slimness, injectivity_report, lift_triangle, verify_spinning,
    SpinningInstance,
};
use common::*;

const R60: &str = "baBBBBBaBBabaaaaBABBBAABBAbbaBBaBAA";
const REL_FREE_PRODUCT: &str = "AAAbbbAbbabaaBBaaaBBAAbbAbAbbABabA";

#[test]
fn z_toy_classes_are_residues() {
    let inst = SpinningInstance::z_toy(10, 5, q(3)).unwrap();
    let qg = build_quotient(&inst, 4).unwrap();
    assert_eq!(qg.class_count(), 6);
    for v in 0..inst.ball.vertex_count() as u32 {
        for u in 0..inst.ball.vertex_count() as u32 {
            let sum = |x: u32| inst.ball.element(x).letters().iter().map(|&l| i64::from(l)).sum::<i64>();
            let (a, b) = (sum(v), sum(u));
            assert_eq!(qg.class(v) == qg.class(u), (a - b).rem_euclid(5) == 0);
        }
    }
}

#[test]
fn quotient_map_is_one_lipschitz() {
    let inst = SpinningInstance::z_toy(10, 5, q(3)).unwrap();
    let qg = build_quotient(&inst, 4).unwrap();
    let n = inst.vertex_count() as u32;
    for u in 0..n {
        let row = inst.cone.graph.bfs(u);
        for v in 0..n {
            assert!(qg.graph.distance(qg.class(u), qg.class(v)).unwrap() <= row[v as usize]);
        }
    }
    // every pair of classes is realized by a certified minimal pair
    for a in 0..qg.class_count() as u32 {
        for b in 0..qg.class_count() as u32 {
            assert!(certify_minimal(&inst, &qg, a, b).unwrap().certified);
        }
    }
}

#[test]
fn spinning_threshold_above_the_minimum_fails() {
    let inst = SpinningInstance::z_toy(10, 5, q(3)).unwrap();
    let sp = verify_spinning(&inst, 10_000, 1).unwrap();
    assert_eq!(sp.min_observed, Some(5));
    assert!(sp.pass);
    let high = SpinningInstance::z_toy(10, 5, q(5)).unwrap();
    let sp = verify_spinning(&high, 10_000, 1).unwrap();
    assert!(!sp.pass);
    assert!(sp.witness.is_some());
}

#[test]
fn every_z_toy_triangle_lifts_and_closes() {
    let inst = SpinningInstance::z_toy(10, 5, q(3)).unwrap();
    let qg = build_quotient(&inst, 4).unwrap();
    let k = qg.class_count() as u32;
    for a in 0..k {
        for b in 0..k {
            for c in 0..k {
                let rep = lift_triangle(&inst, &qg, [a, b, c]).unwrap();
                assert!(rep.closed, "{a} {b} {c}: {rep:?}");
                assert!(rep.minimal);
                assert!(rep.strictly_decreasing());
                assert!(rep.stuck.is_none());
            }
        }
    }
    assert!(compare_slimness(&inst, &qg, 100, 1).unwrap().pass);
}

#[test]
fn relator_quotient_on_a_small_ball() {
    let ball = free_ball(2, 4);
    let inst = SpinningInstance::new(ball, &w(R60), q(5), None).unwrap();
    let qg = build_quotient(&inst, 2).unwrap();
    assert!(qg.is_trivial());
    assert_eq!(qg.oracle.disagreements, 0);
    let inj = injectivity_report(&inst, &qg, &q(5));
    assert!(inj.free && inj.pass);
    assert!(inj.min_displacement.unwrap() >= R60.len());
    assert!(verify_spinning(&inst, 5000, 3).unwrap().pass);
}

#[test]
fn free_product_domains_at_radius_six() {
    let h = HhsStructure::free_product(&[1, 1], 6).unwrap();
    let ball = h.ball.as_ref().unwrap();
    // coset reps of length k < 6 are 1 or end in the other letter: 2·3^(k−1) of them
    let reps_per_letter = 1 + 2 * (1 + 3 + 9 + 27 + 81);
    assert_eq!(h.domains.len(), 1 + 2 * reps_per_letter);
    assert_eq!(ball.vertex_count(), 1 + 2 * (3usize.pow(6) - 1));
    let r = verify_hhs_axioms(&h, &AxiomBounds::uniform(&h.e), 300, 4).unwrap();
    assert!(r.pass, "{r:#?}");
}

#[test]
fn free_product_quotient_by_a_relator() {
    let h = HhsStructure::free_product(&[1, 1], 4).unwrap();
    let relator = w(REL_FREE_PRODUCT);
    let inst = spinning_for(&h, &relator, q(5), None).unwrap();
    let qh = build_quotient_structure(&h, inst, 2, 5).unwrap();
    let b = check_quotient_bounds(&qh, 200, 5).unwrap();
    assert_eq!(b.violations, 0, "{b:#?}");
    let r = verify_hhs_axioms(&qh, &qh.bounds, 200, 5).unwrap();
    assert!(r.pass, "{r:#?}");
    let p = peripheral_audit(&h, &qh.quot, &relator).unwrap();
    assert!(p.pass, "{p:#?}");
    assert!(p.min_translation.unwrap() >= 2);
    // 21 syllables, the first and last A-runs merge cyclically
    assert_eq!(cs_translation(&relator), 20);
}

#[test]
fn injected_rho_fails_nesting_on_a_larger_ball() {
    let mut h = HhsStructure::free_product(&[1, 1], 4).unwrap();
    let ball = h.ball.clone().unwrap();
    let far = [ball.vertex_of(&w("abab")).unwrap(), ball.vertex_of(&w("BABA")).unwrap()];
    for u in 1..h.domains.len() {
        h.inject_rho(u, 0, far.iter().map(|&v| i64::from(v)).collect());
    }
    let r = verify_hhs_axioms(&h, &AxiomBounds::uniform(&h.e), 60, 1).unwrap();
    assert!(!r.pass);
    assert!(!r.get("2").unwrap().pass);
}

#[test]
fn trivial_structure_quotient_of_f2_is_unchanged() {
    let h = HhsStructure::trivial(&Presentation::free(2), 4).unwrap();
    let inst = spinning_for(&h, &w(R60), q(5), None).unwrap();
    let qh = build_quotient_structure(&h, inst, 2, 1).unwrap();
    assert_eq!(qh.point_class_count(), cayley_ball(&Presentation::free(2), 4, DEFAULT_BALL_CAP).unwrap().vertex_count());
    assert_eq!(check_quotient_bounds(&qh, 100, 1).unwrap().violations, 0);
}
