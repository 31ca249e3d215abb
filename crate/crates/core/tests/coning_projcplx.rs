mod common;

use coarsequot::coning::{
    build_cone_off, build_modified_cone_off, check_spriano, de_electrify, extended_projection, strong_bgi_check,
    Piece,
};
use coarsequot::constants::{derive, q, BaseConstants};
use coarsequot::graph::{Path, Projector, Sampling, Subspace, Vertex};
use coarsequot::lemmas::measured_ledger;
use coarsequot::projcplx::{
    augment_with_points, bounded_path_image_check, build_projection_complex, geometric_family, r64, r64_from_q,
    verify_projection_axioms, ProjectionFamily,
};
use common::*;
use proptest::prelude::*;

#[test]
fn cone_off_examples() {
    let g = cycle(10);
    let all: Vec<Vertex> = (0..10).collect();
    let c = build_cone_off(&g, &[sub(&g, &all)]).unwrap();
    assert_eq!(c.graph.diameter(), 2);
    assert_eq!(c.graph.vertex_count(), 11);
    assert_eq!(build_cone_off(&g, &[]).unwrap().graph, g);
    let c8 = cycle(8);
    let c = build_cone_off(&c8, &[sub(&c8, &[0]), sub(&c8, &[4])]).unwrap();
    assert_eq!(c.graph.distance(0, 4).unwrap(), 4);
    // every cone vertex sees exactly its members
    let fam = [sub(&g, &[0, 1, 2]), sub(&g, &[5, 7])];
    let c = build_cone_off(&g, &fam).unwrap();
    for (i, y) in fam.iter().enumerate() {
        assert_eq!(c.graph.neighbors(c.cone_vertex(i)), y.members());
    }
    for u in 0..10 {
        for v in 0..10 {
            assert!(c.graph.distance(u, v).unwrap() <= g.distance(u, v).unwrap());
        }
    }
}

#[test]
fn modified_cone_off_examples() {
    let g = cycle(10);
    assert_eq!(build_modified_cone_off(&g, &[None], 0, 3).unwrap().graph, g);
    let c = build_modified_cone_off(&g, &[None, Some(sub(&g, &[4]))], 0, 1).unwrap();
    assert_eq!(c.graph.neighbors(c.cone_vertex(0)), &[3, 4, 5]);
    let same = build_modified_cone_off(&g, &[None, Some(sub(&g, &[4])), Some(sub(&g, &[4]))], 0, 0).unwrap();
    assert_eq!(same.cones.len(), 2);
    assert_ne!(same.cone_vertex(0), same.cone_vertex(1));
    // X̂ = X′ coned over the family
    let hat = same.with_family(&[sub(&g, &[0, 1])]).unwrap();
    assert_eq!(hat.graph.vertex_count(), 13);
}

#[test]
fn de_electrification_examples() {
    let g = cycle(12);
    let c = build_cone_off(&g, &[sub(&g, &[1, 2, 3, 4, 5])]).unwrap();
    let base_path = Path(vec![7, 8, 9]);
    let de = de_electrify(&c, &base_path).unwrap();
    assert_eq!(de.pieces, vec![Piece::Base(base_path)]);
    let v = c.cone_vertex(0);
    let de = de_electrify(&c, &Path(vec![1, v, 5])).unwrap();
    assert_eq!(de.path().0, g.geodesic(1, 5).unwrap().0);
}

#[test]
fn spriano_on_coned_cycle_matches_brute_force() {
    let g = cycle(12);
    let c = build_cone_off(&g, &[sub(&g, &[0, 1, 2, 3, 4])]).unwrap();
    let measured = check_spriano(&c, &Sampling::Exhaustive).unwrap();
    // every base geodesic against the de-electrified tie-break geodesic
    let mut worst = 0;
    for x in 0..12 {
        for y in 0..12 {
            let tilde = de_electrify(&c, &c.graph.geodesic(x, y).unwrap()).unwrap().path();
            let near = g.bfs_multi(tilde.vertices());
            let (dx, dy) = (g.bfs(x), g.bfs(y));
            for w in 0..12usize {
                if dx[w] + dy[w] == dx[y as usize] {
                    worst = worst.max(near[w]);
                }
            }
        }
    }
    assert_eq!(measured.value, worst);
    assert!(measured.exact);
}

#[test]
fn extended_projection_of_a_spanning_cone() {
    let g = cycle(12);
    let c = build_cone_off(&g, &[sub(&g, &[0, 1, 2]), sub(&g, &[5, 6, 7, 8])]).unwrap();
    let p = Projector::new(&g, &c.cones[0].members).unwrap();
    let mut union: Vec<Vertex> = [5, 6, 7, 8].iter().flat_map(|&v| p.project(&g, v).points).collect();
    union.sort_unstable();
    union.dedup();
    assert_eq!(extended_projection(&c, 0, c.cone_vertex(1)).unwrap().points, union);
    assert_eq!(extended_projection(&c, 0, 1).unwrap().points, vec![1]);
}

#[test]
fn strong_bgi_inside_a_wide_subspace() {
    let g = path_graph(20);
    let members: Vec<Vertex> = (0..20).collect();
    let c = build_cone_off(&g, &[sub(&g, &members)]).unwrap();
    let r = strong_bgi_check(&c, &q(5), &Sampling::Exhaustive).unwrap();
    assert!(r.large > 0);
    assert!(r.violations.is_empty());
}

fn f2_family(radius: u32, keys: &[&str]) -> (coarsequot::coning::ConeOff, coarsequot::constants::DerivedConstants) {
    let ball = free_ball(2, radius);
    let fam = axis_family(&ball, keys);
    let r = coarsequot::lemmas::lemma_suite(&ball.graph, &fam, &Sampling::Exhaustive, 0).unwrap();
    let ledger = measured_ledger(r.delta, r.k, r.m0).unwrap();
    (build_cone_off(&ball.graph, &fam).unwrap(), ledger)
}

#[test]
fn far_singletons_in_a_tree_at_zero() {
    let ball = free_ball(2, 3);
    let tips: Vec<Subspace> =
        ["aaa", "bbb", "AAA", "BBB"].iter().map(|s| sub(&ball.graph, &[ball.vertex_of(&w(s)).unwrap()])).collect();
    let c = build_cone_off(&ball.graph, &tips).unwrap();
    let f = geometric_family(&c, r64(0)).unwrap();
    assert!(verify_projection_axioms(&f, r64(0)).passed());
}

#[test]
fn axis_family_passes_at_ledger_theta() {
    let (c, ledger) = f2_family(4, &["ab", "aB", "abb", "Ab", "baab"]);
    let theta = r64_from_q(&ledger.theta).unwrap();
    let f = geometric_family(&c, theta).unwrap();
    let rep = verify_projection_axioms(&f, theta);
    assert!(rep.passed(), "{rep:?}");
    assert!(rep.max_bounded <= r64_from_q(&ledger.b).unwrap());
    assert!(rep.max_bgi_min <= r64_from_q(&ledger.theta1).unwrap());
    let zhe = r64_from_q(&ledger.zhe).unwrap();
    let p = build_projection_complex(&f, zhe).unwrap();
    for u in 0..f.len() {
        for v in 0..f.len() {
            if u != v {
                let rule = (0..f.len()).filter(|&y| y != u && y != v).all(|y| f.d(y, u, v) <= zhe);
                assert_eq!(p.graph.has_edge(u as Vertex, v as Vertex), rule);
            }
        }
    }
    let img = bounded_path_image_check(&p, &f, theta).unwrap();
    assert!(img.path_violations.is_empty() && img.geodesic_violations.is_empty());
}

#[test]
fn augmented_family_passes_at_ledger_big_theta() {
    let ball = free_ball(2, 3);
    let fam = axis_family(&ball, &["ab", "aB", "Ab", "AB"]);
    let radius = covering_radius(&ball.graph, &fam);
    let r = coarsequot::lemmas::lemma_suite(&ball.graph, &fam, &Sampling::Exhaustive, 0).unwrap();
    let base = BaseConstants { r: q(i64::from(radius)), ..measured_ledger(r.delta, r.k, r.m0).unwrap().base };
    let ledger = derive(&base).unwrap();
    let c = build_cone_off(&ball.graph, &fam).unwrap();
    let big = r64_from_q(&ledger.big_theta).unwrap();
    let f = augment_with_points(&c, radius, big).unwrap();
    assert_eq!(f.len(), ball.vertex_count() + fam.len());
    assert!(f.nearest.iter().all(|n| !n.is_empty()));
    assert_eq!(f.d(0, 3, 7), r64(0));
    assert!(verify_projection_axioms(&f, big).passed());
}

#[test]
fn adversarial_table_fails_with_witness() {
    let json = r#"[
        {"Y":"A","U":"B","V":"C","d":9},
        {"Y":"B","U":"A","V":"C","d":9}
    ]"#;
    let f = ProjectionFamily::from_json(json, r64(2)).unwrap();
    let rep = verify_projection_axioms(&f, r64(2));
    assert!(!rep.passed());
    assert!(!rep.bgi.witnesses.is_empty());
}

#[test]
fn complex_extremes() {
    let (c, _) = f2_family(3, &["ab", "aB", "Ab"]);
    let f = geometric_family(&c, r64(0)).unwrap();
    let n = f.len();
    let mut max = r64(0);
    for y in 0..n {
        for u in (0..n).filter(|&u| u != y) {
            for v in (0..n).filter(|&v| v != y) {
                max = max.max(f.d(y, u, v));
            }
        }
    }
    let full = build_projection_complex(&f, max).unwrap();
    assert_eq!(full.graph.edge_count(), f.len() * (f.len() - 1) / 2);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn de_electrified_geodesics_keep_endpoints(rows in proptest::collection::btree_set(0u32..6, 1..4), x in 0u32..36, y in 0u32..36) {
        let g = grid(6, 6);
        let fam: Vec<Subspace> = rows.iter().map(|&r| sub(&g, &(0..6).map(|i| 6 * r + i).collect::<Vec<_>>())).collect();
        let c = build_cone_off(&g, &fam).unwrap();
        let gamma = c.graph.geodesic(x, y).unwrap();
        let de = de_electrify(&c, &gamma).unwrap();
        let p = de.path();
        prop_assert_eq!((p.start(), p.end()), (x, y));
        prop_assert!(p.is_path_in(&g));
        prop_assert!(de.base_length() >= g.distance(x, y).unwrap() as usize);
        for piece in &de.pieces {
            if let Piece::Component { cone, path } = piece {
                prop_assert!(fam[*cone].contains(path.start()) && fam[*cone].contains(path.end()));
            }
        }
    }
}
