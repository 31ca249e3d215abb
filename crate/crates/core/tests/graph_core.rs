mod common;

use coarsequot::graph::io::{parse_edge_list, parse_graph, to_edge_list};
use coarsequot::graph::{
    closest_point_projection, hausdorff_distance, neighborhood, proj_distance, quasiconvexity_constant,
    separation_m0, slim_constant, MetricGraph, Path, Sampling, Subspace, Vertex,
};
use coarsequot::lemmas::{lemma_suite, measured_ledger};
use coarsequot::Error;
use common::*;
use proptest::prelude::*;

fn all_geodesics(g: &MetricGraph, u: Vertex, v: Vertex) -> Vec<Vec<Vertex>> {
    let dv = g.bfs(v);
    let mut out = Vec::new();
    let mut stack = vec![vec![u]];
    while let Some(p) = stack.pop() {
        let last = *p.last().unwrap();
        if last == v {
            out.push(p);
            continue;
        }
        for &n in g.neighbors(last) {
            if dv[n as usize] + 1 == dv[last as usize] {
                let mut q = p.clone();
                q.push(n);
                stack.push(q);
            }
        }
    }
    out
}

fn dist_to(g: &MetricGraph, p: Vertex, set: &[Vertex]) -> u32 {
    let d = g.bfs(p);
    set.iter().map(|&s| d[s as usize]).min().unwrap()
}

/// Slimness over every choice of the three sides, by explicit enumeration.
fn brute_slimness(g: &MetricGraph) -> u32 {
    let n = g.vertex_count() as Vertex;
    let mut delta = 0;
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                let gx = all_geodesics(g, x, y);
                let gy = all_geodesics(g, y, z);
                let gz = all_geodesics(g, x, z);
                for side in &gx {
                    for &p in side {
                        let a = gy.iter().map(|s| dist_to(g, p, s)).max().unwrap();
                        let b = gz.iter().map(|s| dist_to(g, p, s)).max().unwrap();
                        delta = delta.max(a.min(b));
                    }
                }
            }
        }
    }
    delta
}

#[test]
fn distance_examples() {
    assert_eq!(path_graph(5).distance(0, 4).unwrap(), 4);
    assert_eq!(cycle(6).distance(0, 3).unwrap(), 3);
    assert_eq!(grid(3, 3).distance(0, 8).unwrap(), 4);
    assert_eq!(cycle(6).distance(0, 6), Err(Error::UnknownVertex(6)));
}

#[test]
fn geodesic_examples() {
    let tree = MetricGraph::from_edges(6, [(0, 1), (1, 2), (1, 3), (3, 4), (3, 5)]).unwrap();
    assert_eq!(tree.geodesic(2, 5).unwrap().0, vec![2, 1, 3, 5]);
    assert_eq!(cycle(6).geodesic(0, 3).unwrap().0, vec![0, 1, 2, 3]);
    assert_eq!(cycle(6).geodesic(4, 4).unwrap().0, vec![4]);
}

#[test]
fn slimness_examples() {
    let tree = MetricGraph::from_edges(7, [(0, 1), (1, 2), (1, 3), (3, 4), (3, 5), (5, 6)]).unwrap();
    assert_eq!(slim_constant(&tree, &Sampling::Exhaustive).unwrap().value, 0);
    let c6 = cycle(6);
    let m = slim_constant(&c6, &Sampling::Exhaustive).unwrap();
    assert!(m.exact);
    assert_eq!(m.value, brute_slimness(&c6));
    let single = MetricGraph::from_edges(1, []).unwrap();
    assert_eq!(slim_constant(&single, &Sampling::Exhaustive).unwrap().value, 0);
}

#[test]
fn slimness_matches_brute_force_on_small_graphs() {
    for g in [cycle(5), cycle(7), cycle(8), grid(3, 3), grid(4, 2), hexagon_chain(2).0] {
        assert_eq!(slim_constant(&g, &Sampling::Exhaustive).unwrap().value, brute_slimness(&g));
    }
}

#[test]
fn quasiconvexity_examples() {
    let tree = MetricGraph::from_edges(7, [(0, 1), (1, 2), (1, 3), (3, 4), (3, 5), (5, 6)]).unwrap();
    let y = sub(&tree, &[0, 1, 3, 5, 6]);
    assert_eq!(quasiconvexity_constant(&tree, &y, &Sampling::Exhaustive).unwrap().value, 0);
    let c8 = cycle(8);
    assert_eq!(quasiconvexity_constant(&c8, &sub(&c8, &[3]), &Sampling::Exhaustive).unwrap().value, 0);
    assert_eq!(quasiconvexity_constant(&c8, &sub(&c8, &[0, 4]), &Sampling::Exhaustive).unwrap().value, 2);
}

#[test]
fn projection_examples() {
    let c8 = cycle(8);
    let y = sub(&c8, &[2, 3]);
    let p = closest_point_projection(&c8, &y, 3).unwrap();
    assert_eq!((p.points, p.base_distance), (vec![3], 0));
    let p = closest_point_projection(&c8, &sub(&c8, &[0]), 4).unwrap();
    assert_eq!((p.points, p.base_distance), (vec![0], 4));
    // tree: spine 0-1-2-3, branch 1-4-5; the branch projects to its foot
    let tree = MetricGraph::from_edges(6, [(0, 1), (1, 2), (2, 3), (1, 4), (4, 5)]).unwrap();
    let p = closest_point_projection(&tree, &sub(&tree, &[0, 1, 2, 3]), 5).unwrap();
    assert_eq!((p.points, p.base_distance), (vec![1], 2));
}

#[test]
fn projection_distance_examples() {
    let c8 = cycle(8);
    let y = sub(&c8, &[0, 1]);
    assert_eq!(proj_distance(&c8, &y, &[5], &[5]).unwrap(), 0);
    // 3 projects to 1; 6 projects to 0
    assert_eq!(proj_distance(&c8, &y, &[3], &[6]).unwrap(), 1);
    let c12 = cycle(12);
    let y = sub(&c12, &[0, 1, 2, 3, 4]);
    assert_eq!(proj_distance(&c12, &y, &[0, 1], &[4]).unwrap(), 4);
}

#[test]
fn separation_examples() {
    let tree = MetricGraph::from_edges(9, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (7, 8)]).unwrap();
    let fam = [sub(&tree, &[0, 1]), sub(&tree, &[7, 8])];
    assert_eq!(separation_m0(&tree, &fam, 0, 0).unwrap(), 0);
    let y = sub(&tree, &[0, 1]);
    assert!(matches!(separation_m0(&tree, &[y.clone(), y], 0, 0), Err(Error::FamilyTooSmall(_))));
    // row 2 and column 2 of a 5x5 grid cross at one vertex; fattening by 1 gives a plus shape
    let g = grid(5, 5);
    let row: Vec<Vertex> = (0..5).map(|x| 10 + x).collect();
    let col: Vec<Vertex> = (0..5).map(|y| 5 * y + 2).collect();
    let fam = [sub(&g, &row), sub(&g, &col)];
    assert_eq!(separation_m0(&g, &fam, 0, 0).unwrap(), 0);
    // N_2(col) ∩ row = {10..=14}; N_2 meets row in five vertices, diameter 4
    assert_eq!(separation_m0(&g, &fam, 1, 0).unwrap(), 4);
}

#[test]
fn hausdorff_examples() {
    let g = grid(5, 5);
    assert_eq!(hausdorff_distance(&g, &[3, 7], &[3, 7]).unwrap(), 0);
    assert_eq!(hausdorff_distance(&g, &[0], &[24]).unwrap(), 8);
    let centre = sub(&g, &[12]);
    let ball = neighborhood(&g, &centre, 2);
    assert_eq!(hausdorff_distance(&g, ball.members(), &[12]).unwrap(), 2);
}

#[test]
fn malformed_edge_list_reports_line() {
    let err = parse_edge_list("0 1\n1 2\n2 x\n").unwrap_err();
    assert!(matches!(err, Error::ParseError { line: 3, .. }));
    assert_eq!(parse_edge_list("0 0\n").unwrap_err(), Error::SelfLoop(0));
    assert_eq!(parse_edge_list("0 1\n2 3\n").unwrap_err(), Error::Disconnected);
    let g = cycle(7);
    assert_eq!(parse_graph(&to_edge_list(&g)).unwrap(), g);
}

#[test]
fn lemma_suite_on_small_fixtures() {
    let (g, cycles) = hexagon_chain(4);
    let fam: Vec<Subspace> = cycles.iter().step_by(2).map(|c| sub(&g, c)).collect();
    let r = lemma_suite(&g, &fam, &Sampling::Exhaustive, 2).unwrap();
    assert!(r.pass, "{r:?}");
    let ball = free_ball(2, 3);
    let fam = axis_family(&ball, &["ab", "aB", "bab"]);
    let r = lemma_suite(&ball.graph, &fam, &Sampling::Exhaustive, 2).unwrap();
    assert_eq!((r.delta, r.k), (0, 0));
    assert!(r.pass, "{r:?}");
}

fn connected_graph() -> impl Strategy<Value = MetricGraph> {
    (2usize..12)
        .prop_flat_map(|n| {
            let parents = (1..n).map(|i| 0..i).collect::<Vec<_>>();
            (Just(n), parents, proptest::collection::vec((0..n, 0..n), 0..6))
        })
        .prop_map(|(n, parents, extra)| {
            let mut edges: Vec<(Vertex, Vertex)> =
                parents.iter().enumerate().map(|(i, &p)| ((i + 1) as Vertex, p as Vertex)).collect();
            for (a, b) in extra {
                let (a, b) = (a.min(b) as Vertex, a.max(b) as Vertex);
                if a != b && !edges.iter().any(|&(x, y)| (x.min(y), x.max(y)) == (a, b)) {
                    edges.push((a, b));
                }
            }
            MetricGraph::from_edges(n, edges).unwrap()
        })
}

fn subset(n: usize, mask: u32) -> Vec<Vertex> {
    let v: Vec<Vertex> = (0..n as Vertex).filter(|&i| mask >> i & 1 == 1).collect();
    if v.is_empty() {
        vec![0]
    } else {
        v
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn distance_is_a_metric(g in connected_graph(), a in 0u32..12, b in 0u32..12, c in 0u32..12) {
        let n = g.vertex_count() as u32;
        let (a, b, c) = (a % n, b % n, c % n);
        let d = |x, y| g.distance(x, y).unwrap();
        prop_assert_eq!(d(a, b), d(b, a));
        prop_assert_eq!(d(a, a), 0);
        prop_assert!(d(a, c) <= d(a, b) + d(b, c));
    }

    #[test]
    fn geodesics_realise_distance(g in connected_graph(), a in 0u32..12, b in 0u32..12) {
        let n = g.vertex_count() as u32;
        let (a, b) = (a % n, b % n);
        let p: Path = g.geodesic(a, b).unwrap();
        prop_assert!(p.is_path_in(&g));
        prop_assert_eq!(p.len() as u32, g.distance(a, b).unwrap());
        prop_assert_eq!((p.start(), p.end()), (a, b));
        prop_assert!(p.is_geodesic_in(&g));
    }

    #[test]
    fn projections_realise_distance(g in connected_graph(), mask in 1u32..4096, z in 0u32..12) {
        let n = g.vertex_count();
        let y = Subspace::new(&g, subset(n, mask)).unwrap();
        let z = z % n as u32;
        let p = closest_point_projection(&g, &y, z).unwrap();
        let dz = g.bfs(z);
        let best = y.members().iter().map(|&m| dz[m as usize]).min().unwrap();
        prop_assert_eq!(p.base_distance, best);
        let expect: Vec<Vertex> = y.members().iter().copied().filter(|&m| dz[m as usize] == best).collect();
        prop_assert_eq!(p.points, expect);
    }

    #[test]
    fn projection_distance_is_a_pseudometric(
        g in connected_graph(), mask in 1u32..4096, ma in 1u32..4096, mb in 1u32..4096, mc in 1u32..4096,
    ) {
        let n = g.vertex_count();
        let y = Subspace::new(&g, subset(n, mask)).unwrap();
        let (a, b, c) = (subset(n, ma), subset(n, mb), subset(n, mc));
        let d = |u: &[Vertex], v: &[Vertex]| proj_distance(&g, &y, u, v).unwrap();
        prop_assert_eq!(d(&a, &b), d(&b, &a));
        prop_assert!(d(&a, &c) <= d(&a, &b) + d(&b, &c));
    }

    #[test]
    fn projections_are_lipschitz(g in connected_graph(), mask in 1u32..4096) {
        let n = g.vertex_count();
        let y = Subspace::new(&g, subset(n, mask)).unwrap();
        let delta = slim_constant(&g, &Sampling::Exhaustive).unwrap().value;
        let k = quasiconvexity_constant(&g, &y, &Sampling::Exhaustive).unwrap().value;
        let j = measured_ledger(delta, k, 0).unwrap().j;
        for (u, v) in g.edges() {
            let d = proj_distance(&g, &y, &[u], &[v]).unwrap();
            prop_assert!(coarsequot::constants::q(i64::from(d)) <= j);
        }
    }

    #[test]
    fn neighbourhoods_of_balls_have_radius_hausdorff(g in connected_graph(), c in 0u32..12, r in 0u32..4) {
        let c = c % g.vertex_count() as u32;
        let centre = Subspace::new(&g, [c]).unwrap();
        let ball = neighborhood(&g, &centre, r);
        let far = g.bfs(c).into_iter().max().unwrap();
        prop_assert_eq!(hausdorff_distance(&g, ball.members(), &[c]).unwrap(), r.min(far));
    }
}
