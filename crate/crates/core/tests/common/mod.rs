//! Fixtures and independent oracles shared by the integration tests.
#![allow(dead_code)]

use coarsequot::constants::{q, BaseConstants, DerivedConstants, Q};
use coarsequot::graph::{MetricGraph, Subspace, Vertex};
use coarsequot::groups::{cayley_ball, CayleyBall, Presentation, Word, DEFAULT_BALL_CAP};
use coarsequot::spinning::Line;
use num_traits::Zero;
use rand::Rng;

pub fn w(s: &str) -> Word {
    s.parse().expect("word")
}

pub fn path_graph(n: u32) -> MetricGraph {
    MetricGraph::from_edges(n as usize, (0..n.saturating_sub(1)).map(|i| (i, i + 1))).unwrap()
}

pub fn cycle(n: u32) -> MetricGraph {
    MetricGraph::from_edges(n as usize, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
}

pub fn grid(w: u32, h: u32) -> MetricGraph {
    let id = |x: u32, y: u32| y * w + x;
    let mut e = Vec::new();
    for y in 0..h {
        for x in 0..w {
            if x + 1 < w {
                e.push((id(x, y), id(x + 1, y)));
            }
            if y + 1 < h {
                e.push((id(x, y), id(x, y + 1)));
            }
        }
    }
    MetricGraph::from_edges((w * h) as usize, e).unwrap()
}

/// `count` hexagons glued in a chain, consecutive ones sharing a vertex.
pub fn hexagon_chain(count: u32) -> (MetricGraph, Vec<Vec<Vertex>>) {
    let mut edges = Vec::new();
    let mut cycles = Vec::new();
    let mut joint = 0;
    let mut next = 1;
    for _ in 0..count {
        let mut c = vec![joint];
        for _ in 0..5 {
            c.push(next);
            next += 1;
        }
        for i in 0..6 {
            edges.push((c[i], c[(i + 1) % 6]));
        }
        joint = c[3];
        cycles.push(c);
    }
    (MetricGraph::from_edges(next as usize, edges).unwrap(), cycles)
}

pub fn sub(g: &MetricGraph, v: &[Vertex]) -> Subspace {
    Subspace::new(g, v.iter().copied()).unwrap()
}

pub fn free_ball(rank: u8, radius: u32) -> CayleyBall {
    cayley_ball(&Presentation::free(rank), radius, DEFAULT_BALL_CAP).unwrap()
}

/// Ball vertices on the axis of each key.
pub fn axis_family(ball: &CayleyBall, keys: &[&str]) -> Vec<Subspace> {
    keys.iter()
        .map(|k| {
            let line = Line::from_key(&w(k)).unwrap();
            let reach = 2 * ball.radius as i64 + 2;
            let members: Vec<Vertex> = (-reach..=reach).filter_map(|t| ball.vertex_of(&line.point_at(t))).collect();
            Subspace::new(&ball.graph, members).unwrap()
        })
        .collect()
}

/// Smallest R with every vertex within R of some member.
pub fn covering_radius(g: &MetricGraph, family: &[Subspace]) -> u32 {
    let all: Vec<Vertex> = family.iter().flat_map(|y| y.members().iter().copied()).collect();
    g.bfs_multi(&all).into_iter().max().unwrap_or(0)
}

fn rand_q<R: Rng>(rng: &mut R) -> Q {
    Q::new(rng.gen_range(0..400).into(), rng.gen_range(1..12).into())
}

pub fn random_base<R: Rng>(rng: &mut R) -> BaseConstants {
    BaseConstants {
        delta: rand_q(rng),
        k: rand_q(rng),
        m0: rand_q(rng),
        r: rand_q(rng),
        e: rand_q(rng),
        d: rand_q(rng),
        phi: rand_q(rng),
        psi: rand_q(rng),
        aleph: rand_q(rng),
        omega: rand_q(rng),
        l1: rand_q(rng) * q(1000),
        sha: rand_q(rng),
    }
}

fn mx(a: &Q, b: &Q) -> Q {
    if a > b {
        a.clone()
    } else {
        b.clone()
    }
}

/// The thirty ledger formulas re-evaluated from the base alone and compared
/// with the derived values; `l` and `t` instantiate the function-valued ones.
pub fn formula_identities(d: &DerivedConstants, l: &Q, t: &Q) -> Vec<(&'static str, bool)> {
    let b0 = &d.base;
    let (dl, k, m0, r, e, dd) = (&b0.delta, &b0.k, &b0.m0, &b0.r, &b0.e, &b0.d);
    let two = q(2);
    let m = |t: &Q| m0 + &two * k + &two * t + q(4) * dl + q(2);
    let j = &two * k + q(10) * dl + q(2);
    let b = m(&(&two * k + q(7) * dl + q(1)));
    let rr = &two * dl + &two * k + dd + q(2);
    let c0 = &two * &j + (&two * &rr + q(4)) * mx(&b, &j);
    let c = &c0 + &two * &b;
    let theta1 = &two * &b + &j * (&two * dl + k + q(1));
    let d0 = &two * k + q(4) * dl + m(&(&two * k + q(4) * dl)) + q(1);
    let theta = q(3) * &j * &d0 + &two * &b + &two * &j * (q(3) * dl + q(1));
    let big = &theta + &two * (&b + &j * r) + &j;
    let tilde = mx(&big, &(&two * (&j * r + &b + &big) / q(33)));
    let zhe = q(33) * &tilde;
    let ce = &zhe + &two * &big;
    let cp = q(11) * &tilde + &two * &big;
    let cg = q(22) * &tilde + q(6) * &zhe + &two * &big;
    let mm = q(11) * &ce + q(6) * &cg + q(5) * &cp;
    let l0 = q(4) * (&mm + &big) + q(1);
    let l_short = mx(&mx(&l0, &(q(5) * &mm)), &(q(14) * &big));
    let l_lift = mx(&l_short, &(q(40) * &cg));
    let l_hyp = l_lift.clone();
    let l_min = mx(&mx(&l_hyp, &(q(30) * &c)), &(q(10) * (&two * (&b + &j * r) + &two * &j + q(1))));
    let tau = (l / q(10) - &two * (&b + &j * r)) / &j;
    let a = mx(k, &(q(3) * e)) + q(4) * e + dd;
    let l_tilde = mx(&mx(&b0.l1, &(q(100) * &c + &b0.sha)), &(q(20) * (&c + e * &j) + &b0.sha));
    let beth = &two * &b0.aleph + q(27) * e;
    let pc0 = t + q(4) * &b0.aleph + q(20) * e + &two * &beth;
    let c1 = &two * &a + q(3) * e + &two * &c + &j * (k + dd + &two * e) + &b0.psi;
    let c2 = &two * &c1 + &two * dd + &two * k;
    let c3 = &pc0 + &c2 + q(12) * e + q(2);
    vec![
        ("J", d.j == j),
        ("M(t)", d.m_at(t) == m(t)),
        ("B", d.b == b),
        ("script R", d.script_r == rr),
        ("C0", d.c0 == c0),
        ("C", d.c == c),
        ("theta1", d.theta1 == theta1),
        ("D0", d.d0 == d0),
        ("theta", d.theta == theta),
        ("Theta", d.big_theta == big),
        ("Theta tilde", d.theta_tilde == tilde),
        ("Zhe", d.zhe == zhe),
        ("C_e", d.c_e == ce),
        ("C_p", d.c_p == cp),
        ("C_g", d.c_g == cg),
        ("m", d.m == mm),
        ("L0", d.l0 == l0),
        ("L_short", d.l_short == l_short),
        ("L_lift", d.l_lift == l_lift),
        ("L_hyp", d.l_hyp == l_hyp),
        ("L_min", d.l_min == l_min),
        ("tau(L)", d.tau(l) == tau),
        ("A", d.a == a),
        ("L tilde", d.l_tilde == l_tilde),
        ("beth", d.beth == beth),
        ("c0(t)", d.passing_c0(t) == pc0),
        ("c1", d.c1 == c1),
        ("c2", d.c2 == c2),
        ("c3(t)", d.passing_c3(t) == c3),
        ("nonnegative", d.rows().iter().all(|(_, v)| v >= &Q::zero())),
    ]
}
