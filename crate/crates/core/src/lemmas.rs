//! Projection and cone-off lemmas checked as properties of a finite graph
//! with a family of subspaces, against ledger constants built from the
//! measured δ, K and M₀.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coning::{build_cone_off, check_spriano, close_in_x_check, strong_bgi_check, BgiReport, CloseReport};
use crate::constants::{derive, m_of, q, q_to_string, BaseConstants, DerivedConstants, Q};
use crate::error::Result;
use crate::graph::{
    quasiconvexity_constant, separation_m0, separation_profile, slim_constant, DistanceMatrix, MetricGraph,
    Projector, Sampling, Subspace, Vertex,
};

/// One inequality `measured ≤ bound` over a set of configurations.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundLemma {
    pub name: String,
    pub formula: String,
    pub bound: String,
    pub max_observed: u32,
    pub checked: usize,
    pub violations: Vec<String>,
}

impl BoundLemma {
    pub fn pass(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LemmaReport {
    pub delta: u32,
    pub k: u32,
    pub m0: u32,
    pub d: u32,
    pub exact: bool,
    pub lipschitz: BoundLemma,
    pub bounded: BoundLemma,
    pub separation: Vec<BoundLemma>,
    pub strong_bgi: BgiReport,
    pub close_in_x: Vec<CloseReport>,
    pub pass: bool,
}

/// Ledger with `E = max(δ, 1)` for measured δ, K, M₀.
pub fn measured_ledger(delta: u32, k: u32, m0: u32) -> Result<DerivedConstants> {
    derive(&BaseConstants {
        delta: q(i64::from(delta)),
        k: q(i64::from(k)),
        m0: q(i64::from(m0)),
        e: q(i64::from(delta.max(1))),
        ..Default::default()
    })
}

fn set_diam(dm: &DistanceMatrix, s: &[Vertex]) -> u32 {
    s.iter().flat_map(|&a| s.iter().map(move |&b| dm.get(a, b))).max().unwrap_or(0)
}

fn within(x: u32, bound: &Q) -> bool {
    q(i64::from(x)) <= *bound
}

/// Runs the suite; `t_max` is the largest fattening for the separation
/// lemma and the largest neighbourhood radius for the cone-off closeness.
pub fn lemma_suite(g: &MetricGraph, family: &[Subspace], sampling: &Sampling, t_max: u32) -> Result<LemmaReport> {
    let slim = slim_constant(g, sampling)?;
    let ks = family
        .iter()
        .map(|y| quasiconvexity_constant(g, y, sampling))
        .collect::<Result<Vec<_>>>()?;
    let k = ks.iter().map(|m| m.value).max().unwrap_or(0);
    let delta = slim.value;
    let m0 = separation_m0(g, family, delta, k)?;
    let ledger = measured_ledger(delta, k, m0)?;
    let dm = DistanceMatrix::new(g);
    let projectors = family.iter().map(|y| Projector::new(g, y)).collect::<Result<Vec<_>>>()?;
    let proj: Vec<Vec<Vec<Vertex>>> = projectors
        .par_iter()
        .map(|p| (0..g.vertex_count() as Vertex).map(|z| p.project(g, z).points).collect())
        .collect();

    // adjacent vertices project boundedly
    let edges: Vec<(Vertex, Vertex)> = g.edges().collect();
    let per_y: Vec<(u32, Vec<String>)> = (0..family.len())
        .into_par_iter()
        .map(|i| {
            let (mut worst, mut bad) = (0, Vec::new());
            for &(x, y) in &edges {
                let mut u = proj[i][x as usize].clone();
                u.extend(&proj[i][y as usize]);
                let d = set_diam(&dm, &u);
                worst = worst.max(d);
                if !within(d, &ledger.j) {
                    bad.push(format!("Y{i} edge {x}-{y}: {d}"));
                }
            }
            (worst, bad)
        })
        .collect();
    let lipschitz = BoundLemma {
        name: "lipschitz projection".into(),
        formula: "2K+10δ+2".into(),
        bound: q_to_string(&ledger.j),
        max_observed: per_y.iter().map(|r| r.0).max().unwrap_or(0),
        checked: edges.len() * family.len(),
        violations: per_y.into_iter().flat_map(|r| r.1).collect(),
    };

    // one member projects boundedly onto another
    let pairs: Vec<(usize, usize)> =
        (0..family.len()).flat_map(|i| (0..family.len()).filter(move |&j| j != i).map(move |j| (i, j))).collect();
    let rows: Vec<(u32, Option<String>)> = pairs
        .par_iter()
        .map(|&(onto, from)| {
            let mut u: Vec<Vertex> =
                family[from].members().iter().flat_map(|&z| proj[onto][z as usize].iter().copied()).collect();
            u.sort_unstable();
            u.dedup();
            let d = set_diam(&dm, &u);
            let bad = (!within(d, &ledger.b)).then(|| format!("π_Y{onto}(Y{from}): {d}"));
            (d, bad)
        })
        .collect();
    let bounded = BoundLemma {
        name: "bounded projection".into(),
        formula: "M(2K+7δ+1)".into(),
        bound: q_to_string(&ledger.b),
        max_observed: rows.iter().map(|r| r.0).max().unwrap_or(0),
        checked: pairs.len(),
        violations: rows.into_iter().filter_map(|r| r.1).collect(),
    };

    let base = &ledger.base;
    let mut separation = Vec::new();
    for t in 0..=t_max {
        let bound = m_of(base, &q(i64::from(t)));
        let observed = separation_profile(g, family, t)?;
        separation.push(BoundLemma {
            name: format!("separation at t={t}"),
            formula: "M₀+2K+2t+4δ+2".into(),
            bound: q_to_string(&bound),
            max_observed: observed,
            checked: pairs.len(),
            violations: if within(observed, &bound) { vec![] } else { vec![format!("t={t}: {observed}")] },
        });
    }

    let c = build_cone_off(g, family)?;
    let strong_bgi = strong_bgi_check(&c, &ledger.c, sampling)?;
    let d = check_spriano(&c, sampling)?;
    let close_in_x =
        (0..=t_max).map(|t| close_in_x_check(&c, t, d.value, k, sampling)).collect::<Result<Vec<_>>>()?;

    let pass = lipschitz.pass()
        && bounded.pass()
        && separation.iter().all(BoundLemma::pass)
        && strong_bgi.violations.is_empty()
        && close_in_x.iter().all(|r| r.violations.is_empty());
    let exact = slim.exact && ks.iter().all(|m| m.exact) && d.exact;
    Ok(LemmaReport {
        delta,
        k,
        m0,
        d: d.value,
        exact,
        lipschitz,
        bounded,
        separation,
        strong_bgi,
        close_in_x,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tree_family_passes() {
        // spine 0..=8 with a leaf hanging off every vertex
        let edges = (0..8).map(|i| (i, i + 1)).chain((0..9).map(|i| (i, 9 + i)));
        let g = MetricGraph::from_edges(18, edges).unwrap();
        let fam = vec![
            Subspace::new(&g, [0, 1, 2, 3]).unwrap(),
            Subspace::new(&g, [5, 6, 7, 8]).unwrap(),
            Subspace::new(&g, [13, 4]).unwrap(),
        ];
        let r = lemma_suite(&g, &fam, &Sampling::Exhaustive, 2).unwrap();
        assert_eq!((r.delta, r.k), (0, 0));
        assert!(r.pass, "{r:?}");
        assert!(r.exact);
    }
}
