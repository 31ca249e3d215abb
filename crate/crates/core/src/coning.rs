//! Cone-offs: one new vertex per coned set, joined to every member.
//!
//! Vertex layout of the combined graph is `[base | cones]`; cone `i` has id
//! `base_count + i`.  Cones carry an owner tag so that two cones over the
//! same vertex set stay distinct.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::{q, Q};
use crate::error::{Error, Result};
use crate::graph::{
    diameter, neighborhood, sample_indices, slim_constant, Measured, MetricGraph, Path, Projector,
    ProjectionSet, Sampling, Subspace, Vertex, UNREACHABLE,
};

/// What a cone vertex was built for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConeOwner {
    /// A non-maximal domain of a hierarchy structure (modified cone-off).
    Domain(usize),
    /// A member of the coned family.
    Family(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cone {
    pub owner: ConeOwner,
    pub members: Subspace,
}

/// A base graph with cone vertices attached.
#[derive(Clone, Debug)]
pub struct ConeOff {
    pub base: MetricGraph,
    pub cones: Vec<Cone>,
    pub graph: MetricGraph,
}

fn assemble(base: &MetricGraph, cones: &[Cone]) -> Result<MetricGraph> {
    let n = base.vertex_count();
    let mut edges: Vec<(Vertex, Vertex)> = base.edges().collect();
    for (i, c) in cones.iter().enumerate() {
        let v = (n + i) as Vertex;
        for &m in c.members.members() {
            base.check_vertex(m)?;
            edges.push((m, v));
        }
    }
    let g = MetricGraph::from_edges(n + cones.len(), edges)?;
    match base.labels() {
        Some(l) => {
            let mut labels = l.to_vec();
            labels.extend(cones.iter().map(|c| match c.owner {
                ConeOwner::Domain(i) => format!("v_U{i}"),
                ConeOwner::Family(i) => format!("v_Y{i}"),
            }));
            g.with_labels(labels)
        }
        None => Ok(g),
    }
}

/// Cone-off of `g` over `family`.
pub fn build_cone_off(g: &MetricGraph, family: &[Subspace]) -> Result<ConeOff> {
    let cones = family
        .iter()
        .enumerate()
        .map(|(i, y)| Cone { owner: ConeOwner::Family(i), members: y.clone() })
        .collect::<Vec<_>>();
    if cones.iter().any(|c| c.members.is_empty()) {
        return Err(Error::EmptySubspace);
    }
    let graph = assemble(g, &cones)?;
    Ok(ConeOff { base: g.clone(), cones, graph })
}

/// Modified cone-off X′: a cone over `N_A(ρ_U)` for every listed domain.
/// `rhos[i]` is the relative projection of domain `i` to the top level;
/// `None` marks the top-level domain itself, which is skipped when
/// `top` matches, and is an error otherwise.
pub fn build_modified_cone_off(
    g: &MetricGraph,
    rhos: &[Option<Subspace>],
    top: usize,
    a: u32,
) -> Result<ConeOff> {
    let mut cones = Vec::new();
    for (i, rho) in rhos.iter().enumerate() {
        if i == top {
            continue;
        }
        let rho = rho.as_ref().ok_or(Error::MissingRho(i))?;
        for &v in rho.members() {
            g.check_vertex(v)?;
        }
        cones.push(Cone { owner: ConeOwner::Domain(i), members: neighborhood(g, rho, a) });
    }
    let graph = assemble(g, &cones)?;
    Ok(ConeOff { base: g.clone(), cones, graph })
}

impl ConeOff {
    /// Cone-off over explicitly given cones.
    pub fn from_cones(base: &MetricGraph, cones: Vec<Cone>) -> Result<ConeOff> {
        if cones.iter().any(|c| c.members.is_empty()) {
            return Err(Error::EmptySubspace);
        }
        let graph = assemble(base, &cones)?;
        Ok(ConeOff { base: base.clone(), cones, graph })
    }

    /// Cones off `family` on top of the current graph (X̂ from X′).
    /// Distances inside the family cones are still measured in the base.
    pub fn with_family(&self, family: &[Subspace]) -> Result<ConeOff> {
        let mut cones = self.cones.clone();
        let first = cones.iter().filter(|c| matches!(c.owner, ConeOwner::Family(_))).count();
        for (i, y) in family.iter().enumerate() {
            cones.push(Cone { owner: ConeOwner::Family(first + i), members: y.clone() });
        }
        let graph = assemble(&self.base, &cones)?;
        Ok(ConeOff { base: self.base.clone(), cones, graph })
    }

    pub fn base_count(&self) -> usize {
        self.base.vertex_count()
    }

    pub fn cone_vertex(&self, i: usize) -> Vertex {
        (self.base_count() + i) as Vertex
    }

    /// Index of the cone at `v`, if `v` is a cone vertex.
    pub fn cone_index(&self, v: Vertex) -> Option<usize> {
        (v as usize).checked_sub(self.base_count()).filter(|&i| i < self.cones.len())
    }

    pub fn is_cone(&self, v: Vertex) -> bool {
        self.cone_index(v).is_some()
    }

    /// Indices of the family cones.
    pub fn family_indices(&self) -> Vec<usize> {
        (0..self.cones.len()).filter(|&i| matches!(self.cones[i].owner, ConeOwner::Family(_))).collect()
    }

    /// DOT output with cone vertices drawn as boxes.
    pub fn to_dot(&self) -> String {
        let cones: Vec<Vertex> = (0..self.cones.len()).map(|i| self.cone_vertex(i)).collect();
        crate::graph::io::to_dot(&self.graph, &cones)
    }
}

/// Part of a de-electrified path.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Piece {
    /// A stretch of the original path lying in the base.
    Base(Path),
    /// Base geodesic replacing the crossing of cone `cone`.
    Component { cone: usize, path: Path },
}

impl Piece {
    pub fn path(&self) -> &Path {
        match self {
            Piece::Base(p) | Piece::Component { path: p, .. } => p,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeElectrification {
    pub original: Path,
    pub pieces: Vec<Piece>,
}

impl DeElectrification {
    /// The de-electrified path as one base path.
    pub fn path(&self) -> Path {
        let mut out: Vec<Vertex> = Vec::new();
        for p in &self.pieces {
            for &v in p.path().vertices() {
                if out.last() != Some(&v) {
                    out.push(v);
                }
            }
        }
        Path(out)
    }

    pub fn base_length(&self) -> usize {
        self.pieces.iter().map(|p| p.path().len()).sum()
    }
}

/// Replaces every two-edge cone crossing by the tie-break base geodesic.
/// Repeated crossings of the same cone are replaced independently.
pub fn de_electrify(c: &ConeOff, gamma: &Path) -> Result<DeElectrification> {
    if !gamma.is_path_in(&c.graph) {
        return Err(Error::Invalid("path does not lie in the cone-off".into()));
    }
    let vs = gamma.vertices();
    for &end in [vs[0], *vs.last().expect("non-empty")].iter() {
        if c.is_cone(end) {
            return Err(Error::DanglingConeVertex(end));
        }
    }
    let mut pieces = Vec::new();
    let mut run: Vec<Vertex> = vec![vs[0]];
    let mut i = 1;
    while i < vs.len() {
        let v = vs[i];
        match c.cone_index(v) {
            Some(k) => {
                let (x, y) = (vs[i - 1], vs[i + 1]);
                pieces.push(Piece::Base(Path(std::mem::take(&mut run))));
                pieces.push(Piece::Component { cone: k, path: c.base.geodesic(x, y)? });
                run.push(y);
                i += 2;
            }
            None => {
                run.push(v);
                i += 1;
            }
        }
    }
    pieces.push(Piece::Base(Path(run)));
    Ok(DeElectrification { original: gamma.clone(), pieces })
}

fn base_pairs(n: usize, sampling: &Sampling) -> Vec<(Vertex, Vertex)> {
    match *sampling {
        Sampling::Exhaustive => (0..n as Vertex)
            .flat_map(|x| (x + 1..n as Vertex).map(move |y| (x, y)))
            .collect(),
        Sampling::Random { count, seed } => sample_indices(n, 2, count, seed)
            .into_iter()
            .map(|p| (p[0] as Vertex, p[1] as Vertex))
            .collect(),
    }
}

/// Measures D: the largest distance from a vertex on some base geodesic
/// `[x, y]` to the de-electrified tie-break cone-off geodesic.
pub fn check_spriano(c: &ConeOff, sampling: &Sampling) -> Result<Measured<u32>> {
    let n = c.base_count();
    let pairs = base_pairs(n, sampling);
    let value = pairs
        .par_iter()
        .map(|&(x, y)| -> Result<u32> {
            let gamma = c.graph.geodesic(x, y)?;
            let tilde = de_electrify(c, &gamma)?.path();
            let to_tilde = c.base.bfs_multi(tilde.vertices());
            let dx = c.base.bfs(x);
            let dy = c.base.bfs(y);
            let total = dx[y as usize];
            Ok((0..n)
                .filter(|&w| dx[w] + dy[w] == total)
                .map(|w| to_tilde[w])
                .max()
                .unwrap_or(0))
        })
        .collect::<Result<Vec<u32>>>()?
        .into_iter()
        .max()
        .unwrap_or(0);
    Ok(Measured { value, exact: sampling.is_exhaustive() })
}

/// Projection to cone `y` of a vertex of the cone-off other than `v_Y`.
/// A cone vertex projects to the union of its members' projections; its
/// `base_distance` is the distance between the two coned sets.
pub fn extended_projection(c: &ConeOff, y: usize, x: Vertex) -> Result<ProjectionSet> {
    c.graph.check_vertex(x)?;
    if c.cone_vertex(y) == x {
        return Err(Error::SelfProjection(y));
    }
    let p = Projector::new(&c.base, &c.cones[y].members)?;
    Ok(match c.cone_index(x) {
        None => p.project(&c.base, x),
        Some(u) => {
            let m = c.cones[u].members.members();
            ProjectionSet {
                points: p.project_set(&c.base, m),
                base_distance: m.iter().map(|&v| p.distance_to_target(v)).min().unwrap_or(0),
            }
        }
    })
}

/// Projections of every cone-off vertex to one cone, precomputed.
pub struct ConeProjections {
    pub cone: usize,
    sets: Vec<Vec<Vertex>>,
}

impl ConeProjections {
    pub fn new(c: &ConeOff, y: usize) -> Result<Self> {
        let p = Projector::new(&c.base, &c.cones[y].members)?;
        let n = c.base_count();
        let mut sets: Vec<Vec<Vertex>> = (0..n as Vertex).map(|v| p.project(&c.base, v).points).collect();
        for (u, cone) in c.cones.iter().enumerate() {
            if u == y {
                sets.push(Vec::new());
            } else {
                let mut s: Vec<Vertex> =
                    cone.members.members().iter().flat_map(|&m| sets[m as usize].iter().copied()).collect();
                s.sort_unstable();
                s.dedup();
                sets.push(s);
            }
        }
        Ok(ConeProjections { cone: y, sets })
    }

    pub fn get(&self, v: Vertex) -> &[Vertex] {
        &self.sets[v as usize]
    }

    /// `d^π_Y(x, y)`; `None` when either point is the cone vertex itself.
    pub fn dpi(&self, c: &ConeOff, x: Vertex, y: Vertex) -> Option<u32> {
        let (a, b) = (self.get(x), self.get(y));
        if a.is_empty() || b.is_empty() {
            return None;
        }
        let mut u: Vec<Vertex> = a.iter().chain(b).copied().collect();
        u.sort_unstable();
        u.dedup();
        Some(diameter(&c.base, &u))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BgiViolation {
    pub x: Vertex,
    pub y: Vertex,
    pub cone: usize,
    pub dpi: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BgiReport {
    #[serde(with = "crate::constants::qserde")]
    pub threshold: Q,
    pub checked: usize,
    /// triples whose projection gap exceeded the threshold
    pub large: usize,
    pub max_dpi: u32,
    pub violations: Vec<BgiViolation>,
}

/// For each examined `(x, y, Y)` with `d^π_Y(x, y) > C`, checks that every
/// cone-off geodesic from `x` to `y` runs through `v_Y`.
pub fn strong_bgi_check(c: &ConeOff, threshold: &Q, sampling: &Sampling) -> Result<BgiReport> {
    let n = c.graph.vertex_count();
    let pairs = base_pairs(n, sampling);
    let family = c.family_indices();
    let projs: Vec<ConeProjections> =
        family.iter().map(|&y| ConeProjections::new(c, y)).collect::<Result<_>>()?;
    let rows: Vec<(usize, usize, u32, Vec<BgiViolation>)> = pairs
        .par_iter()
        .map(|&(x, y)| {
            let dist = c.graph.bfs(x)[y as usize];
            let (mut checked, mut large, mut max_dpi, mut bad) = (0, 0, 0, Vec::new());
            for p in &projs {
                let Some(d) = p.dpi(c, x, y) else { continue };
                checked += 1;
                max_dpi = max_dpi.max(d);
                if q(d as i64) <= *threshold {
                    continue;
                }
                large += 1;
                let avoid = c.graph.bfs_avoiding(x, c.cone_vertex(p.cone))[y as usize];
                if avoid == dist {
                    bad.push(BgiViolation { x, y, cone: p.cone, dpi: d });
                }
            }
            (checked, large, max_dpi, bad)
        })
        .collect();
    let mut r = BgiReport { threshold: threshold.clone(), checked: 0, large: 0, max_dpi: 0, violations: vec![] };
    for (a, b, m, v) in rows {
        r.checked += a;
        r.large += b;
        r.max_dpi = r.max_dpi.max(m);
        r.violations.extend(v);
    }
    Ok(r)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CloseReport {
    pub t: u32,
    pub bound: u32,
    pub worst: u32,
    pub checked: usize,
    pub violations: Vec<(Vertex, Vertex, Vertex, u32)>,
}

/// For base `x, y, w` with `d_X(w, [x,y]) ≤ t` (any base geodesic), checks
/// `d_X̂(w, γ) ≤ t + D + K + 1` for the tie-break cone-off geodesic γ.
pub fn close_in_x_check(c: &ConeOff, t: u32, d: u32, k: u32, sampling: &Sampling) -> Result<CloseReport> {
    let n = c.base_count();
    let bound = t + d + k + 1;
    let pairs = base_pairs(n, sampling);
    let rows: Vec<(usize, u32, Vec<(Vertex, Vertex, Vertex, u32)>)> = pairs
        .par_iter()
        .map(|&(x, y)| -> Result<_> {
            let gamma = c.graph.geodesic(x, y)?;
            let to_gamma = c.graph.bfs_multi(gamma.vertices());
            let dx = c.base.bfs(x);
            let dy = c.base.bfs(y);
            let total = dx[y as usize];
            let interval: Vec<Vertex> = (0..n as Vertex).filter(|&w| dx[w as usize] + dy[w as usize] == total).collect();
            let near = c.base.bfs_bounded(&interval, t, None);
            let (mut checked, mut worst, mut bad) = (0, 0, Vec::new());
            for w in 0..n {
                if near[w] == UNREACHABLE {
                    continue;
                }
                checked += 1;
                let dw = to_gamma[w];
                worst = worst.max(dw);
                if dw > bound {
                    bad.push((x, y, w as Vertex, dw));
                }
            }
            Ok((checked, worst, bad))
        })
        .collect::<Result<_>>()?;
    let mut r = CloseReport { t, bound, worst: 0, checked: 0, violations: vec![] };
    for (a, w, v) in rows {
        r.checked += a;
        r.worst = r.worst.max(w);
        r.violations.extend(v);
    }
    Ok(r)
}

/// Measured slimness of the cone-off.
pub fn cone_off_slimness(c: &ConeOff, sampling: &Sampling) -> Result<Measured<u32>> {
    slim_constant(&c.graph, sampling)
}
