//! Projection distance families, the projection axioms, and the projection
//! complex built from them.
//!
//! Distances are exact rationals.  Rows of point elements are identically
//! zero and stored as `None`.

use std::collections::HashMap;

use num_rational::Rational64;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coning::ConeOff;
use crate::error::{Error, Result};
use crate::graph::{DistanceMatrix, MetricGraph, Projector, Vertex, UNREACHABLE};

pub type R64 = Rational64;

pub fn r64(n: i64) -> R64 {
    R64::from_integer(n)
}

/// Converts an exact ledger constant; fails if it does not fit in `i64`.
pub fn r64_from_q(x: &crate::constants::Q) -> Result<R64> {
    use num_traits::ToPrimitive;
    match (x.numer().to_i64(), x.denom().to_i64()) {
        (Some(n), Some(d)) => Ok(R64::new(n, d)),
        _ => Err(Error::Invalid(format!("constant {x} does not fit in 64 bits"))),
    }
}

pub fn r64_to_string(x: &R64) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_r64(s: &str) -> Result<R64> {
    let q = crate::constants::parse_q(s)?;
    r64_from_q(&q)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Geometric,
    Explicit,
}

/// What an element of an augmented family stands for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ElementKind {
    /// A coned subspace (family index).
    Subspace(usize),
    /// A base vertex with the constant projection.
    Point(Vertex),
    /// An abstract element of an explicit table.
    Abstract,
}

/// `d^π_Y(U, V)` for every `Y` and `U, V ≠ Y`.
#[derive(Clone, Debug)]
pub struct ProjectionFamily {
    pub labels: Vec<String>,
    pub kinds: Vec<ElementKind>,
    /// row `y` is an `n × n` table indexed `u * n + v`; `None` is all zero
    rows: Vec<Option<Vec<R64>>>,
    pub theta_claimed: R64,
    pub provenance: Provenance,
    /// nearest subspaces of each element (augmented families only)
    pub nearest: Vec<Vec<usize>>,
}

impl ProjectionFamily {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// `d^π_y(u, v)`; meaningless when `u` or `v` equals `y`.
    #[inline]
    pub fn d(&self, y: usize, u: usize, v: usize) -> R64 {
        match &self.rows[y] {
            Some(r) => r[u * self.len() + v],
            None => R64::zero(),
        }
    }

    fn has_row(&self, y: usize) -> bool {
        self.rows[y].is_some()
    }

    /// Builds a family from a full table `d[y][u][v]`.
    pub fn from_table(labels: Vec<String>, table: Vec<Vec<Vec<R64>>>, theta: R64) -> Result<Self> {
        let n = labels.len();
        if table.len() != n || table.iter().any(|r| r.len() != n || r.iter().any(|c| c.len() != n)) {
            return Err(Error::Invalid("table shape does not match the element list".into()));
        }
        let rows = table
            .into_iter()
            .map(|r| {
                let flat: Vec<R64> = r.into_iter().flatten().collect();
                if flat.iter().all(Zero::is_zero) {
                    None
                } else {
                    Some(flat)
                }
            })
            .collect();
        Ok(ProjectionFamily {
            kinds: vec![ElementKind::Abstract; n],
            labels,
            rows,
            theta_claimed: theta,
            provenance: Provenance::Explicit,
            nearest: vec![],
        })
    }

    /// Parses a triple table `[{"Y":..,"U":..,"V":..,"d":..}, ...]`.
    /// A missing orientation `(Y, V, U)` copies `(Y, U, V)`; other missing
    /// entries are zero.
    pub fn from_json(text: &str, theta: R64) -> Result<Self> {
        #[derive(Deserialize)]
        struct Entry {
            #[serde(rename = "Y")]
            y: String,
            #[serde(rename = "U")]
            u: String,
            #[serde(rename = "V")]
            v: String,
            d: serde_json::Value,
        }
        let entries: Vec<Entry> =
            serde_json::from_str(text).map_err(|e| Error::parse(e.line(), e.to_string()))?;
        let mut labels: Vec<String> = Vec::new();
        let mut index: HashMap<String, usize> = HashMap::new();
        let mut id = |s: &str, labels: &mut Vec<String>| -> usize {
            *index.entry(s.to_string()).or_insert_with(|| {
                labels.push(s.to_string());
                labels.len() - 1
            })
        };
        let mut parsed = Vec::new();
        for e in &entries {
            let d = match &e.d {
                serde_json::Value::Number(n) => parse_r64(&n.to_string())?,
                serde_json::Value::String(s) => parse_r64(s)?,
                other => return Err(Error::parse(0, format!("bad distance {other}"))),
            };
            if d < R64::zero() {
                return Err(Error::NegativeInput(format!("d_{}({}, {})", e.y, e.u, e.v)));
            }
            parsed.push((id(&e.y, &mut labels), id(&e.u, &mut labels), id(&e.v, &mut labels), d));
        }
        let n = labels.len();
        let mut table = vec![vec![vec![R64::zero(); n]; n]; n];
        let mut given = vec![vec![vec![false; n]; n]; n];
        for &(y, u, v, d) in &parsed {
            table[y][u][v] = d;
            given[y][u][v] = true;
        }
        for &(y, u, v, d) in &parsed {
            if !given[y][v][u] {
                table[y][v][u] = d;
            }
        }
        Self::from_table(labels, table, theta)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let n = self.len();
        let mut out = Vec::new();
        for y in 0..n {
            if !self.has_row(y) {
                continue;
            }
            for u in (0..n).filter(|&u| u != y) {
                for v in (0..n).filter(|&v| v != y) {
                    out.push(serde_json::json!({
                        "Y": self.labels[y], "U": self.labels[u], "V": self.labels[v],
                        "d": r64_to_string(&self.d(y, u, v)),
                    }));
                }
            }
        }
        serde_json::Value::Array(out)
    }
}

/// Projection sets of every cone-off vertex to each family cone, and the
/// base distance matrix for diameters.
struct GeometricTables {
    /// `proj[k][x]` = projection of cone-off vertex `x` to family cone `k`
    proj: Vec<Vec<Vec<Vertex>>>,
    dm: DistanceMatrix,
}

impl GeometricTables {
    fn new(c: &ConeOff, family: &[usize]) -> Result<Self> {
        let n = c.base_count();
        let proj = family
            .par_iter()
            .map(|&y| -> Result<Vec<Vec<Vertex>>> {
                let p = Projector::new(&c.base, &c.cones[y].members)?;
                let mut sets: Vec<Vec<Vertex>> =
                    (0..n as Vertex).map(|v| p.project(&c.base, v).points).collect();
                for (u, cone) in c.cones.iter().enumerate() {
                    if u == y {
                        sets.push(Vec::new());
                        continue;
                    }
                    let mut s: Vec<Vertex> =
                        cone.members.members().iter().flat_map(|&m| sets[m as usize].clone()).collect();
                    s.sort_unstable();
                    s.dedup();
                    sets.push(s);
                }
                Ok(sets)
            })
            .collect::<Result<_>>()?;
        Ok(GeometricTables { proj, dm: DistanceMatrix::new(&c.base) })
    }

    fn dpi(&self, k: usize, x: Vertex, y: Vertex) -> i64 {
        let (a, b) = (&self.proj[k][x as usize], &self.proj[k][y as usize]);
        let mut m = 0;
        for (i, &p) in a.iter().chain(b.iter()).enumerate() {
            for &r in a.iter().chain(b.iter()).skip(i + 1) {
                m = m.max(self.dm.get(p, r));
            }
        }
        m as i64
    }
}

/// Family of the cones of `c` with `d^π_Y(U, V) = diam(π_Y(U) ∪ π_Y(V))`.
pub fn geometric_family(c: &ConeOff, theta: R64) -> Result<ProjectionFamily> {
    let fam = c.family_indices();
    let t = GeometricTables::new(c, &fam)?;
    let n = fam.len();
    let rows = (0..n)
        .map(|k| {
            let mut r = vec![R64::zero(); n * n];
            for u in (0..n).filter(|&u| u != k) {
                for v in (0..n).filter(|&v| v != k) {
                    r[u * n + v] = r64(t.dpi(k, c.cone_vertex(fam[u]), c.cone_vertex(fam[v])));
                }
            }
            Some(r)
        })
        .collect();
    Ok(ProjectionFamily {
        labels: fam.iter().map(|&i| format!("Y{i}")).collect(),
        kinds: fam.iter().map(|&i| ElementKind::Subspace(i)).collect(),
        rows,
        theta_claimed: theta,
        provenance: Provenance::Geometric,
        nearest: vec![],
    })
}

/// Family on every cone-off vertex: base points carry the constant
/// projection, cones their closest-point projection.  Fails when some base
/// vertex is farther than `r` from every coned subspace.
pub fn augment_with_points(c: &ConeOff, r: u32, theta: R64) -> Result<ProjectionFamily> {
    let fam = c.family_indices();
    let base = c.base_count();
    let mut to_cone: Vec<Vec<u32>> = Vec::with_capacity(fam.len());
    for &y in &fam {
        to_cone.push(c.base.bfs_multi(c.cones[y].members.members()));
    }
    let mut nearest = Vec::with_capacity(base + fam.len());
    for x in 0..base {
        let near: Vec<usize> = (0..fam.len()).filter(|&k| to_cone[k][x] <= r).collect();
        if near.is_empty() {
            return Err(Error::NotCoboundedlyCovered(x as Vertex));
        }
        nearest.push(near);
    }
    for k in 0..fam.len() {
        nearest.push(vec![k]);
    }
    let t = GeometricTables::new(c, &fam)?;
    // elements: base vertices, then family cones
    let vertex_of = |e: usize| -> Vertex {
        if e < base {
            e as Vertex
        } else {
            c.cone_vertex(fam[e - base])
        }
    };
    let n = base + fam.len();
    let mut rows: Vec<Option<Vec<R64>>> = vec![None; base];
    let cone_rows: Vec<Option<Vec<R64>>> = (0..fam.len())
        .into_par_iter()
        .map(|k| {
            let own = base + k;
            let mut row = vec![R64::zero(); n * n];
            for u in (0..n).filter(|&u| u != own) {
                for v in (u..n).filter(|&v| v != own) {
                    let d = r64(t.dpi(k, vertex_of(u), vertex_of(v)));
                    row[u * n + v] = d;
                    row[v * n + u] = d;
                }
            }
            Some(row)
        })
        .collect();
    rows.extend(cone_rows);
    let mut labels: Vec<String> = (0..base).map(|x| format!("x{x}")).collect();
    labels.extend(fam.iter().map(|&i| format!("v_Y{i}")));
    let mut kinds: Vec<ElementKind> = (0..base).map(|x| ElementKind::Point(x as Vertex)).collect();
    kinds.extend(fam.iter().map(|&i| ElementKind::Subspace(i)));
    Ok(ProjectionFamily {
        labels,
        kinds,
        rows,
        theta_claimed: theta,
        provenance: Provenance::Geometric,
        nearest,
    })
}

/// Failures of one axiom with a few witnesses.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomCount {
    pub checked: u64,
    pub failures: u64,
    pub witnesses: Vec<Vec<usize>>,
}

const MAX_WITNESSES: usize = 20;

impl AxiomCount {
    fn fail(&mut self, w: Vec<usize>) {
        self.failures += 1;
        if self.witnesses.len() < MAX_WITNESSES {
            self.witnesses.push(w);
        }
    }

    fn merge(mut self, o: AxiomCount) -> AxiomCount {
        self.checked += o.checked;
        self.failures += o.failures;
        for w in o.witnesses {
            if self.witnesses.len() < MAX_WITNESSES {
                self.witnesses.push(w);
            }
        }
        self
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomReport {
    #[serde(serialize_with = "ser_r64", deserialize_with = "de_r64")]
    pub theta: R64,
    /// (I) witnesses `[Y, U, V]`
    pub symmetry: AxiomCount,
    /// (II) witnesses `[Y, U, V, W]`
    pub triangle: AxiomCount,
    /// (III) witnesses `[Y, U]`
    pub bounded: AxiomCount,
    /// (IV) witnesses `[Y, U, V]`
    pub bgi: AxiomCount,
    /// (IV′) witnesses `[Y, U, V, W]`; reported, not required
    pub strong: AxiomCount,
    /// (V) largest number of `Y` with `d_Y(U, V) ≥ θ` over pairs
    pub max_big_count: usize,
    #[serde(serialize_with = "ser_r64", deserialize_with = "de_r64")]
    pub max_bounded: R64,
    #[serde(serialize_with = "ser_r64", deserialize_with = "de_r64")]
    pub max_bgi_min: R64,
}

fn ser_r64<S: serde::Serializer>(x: &R64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r64_to_string(x))
}

fn de_r64<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<R64, D::Error> {
    let s = String::deserialize(d)?;
    parse_r64(&s).map_err(serde::de::Error::custom)
}

impl AxiomReport {
    /// Axioms (I)–(IV); (V) is automatic on finite families.
    pub fn passed(&self) -> bool {
        self.symmetry.passed() && self.triangle.passed() && self.bounded.passed() && self.bgi.passed()
    }
}

/// Checks the projection axioms exhaustively.
pub fn verify_projection_axioms(f: &ProjectionFamily, theta: R64) -> AxiomReport {
    let n = f.len();
    let with_rows: Vec<usize> = (0..n).filter(|&y| f.has_row(y)).collect();
    // (I), (II), (III): only rows that are not identically zero can fail
    let per_row: Vec<(AxiomCount, AxiomCount, AxiomCount, R64)> = with_rows
        .par_iter()
        .map(|&y| {
            let (mut sym, mut tri, mut bnd) = (AxiomCount::default(), AxiomCount::default(), AxiomCount::default());
            let mut max_b = R64::zero();
            let others: Vec<usize> = (0..n).filter(|&u| u != y).collect();
            for &u in &others {
                let duu = f.d(y, u, u);
                bnd.checked += 1;
                max_b = max_b.max(duu);
                if duu > theta {
                    bnd.fail(vec![y, u]);
                }
                for &v in &others {
                    sym.checked += 1;
                    if f.d(y, u, v) != f.d(y, v, u) {
                        sym.fail(vec![y, u, v]);
                    }
                    let duv = f.d(y, u, v);
                    for &w in &others {
                        tri.checked += 1;
                        if f.d(y, u, w) > duv + f.d(y, v, w) {
                            tri.fail(vec![y, u, v, w]);
                        }
                    }
                }
            }
            (sym, tri, bnd, max_b)
        })
        .collect();
    let mut symmetry = AxiomCount::default();
    let mut triangle = AxiomCount::default();
    let mut bounded = AxiomCount::default();
    let mut max_bounded = R64::zero();
    for (a, b, c, m) in per_row {
        symmetry = symmetry.merge(a);
        triangle = triangle.merge(b);
        bounded = bounded.merge(c);
        max_bounded = max_bounded.max(m);
    }
    // (IV) and (IV′) over distinct Y, U, V; the min is zero unless both
    // Y and V have rows
    let per_y: Vec<(AxiomCount, AxiomCount, R64)> = (0..n)
        .into_par_iter()
        .map(|y| {
            let (mut bgi, mut strong) = (AxiomCount::default(), AxiomCount::default());
            let mut worst = R64::zero();
            for u in (0..n).filter(|&u| u != y) {
                for v in (0..n).filter(|&v| v != y && v != u) {
                    bgi.checked += 1;
                    let a = f.d(y, u, v);
                    let b = f.d(v, u, y);
                    let m = a.min(b);
                    worst = worst.max(m);
                    if m > theta {
                        bgi.fail(vec![y, u, v]);
                    }
                    if a > theta && f.has_row(v) {
                        for w in (0..n).filter(|&w| w != v) {
                            strong.checked += 1;
                            if f.d(v, u, w) != f.d(v, y, w) {
                                strong.fail(vec![y, u, v, w]);
                            }
                        }
                    }
                }
            }
            (bgi, strong, worst)
        })
        .collect();
    let mut bgi = AxiomCount::default();
    let mut strong = AxiomCount::default();
    let mut max_bgi_min = R64::zero();
    for (a, b, m) in per_y {
        bgi = bgi.merge(a);
        strong = strong.merge(b);
        max_bgi_min = max_bgi_min.max(m);
    }
    // (V)
    let max_big_count = (0..n)
        .into_par_iter()
        .map(|u| {
            (u + 1..n)
                .map(|v| {
                    with_rows.iter().filter(|&&y| y != u && y != v && f.d(y, u, v) >= theta).count()
                })
                .max()
                .unwrap_or(0)
        })
        .max()
        .unwrap_or(0);
    AxiomReport {
        theta,
        symmetry,
        triangle,
        bounded,
        bgi,
        strong,
        max_big_count,
        max_bounded,
        max_bgi_min,
    }
}

/// The projection complex `P_Ж`: `U ~ V` iff `d_Y(U, V) ≤ Ж` for every
/// other `Y`.
#[derive(Clone, Debug)]
pub struct ProjectionComplex {
    pub zhe: R64,
    /// may be disconnected; unreachable pairs have distance `UNREACHABLE`
    pub graph: MetricGraph,
    pub connected: bool,
}

impl ProjectionComplex {
    pub fn edges(&self) -> Vec<(Vertex, Vertex)> {
        self.graph.edges().collect()
    }
}

pub fn build_projection_complex(f: &ProjectionFamily, zhe: R64) -> Result<ProjectionComplex> {
    if zhe < R64::zero() {
        return Err(Error::NegativeInput("Ж".into()));
    }
    let n = f.len();
    let with_rows: Vec<usize> = (0..n).filter(|&y| f.has_row(y)).collect();
    let edges: Vec<(Vertex, Vertex)> = (0..n)
        .into_par_iter()
        .flat_map_iter(|u| {
            let with_rows = &with_rows;
            (u + 1..n).filter_map(move |v| {
                let ok = with_rows.iter().all(|&y| y == u || y == v || f.d(y, u, v) <= zhe);
                ok.then_some((u as Vertex, v as Vertex))
            })
        })
        .collect();
    let graph = MetricGraph::from_edges_unchecked(n.max(1), edges)?;
    let connected = graph.is_connected();
    Ok(ProjectionComplex { zhe, graph, connected })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathImageReport {
    #[serde(serialize_with = "ser_r64", deserialize_with = "de_r64")]
    pub path_bound: R64,
    #[serde(serialize_with = "ser_r64", deserialize_with = "de_r64")]
    pub geodesic_bound: R64,
    pub path_pairs: u64,
    pub geodesic_pairs: u64,
    #[serde(serialize_with = "ser_r64", deserialize_with = "de_r64")]
    pub max_path_gap: R64,
    #[serde(serialize_with = "ser_r64", deserialize_with = "de_r64")]
    pub max_geodesic_gap: R64,
    /// `[Y, U, V]` for paths avoiding `N_2(Y)`
    pub path_violations: Vec<[usize; 3]>,
    /// `[Y, U, V]` for geodesics avoiding `Y`
    pub geodesic_violations: Vec<[usize; 3]>,
}

/// Bounded path image and its geodesic form, exhaustively: `U, V` are
/// joined by a path avoiding `N_2(Y)` iff they share a component of the
/// complex minus that ball, and by a geodesic avoiding `Y` iff deleting
/// `Y` keeps their distance.  Bounds carry a `4θ` slack for the
/// unmodified distances.
pub fn bounded_path_image_check(p: &ProjectionComplex, f: &ProjectionFamily, theta: R64) -> Result<PathImageReport> {
    if p.zhe < r64(33) * theta {
        return Err(Error::PreconditionBroken(format!(
            "Ж = {} is below 33θ = {}",
            r64_to_string(&p.zhe),
            r64_to_string(&(r64(33) * theta))
        )));
    }
    let n = f.len();
    let path_bound = r64(15) * theta;
    let geodesic_bound = r64(26) * theta + r64(6) * p.zhe;
    let rows: Vec<_> = (0..n)
        .into_par_iter()
        .filter(|&y| f.has_row(y))
        .map(|y| {
            let g = &p.graph;
            let ball = g.bfs_bounded(&[y as Vertex], 2, None);
            // components of the complex minus N_2(Y)
            let mut comp = vec![usize::MAX; n];
            let mut next = 0;
            for s in 0..n {
                if ball[s] != UNREACHABLE || comp[s] != usize::MAX {
                    continue;
                }
                let mut stack = vec![s];
                comp[s] = next;
                while let Some(a) = stack.pop() {
                    for &b in g.neighbors(a as Vertex) {
                        let b = b as usize;
                        if ball[b] == UNREACHABLE && comp[b] == usize::MAX {
                            comp[b] = next;
                            stack.push(b);
                        }
                    }
                }
                next += 1;
            }
            let (mut pp, mut gp) = (0u64, 0u64);
            let (mut mp, mut mg) = (R64::zero(), R64::zero());
            let (mut pv, mut gv) = (Vec::new(), Vec::new());
            for u in (0..n).filter(|&u| u != y) {
                let du = g.bfs(u as Vertex);
                let du_avoid = g.bfs_avoiding(u as Vertex, y as Vertex);
                for v in (u + 1..n).filter(|&v| v != y) {
                    let gap = f.d(y, u, v);
                    if comp[u] != usize::MAX && comp[u] == comp[v] {
                        pp += 1;
                        mp = mp.max(gap);
                        if gap > path_bound {
                            pv.push([y, u, v]);
                        }
                    }
                    if du[v] != UNREACHABLE && du_avoid[v] == du[v] {
                        gp += 1;
                        mg = mg.max(gap);
                        if gap > geodesic_bound {
                            gv.push([y, u, v]);
                        }
                    }
                }
            }
            (pp, gp, mp, mg, pv, gv)
        })
        .collect();
    let mut r = PathImageReport {
        path_bound,
        geodesic_bound,
        path_pairs: 0,
        geodesic_pairs: 0,
        max_path_gap: R64::zero(),
        max_geodesic_gap: R64::zero(),
        path_violations: vec![],
        geodesic_violations: vec![],
    };
    for (pp, gp, mp, mg, pv, gv) in rows {
        r.path_pairs += pp;
        r.geodesic_pairs += gp;
        r.max_path_gap = r.max_path_gap.max(mp);
        r.max_geodesic_gap = r.max_geodesic_gap.max(mg);
        r.path_violations.extend(pv);
        r.geodesic_violations.extend(gv);
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coning::build_cone_off;
    use crate::graph::Subspace;

    fn constant_table(n: usize, d: i64) -> ProjectionFamily {
        let labels = (0..n).map(|i| format!("e{i}")).collect();
        ProjectionFamily::from_table(labels, vec![vec![vec![r64(d); n]; n]; n], r64(0)).unwrap()
    }

    #[test]
    fn far_singletons_in_a_tree_pass_at_zero() {
        // star with long arms; cones over the three arm tips
        let edges = [(0, 1), (1, 2), (0, 3), (3, 4), (0, 5), (5, 6)];
        let g = MetricGraph::from_edges(7, edges).unwrap();
        let fam: Vec<Subspace> = [2, 4, 6].iter().map(|&v| Subspace::new(&g, [v]).unwrap()).collect();
        let c = build_cone_off(&g, &fam).unwrap();
        let f = geometric_family(&c, r64(0)).unwrap();
        let r = verify_projection_axioms(&f, r64(0));
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn complex_edge_rule_extremes() {
        let f = constant_table(4, 3);
        let full = build_projection_complex(&f, r64(3)).unwrap();
        assert_eq!(full.graph.edge_count(), 6);
        let none = build_projection_complex(&f, r64(0)).unwrap();
        assert_eq!(none.graph.edge_count(), 0);
        assert!(!none.connected);
    }

    #[test]
    fn explicit_table_violating_bgi() {
        let json = r#"[
            {"Y":"A","U":"B","V":"C","d":5},
            {"Y":"C","U":"B","V":"A","d":5}
        ]"#;
        let f = ProjectionFamily::from_json(json, r64(1)).unwrap();
        let r = verify_projection_axioms(&f, r64(1));
        assert!(!r.bgi.passed());
        assert!(r.bgi.witnesses.contains(&vec![0, 1, 2]));
    }

    #[test]
    fn path_image_needs_large_zhe() {
        let f = constant_table(3, 1);
        let p = build_projection_complex(&f, r64(10)).unwrap();
        assert!(matches!(bounded_path_image_check(&p, &f, r64(1)), Err(Error::PreconditionBroken(_))));
        let p = build_projection_complex(&f, r64(33)).unwrap();
        let r = bounded_path_image_check(&p, &f, r64(1)).unwrap();
        assert!(r.path_violations.is_empty() && r.geodesic_violations.is_empty());
    }

    #[test]
    fn points_have_zero_rows() {
        let g = MetricGraph::from_edges(5, (0..4).map(|i| (i, i + 1))).unwrap();
        let fam = vec![Subspace::new(&g, [0, 1]).unwrap(), Subspace::new(&g, [3, 4]).unwrap()];
        let c = build_cone_off(&g, &fam).unwrap();
        let f = augment_with_points(&c, 1, r64(0)).unwrap();
        assert_eq!(f.len(), 7);
        assert_eq!(f.d(2, 0, 4), r64(0));
        assert_eq!(f.nearest[2], vec![0, 1]);
        assert_eq!(augment_with_points(&c, 0, r64(0)).unwrap_err(), Error::NotCoboundedlyCovered(2));
    }
}
