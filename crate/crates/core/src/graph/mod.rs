//! Finite unit-edge graphs: distances, geodesics, hyperbolicity, quasiconvexity
//! and closest-point projections.

mod hyperbolicity;
pub mod io;
mod projection;

pub use hyperbolicity::{
    geodesic_interval, quasiconvexity_constant, sides_slimness, slim_constant, slim_tiebreak_sampled, slim_triangle,
    tiebreak_triangle,
};
pub use projection::{
    closest_point_projection, diameter, hausdorff_distance, neighborhood, proj_distance,
    separation_m0, separation_profile, Projector,
};

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Vertex id.
pub type Vertex = u32;

/// Marker distance for vertices a search never reached.
pub const UNREACHABLE: u32 = u32::MAX;

/// Graphs with at most this many vertices are treated exhaustively by default.
pub const DEFAULT_EXHAUSTIVE_CAP: usize = 400;

/// A connected simple graph with the path metric.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricGraph {
    adj: Vec<Vec<Vertex>>,
    edge_count: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

impl MetricGraph {
    /// Builds a graph, rejecting loops, repeated edges and disconnected input.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vertex, Vertex)>,
    {
        let g = Self::from_edges_unchecked(n, edges)?;
        if !g.is_connected() {
            return Err(Error::Disconnected);
        }
        Ok(g)
    }

    /// Same as [`MetricGraph::from_edges`] but allows several components.
    pub(crate) fn from_edges_unchecked<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vertex, Vertex)>,
    {
        if n == 0 {
            return Err(Error::Invalid("graph needs at least one vertex".into()));
        }
        let mut adj = vec![Vec::new(); n];
        let mut edge_count = 0;
        for (u, v) in edges {
            if u as usize >= n {
                return Err(Error::UnknownVertex(u));
            }
            if v as usize >= n {
                return Err(Error::UnknownVertex(v));
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            adj[u as usize].push(v);
            adj[v as usize].push(u);
            edge_count += 1;
        }
        for (u, list) in adj.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                let (a, b) = (u as Vertex, w[0]);
                return Err(Error::MultiEdge(a.min(b), a.max(b)));
            }
        }
        Ok(MetricGraph { adj, edge_count, labels: None })
    }

    /// Attaches one label per vertex.
    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.adj.len() {
            return Err(Error::Invalid(format!(
                "{} labels for {} vertices",
                labels.len(),
                self.adj.len()
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adj[v as usize]
    }

    pub fn label(&self, v: Vertex) -> Option<&str> {
        self.labels.as_ref().map(|l| l[v as usize].as_str())
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Edges as pairs `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, list)| {
            list.iter().filter(move |&&v| (u as Vertex) < v).map(move |&v| (u as Vertex, v))
        })
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.adj[u as usize].binary_search(&v).is_ok()
    }

    pub fn check_vertex(&self, v: Vertex) -> Result<()> {
        if (v as usize) < self.adj.len() {
            Ok(())
        } else {
            Err(Error::UnknownVertex(v))
        }
    }

    pub fn is_connected(&self) -> bool {
        self.bfs(0).iter().all(|&d| d != UNREACHABLE)
    }

    /// Distances from `src` to every vertex.
    pub fn bfs(&self, src: Vertex) -> Vec<u32> {
        self.bfs_multi(std::slice::from_ref(&src))
    }

    /// Distances to the nearest of `sources`.
    pub fn bfs_multi(&self, sources: &[Vertex]) -> Vec<u32> {
        self.bfs_bounded(sources, u32::MAX, None)
    }

    /// Distances from `src` in the graph with `banned` deleted.
    pub fn bfs_avoiding(&self, src: Vertex, banned: Vertex) -> Vec<u32> {
        self.bfs_bounded(std::slice::from_ref(&src), u32::MAX, Some(banned))
    }

    /// Multi-source search that stops expanding at `radius`.
    pub fn bfs_bounded(&self, sources: &[Vertex], radius: u32, banned: Option<Vertex>) -> Vec<u32> {
        let mut dist = vec![UNREACHABLE; self.adj.len()];
        let mut queue = VecDeque::new();
        for &s in sources {
            if Some(s) != banned && dist[s as usize] == UNREACHABLE {
                dist[s as usize] = 0;
                queue.push_back(s);
            }
        }
        while let Some(u) = queue.pop_front() {
            let du = dist[u as usize];
            if du >= radius {
                continue;
            }
            for &v in &self.adj[u as usize] {
                if dist[v as usize] == UNREACHABLE && Some(v) != banned {
                    dist[v as usize] = du + 1;
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    pub fn distance(&self, u: Vertex, v: Vertex) -> Result<u32> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        Ok(self.bfs(u)[v as usize])
    }

    /// A geodesic from `u` to `v`; every step back from `v` takes the
    /// smallest-id predecessor.
    pub fn geodesic(&self, u: Vertex, v: Vertex) -> Result<Path> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        let du = self.bfs(u);
        Ok(self.geodesic_from_row(&du, v))
    }

    /// Walks back from `v` using distances from the path's start.
    pub fn geodesic_from_row(&self, from_start: &[u32], v: Vertex) -> Path {
        let mut rev = vec![v];
        let mut cur = v;
        while from_start[cur as usize] > 0 {
            let d = from_start[cur as usize];
            cur = *self.adj[cur as usize]
                .iter()
                .find(|&&w| from_start[w as usize] == d - 1)
                .expect("distance row is a BFS row");
            rev.push(cur);
        }
        rev.reverse();
        Path(rev)
    }

    /// Largest finite distance.
    pub fn diameter(&self) -> u32 {
        (0..self.adj.len() as Vertex)
            .into_par_iter()
            .map(|v| self.bfs(v).into_iter().max().unwrap_or(0))
            .max()
            .unwrap_or(0)
    }

    /// Graph with the vertices of `keep` only (renumbered in the given order).
    pub fn induced(&self, keep: &[Vertex]) -> Result<MetricGraph> {
        let mut index = vec![UNREACHABLE; self.adj.len()];
        for (i, &v) in keep.iter().enumerate() {
            self.check_vertex(v)?;
            index[v as usize] = i as u32;
        }
        let mut edges = Vec::new();
        for (i, &v) in keep.iter().enumerate() {
            for &w in &self.adj[v as usize] {
                let j = index[w as usize];
                if j != UNREACHABLE && (i as u32) < j {
                    edges.push((i as u32, j));
                }
            }
        }
        let g = MetricGraph::from_edges(keep.len(), edges)?;
        match &self.labels {
            Some(l) => g.with_labels(keep.iter().map(|&v| l[v as usize].clone()).collect()),
            None => Ok(g),
        }
    }
}

/// Vertex sequence with consecutive entries adjacent.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Path(pub Vec<Vertex>);

impl Path {
    pub fn len(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.0.len() <= 1
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.0
    }

    pub fn start(&self) -> Vertex {
        self.0[0]
    }

    pub fn end(&self) -> Vertex {
        *self.0.last().expect("non-empty path")
    }

    pub fn is_path_in(&self, g: &MetricGraph) -> bool {
        !self.0.is_empty()
            && self.0.iter().all(|&v| (v as usize) < g.vertex_count())
            && self.0.windows(2).all(|w| g.has_edge(w[0], w[1]))
    }

    pub fn is_geodesic_in(&self, g: &MetricGraph) -> bool {
        self.is_path_in(g) && g.bfs(self.start())[self.end() as usize] as usize == self.len()
    }
}

/// Non-empty sorted vertex set.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Subspace {
    members: Vec<Vertex>,
}

impl Subspace {
    pub fn new(g: &MetricGraph, members: impl IntoIterator<Item = Vertex>) -> Result<Self> {
        let s = Self::from_vertices(members)?;
        for &v in &s.members {
            g.check_vertex(v)?;
        }
        Ok(s)
    }

    /// Builds a subspace without a host check.
    pub fn from_vertices(members: impl IntoIterator<Item = Vertex>) -> Result<Self> {
        let mut members: Vec<Vertex> = members.into_iter().collect();
        members.sort_unstable();
        members.dedup();
        if members.is_empty() {
            return Err(Error::EmptySubspace);
        }
        Ok(Subspace { members })
    }

    pub fn members(&self) -> &[Vertex] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.members.binary_search(&v).is_ok()
    }
}

/// Closest points of a subspace to a fixed vertex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectionSet {
    pub points: Vec<Vertex>,
    pub base_distance: u32,
}

/// How many configurations a checker examines.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sampling {
    Exhaustive,
    Random { count: usize, seed: u64 },
}

impl Sampling {
    /// Exhaustive on graphs up to `cap` vertices, sampled above.
    pub fn auto(n: usize, cap: usize, count: usize, seed: u64) -> Self {
        if n <= cap {
            Sampling::Exhaustive
        } else {
            Sampling::Random { count, seed }
        }
    }

    pub fn is_exhaustive(&self) -> bool {
        matches!(self, Sampling::Exhaustive)
    }
}

/// A measured value with a flag telling whether every case was examined.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Measured<T> {
    pub value: T,
    /// `false` means the value is a lower bound from sampling.
    pub exact: bool,
}

/// All-pairs distances for small graphs.
#[derive(Clone, Debug)]
pub struct DistanceMatrix {
    n: usize,
    d: Vec<u32>,
}

impl DistanceMatrix {
    pub fn new(g: &MetricGraph) -> Self {
        let n = g.vertex_count();
        let rows: Vec<Vec<u32>> = (0..n as Vertex).into_par_iter().map(|v| g.bfs(v)).collect();
        DistanceMatrix { n, d: rows.concat() }
    }

    #[inline]
    pub fn get(&self, u: Vertex, v: Vertex) -> u32 {
        self.d[u as usize * self.n + v as usize]
    }

    #[inline]
    pub fn row(&self, u: Vertex) -> &[u32] {
        &self.d[u as usize * self.n..(u as usize + 1) * self.n]
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }
}

pub(crate) fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `count` random ordered picks from `0..n` (with repetition).
pub(crate) fn sample_indices(n: usize, k: usize, count: usize, seed: u64) -> Vec<Vec<usize>> {
    let mut r = rng(seed);
    (0..count).map(|_| (0..k).map(|_| r.gen_range(0..n)).collect()).collect()
}
