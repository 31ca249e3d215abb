use std::collections::HashMap;

use rayon::prelude::*;

use super::{MetricGraph, ProjectionSet, Subspace, Vertex, UNREACHABLE};
use crate::error::{Error, Result};

/// Closest-point projection onto a fixed subspace.
///
/// Holds the distance-to-`Y` field; a projection is read off by descending
/// that field, which reaches exactly the nearest points.
#[derive(Clone, Debug)]
pub struct Projector {
    target: Subspace,
    to_target: Vec<u32>,
}

impl Projector {
    pub fn new(g: &MetricGraph, target: &Subspace) -> Result<Self> {
        for &v in target.members() {
            g.check_vertex(v)?;
        }
        Ok(Projector { target: target.clone(), to_target: g.bfs_multi(target.members()) })
    }

    pub fn target(&self) -> &Subspace {
        &self.target
    }

    pub fn distance_to_target(&self, z: Vertex) -> u32 {
        self.to_target[z as usize]
    }

    pub fn project(&self, g: &MetricGraph, z: Vertex) -> ProjectionSet {
        let base_distance = self.to_target[z as usize];
        let mut layer = vec![z];
        for _ in 0..base_distance {
            let mut next: Vec<Vertex> = layer
                .iter()
                .flat_map(|&u| {
                    let want = self.to_target[u as usize] - 1;
                    g.neighbors(u).iter().copied().filter(move |&w| self.to_target[w as usize] == want)
                })
                .collect();
            next.sort_unstable();
            next.dedup();
            layer = next;
        }
        ProjectionSet { points: layer, base_distance }
    }

    /// Union of the projections of every vertex of `a`.
    pub fn project_set(&self, g: &MetricGraph, a: &[Vertex]) -> Vec<Vertex> {
        let mut out: Vec<Vertex> = a.iter().flat_map(|&z| self.project(g, z).points).collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

pub fn closest_point_projection(g: &MetricGraph, y: &Subspace, z: Vertex) -> Result<ProjectionSet> {
    g.check_vertex(z)?;
    Ok(Projector::new(g, y)?.project(g, z))
}

/// Diameter of a vertex set in the ambient metric (0 for the empty set).
pub fn diameter(g: &MetricGraph, set: &[Vertex]) -> u32 {
    if set.len() < 2 {
        return 0;
    }
    set[..set.len() - 1]
        .iter()
        .map(|&u| {
            let d = g.bfs(u);
            set.iter().map(|&v| d[v as usize]).max().unwrap_or(0)
        })
        .max()
        .unwrap_or(0)
}

/// `diam(π_Y(A) ∪ π_Y(B))`.
pub fn proj_distance(g: &MetricGraph, y: &Subspace, a: &[Vertex], b: &[Vertex]) -> Result<u32> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Invalid("projection distance of an empty set".into()));
    }
    for &v in a.iter().chain(b) {
        g.check_vertex(v)?;
    }
    let p = Projector::new(g, y)?;
    let mut u = p.project_set(g, a);
    u.extend(p.project_set(g, b));
    u.sort_unstable();
    u.dedup();
    Ok(diameter(g, &u))
}

pub fn hausdorff_distance(g: &MetricGraph, a: &[Vertex], b: &[Vertex]) -> Result<u32> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Invalid("Hausdorff distance of an empty set".into()));
    }
    for &v in a.iter().chain(b) {
        g.check_vertex(v)?;
    }
    let to_a = g.bfs_multi(a);
    let to_b = g.bfs_multi(b);
    let one = a.iter().map(|&v| to_b[v as usize]).max().unwrap_or(0);
    let two = b.iter().map(|&v| to_a[v as usize]).max().unwrap_or(0);
    Ok(one.max(two))
}

/// Closed `t`-neighbourhood of a subspace.
pub fn neighborhood(g: &MetricGraph, y: &Subspace, t: u32) -> Subspace {
    let d = g.bfs_bounded(y.members(), t, None);
    let members = (0..g.vertex_count() as Vertex).filter(|&v| d[v as usize] != UNREACHABLE);
    Subspace::from_vertices(members).expect("neighbourhood contains Y")
}

fn check_family(family: &[Subspace]) -> Result<()> {
    if family.len() < 2 {
        return Err(Error::FamilyTooSmall(format!("{} member(s)", family.len())));
    }
    let mut sorted: Vec<&Subspace> = family.iter().collect();
    sorted.sort();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::FamilyTooSmall("duplicate member".into()));
    }
    Ok(())
}

/// `max over distinct Y, Y' of diam(N_t(Y') ∩ Y)`, empty intersections
/// counting as 0.
pub fn separation_profile(g: &MetricGraph, family: &[Subspace], t: u32) -> Result<u32> {
    check_family(family)?;
    // members containing each vertex, so only meeting pairs are examined
    let mut owners: HashMap<Vertex, Vec<usize>> = HashMap::new();
    for (i, y) in family.iter().enumerate() {
        for &v in y.members() {
            g.check_vertex(v)?;
            owners.entry(v).or_default().push(i);
        }
    }
    Ok((0..family.len())
        .into_par_iter()
        .map(|j| {
            let near = g.bfs_bounded(family[j].members(), t, None);
            let mut hit: HashMap<usize, Vec<Vertex>> = HashMap::new();
            for (v, list) in &owners {
                if near[*v as usize] != UNREACHABLE {
                    for &i in list {
                        if i != j {
                            hit.entry(i).or_default().push(*v);
                        }
                    }
                }
            }
            hit.values().map(|set| diameter(g, set)).max().unwrap_or(0)
        })
        .max()
        .unwrap_or(0))
}

/// Geometric separation constant at fattening `2K + 2δ`.
pub fn separation_m0(g: &MetricGraph, family: &[Subspace], delta: u32, k: u32) -> Result<u32> {
    separation_profile(g, family, 2 * k + 2 * delta)
}
