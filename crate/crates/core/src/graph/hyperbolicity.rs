use std::collections::HashMap;

use rayon::prelude::*;

use super::{
    sample_indices, DistanceMatrix, Measured, MetricGraph, Sampling, Subspace, Vertex,
    DEFAULT_EXHAUSTIVE_CAP,
};
use crate::error::{Error, Result};

/// Union of all geodesics from `u` to `v`.
pub fn geodesic_interval(g: &MetricGraph, u: Vertex, v: Vertex) -> Result<Vec<Vertex>> {
    g.check_vertex(u)?;
    g.check_vertex(v)?;
    let du = g.bfs(u);
    let dv = g.bfs(v);
    Ok(interval(&du, &dv))
}

fn interval(du: &[u32], dv: &[u32]) -> Vec<Vertex> {
    let total = du[dv.iter().position(|&d| d == 0).expect("row of a vertex")];
    (0..du.len() as Vertex).filter(|&w| du[w as usize] + dv[w as usize] == total).collect()
}

/// Geodesic DAG of an interval, ordered from the far end back to the start.
struct Side {
    order: Vec<Vertex>,
    succ: Vec<Vec<usize>>,
}

impl Side {
    fn new(g: &MetricGraph, da: &[u32], dc: &[u32]) -> Self {
        let mut order = interval(da, dc);
        order.sort_by_key(|&v| std::cmp::Reverse(da[v as usize]));
        let pos: HashMap<Vertex, usize> = order.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let succ = order
            .iter()
            .map(|&u| {
                g.neighbors(u)
                    .iter()
                    .filter(|&&w| da[w as usize] == da[u as usize] + 1)
                    .filter_map(|w| pos.get(w).copied())
                    .collect()
            })
            .collect();
        Side { order, succ }
    }

    /// Largest distance from `p` that some geodesic of this side keeps,
    /// i.e. the sup over geodesics of their distance to `p`.
    fn sup_distance(&self, dp: &[u32]) -> u32 {
        let mut best = vec![0u32; self.order.len()];
        for (i, &u) in self.order.iter().enumerate() {
            let tail = self.succ[i].iter().map(|&j| best[j]).max();
            best[i] = match tail {
                Some(t) => t.min(dp[u as usize]),
                None => dp[u as usize],
            };
        }
        *best.last().expect("interval contains its endpoints")
    }
}

/// Exact slimness of the triangle `x, y, z` over all geodesic choices.
pub fn slim_triangle(g: &MetricGraph, x: Vertex, y: Vertex, z: Vertex) -> Result<u32> {
    for v in [x, y, z] {
        g.check_vertex(v)?;
    }
    Ok(triangle_by_bfs(g, [x, y, z]))
}

fn triangle_by_bfs(g: &MetricGraph, t: [Vertex; 3]) -> u32 {
    let corner: Vec<Vec<u32>> = t.iter().map(|&v| g.bfs(v)).collect();
    let sides = [
        Side::new(g, &corner[0], &corner[1]),
        Side::new(g, &corner[1], &corner[2]),
        Side::new(g, &corner[0], &corner[2]),
    ];
    let mut need: Vec<Vertex> = sides.iter().flat_map(|s| s.order.iter().copied()).collect();
    need.sort_unstable();
    need.dedup();
    let rows: HashMap<Vertex, Vec<u32>> = need.par_iter().map(|&v| (v, g.bfs(v))).collect();
    // side i is tested against the other two
    let mut delta = 0;
    for (i, side) in sides.iter().enumerate() {
        let others: Vec<&Side> = (0..3).filter(|&j| j != i).map(|j| &sides[j]).collect();
        for &p in &side.order {
            let dp = &rows[&p];
            let d = others.iter().map(|o| o.sup_distance(dp)).min().unwrap_or(0);
            delta = delta.max(d);
        }
    }
    delta
}

/// Least δ with every examined triangle δ-slim.
///
/// Exhaustive mode examines all triples and every geodesic; it refuses
/// graphs above [`DEFAULT_EXHAUSTIVE_CAP`] vertices.
pub fn slim_constant(g: &MetricGraph, sampling: &Sampling) -> Result<Measured<u32>> {
    match *sampling {
        Sampling::Exhaustive => {
            let n = g.vertex_count();
            if n > DEFAULT_EXHAUSTIVE_CAP {
                return Err(Error::BudgetExceeded(format!(
                    "exhaustive slimness on {n} vertices (cap {DEFAULT_EXHAUSTIVE_CAP})"
                )));
            }
            Ok(Measured { value: slim_exhaustive(g), exact: true })
        }
        Sampling::Random { count, seed } => {
            let n = g.vertex_count();
            let value = sample_indices(n, 3, count, seed)
                .par_iter()
                .map(|t| triangle_by_bfs(g, [t[0] as Vertex, t[1] as Vertex, t[2] as Vertex]))
                .max()
                .unwrap_or(0);
            Ok(Measured { value, exact: false })
        }
    }
}

/// Sampled slimness along the tie-break geodesics only: each side is one
/// fixed geodesic, so the cost is six searches per triangle.  Used on
/// graphs whose geodesic intervals are too wide for [`slim_constant`].
pub fn slim_tiebreak_sampled(g: &MetricGraph, count: usize, seed: u64) -> Result<Measured<u32>> {
    let n = g.vertex_count();
    let value = sample_indices(n, 3, count, seed)
        .par_iter()
        .map(|t| tiebreak_triangle(g, [t[0] as Vertex, t[1] as Vertex, t[2] as Vertex]))
        .collect::<Result<Vec<u32>>>()?
        .into_iter()
        .max()
        .unwrap_or(0);
    Ok(Measured { value, exact: false })
}

/// Slimness of the triangle formed by the tie-break geodesics.
pub fn tiebreak_triangle(g: &MetricGraph, t: [Vertex; 3]) -> Result<u32> {
    let sides = [g.geodesic(t[0], t[1])?, g.geodesic(t[1], t[2])?, g.geodesic(t[2], t[0])?];
    Ok(sides_slimness(g, &[sides[0].vertices(), sides[1].vertices(), sides[2].vertices()]))
}

/// Largest distance from a vertex of one side to the union of the others.
pub fn sides_slimness(g: &MetricGraph, sides: &[&[Vertex]; 3]) -> u32 {
    let mut delta = 0;
    for i in 0..3 {
        let others: Vec<Vertex> = (0..3).filter(|&j| j != i).flat_map(|j| sides[j].iter().copied()).collect();
        let row = g.bfs_multi(&others);
        for &v in sides[i] {
            delta = delta.max(row[v as usize]);
        }
    }
    delta
}

fn slim_exhaustive(g: &MetricGraph) -> u32 {
    let n = g.vertex_count();
    if n == 1 {
        return 0;
    }
    let dm = DistanceMatrix::new(g);
    let pair = |a: usize, c: usize| -> usize {
        let (a, c) = if a <= c { (a, c) } else { (c, a) };
        a * n - a * a.saturating_sub(1) / 2 + c - a
    };
    // sup[pair(a,c)][p]: max over geodesics [a,c] of their distance to p
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a..n).map(move |c| (a, c))).collect();
    debug_assert!(pairs.iter().enumerate().all(|(i, &(a, c))| pair(a, c) == i));
    let sup: Vec<Vec<u16>> = pairs
        .par_iter()
        .map(|&(a, c)| {
            let side = Side::new(g, dm.row(a as Vertex), dm.row(c as Vertex));
            let k = side.order.len();
            let mut best = vec![0u16; k * n];
            for i in 0..k {
                let u = side.order[i];
                let du = dm.row(u);
                let (done, rest) = best.split_at_mut(i * n);
                let cur = &mut rest[..n];
                if side.succ[i].is_empty() {
                    for p in 0..n {
                        cur[p] = du[p] as u16;
                    }
                } else {
                    cur.fill(0);
                    for &j in &side.succ[i] {
                        let prev = &done[j * n..(j + 1) * n];
                        for p in 0..n {
                            cur[p] = cur[p].max(prev[p]);
                        }
                    }
                    for p in 0..n {
                        cur[p] = cur[p].min(du[p] as u16);
                    }
                }
            }
            best[(k - 1) * n..].to_vec()
        })
        .collect();
    (0..n)
        .into_par_iter()
        .map(|a| {
            let mut delta = 0u16;
            for b in a + 1..n {
                let dab = dm.get(a as Vertex, b as Vertex);
                for p in 0..n {
                    if dm.get(a as Vertex, p as Vertex) + dm.get(p as Vertex, b as Vertex) != dab {
                        continue;
                    }
                    for c in 0..n {
                        let v = sup[pair(a, c)][p].min(sup[pair(c, b)][p]);
                        delta = delta.max(v);
                    }
                }
            }
            delta as u32
        })
        .max()
        .unwrap_or(0)
}

/// Least K such that every examined geodesic between members of `y`
/// stays in the K-neighbourhood of `y`.
pub fn quasiconvexity_constant(g: &MetricGraph, y: &Subspace, sampling: &Sampling) -> Result<Measured<u32>> {
    for &v in y.members() {
        g.check_vertex(v)?;
    }
    let to_y = g.bfs_multi(y.members());
    let m = y.members();
    let pairs: Vec<(Vertex, Vertex)> = match *sampling {
        Sampling::Exhaustive => {
            let work = (m.len() as u128).pow(2) * g.vertex_count() as u128;
            if work > 4_000_000_000 {
                return Err(Error::BudgetExceeded(format!(
                    "exhaustive quasiconvexity: {} members on {} vertices",
                    m.len(),
                    g.vertex_count()
                )));
            }
            (0..m.len()).flat_map(|i| (i + 1..m.len()).map(move |j| (m[i], m[j]))).collect()
        }
        Sampling::Random { count, seed } => sample_indices(m.len(), 2, count, seed)
            .into_iter()
            .map(|p| (m[p[0]], m[p[1]]))
            .collect(),
    };
    let mut sources: Vec<Vertex> = pairs.iter().flat_map(|&(a, b)| [a, b]).collect();
    sources.sort_unstable();
    sources.dedup();
    let rows: HashMap<Vertex, Vec<u32>> = sources.par_iter().map(|&v| (v, g.bfs(v))).collect();
    let value = pairs
        .par_iter()
        .map(|&(a, b)| {
            let (da, db) = (&rows[&a], &rows[&b]);
            let total = da[b as usize];
            (0..g.vertex_count())
                .filter(|&w| da[w] + db[w] == total)
                .map(|w| to_y[w])
                .max()
                .unwrap_or(0)
        })
        .max()
        .unwrap_or(0);
    Ok(Measured { value, exact: sampling.is_exhaustive() })
}
