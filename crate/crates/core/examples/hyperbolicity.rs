//! Slimness, quasiconvexity and separation of small graphs.
use coarsequot::graph::{quasiconvexity_constant, separation_m0, slim_constant, MetricGraph, Sampling, Subspace};

fn main() -> Result<(), coarsequot::Error> {
    let tree = MetricGraph::from_edges(7, [(0, 1), (0, 2), (1, 3), (1, 4), (2, 5), (2, 6)])?;
    let cycle = MetricGraph::from_edges(8, (0..8).map(|i| (i, (i + 1) % 8)))?;
    let grid = MetricGraph::from_edges(
        16,
        (0..16u32).flat_map(|v| {
            let mut e = Vec::new();
            if v % 4 < 3 {
                e.push((v, v + 1));
            }
            if v < 12 {
                e.push((v, v + 4));
            }
            e
        }),
    )?;
    for (name, g) in [("binary tree", &tree), ("8-cycle", &cycle), ("4x4 grid", &grid)] {
        let d = slim_constant(g, &Sampling::Exhaustive)?;
        println!("{name}: {} vertices, diameter {}, slimness δ = {}", g.vertex_count(), g.diameter(), d.value);
    }
    let antipodes = Subspace::new(&cycle, [0, 4])?;
    let k = quasiconvexity_constant(&cycle, &antipodes, &Sampling::Exhaustive)?;
    println!("8-cycle, {{0, 4}} is {}-quasiconvex", k.value);
    let row = Subspace::new(&grid, [0, 1, 2, 3])?;
    let col = Subspace::new(&grid, [3, 7, 11, 15])?;
    let dg = slim_constant(&grid, &Sampling::Exhaustive)?.value;
    let m0 = separation_m0(&grid, &[row, col], dg, 0)?;
    println!("4x4 grid, first row and last column: separation M0 = {m0}");
    Ok(())
}
