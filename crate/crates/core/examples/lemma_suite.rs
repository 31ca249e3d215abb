//! Lemma-as-property checks on a hexagon chain with a family of hexagons.
use coarsequot::graph::{MetricGraph, Sampling, Subspace, Vertex};
use coarsequot::lemmas::lemma_suite;

fn main() -> Result<(), coarsequot::Error> {
    // hexagons glued along opposite edges, in a row
    let count = 6u32;
    let mut edges = Vec::new();
    let mut hexagons: Vec<Vec<Vertex>> = Vec::new();
    for i in 0..count {
        let (a, b) = (2 * i, 2 * i + 1);
        let (c, d) = (2 * i + 2, 2 * i + 3);
        let (top, bottom) = (2 * count + 2 + 2 * i, 2 * count + 3 + 2 * i);
        if i == 0 {
            edges.push((a, b));
        }
        edges.extend([(a, top), (top, c), (b, bottom), (bottom, d), (c, d)]);
        hexagons.push(vec![a, b, c, d, top, bottom]);
    }
    let n = 4 * count + 2;
    let g = MetricGraph::from_edges(n as usize, edges)?;
    let family: Vec<Subspace> =
        hexagons.iter().step_by(2).map(|h| Subspace::new(&g, h.iter().copied())).collect::<Result<_, _>>()?;
    let r = lemma_suite(&g, &family, &Sampling::Exhaustive, 3)?;
    println!("δ = {}, K = {}, M0 = {}, D = {}", r.delta, r.k, r.m0, r.d);
    for b in [&r.lipschitz, &r.bounded].into_iter().chain(r.separation.iter()) {
        println!("  {:<28} {:<14} bound {:>6}  max {:>3}  checked {}", b.name, b.formula, b.bound, b.max_observed, b.checked);
    }
    println!("  strong BGI violations: {}", r.strong_bgi.violations.len());
    println!("  close in X̂: {:?}", r.close_in_x.iter().map(|c| (c.t, c.worst, c.bound)).collect::<Vec<_>>());
    println!("all lemmas hold: {}", r.pass);
    Ok(())
}
