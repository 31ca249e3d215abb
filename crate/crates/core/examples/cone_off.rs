//! Coning off arcs of a cycle, de-electrifying a geodesic, and the
//! Spriano constant.
use coarsequot::coning::{build_cone_off, check_spriano, de_electrify};
use coarsequot::graph::{MetricGraph, Sampling, Subspace};

fn main() -> Result<(), coarsequot::Error> {
    let g = MetricGraph::from_edges(16, (0..16).map(|i| (i, (i + 1) % 16)))?;
    let arcs = [Subspace::new(&g, 0..6)?, Subspace::new(&g, 8..12)?];
    let c = build_cone_off(&g, &arcs)?;
    println!("cone-off: {} vertices, diameter {} (base diameter {})", c.graph.vertex_count(), c.graph.diameter(), g.diameter());
    let gamma = c.graph.geodesic(0, 5)?;
    println!("geodesic 0 → 5 in the cone-off: {:?}", gamma.0);
    let de = de_electrify(&c, &gamma)?;
    println!("de-electrified: {:?} (base length {})", de.path().0, de.base_length());
    let d = check_spriano(&c, &Sampling::Exhaustive)?;
    println!("Spriano constant D = {} (exact {})", d.value, d.exact);
    Ok(())
}
