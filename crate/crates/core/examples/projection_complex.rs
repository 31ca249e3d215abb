//! Projection axioms and the projection complex of axes in a free-group ball.
use coarsequot::coning::build_cone_off;
use coarsequot::graph::{Sampling, Subspace};
use coarsequot::groups::{cayley_ball, Presentation, Word, DEFAULT_BALL_CAP};
use coarsequot::lemmas::{lemma_suite, measured_ledger};
use coarsequot::projcplx::{build_projection_complex, geometric_family, r64_from_q, verify_projection_axioms};
use coarsequot::spinning::Line;

fn main() -> Result<(), coarsequot::Error> {
    let radius = 4;
    let ball = cayley_ball(&Presentation::free(2), radius, DEFAULT_BALL_CAP)?;
    let mut family = Vec::new();
    for key in ["ab", "aB", "abb", "Ab", "baab"] {
        let line = Line::from_key(&key.parse::<Word>()?)?;
        let reach = 2 * i64::from(radius) + 2;
        let pts = (-reach..=reach).filter_map(|t| ball.vertex_of(&line.point_at(t)));
        family.push(Subspace::new(&ball.graph, pts)?);
    }
    let lem = lemma_suite(&ball.graph, &family, &Sampling::Exhaustive, 0)?;
    let ledger = measured_ledger(lem.delta, lem.k, lem.m0)?;
    let theta = r64_from_q(&ledger.theta)?;
    let c = build_cone_off(&ball.graph, &family)?;
    let f = geometric_family(&c, theta)?;
    let rep = verify_projection_axioms(&f, theta);
    println!("{} axes in the radius-{radius} ball, θ = {theta}", f.len());
    println!("axioms pass: {} (max bounded {}, max BGI minimum {})", rep.passed(), rep.max_bounded, rep.max_bgi_min);
    let zhe = r64_from_q(&ledger.zhe)?;
    let p = build_projection_complex(&f, zhe)?;
    println!("projection complex at Ж = {zhe}: {} vertices, {} edges", p.graph.vertex_count(), p.graph.edge_count());
    Ok(())
}
