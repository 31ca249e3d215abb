//! Drift, translation length, quasi-axes and a small-cancellation relator
//! from random walks on F₂.
use coarsequot::constants::q;
use coarsequot::groups::{cayley_ball, Presentation, DEFAULT_BALL_CAP};
use coarsequot::randwalk::{build_quasi_axis, estimate_drift, sample_small_cancellation_relator, translation_length, walk_endpoint, Measure};

fn main() -> Result<(), coarsequot::Error> {
    let p = Presentation::free(2);
    let m = Measure::uniform(&p);
    for n in [100, 500, 2000] {
        let d = estimate_drift(&p, &m, n, 200, 1)?;
        println!("n = {n:>4}: drift {:.4} ± {:.4}", d.mean, d.stderr);
    }
    let w = walk_endpoint(&p, &m, 40, 3, 0)?;
    println!("walk of length 40: {w} (|w| = {}, τ = {})", w.len(), translation_length(&p, &w, 4)?);
    let ball = cayley_ball(&p, 6, DEFAULT_BALL_CAP)?;
    let axis = build_quasi_axis(&ball, &"abbA".parse()?, &q(0), 2)?;
    println!("axis of abbA: conjugator {}, quasiconvexity {}", axis.y, axis.quasiconvexity);
    let draw = sample_small_cancellation_relator(2, &m, 60, 7, 2_000_000, 1000)?;
    println!("C'(1/6) relator from a length-60 walk: {} (rejected {})", draw.relator, draw.rejections);
    Ok(())
}
