//! The random-quotient pipeline for one seed on a radius-5 ball.
use coarsequot::experiment::{run_pipeline, ExperimentConfig};

fn main() {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(7);
    let cfg = ExperimentConfig { ball_radius: 5, triangles: 10, ..Default::default() };
    let r = run_pipeline(&cfg, seed);
    if let Some(w) = &r.walk {
        println!("seed {seed}: relator {} (length {}), drift {:.4}", w.relator, w.relator_length, w.drift_mean);
    }
    for c in &r.checks {
        println!("  {:<18} {:<50} {}{}", format!("[{}]", c.stage), c.name, if c.pass { "ok" } else { "FAIL" }, if c.hard { "" } else { " (soft)" });
    }
    if let Some(f) = &r.failure {
        println!("stopped at {}: {}", f.stage, f.error);
    }
    println!("pass: {}", r.pass);
}
