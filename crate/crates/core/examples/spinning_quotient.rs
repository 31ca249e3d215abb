//! The ℤ/⟨a⁵⟩ toy: spinning family, quotient graph, minimal lifts and
//! triangle lifting.
use coarsequot::constants::q;
use coarsequot::spinning::{build_quotient, certify_minimal, injectivity_report, lift_triangle, verify_spinning, SpinningInstance};

fn main() -> Result<(), coarsequot::Error> {
    let inst = SpinningInstance::z_toy(10, 5, q(3))?;
    let sp = verify_spinning(&inst, 10_000, 1)?;
    println!("spinning: min displacement {:?} against L = {} → {}", sp.min_observed, sp.l, sp.pass);
    let quot = build_quotient(&inst, 4)?;
    println!("X̂ has {} vertices, the quotient {} classes", inst.vertex_count(), quot.class_count());
    let inj = injectivity_report(&inst, &quot, &q(3));
    println!("injectivity: min displacement {:?}", inj.min_displacement);
    let m = certify_minimal(&inst, &quot, 0, 3)?;
    println!("classes 0 and 3: lifts {} and {} at distance {} = {}", inst.ball.element(m.x), inst.ball.element(m.y), m.d_hat, m.d_bar);
    let lift = lift_triangle(&inst, &quot, [3, 0, 4])?;
    println!("triangle (3, 0, 4): closed {}, bends {}, complexity {:?}", lift.closed, lift.bends, lift.complexity_trace);
    Ok(())
}
