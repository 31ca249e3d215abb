//! The constants ledger: worked base, a measured base and the τ function.
use coarsequot::constants::{derive, q, q_to_string, BaseConstants};

fn main() -> Result<(), coarsequot::Error> {
    let worked = derive(&BaseConstants::default())?;
    println!("worked base δ = K = M0 = R = D = 0:");
    for name in ["J", "B", "C", "theta", "Theta", "Zhe", "L_min"] {
        println!("  {name:>6} = {}", q_to_string(&worked.get(name).expect("known scalar")));
    }
    println!("  τ(1000) = {}", q_to_string(&worked.tau(&q(1000))));
    let measured = derive(&BaseConstants { delta: q(1), k: q(2), m0: q(17), e: q(1), ..Default::default() })?;
    println!("\nδ = 1, K = 2, M0 = 17, E = 1:");
    print!("{}", measured.to_markdown());
    Ok(())
}
