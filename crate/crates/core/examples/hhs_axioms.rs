//! Hierarchy axioms on ℤ * ℤ and on its quotient by a relator.
use coarsequot::constants::q;
use coarsequot::hhs::{build_quotient_structure, check_quotient_bounds, peripheral_audit, spinning_for, verify_hhs_axioms, AxiomBounds, HhsStructure};

fn main() -> Result<(), coarsequot::Error> {
    let h = HhsStructure::free_product(&[1, 1], 4)?;
    let r = verify_hhs_axioms(&h, &AxiomBounds::uniform(&h.e), 300, 1)?;
    println!("{}: {} domains, E = {}", h.name, h.domains.len(), h.e);
    for a in &r.results {
        println!("  {:<40} measured {:>4} bound {:>4} {}", a.axiom, a.measured, a.bound, if a.pass { "ok" } else { "FAIL" });
    }
    let relator = "AAAbbbAbbabaaBBaaaBBAAbbAbAbbABabA".parse()?;
    let inst = spinning_for(&h, &relator, q(5), None)?;
    let qh = build_quotient_structure(&h, inst, 4, 1)?;
    let b = check_quotient_bounds(&qh, 300, 1)?;
    println!("quotient: ℵ = {}, ℶ = {}", qh.aleph, qh.beth);
    for c in &b.checks {
        println!("  {:<36} {:<32} max {:>3} ≤ {:>4} over {}", c.name, c.formula, c.max_observed, c.bound, c.checked);
    }
    let p = peripheral_audit(&h, &qh.quot, &relator)?;
    println!("peripheral: {} factor elements, {} in N, min translation {:?}", p.factor_elements, p.in_normal_closure, p.min_translation);
    Ok(())
}
