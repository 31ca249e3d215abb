//! Small cancellation and Dehn's algorithm on a one-relator group.
use coarsequot::groups::{cayley_ball, Presentation, Word, DEFAULT_BALL_CAP};

fn main() -> Result<(), coarsequot::Error> {
    let r: Word = "baBBBBBaBBabaaaaBABBBAABBAbbaBBaBAA".parse()?;
    let p = Presentation::small_cancellation(2, vec![r.clone()])?;
    let ratio = p.piece_ratio()?;
    println!("relator of length {}, piece ratio {} (C'(1/6): {})", r.len(), ratio.ratio, ratio.is_small_cancellation());
    let dehn = p.dehn()?;
    let conj: Word = "ab".parse::<Word>()?.mul(&r).mul(&"BA".parse()?);
    println!("r trivial: {}, ab·r·BA trivial: {}", dehn.is_trivial(&r), dehn.is_trivial(&conj));
    println!("half of r trivial: {}", dehn.is_trivial(&r.prefix(r.len() / 2)));
    let long: Word = r.prefix(20).mul(&r.suffix_from(20).inverse());
    println!("normal form of a 20-letter prefix times an inverted suffix: {}", p.normal_form(&long)?);
    let ball = cayley_ball(&p, 5, DEFAULT_BALL_CAP)?;
    println!("radius-5 ball: {} elements", ball.vertex_count());
    Ok(())
}
