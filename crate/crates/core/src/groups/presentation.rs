use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::word::{Letter, Word};
use crate::constants::{q, q_frac, Q};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupKind {
    Free,
    /// Free product of free groups of the given ranks; generators are
    /// assigned to factors in order.
    FreeProduct,
    SmallCancellation,
}

/// A finite presentation with a solvable word problem at desk scale.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Presentation {
    pub rank: u8,
    #[serde(default)]
    pub relators: Vec<Word>,
    pub kind: GroupKind,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub factors: Vec<u8>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PieceRatio {
    pub max_piece: usize,
    pub min_relator: usize,
    #[serde(with = "crate::constants::qserde")]
    pub ratio: Q,
    /// Some relator has length at most one.
    pub degenerate: bool,
}

impl PieceRatio {
    pub fn is_small_cancellation(&self) -> bool {
        !self.degenerate && self.ratio < q_frac(1, 6)
    }
}

/// One Dehn move: the current word equals `conjugator · relator · conjugator⁻¹`
/// times the next word.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DehnStep {
    pub conjugator: Word,
    pub relator: Word,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DehnTrace {
    pub steps: Vec<DehnStep>,
    pub residue: Word,
}

impl Presentation {
    pub fn free(rank: u8) -> Self {
        Presentation { rank, relators: Vec::new(), kind: GroupKind::Free, factors: Vec::new() }
    }

    pub fn free_product(factors: Vec<u8>) -> Result<Self> {
        if factors.len() < 2 || factors.contains(&0) {
            return Err(Error::Invalid(format!("free product needs at least two nontrivial factors, got {factors:?}")));
        }
        let rank = factors.iter().sum();
        Ok(Presentation { rank, relators: Vec::new(), kind: GroupKind::FreeProduct, factors })
    }

    /// One-or-more relator quotient; relators are stored cyclically reduced.
    pub fn small_cancellation(rank: u8, relators: Vec<Word>) -> Result<Self> {
        let relators: Vec<Word> = relators.iter().map(|r| r.cyclic_reduction().1).collect();
        if relators.is_empty() || relators.iter().any(|r| r.is_empty()) {
            return Err(Error::Invalid("quotient needs nonempty relators".into()));
        }
        if let Some(r) = relators.iter().find(|r| r.max_generator() > rank) {
            return Err(Error::Invalid(format!("relator {r} uses a generator beyond rank {rank}")));
        }
        Ok(Presentation { rank, relators, kind: GroupKind::SmallCancellation, factors: Vec::new() })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let p: Presentation = serde_json::from_str(text).map_err(|e| Error::parse(e.line(), e.to_string()))?;
        match p.kind {
            GroupKind::Free => Ok(Presentation::free(p.rank)),
            GroupKind::FreeProduct => {
                let f = if p.factors.is_empty() { vec![1; p.rank as usize] } else { p.factors };
                Presentation::free_product(f)
            }
            GroupKind::SmallCancellation => Presentation::small_cancellation(p.rank, p.relators),
        }
    }

    /// Generators and their inverses in the fixed order `a, A, b, B, ...`.
    pub fn letters(&self) -> Vec<Letter> {
        (1..=self.rank as Letter).flat_map(|g| [g, -g]).collect()
    }

    /// Factor index of a generator for free products.
    pub fn factor_of(&self, l: Letter) -> usize {
        let g = l.unsigned_abs();
        let mut acc = 0u8;
        for (i, &r) in self.factors.iter().enumerate() {
            acc += r;
            if g <= acc {
                return i;
            }
        }
        0
    }

    pub fn is_free(&self) -> bool {
        self.kind != GroupKind::SmallCancellation
    }

    /// `⟨a | aᵐ⟩` is handled by exponent sums rather than Dehn's algorithm.
    fn cyclic_order(&self) -> Option<i64> {
        if self.rank == 1 && self.relators.len() == 1 {
            Some(self.relators[0].len() as i64)
        } else {
            None
        }
    }

    pub fn shortest_relator(&self) -> usize {
        self.relators.iter().map(Word::len).min().unwrap_or(0)
    }

    pub fn piece_ratio(&self) -> Result<PieceRatio> {
        if self.relators.is_empty() {
            return Err(Error::Invalid("piece ratio of a presentation without relators".into()));
        }
        let min_relator = self.shortest_relator();
        let degenerate = min_relator <= 1;
        // every position of every cyclic relator, both orientations
        let mut rotations: Vec<(&[Letter], usize)> = Vec::new();
        let owned: Vec<(Vec<Letter>, usize)> = self
            .relators
            .iter()
            .flat_map(|r| [r.clone(), r.inverse()])
            .flat_map(|r| {
                let n = r.len();
                (0..n).map(move |i| (r.rotate(i).letters().to_vec(), n))
            })
            .collect();
        rotations.extend(owned.iter().map(|(v, n)| (v.as_slice(), *n)));
        let mut max_piece = 0;
        for i in 0..rotations.len() {
            for j in i + 1..rotations.len() {
                let (a, na) = rotations[i];
                let (b, nb) = rotations[j];
                let l = a.iter().zip(b).take_while(|(x, y)| x == y).count();
                max_piece = max_piece.max(l.min(na.min(nb) - 1));
            }
        }
        let ratio = if degenerate { q(0) } else { q_frac(max_piece as i64, min_relator as i64) };
        Ok(PieceRatio { max_piece, min_relator, ratio, degenerate })
    }

    fn require_small_cancellation(&self) -> Result<()> {
        if self.cyclic_order().is_some() {
            return Ok(());
        }
        let pr = self.piece_ratio()?;
        if !pr.is_small_cancellation() {
            return Err(Error::NotSmallCancellation(format!(
                "piece ratio {}/{}",
                pr.max_piece, pr.min_relator
            )));
        }
        Ok(())
    }

    /// A Dehn reducer for this presentation (only for quotients).
    pub fn dehn(&self) -> Result<Dehn> {
        if self.kind != GroupKind::SmallCancellation {
            return Err(Error::NotApplicable("Dehn reduction in a free group".into()));
        }
        self.require_small_cancellation()?;
        Ok(Dehn::new(&self.relators, self.cyclic_order()))
    }

    /// Normal form of `w`: free reduction, then Dehn reduction for quotients.
    pub fn normal_form(&self, w: &Word) -> Result<Word> {
        match self.kind {
            GroupKind::SmallCancellation => Ok(self.dehn()?.reduce(w)),
            _ => Ok(w.clone()),
        }
    }

    pub fn multiply(&self, a: &Word, b: &Word) -> Result<Word> {
        self.normal_form(&a.mul(b))
    }

    pub fn is_trivial(&self, w: &Word) -> Result<bool> {
        match self.kind {
            GroupKind::SmallCancellation => Ok(self.dehn()?.is_trivial(w)),
            _ => Ok(w.is_identity()),
        }
    }

    pub fn equal(&self, a: &Word, b: &Word) -> Result<bool> {
        self.is_trivial(&a.inverse().mul(b))
    }
}

/// Dehn's algorithm over the symmetrized relator set.
#[derive(Clone, Debug)]
pub struct Dehn {
    /// cyclic conjugates of every relator and its inverse, by first letter
    by_first: HashMap<Letter, Vec<Vec<Letter>>>,
    cyclic: Option<i64>,
    min_len: usize,
}

impl Dehn {
    fn new(relators: &[Word], cyclic: Option<i64>) -> Self {
        let mut by_first: HashMap<Letter, Vec<Vec<Letter>>> = HashMap::new();
        for r in relators.iter().flat_map(|r| [r.clone(), r.inverse()]) {
            for i in 0..r.len() {
                let rot = r.rotate(i).letters().to_vec();
                let list = by_first.entry(rot[0]).or_default();
                if !list.contains(&rot) {
                    list.push(rot);
                }
            }
        }
        let min_len = relators.iter().map(Word::len).min().unwrap_or(0);
        Dehn { by_first, cyclic, min_len }
    }

    /// Length of the shortest relator; nontrivial elements of the normal
    /// closure have at least this free length.
    pub fn min_relator_len(&self) -> usize {
        self.min_len
    }

    /// Longest relator prefix beating half its length at position `i`.
    fn best_move(&self, w: &[Letter], i: usize) -> Option<(usize, &[Letter])> {
        let mut best: Option<(usize, &[Letter])> = None;
        for r in self.by_first.get(&w[i])? {
            let m = r.iter().zip(&w[i..]).take_while(|(a, b)| a == b).count();
            if 2 * m > r.len() && best.is_none_or(|(bm, _)| m > bm) {
                best = Some((m, r.as_slice()));
            }
        }
        best
    }

    pub fn trace(&self, w: &Word) -> DehnTrace {
        if let Some(m) = self.cyclic {
            let k = w.letters().iter().map(|&l| i64::from(l.signum())).sum::<i64>().rem_euclid(m);
            let k = if 2 * k > m { k - m } else { k };
            return DehnTrace { steps: Vec::new(), residue: Word::generator(1).pow(k) };
        }
        let mut cur = w.clone();
        let mut steps = Vec::new();
        'outer: loop {
            let letters = cur.letters().to_vec();
            for i in 0..letters.len() {
                if let Some((m, r)) = self.best_move(&letters, i) {
                    let conjugator = Word::from_raw(letters[..i].to_vec());
                    let relator = Word::from_raw(r.to_vec());
                    let tail = Word::from_raw(r[m..].to_vec()).inverse();
                    let next = conjugator.mul(&tail).mul(&Word::from_raw(letters[i + m..].to_vec()));
                    steps.push(DehnStep { conjugator, relator });
                    cur = next;
                    continue 'outer;
                }
            }
            break;
        }
        DehnTrace { steps, residue: cur }
    }

    pub fn reduce(&self, w: &Word) -> Word {
        self.trace(w).residue
    }

    pub fn is_trivial(&self, w: &Word) -> bool {
        if self.cyclic.is_none() && !w.is_empty() && w.len() < self.min_len {
            return false;
        }
        self.reduce(w).is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    /// A C'(1/6) relator found by scanning random words.
    pub(crate) const SC_RELATOR: &str = "baBBBBBaBBabaaaaBABBBAABBAbbaBBaBAA";

    #[test]
    fn free_multiplication() {
        let f2 = Presentation::free(2);
        assert_eq!(f2.multiply(&w("ab"), &w("Ba")).unwrap(), w("aa"));
        assert!(f2.multiply(&w("a"), &w("A")).unwrap().is_identity());
    }

    #[test]
    fn relator_is_trivial_in_quotient() {
        let p = Presentation::small_cancellation(2, vec![w(SC_RELATOR)]).unwrap();
        assert!(p.piece_ratio().unwrap().is_small_cancellation());
        let r = w(SC_RELATOR);
        assert!(p.is_trivial(&r).unwrap());
        assert!(p.is_trivial(&r.conjugate_by(&w("ab")).mul(&r.inverse())).unwrap());
        assert!(!p.is_trivial(&w("ab")).unwrap());
        let trace = p.dehn().unwrap().trace(&r.conjugate_by(&w("bA")));
        assert!(trace.residue.is_identity());
        assert!(!trace.steps.is_empty());
    }

    #[test]
    fn powers_have_huge_pieces() {
        let p = Presentation::small_cancellation(1, vec![w("aaaaaaaaaa")]).unwrap();
        let pr = p.piece_ratio().unwrap();
        assert!(pr.ratio >= q_frac(9, 10));
        let one = Presentation::small_cancellation(2, vec![w("a")]).unwrap();
        let pr = one.piece_ratio().unwrap();
        assert!(pr.degenerate && pr.ratio == q(0));
        let bad = Presentation::small_cancellation(2, vec![w("abab")]).unwrap();
        assert!(matches!(bad.dehn(), Err(Error::NotSmallCancellation(_))));
    }

    #[test]
    fn cyclic_group_uses_exponent_sums() {
        let z5 = Presentation::small_cancellation(1, vec![w("aaaaa")]).unwrap();
        assert!(z5.equal(&w("aaa"), &w("AA")).unwrap());
        assert_eq!(z5.normal_form(&w("aaaa")).unwrap(), w("A"));
    }

    #[test]
    fn presentation_json() {
        let p = Presentation::from_json(r#"{"rank":2,"relators":["abAB"],"kind":"small_cancellation"}"#).unwrap();
        assert_eq!(p.relators, vec![w("abAB")]);
        let fp = Presentation::from_json(r#"{"rank":2,"kind":"free_product","factors":[1,1]}"#).unwrap();
        assert_eq!(fp.factor_of(-2), 1);
        let back: Presentation = serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
        assert_eq!(back, p);
    }
}
