use std::collections::HashMap;

use super::presentation::{Dehn, GroupKind, Presentation};
use super::word::Word;
use crate::error::{Error, Result};
use crate::graph::{MetricGraph, Vertex};

/// Default vertex cap for ball construction.
pub const DEFAULT_BALL_CAP: usize = 200_000;

/// Ball of radius ρ about the identity in a Cayley graph.
#[derive(Clone, Debug)]
pub struct CayleyBall {
    pub radius: u32,
    pub graph: MetricGraph,
    /// shortlex-least representative word of each vertex
    pub elements: Vec<Word>,
    /// every enumerated word, merged or not, to its vertex
    index: HashMap<Word, Vertex>,
    pub presentation: Presentation,
    dehn: Option<Dehn>,
}

/// Freely reduced words of length at most `radius`, in shortlex order.
pub fn free_words(p: &Presentation, radius: u32, cap: usize) -> Result<Vec<Word>> {
    let letters = p.letters();
    let mut out = vec![Word::identity()];
    let mut start = 0;
    for _ in 0..radius {
        let end = out.len();
        for i in start..end {
            for &l in &letters {
                let w = &out[i];
                if w.letters().last() == Some(&-l) {
                    continue;
                }
                let mut next = w.clone();
                next.push(l);
                out.push(next);
                if out.len() > cap {
                    return Err(Error::BudgetExceeded(format!("Cayley ball exceeds {cap} words")));
                }
            }
        }
        start = end;
    }
    Ok(out)
}

struct Classes {
    parent: Vec<usize>,
}

impl Classes {
    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Keeps the smaller index as root, which is the shortlex-least word.
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

/// Builds the ball; for quotients, words equal in the group are merged
/// using the word-problem oracle.
pub fn cayley_ball(p: &Presentation, radius: u32, cap: usize) -> Result<CayleyBall> {
    if radius == 0 {
        return Err(Error::Invalid("ball radius must be at least 1".into()));
    }
    let mut words = free_words(p, radius + 1, cap.saturating_mul(4).max(cap))?;
    let inner = words.iter().take_while(|w| w.len() <= radius as usize).count();
    let mut classes = Classes { parent: (0..words.len()).collect() };
    if p.kind == GroupKind::SmallCancellation {
        let dehn = p.dehn()?;
        let min_len = dehn.min_relator_len();
        // nontrivial elements of the normal closure have free length ≥ min_len
        if 2 * radius as usize + 1 >= min_len {
            for i in 0..inner {
                for j in i + 1..words.len() {
                    let d = words[i].distance(&words[j]);
                    if d >= min_len && dehn.is_trivial(&words[i].inverse().mul(&words[j])) {
                        classes.union(i, j);
                    }
                }
            }
        }
    }
    // vertices: classes with a representative of length ≤ radius
    let mut vertex_of_root: HashMap<usize, Vertex> = HashMap::new();
    let mut elements = Vec::new();
    for i in 0..inner {
        let r = classes.find(i);
        if r == i {
            vertex_of_root.insert(i, elements.len() as Vertex);
            elements.push(words[i].clone());
        }
    }
    if elements.len() > cap {
        return Err(Error::BudgetExceeded(format!("Cayley ball has {} vertices (cap {cap})", elements.len())));
    }
    let mut index = HashMap::with_capacity(words.len());
    for i in 0..words.len() {
        let r = classes.find(i);
        if let Some(&v) = vertex_of_root.get(&r) {
            index.insert(words[i].clone(), v);
        }
    }
    let letters = p.letters();
    let mut edges = Vec::new();
    for (v, w) in elements.iter().enumerate() {
        for &l in &letters {
            let mut next = w.clone();
            next.push(l);
            if let Some(&u) = index.get(&next) {
                if (v as Vertex) < u {
                    edges.push((v as Vertex, u));
                }
            }
        }
    }
    words.clear();
    let labels = elements.iter().map(Word::to_string).collect();
    let graph = MetricGraph::from_edges(elements.len(), edges)?.with_labels(labels)?;
    let dehn = if p.kind == GroupKind::SmallCancellation { Some(p.dehn()?) } else { None };
    Ok(CayleyBall { radius, graph, elements, index, presentation: p.clone(), dehn })
}

impl CayleyBall {
    pub fn origin(&self) -> Vertex {
        0
    }

    pub fn vertex_count(&self) -> usize {
        self.elements.len()
    }

    pub fn element(&self, v: Vertex) -> &Word {
        &self.elements[v as usize]
    }

    /// Vertex of a word, or `None` when it lies outside the ball.
    pub fn vertex_of(&self, w: &Word) -> Option<Vertex> {
        if let Some(&v) = self.index.get(w) {
            return Some(v);
        }
        let nf = self.dehn.as_ref()?.reduce(w);
        self.index.get(&nf).copied()
    }

    /// Left action `g · element(v)`; `None` marks OUT_OF_BALL.
    pub fn act(&self, g: &Word, v: Vertex) -> Option<Vertex> {
        self.vertex_of(&g.mul(self.element(v)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn free_ball_sizes() {
        let b = cayley_ball(&Presentation::free(2), 2, DEFAULT_BALL_CAP).unwrap();
        assert_eq!(b.vertex_count(), 17);
        assert_eq!(b.graph.edge_count(), 16);
        let z = cayley_ball(&Presentation::free(1), 3, DEFAULT_BALL_CAP).unwrap();
        assert_eq!(z.vertex_count(), 7);
        assert_eq!(z.graph.diameter(), 6);
    }

    #[test]
    fn action_and_truncation() {
        let b = cayley_ball(&Presentation::free(2), 3, DEFAULT_BALL_CAP).unwrap();
        let o = b.origin();
        assert_eq!(b.act(&Word::identity(), 5), Some(5));
        assert_eq!(b.element(b.act(&w("a"), o).unwrap()), &w("a"));
        let v = b.vertex_of(&w("abb")).unwrap();
        assert_eq!(b.act(&w("aab"), v), None);
        for v in 0..b.vertex_count() as Vertex {
            assert_eq!(b.graph.distance(o, v).unwrap() as usize, b.element(v).len());
        }
    }

    #[test]
    fn cyclic_quotient_ball_is_a_cycle() {
        let z5 = Presentation::small_cancellation(1, vec![w("aaaaa")]).unwrap();
        let b = cayley_ball(&z5, 3, DEFAULT_BALL_CAP).unwrap();
        assert_eq!(b.vertex_count(), 5);
        assert_eq!(b.graph.edge_count(), 5);
    }
}
