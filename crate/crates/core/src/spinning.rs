//! Spinning families on free-group balls: the translates of a relator axis,
//! elements of the normal closure as syllable products, the quotient X̄ =
//! X̂/N, shortening pairs, bending, triangle lifting and the quotient audits.
//!
//! The ambient space is the Cayley tree of a free group, so closest-point
//! projections onto family lines are computed exactly from words.

use std::collections::{BTreeMap, HashMap, VecDeque};

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::coning::{Cone, ConeOff, ConeOwner};
use crate::constants::{q, q_frac, qserde, DerivedConstants, Q};
use crate::error::{Error, Result};
use crate::graph::{sides_slimness, MetricGraph, Path, Subspace, Vertex, UNREACHABLE};
use crate::groups::{free_words, CayleyBall, Letter, Presentation, Word};
use crate::randwalk::{in_cyclic_subgroup, trial_rng};

/// Shortest element of the coset `g⟨l⟩`.
pub fn coset_rep(g: &Word, l: Letter) -> Word {
    let mut v = g.letters().to_vec();
    while v.last().is_some_and(|&x| x == l || x == -l) {
        v.pop();
    }
    Word::new(v)
}

/// Identity of a cone vertex, stable under the group action.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ConeKey {
    /// the axis of this conjugate of the relator
    Line(Word),
    /// the coset `rep·⟨letter⟩`, with `rep` shortest
    Coset { letter: Letter, rep: Word },
}

impl ConeKey {
    pub fn act(&self, g: &Word) -> ConeKey {
        match self {
            ConeKey::Line(k) => ConeKey::Line(g.mul(k).mul(&g.inverse())),
            ConeKey::Coset { letter, rep } => ConeKey::Coset { letter: *letter, rep: coset_rep(&g.mul(rep), *letter) },
        }
    }
}

/// A point of X̂ described by words, possibly outside the ball.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Point {
    Base(Word),
    Cone(ConeKey),
}

impl Point {
    pub fn act(&self, g: &Word) -> Point {
        match self {
            Point::Base(w) => Point::Base(g.mul(w)),
            Point::Cone(k) => Point::Cone(k.act(g)),
        }
    }
}

/// The axis `anchor · axis(dir)` of `key = anchor · dir · anchor⁻¹`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Line {
    pub key: Word,
    /// closest point to the identity
    pub anchor: Word,
    /// cyclically reduced translation word
    pub dir: Word,
    /// ball vertices on the line, by increasing position
    pub members: Vec<Vertex>,
    /// position of `members[0]`
    pub first_position: i64,
}

fn periodic_lcp(u: &[Letter], period: &[Letter]) -> usize {
    let n = period.len();
    u.iter().enumerate().take_while(|(i, &l)| l == period[i % n]).count()
}

impl Line {
    /// The axis of a nontrivial element, without ball data.
    pub fn from_key(key: &Word) -> Result<Line> {
        let (anchor, dir) = key.cyclic_reduction();
        if dir.is_empty() {
            return Err(Error::Invalid("the identity has no axis".into()));
        }
        Ok(Line { key: key.clone(), anchor, dir, members: Vec::new(), first_position: 0 })
    }

    /// Signed position of the closest point to `z`.
    pub fn position(&self, z: &Word) -> i64 {
        let u = self.anchor.inverse().mul(z);
        let f = periodic_lcp(u.letters(), self.dir.letters());
        if f > 0 {
            return f as i64;
        }
        -(periodic_lcp(u.letters(), self.dir.inverse().letters()) as i64)
    }

    pub fn point_at(&self, t: i64) -> Word {
        let period = if t >= 0 { self.dir.clone() } else { self.dir.inverse() };
        let n = period.len();
        let mut w = self.anchor.clone();
        for i in 0..t.unsigned_abs() as usize {
            w.push(period.letters()[i % n]);
        }
        w
    }

    pub fn contains(&self, z: &Word) -> bool {
        self.point_at(self.position(z)) == *z
    }

    /// Positions spanned by the projection of another line.
    pub fn projection_span(&self, other: &Line) -> (i64, i64) {
        let far = (self.anchor.len() + other.anchor.len() + 2 * (self.dir.len() + other.dir.len()) + 2) as i64;
        let a = self.position(&other.point_at(far));
        let b = self.position(&other.point_at(-far));
        (a.min(b), a.max(b))
    }

    pub fn translation(&self) -> usize {
        self.dir.len()
    }
}

/// Element of the normal closure as a product of powers of relator
/// conjugates, one syllable per maximal run with the same key.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NormalElement {
    pub syllables: Vec<(Word, i64)>,
}

impl NormalElement {
    pub fn identity() -> Self {
        NormalElement::default()
    }

    pub fn generator(key: Word, exp: i64) -> Self {
        NormalElement::identity().left_mul(&key, exp)
    }

    /// Syllable count: the number of free-product factors used.
    pub fn complexity(&self) -> usize {
        self.syllables.len()
    }

    pub fn is_identity(&self) -> bool {
        self.syllables.is_empty()
    }

    /// `key^exp · self`.
    pub fn left_mul(&self, key: &Word, exp: i64) -> Self {
        let mut s = self.syllables.clone();
        if exp == 0 {
            return NormalElement { syllables: s };
        }
        match s.first_mut() {
            Some((k, e)) if k == key => {
                *e += exp;
                if *e == 0 {
                    s.remove(0);
                }
            }
            _ => s.insert(0, (key.clone(), exp)),
        }
        NormalElement { syllables: s }
    }

    /// `self · other`.
    pub fn mul(&self, other: &NormalElement) -> Self {
        let mut out = other.clone();
        for (k, e) in self.syllables.iter().rev() {
            out = out.left_mul(k, *e);
        }
        out
    }

    pub fn inverse(&self) -> Self {
        NormalElement { syllables: self.syllables.iter().rev().map(|(k, e)| (k.clone(), -e)).collect() }
    }

    /// The group element, freely reduced.
    pub fn word(&self) -> Word {
        self.syllables.iter().fold(Word::identity(), |acc, (k, e)| acc.mul(&k.pow(*e)))
    }
}

/// A spinning family of relator axes on a ball of a free group.
#[derive(Clone, Debug)]
pub struct SpinningInstance {
    pub ball: CayleyBall,
    /// cyclically reduced relator; keys are its conjugates
    pub relator: Word,
    pub lines: Vec<Line>,
    /// cone identities aligned with `cone.cones`
    pub cone_keys: Vec<ConeKey>,
    cone_index: HashMap<ConeKey, usize>,
    /// number of leading non-family cones
    pub domain_cones: usize,
    pub cone: ConeOff,
    pub l: Q,
    pub family_radius: u32,
}

impl SpinningInstance {
    /// Family of all translates of the relator axis meeting the ball in at
    /// least two vertices, with anchors of length at most `family_radius`
    /// (default and maximum: ball radius − 1).
    pub fn new(ball: CayleyBall, relator: &Word, l: Q, family_radius: Option<u32>) -> Result<Self> {
        let graph = ball.graph.clone();
        Self::with_domains(ball, graph, relator, l, family_radius, Vec::new())
    }

    /// As [`SpinningInstance::new`] over a chosen base graph on the ball's
    /// vertices, with extra cones placed before the family cones.
    pub fn with_domains(
        ball: CayleyBall,
        x: MetricGraph,
        relator: &Word,
        l: Q,
        family_radius: Option<u32>,
        domains: Vec<(ConeKey, Subspace)>,
    ) -> Result<Self> {
        if !ball.presentation.is_free() {
            return Err(Error::NotApplicable("spinning families need a free-group ball".into()));
        }
        if x.vertex_count() != ball.vertex_count() {
            return Err(Error::Invalid("base graph and ball differ in size".into()));
        }
        let c = relator.cyclic_reduction().1;
        if c.is_empty() {
            return Err(Error::Invalid("trivial relator".into()));
        }
        let rho = ball.radius;
        let fr = family_radius.unwrap_or(rho - 1).min(rho - 1);
        let mut rotations: Vec<Word> = (0..c.len()).map(|i| c.rotate(i)).collect();
        rotations.dedup();
        let mut seen_rot = std::collections::HashSet::new();
        rotations.retain(|r| seen_rot.insert(r.clone()));
        let mut lines = Vec::new();
        for u in ball.elements.iter().filter(|u| u.len() <= fr as usize) {
            for d in &rotations {
                if let Some(&last) = u.letters().last() {
                    if last == -d.letters()[0] || last == *d.letters().last().expect("nonempty") {
                        continue;
                    }
                }
                let key = u.mul(d).mul(&u.inverse());
                let mut line = Line { key, anchor: u.clone(), dir: d.clone(), members: Vec::new(), first_position: 0 };
                let reach = (rho as usize - u.len()) as i64;
                line.first_position = -reach;
                line.members = (-reach..=reach)
                    .map(|t| ball.vertex_of(&line.point_at(t)).expect("line point inside the ball"))
                    .collect();
                lines.push(line);
            }
        }
        let mut cones = Vec::new();
        let mut cone_keys = Vec::new();
        let domain_cones = domains.len();
        for (i, (k, s)) in domains.into_iter().enumerate() {
            cones.push(Cone { owner: ConeOwner::Domain(i), members: s });
            cone_keys.push(k);
        }
        for (i, line) in lines.iter().enumerate() {
            cones.push(Cone { owner: ConeOwner::Family(i), members: Subspace::new(&x, line.members.iter().copied())? });
            cone_keys.push(ConeKey::Line(line.key.clone()));
        }
        let cone = ConeOff::from_cones(&x, cones)?;
        let cone_index = cone_keys.iter().enumerate().map(|(i, k)| (k.clone(), i)).collect();
        Ok(SpinningInstance { ball, relator: c, lines, cone_keys, cone_index, domain_cones, cone, l, family_radius: fr })
    }

    /// Cyclic group ℤ as the ball of radius `radius` in F₁, with the single
    /// line of `a^m`.
    pub fn z_toy(radius: u32, m: usize, l: Q) -> Result<Self> {
        let ball = crate::groups::cayley_ball(&Presentation::free(1), radius, crate::groups::DEFAULT_BALL_CAP)?;
        Self::new(ball, &Word::generator(1).pow(m as i64), l, None)
    }

    pub fn rank(&self) -> u8 {
        self.ball.presentation.rank
    }

    pub fn vertex_count(&self) -> usize {
        self.cone.graph.vertex_count()
    }

    /// Cone vertex of family line `i`.
    pub fn line_vertex(&self, i: usize) -> Vertex {
        self.cone.cone_vertex(self.domain_cones + i)
    }

    /// Family line index of a vertex of X̂, if it is a line cone.
    pub fn line_of(&self, v: Vertex) -> Option<usize> {
        self.cone.cone_index(v).and_then(|c| c.checked_sub(self.domain_cones))
    }

    pub fn line_by_key(&self, key: &Word) -> Option<usize> {
        self.cone_index.get(&ConeKey::Line(key.clone())).map(|c| c - self.domain_cones)
    }

    pub fn point(&self, v: Vertex) -> Point {
        match self.cone.cone_index(v) {
            Some(c) => Point::Cone(self.cone_keys[c].clone()),
            None => Point::Base(self.ball.element(v).clone()),
        }
    }

    /// Vertex of a point, or `None` outside the ball or the family.
    pub fn vertex(&self, p: &Point) -> Option<Vertex> {
        match p {
            Point::Base(w) => self.ball.vertex_of(w),
            Point::Cone(k) => self.cone_index.get(k).map(|&c| self.cone.cone_vertex(c)),
        }
    }

    pub fn act(&self, g: &Word, v: Vertex) -> Option<Vertex> {
        self.vertex(&self.point(v).act(g))
    }

    /// Projection positions of a point onto line `y`.
    fn span_on(&self, y: &Line, p: &Point) -> Result<(i64, i64)> {
        match p {
            Point::Base(w) => {
                let t = y.position(w);
                Ok((t, t))
            }
            Point::Cone(ConeKey::Line(k)) => {
                if *k == y.key {
                    return Err(Error::SelfProjection(self.line_by_key(k).unwrap_or(usize::MAX)));
                }
                Ok(y.projection_span(&Line::from_key(k)?))
            }
            Point::Cone(ConeKey::Coset { letter, rep }) => {
                // projection of a coset line of the tree
                let axis = Line::from_key(&rep.mul(&Word::generator(*letter)).mul(&rep.inverse()))?;
                Ok(y.projection_span(&axis))
            }
        }
    }

    /// `d^π_Y(p, q)`: diameter of the union of the two projections.
    pub fn dpi_points(&self, y: &Line, p: &Point, q: &Point) -> Result<i64> {
        let a = self.span_on(y, p)?;
        let b = self.span_on(y, q)?;
        Ok(a.1.max(b.1) - a.0.min(b.0))
    }

    pub fn dpi(&self, y: usize, a: Vertex, b: Vertex) -> Result<i64> {
        self.dpi_points(&self.lines[y], &self.point(a), &self.point(b))
    }
}

/// One saturation edge: `to = key^exp · from`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub from: Vertex,
    pub to: Vertex,
    pub key: Word,
    pub exp: i64,
}

/// Agreement of the saturation with the word-problem oracle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleCheck {
    /// base pairs decided by Dehn's algorithm
    pub pairs_checked: u64,
    /// pairs closer than the shortest relator, distinct by Greendlinger
    pub pairs_by_length: u64,
    pub disagreements: u64,
}

#[derive(Clone, Debug)]
pub struct QuotientGraph {
    /// class of every vertex of X̂
    pub class_of: Vec<u32>,
    pub members: Vec<Vec<Vertex>>,
    /// smallest member of each class
    pub reps: Vec<Vertex>,
    pub graph: MetricGraph,
    pub budget: u32,
    /// distinct conjugates used as generators
    pub generators: Vec<Word>,
    pub witnesses: Vec<Witness>,
    adjacency: Vec<Vec<usize>>,
    pub oracle: OracleCheck,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.0[hi] = lo;
        }
    }
}

/// Relator conjugates `g c g⁻¹` with `|g| ≤ budget`, deduplicated.
pub fn conjugate_generators(rank: u8, relator: &Word, budget: u32) -> Result<Vec<Word>> {
    let mut out: Vec<Word> = free_words(&Presentation::free(rank), budget, 5_000_000)?
        .iter()
        .map(|g| g.mul(relator).mul(&g.inverse()))
        .collect();
    out.sort();
    out.dedup();
    Ok(out)
}

/// Quotient of X̂ by the normal closure of the relator, saturated by the
/// conjugates `g c g⁻¹`, `|g| ≤ budget`, and cross-checked against Dehn's
/// algorithm on base vertices.
pub fn build_quotient(inst: &SpinningInstance, budget: u32) -> Result<QuotientGraph> {
    let n = inst.vertex_count();
    let base = inst.ball.vertex_count();
    let rho = inst.ball.radius as usize;
    let generators = conjugate_generators(inst.rank(), &inst.relator, budget)?;
    let mut uf = UnionFind((0..n).collect());
    let mut witnesses = Vec::new();
    for k in &generators {
        // a base vertex and its image both lie in the ball only if |k| ≤ 2ρ
        if k.len() <= 2 * rho {
            for v in 0..base as Vertex {
                if let Some(u) = inst.ball.vertex_of(&k.mul(inst.ball.element(v))) {
                    if u != v {
                        uf.union(v as usize, u as usize);
                        witnesses.push(Witness { from: v, to: u, key: k.clone(), exp: 1 });
                    }
                }
            }
        }
        for (c, key) in inst.cone_keys.iter().enumerate() {
            let image = key.act(k);
            if let Some(&d) = inst.cone_index.get(&image) {
                if d != c {
                    let (from, to) = (inst.cone.cone_vertex(c), inst.cone.cone_vertex(d));
                    uf.union(from as usize, to as usize);
                    witnesses.push(Witness { from, to, key: k.clone(), exp: 1 });
                }
            }
        }
    }
    let mut class_id: HashMap<usize, u32> = HashMap::new();
    let mut class_of = vec![0u32; n];
    let mut members: Vec<Vec<Vertex>> = Vec::new();
    for v in 0..n {
        let r = uf.find(v);
        let id = *class_id.entry(r).or_insert_with(|| {
            members.push(Vec::new());
            (members.len() - 1) as u32
        });
        class_of[v] = id;
        members[id as usize].push(v as Vertex);
    }
    let reps: Vec<Vertex> = members.iter().map(|m| m[0]).collect();
    let oracle = oracle_check(inst, &class_of)?;
    if oracle.disagreements > 0 {
        return Err(Error::OracleMismatch(format!(
            "{} base pairs disagree with Dehn's algorithm (budget {budget})",
            oracle.disagreements
        )));
    }
    let mut edges: Vec<(Vertex, Vertex)> = inst
        .cone
        .graph
        .edges()
        .map(|(a, b)| (class_of[a as usize], class_of[b as usize]))
        .filter(|(a, b)| a != b)
        .map(|(a, b)| (a.min(b), a.max(b)))
        .collect();
    edges.sort_unstable();
    edges.dedup();
    let labels: Option<Vec<String>> =
        inst.cone.graph.labels().map(|l| reps.iter().map(|&r| l[r as usize].clone()).collect());
    let mut graph = MetricGraph::from_edges(members.len(), edges)?;
    if let Some(l) = labels {
        graph = graph.with_labels(l)?;
    }
    let mut adjacency = vec![Vec::new(); n];
    for (i, w) in witnesses.iter().enumerate() {
        adjacency[w.from as usize].push(i);
        adjacency[w.to as usize].push(i);
    }
    Ok(QuotientGraph { class_of, members, reps, graph, budget, generators, witnesses, adjacency, oracle })
}

fn oracle_check(inst: &SpinningInstance, class_of: &[u32]) -> Result<OracleCheck> {
    let pres = Presentation::small_cancellation(inst.rank(), vec![inst.relator.clone()])?;
    let dehn = pres.dehn()?;
    let min_len = dehn.min_relator_len();
    let els = &inst.ball.elements;
    let mut out = OracleCheck { pairs_checked: 0, pairs_by_length: 0, disagreements: 0 };
    let max_dist = 2 * inst.ball.radius as usize;
    let nb = els.len() as u64;
    if max_dist < min_len {
        // every pair is closer than the shortest relator
        out.pairs_by_length = nb * nb.saturating_sub(1) / 2;
        for i in 0..els.len() {
            for j in i + 1..els.len() {
                if class_of[i] == class_of[j] {
                    out.disagreements += 1;
                }
            }
        }
        return Ok(out);
    }
    for i in 0..els.len() {
        for j in i + 1..els.len() {
            let same = class_of[i] == class_of[j];
            let d = els[i].distance(&els[j]);
            let equal = if d < min_len {
                out.pairs_by_length += 1;
                false
            } else {
                out.pairs_checked += 1;
                dehn.is_trivial(&els[i].inverse().mul(&els[j]))
            };
            if same != equal {
                out.disagreements += 1;
            }
        }
    }
    Ok(out)
}

impl QuotientGraph {
    pub fn class_count(&self) -> usize {
        self.members.len()
    }

    pub fn class(&self, v: Vertex) -> u32 {
        self.class_of[v as usize]
    }

    pub fn is_trivial(&self) -> bool {
        self.members.iter().all(|m| m.len() == 1)
    }

    /// Element `h` of the normal closure with `h·from = to`, read off the
    /// saturation witnesses.
    pub fn witness_element(&self, from: Vertex, to: Vertex) -> Option<NormalElement> {
        if from == to {
            return Some(NormalElement::identity());
        }
        let mut prev: HashMap<Vertex, (Vertex, usize)> = HashMap::new();
        let mut queue = VecDeque::from([from]);
        prev.insert(from, (from, usize::MAX));
        while let Some(v) = queue.pop_front() {
            if v == to {
                break;
            }
            for &i in &self.adjacency[v as usize] {
                let w = &self.witnesses[i];
                let next = if w.from == v { w.to } else { w.from };
                if let std::collections::hash_map::Entry::Vacant(e) = prev.entry(next) {
                    e.insert((v, i));
                    queue.push_back(next);
                }
            }
        }
        prev.get(&to)?;
        let mut steps = Vec::new();
        let mut cur = to;
        while cur != from {
            let (p, i) = prev[&cur];
            let w = &self.witnesses[i];
            steps.push((w.key.clone(), if w.from == p { w.exp } else { -w.exp }));
            cur = p;
        }
        // steps run from `to` back to `from`; the first step applied is last
        let mut h = NormalElement::identity();
        for (k, e) in steps.iter().rev() {
            h = h.left_mul(k, *e);
        }
        Some(h)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpinningReport {
    pub min_observed: Option<i64>,
    #[serde(with = "qserde")]
    pub l: Q,
    pub pass: bool,
    /// `(line, base vertex, exponent)` realizing the minimum
    pub witness: Option<(usize, Vertex, i64)>,
    pub checked: usize,
}

/// Minimum of `d^π_Y(x, h_Y^r x)` over sampled lines, base vertices and
/// `r ∈ [−3, 3] − {0}`; passes iff it exceeds `L`.
pub fn verify_spinning(inst: &SpinningInstance, samples: usize, seed: u64) -> Result<SpinningReport> {
    let nb = inst.ball.vertex_count();
    let total = inst.lines.len() * nb;
    let pairs: Vec<(usize, Vertex)> = if total <= samples {
        (0..inst.lines.len()).flat_map(|y| (0..nb as Vertex).map(move |x| (y, x))).collect()
    } else {
        let mut r = trial_rng(seed, 0);
        (0..samples)
            .map(|_| {
                let y = *(0..inst.lines.len()).collect::<Vec<_>>().choose(&mut r).expect("lines");
                (y, (rand::Rng::gen_range(&mut r, 0..nb)) as Vertex)
            })
            .collect()
    };
    let mut best: Option<(i64, (usize, Vertex, i64))> = None;
    for &(y, x) in &pairs {
        let line = &inst.lines[y];
        let xw = inst.ball.element(x);
        for r in [-3i64, -2, -1, 1, 2, 3] {
            let hx = line.key.pow(r).mul(xw);
            let d = (line.position(&hx) - line.position(xw)).abs();
            if best.as_ref().map_or(true, |(b, _)| d < *b) {
                best = Some((d, (y, x, r)));
            }
        }
    }
    let min_observed = best.as_ref().map(|b| b.0);
    let pass = min_observed.map_or(true, |m| q(m) > inst.l);
    Ok(SpinningReport { min_observed, l: inst.l.clone(), pass, witness: best.map(|b| b.1), checked: pairs.len() })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InjectivityReport {
    pub min_displacement: Option<usize>,
    #[serde(with = "qserde")]
    pub tau: Q,
    pub free: bool,
    pub pass: bool,
    pub checked: usize,
}

/// Least displacement `d_X(x, n·x)` over base vertices and the saturation
/// generators and their squares; passes iff above `τ` and no fixed points.
pub fn injectivity_report(inst: &SpinningInstance, quot: &QuotientGraph, tau: &Q) -> InjectivityReport {
    let mut min: Option<usize> = None;
    let mut checked = 0;
    for k in &quot.generators {
        for n in [k.clone(), k.pow(2)] {
            for x in &inst.ball.elements {
                let d = x.inverse().mul(&n).mul(x).len();
                checked += 1;
                min = Some(min.map_or(d, |m| m.min(d)));
            }
        }
    }
    let free = min.map_or(true, |m| m > 0);
    let pass = free && min.map_or(true, |m| q(m as i64) > *tau);
    InjectivityReport { min_displacement: min, tau: tau.clone(), free, pass, checked }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinimalPair {
    pub x: Vertex,
    pub y: Vertex,
    pub d_hat: u32,
    pub d_bar: u32,
    pub certified: bool,
}

/// Representatives of two classes realizing the class distance, with
/// the first one the class representative.
pub fn certify_minimal(inst: &SpinningInstance, quot: &QuotientGraph, a: u32, b: u32) -> Result<MinimalPair> {
    let x = quot.reps[a as usize];
    let row = inst.cone.graph.bfs(x);
    certify_from(quot, x, &row, b)
}

fn certify_from(quot: &QuotientGraph, x: Vertex, row: &[u32], b: u32) -> Result<MinimalPair> {
    let y = *quot.members[b as usize].iter().min_by_key(|&&v| (row[v as usize], v)).expect("nonempty class");
    let d_hat = row[y as usize];
    let d_bar = quot.graph.distance(quot.class(x), b)?;
    Ok(MinimalPair { x, y, d_hat, d_bar, certified: d_hat == d_bar })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ShorteningOutcome {
    Fixed,
    Pair(ShorteningPair),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShorteningPair {
    pub line: usize,
    pub key: Word,
    /// `h_Y = key^exponent`
    pub exponent: i64,
    pub dpi: Option<i64>,
    pub complexity_before: usize,
    pub complexity_after: usize,
    /// exponent outside `[−3, 3]`
    pub large_exponent: bool,
}

/// Shortening pair for `(x, h)`: the leading syllable, inverted, provided
/// `v_Y ∈ {x, hx}` or `d^π_Y(x, hx) > L/10`.
pub fn find_shortening_pair(inst: &SpinningInstance, x: &Point, h: &NormalElement) -> Result<ShorteningOutcome> {
    let hx = x.act(&h.word());
    if hx == *x {
        return Ok(ShorteningOutcome::Fixed);
    }
    let (key, e) = h.syllables.first().cloned().ok_or_else(|| Error::SearchExhausted("identity moves a point".into()))?;
    let line = inst
        .line_by_key(&key)
        .ok_or_else(|| Error::SearchExhausted(format!("line of {key} is outside the family")))?;
    let v_y = Point::Cone(ConeKey::Line(key.clone()));
    let (ok, dpi) = if *x == v_y || hx == v_y {
        (true, None)
    } else {
        let d = inst.dpi_points(&inst.lines[line], x, &hx)?;
        (q(d) > &inst.l / q(10), Some(d))
    };
    if !ok {
        return Err(Error::SearchExhausted(format!(
            "leading syllable {key}^{e} has d^π = {} not above L/10",
            dpi.unwrap_or(0)
        )));
    }
    let after = h.left_mul(&key, -e).complexity();
    Ok(ShorteningOutcome::Pair(ShorteningPair {
        line,
        key,
        exponent: -e,
        dpi,
        complexity_before: h.complexity(),
        complexity_after: after,
        large_exponent: e.abs() > 3,
    }))
}

/// Applies `h_Y = key^r` to the part of `path` after its visit to `v_Y`.
pub fn bend(inst: &SpinningInstance, path: &Path, line: usize, r: i64) -> Result<Path> {
    let v = inst.line_vertex(line);
    let verts = path.vertices();
    let i = verts
        .iter()
        .position(|&u| u == v)
        .filter(|&i| i > 0 && i + 1 < verts.len())
        .ok_or(Error::NotThroughCone)?;
    let h = inst.lines[line].key.pow(r);
    let mut out = verts[..=i].to_vec();
    for &u in &verts[i + 1..] {
        out.push(inst.act(&h, u).ok_or_else(|| Error::NotApplicable("bent path leaves the ball".into()))?);
    }
    Ok(Path(out))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftReport {
    /// lifted corners `x₁, x₂, x₃` and the open endpoint `h·x₁`
    pub corners: [Vertex; 3],
    pub open_end: Vertex,
    pub minimal: bool,
    pub closed: bool,
    pub complexity_trace: Vec<usize>,
    pub bends: usize,
    /// a bent vertex left the ball or the family
    pub truncated: bool,
    pub stuck: Option<String>,
    pub sides: Vec<Vec<Vertex>>,
    pub sides_geodesic: bool,
    pub slimness: Option<u32>,
}

impl LiftReport {
    pub fn strictly_decreasing(&self) -> bool {
        self.complexity_trace.windows(2).all(|w| w[1] < w[0])
    }
}

/// Lifts a quotient triangle to X̂: pairwise-minimal corners, then bends
/// along shortening pairs until the open lift closes.
pub fn lift_triangle(inst: &SpinningInstance, quot: &QuotientGraph, t: [u32; 3]) -> Result<LiftReport> {
    let g = &inst.cone.graph;
    let x1 = quot.reps[t[0] as usize];
    let r1 = g.bfs(x1);
    let m12 = certify_from(quot, x1, &r1, t[1])?;
    let x2 = m12.y;
    let r2 = g.bfs(x2);
    let m23 = certify_from(quot, x2, &r2, t[2])?;
    let x3 = m23.y;
    let r3 = g.bfs(x3);
    let m31 = certify_from(quot, x3, &r3, t[0])?;
    let x1p = m31.y;
    let minimal = m12.certified && m23.certified && m31.certified;
    let sides = vec![g.geodesic(x1, x2)?, g.geodesic(x2, x3)?, g.geodesic(x3, x1p)?];
    let h = quot
        .witness_element(x1, x1p)
        .ok_or_else(|| Error::Invalid("class members without a witness path".into()))?;
    let mut rep = close_open_lift(inst, sides, h)?;
    rep.minimal = minimal;
    Ok(rep)
}

/// The bending loop on an open lift `γ₁ γ₂ γ₃` from `x₁` to `h·x₁`.
pub fn close_open_lift(inst: &SpinningInstance, sides: Vec<Path>, mut h: NormalElement) -> Result<LiftReport> {
    let g = &inst.cone.graph;
    let mut walk: Vec<Vertex> = Vec::new();
    let mut corner_at = Vec::new();
    for (i, s) in sides.iter().enumerate() {
        if i > 0 && walk.last() != Some(&s.start()) {
            return Err(Error::Invalid("open lift sides do not chain".into()));
        }
        corner_at.push(walk.len().saturating_sub(usize::from(i > 0)));
        let skip = usize::from(i > 0);
        walk.extend_from_slice(&s.vertices()[skip..]);
    }
    let corners = [walk[corner_at[0]], walk[corner_at[1]], walk[corner_at[2]]];
    let open_end = *walk.last().expect("nonempty");
    let mut trace = vec![h.complexity()];
    let mut bends = 0;
    let mut truncated = false;
    let mut stuck = None;
    let x1 = inst.point(walk[0]);
    loop {
        let end = *walk.last().expect("nonempty");
        if end == walk[0] {
            break;
        }
        let pair = match find_shortening_pair(inst, &x1, &h) {
            Ok(ShorteningOutcome::Pair(p)) => p,
            Ok(ShorteningOutcome::Fixed) => {
                stuck = Some("defect fixes x₁ but the lift is open".into());
                break;
            }
            Err(e) => {
                stuck = Some(e.to_string());
                break;
            }
        };
        let v = inst.line_vertex(pair.line);
        if !walk.contains(&v) && !reroute_through(g, &mut walk, &mut corner_at, v)? {
            stuck = Some(format!("v_Y of line {} is not on the lift", pair.line));
            break;
        }
        let i = walk.iter().position(|&u| u == v).expect("v_Y on the lift");
        // a corner at v_Y moves with everything after it; otherwise bend after v_Y
        let from = if corner_at.contains(&i) { i } else { i + 1 };
        let hy = pair.key.pow(pair.exponent);
        let mut moved = Vec::with_capacity(walk.len() - from);
        for &u in &walk[from..] {
            match inst.act(&hy, u) {
                Some(w) => moved.push(w),
                None => break,
            }
        }
        if moved.len() < walk.len() - from {
            truncated = true;
            stuck = Some("bent lift leaves the ball".into());
            break;
        }
        walk.truncate(from);
        walk.extend(moved);
        h = h.left_mul(&pair.key, pair.exponent);
        trace.push(h.complexity());
        bends += 1;
    }
    let closed = walk.last() == walk.first();
    let sides_v: Vec<Vec<Vertex>> = (0..3)
        .map(|k| {
            let a = corner_at[k];
            let b = if k < 2 { corner_at[k + 1] } else { walk.len() - 1 };
            walk[a..=b].to_vec()
        })
        .collect();
    let sides_geodesic = sides_v.iter().all(|s| {
        let d = g.distance(s[0], *s.last().expect("nonempty")).unwrap_or(UNREACHABLE);
        Path(s.clone()).is_path_in(g) && d as usize + 1 == s.len()
    });
    let slimness = closed.then(|| sides_slimness(g, &[&sides_v[0], &sides_v[1], &sides_v[2]]));
    Ok(LiftReport {
        corners,
        open_end,
        minimal: true,
        closed,
        complexity_trace: trace,
        bends,
        truncated,
        stuck,
        sides: sides_v,
        sides_geodesic,
        slimness,
    })
}

/// Replaces the first side of the lift that admits a geodesic through `v`
/// by one that visits `v`; sides stay geodesic and corners keep their order.
fn reroute_through(g: &MetricGraph, walk: &mut Vec<Vertex>, corner_at: &mut [usize], v: Vertex) -> Result<bool> {
    let dv = g.bfs(v);
    for k in 0..3 {
        let a = corner_at[k];
        let b = if k < 2 { corner_at[k + 1] } else { walk.len() - 1 };
        let (x, y) = (walk[a], walk[b]);
        if dv[x as usize] as usize + dv[y as usize] as usize != b - a {
            continue;
        }
        let mut side = g.geodesic(x, v)?.0;
        side.extend_from_slice(&g.geodesic(v, y)?.0[1..]);
        let grow = side.len() as isize - (b - a + 1) as isize;
        walk.splice(a..=b, side);
        for c in corner_at.iter_mut().skip(k + 1) {
            *c = (*c as isize + grow) as usize;
        }
        return Ok(true);
    }
    Ok(false)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsoprojReport {
    pub sup_dpi: i64,
    #[serde(with = "qserde")]
    pub lower: Q,
    pub d_x: usize,
    pub d_hat: u32,
    pub d_bar: u32,
    pub inequality: bool,
    pub equality: bool,
}

/// For base vertices with every family projection at most `L/20`:
/// `d_X / (L/20 + 2C) ≤ d_X̂ = d_X̄`.
pub fn isoproj_check(
    inst: &SpinningInstance,
    quot: &QuotientGraph,
    ledger: &DerivedConstants,
    x: Vertex,
    y: Vertex,
) -> Result<IsoprojReport> {
    if inst.cone.is_cone(x) || inst.cone.is_cone(y) {
        return Err(Error::NotApplicable("isoprojection compares base vertices".into()));
    }
    let (xw, yw) = (inst.ball.element(x), inst.ball.element(y));
    let sup_dpi = inst.lines.iter().map(|l| (l.position(xw) - l.position(yw)).abs()).max().unwrap_or(0);
    let bound = &inst.l / q(20);
    if q(sup_dpi) > bound {
        return Err(Error::NotApplicable(format!("projection {sup_dpi} exceeds L/20")));
    }
    let denom = &bound + q(2) * &ledger.c;
    if denom <= q(0) {
        return Err(Error::NotApplicable("L/20 + 2C is not positive".into()));
    }
    let d_x = xw.distance(yw);
    let d_hat = inst.cone.graph.distance(x, y)?;
    let d_bar = quot.graph.distance(quot.class(x), quot.class(y))?;
    let lower = q(d_x as i64) / denom;
    Ok(IsoprojReport { sup_dpi, inequality: lower <= q(d_hat as i64), equality: d_hat == d_bar, lower, d_x, d_hat, d_bar })
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditReport {
    pub checked: usize,
    pub violations: usize,
    pub witnesses: Vec<String>,
}

impl AuditReport {
    fn fail(&mut self, w: String) {
        self.violations += 1;
        if self.witnesses.len() < 20 {
            self.witnesses.push(w);
        }
    }
}

/// Every lift of a quotient edge lies in one orbit of the normal closure.
pub fn edge_orbit_audit(inst: &SpinningInstance, quot: &QuotientGraph, samples: usize, seed: u64) -> AuditReport {
    let mut by_edge: BTreeMap<(u32, u32), Vec<(Vertex, Vertex)>> = BTreeMap::new();
    for (a, b) in inst.cone.graph.edges() {
        let (ca, cb) = (quot.class(a), quot.class(b));
        let (key, e) = if ca <= cb { ((ca, cb), (a, b)) } else { ((cb, ca), (b, a)) };
        by_edge.entry(key).or_default().push(e);
    }
    let mut keys: Vec<(u32, u32)> = by_edge.keys().copied().collect();
    if keys.len() > samples {
        keys.shuffle(&mut trial_rng(seed, 1));
        keys.truncate(samples);
    }
    let mut rep = AuditReport::default();
    for k in keys {
        let lifts = &by_edge[&k];
        let (a0, b0) = lifts[0];
        for &(a, b) in &lifts[1..] {
            rep.checked += 1;
            let ok = quot
                .witness_element(a0, a)
                .map(|h| inst.vertex(&inst.point(b0).act(&h.word())) == Some(b))
                .unwrap_or(false);
            if !ok {
                rep.fail(format!("edge ({a},{b}) is not a translate of ({a0},{b0})"));
            }
        }
    }
    rep
}

/// Two X̂-geodesics without interior cone vertices never join distinct
/// members of one class.
pub fn no_pivot_audit(inst: &SpinningInstance, quot: &QuotientGraph) -> AuditReport {
    let nb = inst.ball.vertex_count();
    let mut rep = AuditReport::default();
    for m in quot.members.iter().filter(|m| m.len() > 1 && (m[0] as usize) < nb) {
        let rows_hat: Vec<Vec<u32>> = m.iter().map(|&v| inst.cone.graph.bfs(v)).collect();
        let rows_x: Vec<Vec<u32>> = m.iter().map(|&v| inst.cone.base.bfs(v)).collect();
        for i in 0..m.len() {
            for j in i + 1..m.len() {
                for z in 0..nb {
                    rep.checked += 1;
                    let plain = |k: usize| rows_x[k][z] == rows_hat[k][z];
                    if plain(i) && plain(j) {
                        rep.fail(format!("{} and {} joined through {z}", m[i], m[j]));
                    }
                }
            }
        }
    }
    rep
}

/// Generators stabilizing a family line lie in that line's cyclic group.
pub fn stabilizer_audit(inst: &SpinningInstance, quot: &QuotientGraph) -> AuditReport {
    let mut rep = AuditReport::default();
    for k in &quot.generators {
        for line in &inst.lines {
            if k.mul(&line.key).mul(&k.inverse()) == line.key {
                rep.checked += 1;
                if !in_cyclic_subgroup(k, &line.key) {
                    rep.fail(format!("{k} stabilizes the line of {} outside its cyclic group", line.key));
                }
            }
        }
    }
    rep
}

/// Slimness comparison of X̂ and X̄ on sampled triangles (exhaustive when
/// both graphs are small).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlimnessComparison {
    pub delta_hat: u32,
    pub delta_bar: u32,
    pub exact: bool,
    pub pass: bool,
}

pub fn compare_slimness(inst: &SpinningInstance, quot: &QuotientGraph, count: usize, seed: u64) -> Result<SlimnessComparison> {
    use crate::graph::{slim_constant, slim_tiebreak_sampled, Sampling, DEFAULT_EXHAUSTIVE_CAP};
    let (dh, db, exact) = if inst.vertex_count() <= DEFAULT_EXHAUSTIVE_CAP {
        let a = slim_constant(&inst.cone.graph, &Sampling::Exhaustive)?;
        let b = slim_constant(&quot.graph, &Sampling::Exhaustive)?;
        (a.value, b.value, true)
    } else {
        let a = slim_tiebreak_sampled(&inst.cone.graph, count, seed)?;
        let b = slim_tiebreak_sampled(&quot.graph, count, seed)?;
        (a.value, b.value, false)
    };
    Ok(SlimnessComparison { delta_hat: dh, delta_bar: db, exact, pass: db <= dh })
}

/// Default spinning threshold for a walk pipeline: `L = Δn − 2B`.
pub fn walk_threshold(drift: &Q, n: usize, b: &Q) -> Q {
    drift * q(n as i64) - q(2) * b
}

/// `L/10` as used by shortening pairs.
pub fn shortening_threshold(l: &Q) -> Q {
    l / q_frac(10, 1)
}
