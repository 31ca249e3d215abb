//! Hierarchy structures as data: built-in toy instances, an axiom checker
//! that measures a constant per axiom, the quotient structure by a spinning
//! family and its projection bounds.
//!
//! Distances between coordinate sets are set distances (infimum); diameters
//! are stated explicitly.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap, HashSet};
use std::rc::Rc;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::constants::{q, q_frac, qserde, Q};
use crate::error::{Error, Result};
use crate::graph::{
    slim_constant, slim_tiebreak_sampled, MetricGraph, Sampling, Subspace, Vertex, DEFAULT_EXHAUSTIVE_CAP,
    UNREACHABLE,
};
use crate::groups::{cayley_ball, CayleyBall, Letter, Presentation, Word, DEFAULT_BALL_CAP};
use crate::randwalk::trial_rng;
use crate::spinning::{build_quotient, coset_rep, ConeKey, Line, QuotientGraph, SpinningInstance};

/// Relation of the row domain to the column domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "=")]
    Equal,
    /// row ⊑ column, row ≠ column
    #[serde(rename = "<")]
    Nested,
    /// column ⊑ row, row ≠ column
    #[serde(rename = ">")]
    Contains,
    #[serde(rename = "perp")]
    Orth,
    #[serde(rename = "trans")]
    Trans,
}

impl Relation {
    pub fn flip(self) -> Relation {
        match self {
            Relation::Nested => Relation::Contains,
            Relation::Contains => Relation::Nested,
            r => r,
        }
    }
}

/// A coordinate space: a finite graph (coordinates are vertex ids) or an
/// integer segment of a line.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Space {
    Graph(MetricGraph),
    Segment { lo: i64, hi: i64 },
}

#[derive(Clone, Copy, Debug)]
pub enum SpaceRef<'a> {
    Graph(&'a MetricGraph),
    Segment { lo: i64, hi: i64 },
}

impl Space {
    pub fn as_ref(&self) -> SpaceRef<'_> {
        match self {
            Space::Graph(g) => SpaceRef::Graph(g),
            Space::Segment { lo, hi } => SpaceRef::Segment { lo: *lo, hi: *hi },
        }
    }
}

/// The interface every hierarchy structure exposes to the axiom checker.
/// Domain 0 is the ⊑-maximal domain; points are the vertices of the word
/// graph.
pub trait Hierarchy {
    fn name(&self) -> String;
    fn e(&self) -> Q;
    fn word_graph(&self) -> &MetricGraph;
    fn domain_count(&self) -> usize;
    fn domain_label(&self, u: usize) -> String;
    fn space(&self, u: usize) -> SpaceRef<'_>;
    fn relation(&self, u: usize, v: usize) -> Relation;
    fn proj(&self, u: usize, p: Vertex) -> Result<Vec<i64>>;
    /// `ρ^u_v ⊆ C v`, for `u ⋔ v` or `u ⊊ v`.
    fn rho(&self, u: usize, v: usize) -> Result<Vec<i64>>;
    /// Domains where the projections of `p` and `q` may differ, always
    /// including domain 0.
    fn relevant(&self, p: Vertex, q: Vertex) -> Vec<usize>;
    fn has_orthogonality(&self) -> bool;

    fn point_count(&self) -> usize {
        self.word_graph().vertex_count()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Domain {
    pub name: String,
    pub key: Option<ConeKey>,
    pub space: Space,
    /// `ρ^U_S` as vertices of the top space
    pub rho_top: Vec<Vertex>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StructureKind {
    /// single domain, the Cayley graph
    Trivial,
    /// cosets of cyclic free factors, all pairwise transverse
    FreeProduct { factors: Vec<u8> },
    /// explicit tables
    Table,
}

/// A finite hierarchy structure on the points of a word graph.
#[derive(Clone, Debug)]
pub struct HhsStructure {
    pub name: String,
    pub kind: StructureKind,
    /// word metric on points
    pub x: MetricGraph,
    /// group ball when the points are group elements
    pub ball: Option<CayleyBall>,
    pub domains: Vec<Domain>,
    pub e: Q,
    relations: Option<Vec<Vec<Relation>>>,
    proj_table: Option<Vec<Vec<Vec<i64>>>>,
    rho_table: BTreeMap<(usize, usize), Vec<i64>>,
    key_index: HashMap<ConeKey, usize>,
    lines: Vec<Option<Line>>,
}

fn coset_line(letter: Letter, rep: &Word) -> Result<Line> {
    Line::from_key(&rep.mul(&Word::generator(letter)).mul(&rep.inverse()))
}

/// Slimness measured exhaustively on small graphs, by sampled tie-break
/// triangles otherwise.
pub fn measure_slimness(g: &MetricGraph, count: usize, seed: u64) -> Result<u32> {
    if g.vertex_count() <= 150 {
        Ok(slim_constant(g, &Sampling::Exhaustive)?.value)
    } else if g.vertex_count() <= DEFAULT_EXHAUSTIVE_CAP {
        Ok(slim_constant(g, &Sampling::Random { count, seed })?.value)
    } else {
        Ok(slim_tiebreak_sampled(g, count, seed)?.value)
    }
}

fn ceil_q(x: &Q) -> i64 {
    let c = x.ceil().to_integer();
    i64::try_from(c).unwrap_or(i64::MAX)
}

impl HhsStructure {
    /// `𝔖 = {S}` with `CS` the Cayley ball; `E = max(measured δ, 1)`.
    pub fn trivial(p: &Presentation, radius: u32) -> Result<Self> {
        let ball = cayley_ball(p, radius, DEFAULT_BALL_CAP)?;
        let delta = measure_slimness(&ball.graph, 400, 1)?;
        let top = Domain { name: "S".into(), key: None, space: Space::Graph(ball.graph.clone()), rho_top: Vec::new() };
        Ok(HhsStructure {
            name: format!("trivial(rank {}, radius {radius})", p.rank),
            kind: StructureKind::Trivial,
            x: ball.graph.clone(),
            ball: Some(ball),
            domains: vec![top],
            e: q(i64::from(delta.max(1))),
            relations: None,
            proj_table: None,
            rho_table: BTreeMap::new(),
            key_index: HashMap::new(),
            lines: vec![None],
        })
    }

    /// Free product of cyclic groups: `CS` is the Cayley graph with every
    /// coset of a factor made a clique, domains are the factor cosets
    /// meeting the ball in at least two elements, with their lines as
    /// coordinate spaces. `E = max(measured δ of CS, 2)`, the 2 being the
    /// nesting depth.
    pub fn free_product(factors: &[u8], radius: u32) -> Result<Self> {
        let p = Presentation::free_product(factors.to_vec())?;
        if factors.iter().any(|&f| f != 1) {
            return Err(Error::NotApplicable("free product built-ins use cyclic factors".into()));
        }
        if radius < 1 {
            return Err(Error::Invalid("radius must be positive".into()));
        }
        let ball = cayley_ball(&p, radius, DEFAULT_BALL_CAP)?;
        let mut edges: Vec<(Vertex, Vertex)> = ball.graph.edges().collect();
        let mut domains = vec![Domain { name: "S".into(), key: None, space: Space::Graph(ball.graph.clone()), rho_top: Vec::new() }];
        let mut lines = vec![None];
        let mut key_index = HashMap::new();
        for letter in 1..=p.rank as Letter {
            for rep in ball.elements.iter().filter(|w| w.len() < radius as usize && coset_rep(w, letter) == **w) {
                let line = coset_line(letter, rep)?;
                let reach = i64::from(radius) - rep.len() as i64;
                let members: Vec<Vertex> =
                    (-reach..=reach).map(|t| ball.vertex_of(&line.point_at(t)).expect("coset point in ball")).collect();
                for i in 0..members.len() {
                    for j in i + 2..members.len() {
                        edges.push((members[i], members[j]));
                    }
                }
                let key = ConeKey::Coset { letter, rep: rep.clone() };
                key_index.insert(key.clone(), domains.len());
                domains.push(Domain {
                    name: format!("{rep}<{}>", Word::generator(letter)),
                    key: Some(key),
                    space: Space::Segment { lo: -reach, hi: reach },
                    rho_top: members,
                });
                lines.push(Some(line));
            }
        }
        let cs = MetricGraph::from_edges(ball.vertex_count(), edges)?;
        let delta = measure_slimness(&cs, 400, 1)?;
        domains[0].space = Space::Graph(cs);
        Ok(HhsStructure {
            name: format!("free product {factors:?}, radius {radius}"),
            kind: StructureKind::FreeProduct { factors: factors.to_vec() },
            x: ball.graph.clone(),
            ball: Some(ball),
            domains,
            e: q(i64::from(delta.max(2))),
            relations: None,
            proj_table: None,
            rho_table: BTreeMap::new(),
            key_index,
            lines,
        })
    }

    /// Built-in instances by name: `trivial` on a presentation, or
    /// `free_product` on a list of factor ranks.
    pub fn builtin(kind: &str, p: &Presentation, radius: u32) -> Result<Self> {
        match kind {
            "trivial" => Self::trivial(p, radius),
            "free_product" | "rel_free_product" => {
                let f = if p.factors.is_empty() { vec![1; p.rank as usize] } else { p.factors.clone() };
                Self::free_product(&f, radius)
            }
            other => Err(Error::Invalid(format!("unknown built-in structure {other:?}"))),
        }
    }

    /// Explicit structure from tables.
    pub fn from_tables(
        name: &str,
        x: MetricGraph,
        domains: Vec<Domain>,
        relations: Vec<Vec<Relation>>,
        proj: Vec<Vec<Vec<i64>>>,
        rho: BTreeMap<(usize, usize), Vec<i64>>,
        e: Q,
    ) -> Result<Self> {
        let n = domains.len();
        if n == 0 {
            return Err(Error::Invalid("no domains".into()));
        }
        if relations.len() != n || relations.iter().any(|r| r.len() != n) || proj.len() != n {
            return Err(Error::Invalid("table sizes disagree with the domain count".into()));
        }
        if proj.iter().any(|r| r.len() != x.vertex_count()) {
            return Err(Error::Invalid("projection tables need one row per point".into()));
        }
        for (u, row) in relations.iter().enumerate() {
            for (v, r) in row.iter().enumerate() {
                if (u == v) != (*r == Relation::Equal) || relations[v][u] != r.flip() {
                    return Err(Error::Invalid(format!("relation table inconsistent at ({u},{v})")));
                }
            }
        }
        if e <= q(0) {
            return Err(Error::NegativeInput("E must be positive".into()));
        }
        Ok(HhsStructure {
            name: name.into(),
            kind: StructureKind::Table,
            x,
            ball: None,
            lines: vec![None; n],
            domains,
            e,
            relations: Some(relations),
            proj_table: Some(proj),
            rho_table: rho,
            key_index: HashMap::new(),
        })
    }

    /// Reads `{name, e, points, x_edges, domains: [{name, space}], relations,
    /// proj, rho: [{from, to, set}]}`.
    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct RhoRow {
            from: usize,
            to: usize,
            set: Vec<i64>,
        }
        #[derive(Deserialize)]
        struct DomainRow {
            name: String,
            space: SpaceRow,
            #[serde(default)]
            rho_top: Vec<Vertex>,
        }
        #[derive(Deserialize)]
        #[serde(rename_all = "snake_case")]
        enum SpaceRow {
            Graph { vertices: usize, edges: Vec<(Vertex, Vertex)> },
            Segment { lo: i64, hi: i64 },
        }
        #[derive(Deserialize)]
        struct Fixture {
            name: String,
            e: String,
            points: usize,
            x_edges: Vec<(Vertex, Vertex)>,
            domains: Vec<DomainRow>,
            relations: Vec<Vec<Relation>>,
            proj: Vec<Vec<Vec<i64>>>,
            #[serde(default)]
            rho: Vec<RhoRow>,
        }
        let f: Fixture = serde_json::from_str(text).map_err(|e| Error::parse(e.line(), e.to_string()))?;
        let x = MetricGraph::from_edges(f.points, f.x_edges)?;
        let domains = f
            .domains
            .into_iter()
            .map(|d| {
                Ok(Domain {
                    name: d.name,
                    key: None,
                    space: match d.space {
                        SpaceRow::Graph { vertices, edges } => Space::Graph(MetricGraph::from_edges(vertices, edges)?),
                        SpaceRow::Segment { lo, hi } => Space::Segment { lo, hi },
                    },
                    rho_top: d.rho_top,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let rho = f.rho.into_iter().map(|r| ((r.from, r.to), r.set)).collect();
        Self::from_tables(&f.name, x, domains, f.relations, f.proj, rho, crate::constants::parse_q(&f.e)?)
    }

    /// Replaces `ρ^u_v` by an explicit set.
    pub fn inject_rho(&mut self, u: usize, v: usize, set: Vec<i64>) {
        self.rho_table.insert((u, v), set);
    }

    pub fn domain_of_key(&self, key: &ConeKey) -> Option<usize> {
        self.key_index.get(key).copied()
    }

    /// The top space `CS`.
    pub fn top_graph(&self) -> &MetricGraph {
        match &self.domains[0].space {
            Space::Graph(g) => g,
            Space::Segment { .. } => unreachable!("the top domain is a graph"),
        }
    }

    fn word(&self, p: Vertex) -> Result<&Word> {
        self.ball.as_ref().map(|b| b.element(p)).ok_or_else(|| Error::NotApplicable("points are not group elements".into()))
    }

    /// Cosets containing an edge of the tree geodesic between two points.
    fn cosets_between(&self, a: &Word, b: &Word) -> Vec<usize> {
        let k = a.common_prefix(b);
        let mut out = Vec::new();
        for w in [a, b] {
            for i in k..w.len() {
                let g = w.prefix(i);
                let l = w.letters()[i].abs();
                if let Some(&d) = self.key_index.get(&ConeKey::Coset { letter: l, rep: coset_rep(&g, l) }) {
                    out.push(d);
                }
            }
        }
        out
    }
}

impl Hierarchy for HhsStructure {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn e(&self) -> Q {
        self.e.clone()
    }

    fn word_graph(&self) -> &MetricGraph {
        &self.x
    }

    fn domain_count(&self) -> usize {
        self.domains.len()
    }

    fn domain_label(&self, u: usize) -> String {
        self.domains[u].name.clone()
    }

    fn space(&self, u: usize) -> SpaceRef<'_> {
        self.domains[u].space.as_ref()
    }

    fn relation(&self, u: usize, v: usize) -> Relation {
        if let Some(t) = &self.relations {
            return t[u][v];
        }
        match (u, v) {
            _ if u == v => Relation::Equal,
            (_, 0) => Relation::Nested,
            (0, _) => Relation::Contains,
            _ => Relation::Trans,
        }
    }

    fn proj(&self, u: usize, p: Vertex) -> Result<Vec<i64>> {
        self.x.check_vertex(p)?;
        if let Some(t) = &self.proj_table {
            return Ok(t[u][p as usize].clone());
        }
        match &self.lines[u] {
            None => Ok(vec![i64::from(p)]),
            Some(line) => Ok(vec![line.position(self.word(p)?)]),
        }
    }

    fn rho(&self, u: usize, v: usize) -> Result<Vec<i64>> {
        if let Some(s) = self.rho_table.get(&(u, v)) {
            return Ok(s.clone());
        }
        match self.relation(u, v) {
            Relation::Nested if v == 0 && self.relations.is_none() => {
                Ok(self.domains[u].rho_top.iter().map(|&x| i64::from(x)).collect())
            }
            Relation::Trans if self.relations.is_none() => {
                let (Some(lu), Some(lv)) = (&self.lines[u], &self.lines[v]) else {
                    return Err(Error::MissingRho(u));
                };
                let (a, b) = lv.projection_span(lu);
                Ok((a..=b).collect())
            }
            _ => Err(Error::MissingRho(u)),
        }
    }

    fn relevant(&self, p: Vertex, q: Vertex) -> Vec<usize> {
        match self.kind {
            StructureKind::Trivial => vec![0],
            StructureKind::FreeProduct { .. } => {
                let (Ok(a), Ok(b)) = (self.word(p), self.word(q)) else { return vec![0] };
                let mut out = vec![0];
                out.extend(self.cosets_between(a, b));
                out.sort_unstable();
                out.dedup();
                out
            }
            StructureKind::Table => (0..self.domains.len()).collect(),
        }
    }

    fn has_orthogonality(&self) -> bool {
        match &self.relations {
            None => false,
            Some(t) => t.iter().flatten().any(|&r| r == Relation::Orth),
        }
    }
}

/// Distances in coordinate spaces, with cached BFS rows.
struct Metric<'a, H: Hierarchy + ?Sized> {
    h: &'a H,
    rows: RefCell<HashMap<(usize, Vertex), Rc<Vec<u32>>>>,
}

const FAR: i64 = u32::MAX as i64;

impl<'a, H: Hierarchy + ?Sized> Metric<'a, H> {
    fn new(h: &'a H) -> Self {
        Metric { h, rows: RefCell::new(HashMap::new()) }
    }

    fn row(&self, u: usize, a: Vertex) -> Rc<Vec<u32>> {
        if let Some(r) = self.rows.borrow().get(&(u, a)) {
            return r.clone();
        }
        let SpaceRef::Graph(g) = self.h.space(u) else { unreachable!("rows exist for graph spaces") };
        let r = Rc::new(g.bfs(a));
        let mut rows = self.rows.borrow_mut();
        if rows.len() > 2048 {
            rows.clear();
        }
        rows.insert((u, a), r.clone());
        r
    }

    fn d(&self, u: usize, a: i64, b: i64) -> i64 {
        match self.h.space(u) {
            SpaceRef::Segment { .. } => (a - b).abs(),
            SpaceRef::Graph(g) => {
                let n = g.vertex_count() as i64;
                if a < 0 || b < 0 || a >= n || b >= n {
                    return FAR;
                }
                let d = self.row(u, a as Vertex)[b as usize];
                if d == UNREACHABLE {
                    FAR
                } else {
                    i64::from(d)
                }
            }
        }
    }

    fn set_dist(&self, u: usize, a: &[i64], b: &[i64]) -> i64 {
        a.iter().flat_map(|&x| b.iter().map(move |&y| (x, y))).map(|(x, y)| self.d(u, x, y)).min().unwrap_or(FAR)
    }

    fn diam(&self, u: usize, a: &[i64]) -> i64 {
        let mut m = 0;
        for (i, &x) in a.iter().enumerate() {
            for &y in &a[i + 1..] {
                m = m.max(self.d(u, x, y));
            }
        }
        m
    }
}

/// Outcome of one axiom.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxiomResult {
    pub axiom: String,
    /// smallest constant for which the sampled instances hold
    #[serde(with = "qserde")]
    pub measured: Q,
    #[serde(with = "qserde")]
    pub bound: Q,
    pub bound_formula: String,
    pub pass: bool,
    pub checked: usize,
    pub vacuous: bool,
    pub witnesses: Vec<String>,
    /// `(argument, value)` rows for the function-valued axioms
    pub table: Vec<(i64, i64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub structure: String,
    #[serde(with = "qserde")]
    pub e: Q,
    pub results: Vec<AxiomResult>,
    pub pass: bool,
}

impl AxiomReport {
    pub fn get(&self, prefix: &str) -> Option<&AxiomResult> {
        self.results.iter().find(|r| r.axiom.starts_with(prefix))
    }
}

/// Per-axiom constants the checker compares against.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxiomBounds {
    /// `(value, formula)` for axioms 1 to 10
    pub constants: Vec<(String, String)>,
}

impl AxiomBounds {
    /// Every axiom at the structure constant `E`.
    pub fn uniform(e: &Q) -> Self {
        AxiomBounds { constants: (0..10).map(|_| (crate::constants::q_to_string(e), "E".to_string())).collect() }
    }

    fn get(&self, axiom: usize) -> Result<(Q, String)> {
        let (v, f) = &self.constants[axiom - 1];
        Ok((crate::constants::parse_q(v)?, f.clone()))
    }

    /// The maximum of the numeric constants.
    pub fn max(&self) -> Result<Q> {
        let mut m = q(0);
        for i in 1..=10 {
            m = m.max(self.get(i)?.0);
        }
        Ok(m)
    }
}

struct Acc {
    axiom: String,
    measured: Q,
    checked: usize,
    witnesses: Vec<String>,
    hard_fail: bool,
    table: Vec<(i64, i64)>,
}

impl Acc {
    fn new(axiom: &str) -> Self {
        Acc { axiom: axiom.into(), measured: q(0), checked: 0, witnesses: Vec::new(), hard_fail: false, table: Vec::new() }
    }

    fn see(&mut self, value: Q, witness: impl FnOnce() -> String) {
        self.checked += 1;
        if value > self.measured {
            self.measured = value;
            if self.witnesses.len() >= 5 {
                self.witnesses.remove(0);
            }
            self.witnesses.push(witness());
        }
    }

    fn fail(&mut self, witness: String) {
        self.hard_fail = true;
        if self.witnesses.len() < 10 {
            self.witnesses.push(witness);
        }
    }

    fn finish(self, bound: (Q, String)) -> AxiomResult {
        let pass = !self.hard_fail && self.measured <= bound.0;
        AxiomResult {
            axiom: self.axiom,
            measured: self.measured,
            bound: bound.0,
            bound_formula: bound.1,
            pass,
            vacuous: self.checked == 0,
            checked: self.checked,
            witnesses: self.witnesses,
            table: self.table,
        }
    }
}

fn qi(x: i64) -> Q {
    q(x)
}

/// Checks axioms (1)-(11) and passing-up (12′) on sampled tuples.
pub fn verify_hhs_axioms<H: Hierarchy + ?Sized>(h: &H, bounds: &AxiomBounds, samples: usize, seed: u64) -> Result<AxiomReport> {
    let m = Metric::new(h);
    let n_pts = h.point_count();
    let n_dom = h.domain_count();
    let mut rng = trial_rng(seed, 7);
    let e = h.e();
    let wg = h.word_graph();
    let pick_pair = |rng: &mut rand_chacha::ChaCha8Rng| -> (Vertex, Vertex) {
        let p = rng.gen_range(0..n_pts) as Vertex;
        let q = if rng.gen_bool(0.5) {
            rng.gen_range(0..n_pts) as Vertex
        } else {
            *wg.neighbors(p).choose(rng).unwrap_or(&p)
        };
        (p, q)
    };
    let mut results = Vec::new();

    // (1) projections
    let mut a1 = Acc::new("1 projections");
    for _ in 0..samples {
        let p = rng.gen_range(0..n_pts) as Vertex;
        let Some(&q) = wg.neighbors(p).choose(&mut rng) else { continue };
        let mut doms = h.relevant(p, q);
        doms.push(rng.gen_range(0..n_dom));
        for u in doms {
            let (pp, pq) = (h.proj(u, p)?, h.proj(u, q)?);
            if pp.is_empty() {
                a1.fail(format!("empty projection of {p} to {}", h.domain_label(u)));
                continue;
            }
            let diam = m.diam(u, &pp);
            a1.see(qi(diam), || format!("diam π_{}({p}) = {diam}", h.domain_label(u)));
            let d = m.set_dist(u, &pp, &pq);
            a1.see(q_frac(d, 2), || format!("d_{}({p},{q}) = {d} for adjacent points", h.domain_label(u)));
        }
    }
    let mut onto_doms: Vec<usize> = vec![0];
    onto_doms.extend((0..20.min(n_dom)).map(|_| rng.gen_range(0..n_dom)));
    onto_doms.sort_unstable();
    onto_doms.dedup();
    for u in onto_doms {
        let mut hit: Vec<i64> = Vec::new();
        for p in 0..n_pts as Vertex {
            hit.extend(h.proj(u, p)?);
        }
        hit.sort_unstable();
        hit.dedup();
        let gap = match h.space(u) {
            SpaceRef::Segment { lo, hi } => (lo..=hi)
                .map(|t| hit.iter().map(|&c| (c - t).abs()).min().unwrap_or(FAR))
                .max()
                .unwrap_or(0),
            SpaceRef::Graph(g) => {
                let src: Vec<Vertex> = hit.iter().filter(|&&c| c >= 0 && (c as usize) < g.vertex_count()).map(|&c| c as Vertex).collect();
                let row = g.bfs_multi(&src);
                row.iter().map(|&d| if d == UNREACHABLE { FAR } else { i64::from(d) }).max().unwrap_or(0)
            }
        };
        a1.see(qi(gap), || format!("coarse surjectivity gap {gap} in {}", h.domain_label(u)));
    }
    results.push(a1.finish(bounds.get(1)?));

    // (2) nesting
    let mut a2 = Acc::new("2 nesting");
    let mut nested_pairs: Vec<(usize, usize)> = Vec::new();
    for u in 1..n_dom {
        if h.relation(u, 0) != Relation::Nested {
            a2.fail(format!("{} is not nested in the top domain", h.domain_label(u)));
        }
    }
    let full = n_dom <= 200;
    for u in 0..n_dom {
        let vs: Vec<usize> = if full { (0..n_dom).collect() } else { vec![0] };
        for v in vs {
            if h.relation(u, v) == Relation::Nested {
                nested_pairs.push((u, v));
            }
        }
    }
    let mut nest_sample = nested_pairs.clone();
    if nest_sample.len() > samples {
        nest_sample.shuffle(&mut rng);
        nest_sample.truncate(samples);
    }
    for &(u, v) in &nest_sample {
        let r = h.rho(u, v)?;
        if r.is_empty() {
            a2.fail(format!("empty ρ from {} to {}", h.domain_label(u), h.domain_label(v)));
            continue;
        }
        let diam = m.diam(v, &r);
        a2.see(qi(diam), || format!("diam ρ^{}_{} = {diam}", h.domain_label(u), h.domain_label(v)));
    }
    results.push(a2.finish(bounds.get(2)?));

    // (3) finite complexity
    let mut a3 = Acc::new("3 finite complexity");
    let chain = if full {
        let mut height = vec![0usize; n_dom];
        let mut order: Vec<usize> = (0..n_dom).collect();
        // a domain sits above everything nested in it, so count what it contains
        order.sort_by_key(|&u| (0..n_dom).filter(|&v| h.relation(v, u) == Relation::Nested).count());
        for &u in &order {
            height[u] = 1 + (0..n_dom).filter(|&v| h.relation(v, u) == Relation::Nested).map(|v| height[v]).max().unwrap_or(0);
        }
        height.into_iter().max().unwrap_or(0)
    } else {
        // every domain below the top is compared with the rest by sampling
        let mut deepest = 1;
        for _ in 0..samples {
            let (u, v) = (rng.gen_range(1..n_dom.max(2)), rng.gen_range(1..n_dom.max(2)));
            if u < n_dom && v < n_dom && h.relation(u, v) == Relation::Nested {
                deepest = 3;
            } else if u < n_dom {
                deepest = deepest.max(2);
            }
        }
        if n_dom == 1 {
            1
        } else {
            deepest
        }
    };
    a3.see(qi(chain as i64), || format!("longest ⊑-chain has {chain} domains"));
    results.push(a3.finish(bounds.get(3)?));

    // (4) orthogonality and (5) containers
    let mut a4 = Acc::new("4 orthogonality");
    let mut a5 = Acc::new("5 containers");
    if h.has_orthogonality() {
        for u in 0..n_dom {
            for v in 0..n_dom {
                if h.relation(u, v) != Relation::Orth {
                    continue;
                }
                a4.checked += 1;
                if h.relation(v, u) != Relation::Orth {
                    a4.fail(format!("⊥ not symmetric at ({u},{v})"));
                }
                for w in 0..n_dom {
                    if h.relation(w, u) == Relation::Nested && h.relation(w, v) != Relation::Orth {
                        a4.fail(format!("{w} ⊑ {u} ⊥ {v} but {w} not ⊥ {v}"));
                    }
                }
            }
        }
        for w in 0..n_dom {
            let below: Vec<usize> = (0..n_dom).filter(|&v| v == w || h.relation(v, w) == Relation::Nested).collect();
            for &u in &below {
                let orth: Vec<usize> = below.iter().copied().filter(|&v| h.relation(v, u) == Relation::Orth).collect();
                if orth.is_empty() {
                    continue;
                }
                a5.checked += 1;
                let ok = below.iter().any(|&c| orth.iter().all(|&v| v == c || h.relation(v, c) == Relation::Nested));
                if !ok {
                    a5.fail(format!("no container for {} inside {}", h.domain_label(u), h.domain_label(w)));
                }
            }
        }
    }
    results.push(a4.finish(bounds.get(4)?));
    results.push(a5.finish(bounds.get(5)?));

    // (6) transversality and (7) consistency
    let mut a6 = Acc::new("6 transversality");
    let mut a7 = Acc::new("7 consistency");
    for _ in 0..samples {
        let (p, q) = pick_pair(&mut rng);
        let rel = h.relevant(p, q);
        let mut cands: Vec<usize> = rel.iter().copied().filter(|&u| u != 0).collect();
        cands.push(rng.gen_range(0..n_dom));
        cands.push(rng.gen_range(0..n_dom));
        let (Some(&u), Some(&v)) = (cands.choose(&mut rng), cands.choose(&mut rng)) else { continue };
        if h.relation(u, v) != Relation::Trans {
            continue;
        }
        let (ruv, rvu) = (h.rho(u, v)?, h.rho(v, u)?);
        if ruv.is_empty() || rvu.is_empty() {
            a6.fail(format!("empty ρ between {} and {}", h.domain_label(u), h.domain_label(v)));
            continue;
        }
        let d = m.diam(v, &ruv).max(m.diam(u, &rvu));
        a6.see(qi(d), || format!("ρ between {} and {} has diameter {d}", h.domain_label(u), h.domain_label(v)));
        let c = m.set_dist(v, &h.proj(v, p)?, &ruv).min(m.set_dist(u, &h.proj(u, p)?, &rvu));
        a7.see(qi(c), || format!("consistency at {p} for {} ⋔ {}: {c}", h.domain_label(u), h.domain_label(v)));
    }
    for &(u, v) in nested_pairs.iter().filter(|&&(_, v)| v != 0).take(samples) {
        for w in 0..n_dom {
            let rvw = h.relation(v, w);
            if rvw == Relation::Nested || (rvw == Relation::Trans && h.relation(w, u) != Relation::Orth) {
                let d = m.set_dist(w, &h.rho(u, w)?, &h.rho(v, w)?);
                a7.see(qi(d), || format!("d_{}(ρ^{u}, ρ^{v}) = {d}", h.domain_label(w)));
            }
        }
    }
    results.push(a6.finish(bounds.get(6)?));
    results.push(a7.finish(bounds.get(7)?));

    // (8) hyperbolicity
    let mut a8 = Acc::new("8 hyperbolicity");
    let mut graph_doms = vec![0];
    graph_doms.extend((1..n_dom).filter(|&u| matches!(h.space(u), SpaceRef::Graph(_))).take(10));
    for u in graph_doms {
        if let SpaceRef::Graph(g) = h.space(u) {
            let d = measure_slimness(g, samples.max(50), seed)?;
            a8.see(qi(i64::from(d)), || format!("{} is {d}-slim", h.domain_label(u)));
        }
    }
    results.push(a8.finish(bounds.get(8)?));

    // (9) bounded geodesic image
    let (b9, f9) = bounds.get(9)?;
    let mut a9 = Acc::new("9 bounded geodesic image");
    for _ in 0..samples {
        let p = rng.gen_range(0..n_pts) as Vertex;
        let q = rng.gen_range(0..n_pts) as Vertex;
        let mut best: Option<(i64, usize)> = None;
        for v in h.relevant(p, q).into_iter().filter(|&v| v != 0) {
            let dv = m.set_dist(v, &h.proj(v, p)?, &h.proj(v, q)?);
            if best.is_none_or(|(b, _)| dv > b) {
                best = Some((dv, v));
            }
        }
        let Some((dv, v)) = best else { continue };
        let w = 0;
        if h.relation(v, w) != Relation::Nested {
            continue;
        }
        let SpaceRef::Graph(g) = h.space(w) else { continue };
        let (Some(&a), Some(&b)) = (h.proj(w, p)?.first(), h.proj(w, q)?.first()) else { continue };
        let rho: Vec<Vertex> = h.rho(v, w)?.into_iter().map(|x| x as Vertex).collect();
        let r = bottleneck(g, a as Vertex, b as Vertex, &rho);
        let c = (dv + 1).min(r);
        a9.see(qi(c), || format!("d_{}({p},{q}) = {dv}, a geodesic stays {r} from ρ", h.domain_label(v)));
    }
    results.push(a9.finish((b9, f9)));

    // (10) partial realization
    let mut a10 = Acc::new("10 partial realization");
    let top_points = |g: &MetricGraph, p: Vertex| -> i64 {
        let row = g.bfs(p);
        (0..n_pts).map(|x| row[x]).filter(|&d| d != UNREACHABLE).min().map_or(FAR, i64::from)
    };
    for i in 0..(samples / 10).max(5) {
        let v = if i == 0 { 0 } else { rng.gen_range(0..n_dom) };
        match h.space(v) {
            SpaceRef::Graph(g) if v == 0 => {
                let p = rng.gen_range(0..g.vertex_count()) as Vertex;
                let d = top_points(g, p);
                a10.see(qi(d), || format!("top point {p} is {d} from the points"));
            }
            space => {
                let target = match space {
                    SpaceRef::Segment { lo, hi } => rng.gen_range(lo..=hi),
                    SpaceRef::Graph(g) => rng.gen_range(0..g.vertex_count()) as i64,
                };
                // rank candidates by the target coordinate, then by closeness
                // to ρ^V_S, the natural place for a realization point
                let top_row = match h.space(0) {
                    SpaceRef::Graph(g0) => {
                        let src: Vec<Vertex> = h.rho(v, 0)?.into_iter().map(|c| c as Vertex).collect();
                        Some(g0.bfs_multi(&src))
                    }
                    SpaceRef::Segment { .. } => None,
                };
                let mut scored: Vec<(i64, u32, Vertex)> = Vec::with_capacity(n_pts);
                for x in 0..n_pts as Vertex {
                    let dt = match &top_row {
                        Some(r) => h.proj(0, x)?.iter().map(|&c| r[c as usize]).min().unwrap_or(UNREACHABLE),
                        None => 0,
                    };
                    scored.push((m.set_dist(v, &h.proj(v, x)?, &[target]), dt, x));
                }
                scored.sort_unstable();
                let mut others: Vec<usize> = vec![0];
                others.extend((0..30).map(|_| rng.gen_range(0..n_dom)));
                others.sort_unstable();
                others.dedup();
                let mut best = FAR;
                for &(d0, _, x) in scored.iter().take(8) {
                    let mut worst = d0;
                    for &w in &others {
                        let rel = h.relation(v, w);
                        if rel == Relation::Nested || rel == Relation::Trans {
                            worst = worst.max(m.set_dist(w, &h.proj(w, x)?, &h.rho(v, w)?));
                        }
                    }
                    best = best.min(worst);
                }
                a10.see(qi(best), || format!("realizing {target} in {} costs {best}", h.domain_label(v)));
            }
        }
    }
    results.push(a10.finish(bounds.get(10)?));

    // (11) uniqueness and (12′) passing up, as tables
    let mut pairs = Vec::new();
    for _ in 0..samples {
        let (p, q) = pick_pair(&mut rng);
        let row = wg.bfs(p);
        let dx = i64::from(row[q as usize]);
        let mut top = 0;
        let mut big = Vec::new();
        let mut dtop = 0;
        for u in h.relevant(p, q) {
            let d = m.set_dist(u, &h.proj(u, p)?, &h.proj(u, q)?);
            top = top.max(d);
            if u == 0 {
                dtop = d;
            } else {
                big.push(d);
            }
        }
        pairs.push((dx, top, dtop, big));
    }
    let mut a11 = Acc::new("11 uniqueness");
    let rmax = pairs.iter().map(|p| p.1).max().unwrap_or(0) + 1;
    for r in 1..=rmax {
        let theta = 1 + pairs.iter().filter(|p| p.1 < r).map(|p| p.0).max().unwrap_or(-1);
        a11.table.push((r, theta));
    }
    a11.checked = pairs.len();
    results.push(a11.finish((q(0), "θ table".into())));
    let mut a12 = Acc::new("12' passing up");
    let tmax = pairs.iter().map(|p| p.2).max().unwrap_or(0) + 1;
    for t in 1..=tmax {
        let worst = pairs
            .iter()
            .filter(|p| p.2 <= t)
            .map(|p| p.3.iter().filter(|&&d| qi(d) > e).count() as i64)
            .max()
            .unwrap_or(0);
        a12.table.push((t, worst + 1));
    }
    a12.checked = pairs.len();
    results.push(a12.finish((q(0), "P table".into())));

    let pass = results.iter().all(|r| r.pass);
    Ok(AxiomReport { structure: h.name(), e, results, pass })
}

/// Largest distance to `avoid` that some geodesic from `a` to `b` keeps
/// along its whole length.
fn bottleneck(g: &MetricGraph, a: Vertex, b: Vertex, avoid: &[Vertex]) -> i64 {
    let da = g.bfs(a);
    let db = g.bfs(b);
    let dr = g.bfs_multi(avoid);
    let total = da[b as usize];
    if total == UNREACHABLE {
        return 0;
    }
    let mut layer: Vec<Vec<Vertex>> = vec![Vec::new(); total as usize + 1];
    for v in 0..g.vertex_count() {
        if da[v] != UNREACHABLE && db[v] != UNREACHABLE && da[v] + db[v] == total {
            layer[da[v] as usize].push(v as Vertex);
        }
    }
    let mut best: HashMap<Vertex, u32> = HashMap::new();
    best.insert(a, dr[a as usize]);
    for k in 1..=total as usize {
        for &v in &layer[k] {
            let prev = g
                .neighbors(v)
                .iter()
                .filter(|&&u| da[u as usize] as usize == k - 1)
                .filter_map(|u| best.get(u))
                .max()
                .copied()
                .unwrap_or(0);
            best.insert(v, prev.min(dr[v as usize]));
        }
    }
    i64::from(best.get(&b).copied().unwrap_or(0))
}

/// A domain class of the quotient: base domains identified by the normal
/// closure, with the shift carrying each member's line onto the first one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DomainClass {
    pub members: Vec<usize>,
    pub shifts: Vec<i64>,
}

/// The quotient structure: top space X̄, domain classes with the
/// coordinate space of their first member, projections through minimal
/// representatives.
pub struct QuotientHhs {
    pub base: HhsStructure,
    pub inst: SpinningInstance,
    pub quot: QuotientGraph,
    /// word metric on point classes
    pub x_bar: MetricGraph,
    pub domain_classes: Vec<DomainClass>,
    class_of_domain: Vec<usize>,
    pub aleph: Q,
    pub beth: Q,
    pub bounds: AxiomBounds,
    pub unique_reps: UniqueRepsReport,
    relations: HashMap<(usize, usize), Relation>,
    top: Space,
    hat_rows: RefCell<HashMap<Vertex, Rc<Vec<u32>>>>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct UniqueRepsReport {
    pub checked: usize,
    pub violations: usize,
}

/// Spinning instance on the top space of a structure: base vertices are the
/// points, one cone per non-top domain over `ρ^U_S` and one per family line.
pub fn spinning_for(h: &HhsStructure, relator: &Word, l: Q, family_radius: Option<u32>) -> Result<SpinningInstance> {
    let ball = h.ball.clone().ok_or_else(|| Error::NotApplicable("structure has no group ball".into()))?;
    let x = h.top_graph().clone();
    let domains = h.domains[1..]
        .iter()
        .map(|d| {
            let key = d.key.clone().ok_or_else(|| Error::NotApplicable(format!("domain {} has no group key", d.name)))?;
            Ok((key, Subspace::new(&x, d.rho_top.iter().copied())?))
        })
        .collect::<Result<Vec<_>>>()?;
    SpinningInstance::with_domains(ball, x, relator, l, family_radius, domains)
}

/// `ℵ`: the largest projection of a family line to a factor coset, over
/// the lines and the cosets through their ball points.
pub fn measure_aleph(h: &HhsStructure, inst: &SpinningInstance, samples: usize, seed: u64) -> Q {
    if h.domains.len() == 1 {
        return q(0);
    }
    let mut idx: Vec<usize> = (0..inst.lines.len()).collect();
    if idx.len() > samples {
        idx.shuffle(&mut trial_rng(seed, 11));
        idx.truncate(samples);
    }
    let rank = inst.rank();
    let mut best = 0;
    for i in idx {
        let y = &inst.lines[i];
        for &v in &y.members {
            let g = inst.ball.element(v);
            for letter in 1..=rank as Letter {
                if let Ok(u) = coset_line(letter, &coset_rep(g, letter)) {
                    let (a, b) = u.projection_span(y);
                    best = best.max(b - a);
                }
            }
        }
    }
    q(best)
}

impl QuotientHhs {
    fn hat_row(&self, v: Vertex) -> Rc<Vec<u32>> {
        if let Some(r) = self.hat_rows.borrow().get(&v) {
            return r.clone();
        }
        let r = Rc::new(self.inst.cone.graph.bfs(v));
        let mut rows = self.hat_rows.borrow_mut();
        if rows.len() > 512 {
            rows.clear();
        }
        rows.insert(v, r.clone());
        r
    }

    fn cone_of(&self, u: usize) -> Vertex {
        self.inst.cone.cone_vertex(u - 1)
    }

    pub fn point_class_count(&self) -> usize {
        self.x_bar.vertex_count()
    }

    /// Members of a point class.
    pub fn point_members(&self, c: Vertex) -> &[Vertex] {
        &self.quot.members[c as usize]
    }

    /// Pairs `(x, U)` of lifts realizing the least X̂ distance.
    pub fn minimal_lifts(&self, c: Vertex, du: usize) -> Vec<(Vertex, usize, i64)> {
        let cls = &self.domain_classes[du];
        let xs = self.point_members(c);
        let mut best = u32::MAX;
        let mut out = Vec::new();
        for (i, &u) in cls.members.iter().enumerate() {
            let row = self.hat_row(self.cone_of(u));
            for &x in xs {
                let d = row[x as usize];
                if d < best {
                    best = d;
                    out.clear();
                }
                if d == best {
                    out.push((x, u, cls.shifts[i]));
                }
            }
        }
        out
    }

    /// Pairs of domains realizing the least X̂ distance between cones.
    fn minimal_domain_pairs(&self, du: usize, dv: usize) -> Vec<(usize, i64, usize)> {
        let (cu, cv) = (&self.domain_classes[du], &self.domain_classes[dv]);
        let mut best = u32::MAX;
        let mut out = Vec::new();
        for (i, &u) in cu.members.iter().enumerate() {
            let row = self.hat_row(self.cone_of(u));
            for &v in &cv.members {
                let d = row[self.cone_of(v) as usize];
                if d < best {
                    best = d;
                    out.clear();
                }
                if d == best {
                    out.push((u, cu.shifts[i], v));
                }
            }
        }
        out
    }
}

/// Builds the quotient structure of `h` by the normal closure of the
/// instance's relator, saturated with conjugators up to `budget`.
pub fn build_quotient_structure(h: &HhsStructure, inst: SpinningInstance, budget: u32, seed: u64) -> Result<QuotientHhs> {
    if inst.domain_cones + 1 != h.domains.len() {
        return Err(Error::Invalid("instance cones do not match the structure domains".into()));
    }
    let quot = build_quotient(&inst, budget)?;
    let nb = inst.ball.vertex_count();
    let point_classes = quot.class_of[..nb].iter().copied().max().map_or(0, |m| m as usize + 1);
    let mut edges: Vec<(Vertex, Vertex)> = h
        .x
        .edges()
        .map(|(a, b)| (quot.class(a), quot.class(b)))
        .filter(|(a, b)| a != b)
        .map(|(a, b)| (a.min(b), a.max(b)))
        .collect();
    edges.sort_unstable();
    edges.dedup();
    let x_bar = MetricGraph::from_edges(point_classes, edges)?;

    let mut by_class: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for u in 1..h.domains.len() {
        by_class.entry(quot.class(inst.cone.cone_vertex(u - 1))).or_default().push(u);
    }
    let mut domain_classes = vec![DomainClass { members: vec![0], shifts: vec![0] }];
    let mut class_of_domain = vec![0usize; h.domains.len()];
    let mut groups: Vec<Vec<usize>> = by_class.into_values().collect();
    groups.sort();
    for members in groups {
        let u0 = members[0];
        let mut shifts = Vec::with_capacity(members.len());
        for &u in &members {
            if u == u0 {
                shifts.push(0);
                continue;
            }
            let (Some(ConeKey::Coset { letter, rep }), Some(ConeKey::Coset { rep: rep0, .. })) =
                (&h.domains[u].key, &h.domains[u0].key)
            else {
                return Err(Error::NotApplicable("merged domains without line coordinates".into()));
            };
            let n = quot
                .witness_element(inst.cone.cone_vertex(u - 1), inst.cone.cone_vertex(u0 - 1))
                .ok_or_else(|| Error::Invalid("merged cones without a witness".into()))?
                .word();
            let s = rep0.inverse().mul(&n).mul(rep);
            if s.letters().iter().any(|&x| x.abs() != *letter) {
                return Err(Error::Invalid(format!("{n} does not carry {rep}<{letter}> onto {rep0}")));
            }
            shifts.push(s.letters().iter().map(|&x| i64::from(x.signum())).sum());
        }
        let idx = domain_classes.len();
        for &u in &members {
            class_of_domain[u] = idx;
        }
        domain_classes.push(DomainClass { members, shifts });
    }

    let aleph = measure_aleph(h, &inst, 2000, seed);
    let e = h.e.clone();
    let beth = q(2) * &aleph + q(27) * &e;
    let mut qh = QuotientHhs {
        base: h.clone(),
        top: Space::Graph(quot.graph.clone()),
        inst,
        quot,
        x_bar,
        domain_classes,
        class_of_domain,
        aleph,
        beth,
        bounds: AxiomBounds { constants: Vec::new() },
        unique_reps: UniqueRepsReport::default(),
        relations: HashMap::new(),
        hat_rows: RefCell::new(HashMap::new()),
    };
    // relations through minimal pairs, forced equal across every minimal pair
    let multi: Vec<usize> = (1..qh.domain_classes.len()).filter(|&c| qh.domain_classes[c].members.len() > 1).collect();
    for &cu in &multi {
        for cv in 1..qh.domain_classes.len() {
            if cv == cu {
                continue;
            }
            let rels: HashSet<Relation> =
                qh.minimal_domain_pairs(cu, cv).iter().map(|&(u, _, v)| h.relation(u, v)).collect();
            if rels.len() > 1 {
                return Err(Error::RelationConflict(format!(
                    "classes {cu} and {cv} have minimal pairs with relations {rels:?}"
                )));
            }
            let r = rels.into_iter().next().unwrap_or(Relation::Trans);
            qh.relations.insert((cu, cv), r);
            qh.relations.insert((cv, cu), r.flip());
        }
    }
    qh.unique_reps = unique_reps_audit(&qh, &multi);
    qh.bounds = quotient_bounds(&qh, seed)?;
    Ok(qh)
}

/// For a domain `U` and a class `V̄`: at most one member within `2A` of
/// `ρ^U_S` in the top space, and everything farther is transverse to `U`.
fn unique_reps_audit(qh: &QuotientHhs, multi: &[usize]) -> UniqueRepsReport {
    let mut rep = UniqueRepsReport::default();
    let ledger = crate::constants::derive(&crate::constants::BaseConstants { e: qh.base.e.clone(), ..Default::default() });
    let Ok(ledger) = ledger else { return rep };
    let two_a = ceil_q(&(q(2) * &ledger.a));
    let top = qh.base.top_graph();
    for &cv in multi {
        let members = &qh.domain_classes[cv].members;
        let rows: Vec<Vec<u32>> = members.iter().map(|&v| top.bfs_multi(&qh.base.domains[v].rho_top)).collect();
        for u in 1..qh.base.domains.len() {
            if members.contains(&u) {
                continue;
            }
            rep.checked += 1;
            let close: Vec<usize> = rows
                .iter()
                .enumerate()
                .filter(|(_, r)| qh.base.domains[u].rho_top.iter().any(|&x| i64::from(r[x as usize]) <= two_a))
                .map(|(i, _)| members[i])
                .collect();
            let ok = close.len() <= 1
                && members.iter().filter(|v| !close.contains(v)).all(|&v| qh.base.relation(u, v) == Relation::Trans);
            if !ok {
                rep.violations += 1;
            }
        }
    }
    rep
}

fn quotient_bounds(qh: &QuotientHhs, seed: u64) -> Result<AxiomBounds> {
    let e = qh.base.e.clone();
    let beth = qh.beth.clone();
    let delta_hat = q(i64::from(measure_slimness(&qh.inst.cone.graph, 200, seed)?));
    let s = crate::constants::q_to_string;
    let rows = vec![
        (beth.clone().max(q(2) * &e), "max(ℶ, 2E)"),
        (beth.clone(), "ℶ"),
        (e.clone(), "E"),
        (e.clone(), "E"),
        (e.clone(), "E"),
        (beth.clone(), "ℶ"),
        (e.clone().max(q(2)), "max(E, 2)"),
        (delta_hat.max(e.clone()), "max(δ̂, E)"),
        ((q(3) * &e + &beth).max(q(2)), "max(3E+ℶ, 2)"),
        (e.clone() + q(1), "E+1"),
    ];
    Ok(AxiomBounds { constants: rows.into_iter().map(|(v, f)| (s(&v), f.to_string())).collect() })
}

impl Hierarchy for QuotientHhs {
    fn name(&self) -> String {
        format!("quotient of {}", self.base.name)
    }

    fn e(&self) -> Q {
        self.base.e.clone()
    }

    fn word_graph(&self) -> &MetricGraph {
        &self.x_bar
    }

    fn domain_count(&self) -> usize {
        self.domain_classes.len()
    }

    fn domain_label(&self, u: usize) -> String {
        if u == 0 {
            "S̄".into()
        } else {
            format!("[{}]", self.base.domains[self.domain_classes[u].members[0]].name)
        }
    }

    fn space(&self, u: usize) -> SpaceRef<'_> {
        if u == 0 {
            self.top.as_ref()
        } else {
            self.base.space(self.domain_classes[u].members[0])
        }
    }

    fn relation(&self, u: usize, v: usize) -> Relation {
        if u == v {
            return Relation::Equal;
        }
        if u == 0 {
            return Relation::Contains;
        }
        if v == 0 {
            return Relation::Nested;
        }
        if let Some(r) = self.relations.get(&(u, v)) {
            return *r;
        }
        self.base.relation(self.domain_classes[u].members[0], self.domain_classes[v].members[0])
    }

    fn proj(&self, u: usize, p: Vertex) -> Result<Vec<i64>> {
        self.x_bar.check_vertex(p)?;
        if u == 0 {
            return Ok(vec![i64::from(p)]);
        }
        let mut out = Vec::new();
        for (x, du, shift) in self.minimal_lifts(p, u) {
            out.extend(self.base.proj(du, x)?.into_iter().map(|t| t + shift));
        }
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }

    fn rho(&self, u: usize, v: usize) -> Result<Vec<i64>> {
        if v == 0 {
            let c = self.domain_classes[u].members[0];
            return Ok(vec![i64::from(self.quot.class(self.cone_of(c)))]);
        }
        if u == 0 {
            return Err(Error::MissingRho(0));
        }
        let mut out = Vec::new();
        for (dv, shift, du) in self.minimal_domain_pairs(v, u) {
            out.extend(self.base.rho(du, dv)?.into_iter().map(|t| t + shift));
        }
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }

    fn relevant(&self, p: Vertex, q: Vertex) -> Vec<usize> {
        let lifts: Vec<Vertex> = self.point_members(p).iter().chain(self.point_members(q)).copied().collect();
        let mut out = vec![0];
        for (i, &a) in lifts.iter().enumerate() {
            for &b in &lifts[i..] {
                out.extend(self.base.relevant(a, b).into_iter().filter(|&u| u != 0).map(|u| self.class_of_domain[u]));
            }
        }
        out.extend((1..self.domain_classes.len()).filter(|&c| self.domain_classes[c].members.len() > 1));
        out.sort_unstable();
        out.dedup();
        out
    }

    fn has_orthogonality(&self) -> bool {
        self.base.has_orthogonality()
    }
}

/// One family of sampled inequalities.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub name: String,
    pub formula: String,
    #[serde(with = "qserde")]
    pub bound: Q,
    pub max_observed: i64,
    pub checked: usize,
    /// tuples whose lifts were not all found inside the ball
    pub truncated: usize,
    pub violations: usize,
    pub witnesses: Vec<String>,
}

impl BoundCheck {
    fn new(name: &str, formula: &str, bound: Q) -> Self {
        BoundCheck {
            name: name.into(),
            formula: formula.into(),
            bound,
            max_observed: 0,
            checked: 0,
            truncated: 0,
            violations: 0,
            witnesses: Vec::new(),
        }
    }

    fn see(&mut self, value: i64, witness: impl FnOnce() -> String) {
        self.checked += 1;
        self.max_observed = self.max_observed.max(value);
        if q(value) > self.bound {
            self.violations += 1;
            if self.witnesses.len() < 10 {
                self.witnesses.push(witness());
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuotientBoundsReport {
    #[serde(with = "qserde")]
    pub aleph: Q,
    #[serde(with = "qserde")]
    pub e: Q,
    #[serde(with = "qserde")]
    pub beth: Q,
    pub checks: Vec<BoundCheck>,
    pub violations: usize,
}

/// Instantiates the projection bounds of the quotient on sampled tuples.
pub fn check_quotient_bounds(qh: &QuotientHhs, samples: usize, seed: u64) -> Result<QuotientBoundsReport> {
    let e = qh.base.e.clone();
    let (aleph, beth) = (qh.aleph.clone(), qh.beth.clone());
    let mut diam = BoundCheck::new("projection diameter", "ℶ = 2ℵ+27E", beth.clone());
    let mut lifts = BoundCheck::new("minimal lifts project close", "2ℵ+9E", q(2) * &aleph + q(9) * &e);
    let mut welldef = BoundCheck::new("relative projections well defined", "2ℵ+25E", q(2) * &aleph + q(25) * &e);
    let mut almost = BoundCheck::new("almost minimal projection", "9ℵ+28E", q(9) * &aleph + q(28) * &e);
    let mut sandwich = BoundCheck::new("distance in quotient", "d_U − 2ℶ ≤ d_Ū ≤ d_U, d_X̄ ≤ d_X", q(0));
    let two_beth = ceil_q(&(q(2) * &beth));
    let m = Metric::new(qh);
    let mb = Metric::new(&qh.base);
    let mut rng = trial_rng(seed, 13);
    let npc = qh.point_class_count();
    let ndc = qh.domain_classes.len();
    let hat = &qh.inst.cone.graph;
    let qrow = |c: u32| qh.quot.graph.bfs(c);
    for _ in 0..samples {
        let xc = rng.gen_range(0..npc) as Vertex;
        let yc = rng.gen_range(0..npc) as Vertex;
        let rel: Vec<usize> = qh.relevant(xc, yc).into_iter().filter(|&u| u != 0).collect();
        let uc = if ndc <= 1 {
            None
        } else if let Some(&u) = rel.choose(&mut rng) {
            Some(u)
        } else {
            Some(rng.gen_range(1..ndc))
        };
        // the top-level half of the sandwich holds for every pair of lifts
        let rx = qrow(xc);
        let (x0, y0) = (qh.point_members(xc)[0], qh.point_members(yc)[0]);
        let dxw = qh.base.x.bfs(x0)[y0 as usize];
        let dbar = rx[yc as usize];
        sandwich.see(i64::from(dbar > dxw), || format!("d_X̄({xc},{yc}) = {dbar} > d_X = {dxw}"));
        let Some(u) = uc else { continue };
        let pu = qh.proj(u, xc)?;
        let dm = m.diam(u, &pu);
        diam.see(dm, || format!("diam π_{}({xc}) = {dm}", qh.domain_label(u)));
        // lifts of x̄ minimal with the same U project close in U
        let ml = qh.minimal_lifts(xc, u);
        for (i, a) in ml.iter().enumerate() {
            for b in &ml[i + 1..] {
                if a.1 == b.1 {
                    let d = mb.set_dist(a.1, &qh.base.proj(a.1, a.0)?, &qh.base.proj(a.1, b.0)?);
                    lifts.see(d, || format!("lifts {} and {} of {xc} differ by {d} in {}", a.0, b.0, qh.base.domains[a.1].name));
                }
            }
        }
        // a second domain class for ρ bounds
        let vc = rng.gen_range(1..ndc);
        if vc != u && qh.relation(u, vc) == Relation::Trans {
            let r = qh.rho(vc, u)?;
            let dr = m.diam(u, &r);
            diam.see(dr, || format!("diam ρ^{}_{} = {dr}", qh.domain_label(vc), qh.domain_label(u)));
            let v0 = qh.domain_classes[vc].members[0];
            let pairs = qh.minimal_domain_pairs(u, vc);
            for (i, a) in pairs.iter().enumerate() {
                for b in &pairs[i + 1..] {
                    if a.2 == b.2 && a.0 != b.0 {
                        let d = mb.set_dist(a.2, &qh.base.rho(a.0, a.2)?, &qh.base.rho(b.0, a.2)?);
                        welldef.see(d, || format!("ρ of {} and {} differ by {d}", a.0, b.0));
                    }
                }
            }
            let _ = v0;
        }
        // almost minimal lifts
        for &x in qh.point_members(xc) {
            for (j, &du) in qh.domain_classes[u].members.iter().enumerate() {
                let cone = qh.cone_of(du);
                let row_x = qh.hat_row(x);
                let near: Vec<Vertex> =
                    qh.hat_row(cone).iter().enumerate().filter(|(_, &d)| d <= 2).map(|(v, _)| v as Vertex).collect();
                let has_y = near.iter().any(|&y| {
                    let dy = rx[qh.quot.class(y) as usize];
                    row_x[y as usize] == dy
                });
                if !has_y {
                    continue;
                }
                let star: Vec<&(Vertex, usize, i64)> = ml.iter().filter(|l| l.1 == du).collect();
                if star.is_empty() {
                    almost.truncated += 1;
                    continue;
                }
                let px = qh.base.proj(du, x)?;
                let mut best = FAR;
                for s in star {
                    best = best.min(mb.set_dist(du, &px, &qh.base.proj(du, s.0)?));
                }
                let _ = j;
                almost.see(best, || format!("{x} is {best} from a minimal lift in {}", qh.base.domains[du].name));
            }
        }
        // sandwich with pairwise minimal lifts x, y, U
        let mly = qh.minimal_lifts(yc, u);
        let mut found = false;
        'outer: for a in &ml {
            let row = qh.hat_row(a.0);
            for b in mly.iter().filter(|b| b.1 == a.1) {
                if row[b.0 as usize] == dbar {
                    found = true;
                    let du = mb.set_dist(a.1, &qh.base.proj(a.1, a.0)?, &qh.base.proj(a.1, b.0)?);
                    let dq = m.set_dist(u, &pu, &qh.proj(u, yc)?);
                    let bad = dq > du || dq < du - two_beth;
                    sandwich.see(i64::from(bad), || format!("d_U = {du}, d_Ū = {dq} for {xc},{yc}"));
                    let dxw = qh.base.x.bfs(a.0)[b.0 as usize];
                    sandwich.see(i64::from(dbar > dxw), || format!("d_X̄ = {dbar} > d_X = {dxw}"));
                    break 'outer;
                }
            }
        }
        if !found {
            sandwich.truncated += 1;
        }
        let _ = hat;
    }
    let checks = vec![diam, lifts, welldef, almost, sandwich];
    let violations = checks.iter().map(|c| c.violations).sum();
    Ok(QuotientBoundsReport { aleph, e, beth, checks, violations })
}

/// Peripheral subgroups embed: no factor element of the ball lies in the
/// normal closure, and every sampled element of the closure has
/// translation length at least 2 in the top space.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeripheralReport {
    pub factor_elements: usize,
    pub in_normal_closure: usize,
    pub min_translation: Option<usize>,
    pub elements_checked: usize,
    pub pass: bool,
}

/// Cyclic syllable count: translation length in the coned Cayley graph of
/// a free product of cyclic groups.
pub fn cs_translation(w: &Word) -> usize {
    let c = w.cyclic_reduction().1;
    let l = c.letters();
    if l.is_empty() {
        return 0;
    }
    let mut runs = 1 + l.windows(2).filter(|p| p[0].abs() != p[1].abs()).count();
    if runs > 1 && l[0].abs() == l[l.len() - 1].abs() {
        runs -= 1;
    }
    if runs == 1 {
        // a power of one generator is elliptic
        0
    } else {
        runs
    }
}

pub fn peripheral_audit(h: &HhsStructure, quot: &QuotientGraph, relator: &Word) -> Result<PeripheralReport> {
    let ball = h.ball.as_ref().ok_or_else(|| Error::NotApplicable("structure has no group ball".into()))?;
    let pres = Presentation::small_cancellation(ball.presentation.rank, vec![relator.clone()])?;
    let dehn = pres.dehn()?;
    let mut factor_elements = 0;
    let mut in_n = 0;
    for w in &ball.elements {
        let l = w.letters();
        if !l.is_empty() && l.iter().all(|&x| x == l[0]) {
            factor_elements += 1;
            if dehn.is_trivial(w) {
                in_n += 1;
            }
        }
    }
    let mut min_t: Option<usize> = None;
    let mut checked = 0;
    for (i, g) in quot.generators.iter().enumerate() {
        for n in [g.clone(), g.pow(2), g.mul(&quot.generators[(i + 1) % quot.generators.len()])] {
            if n.is_identity() {
                continue;
            }
            checked += 1;
            let t = cs_translation(&n);
            min_t = Some(min_t.map_or(t, |m| m.min(t)));
        }
    }
    let pass = in_n == 0 && min_t.is_none_or(|t| t >= 2);
    Ok(PeripheralReport { factor_elements, in_normal_closure: in_n, min_translation: min_t, elements_checked: checked, pass })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn trivial_structure_has_one_domain() {
        let h = HhsStructure::trivial(&Presentation::free(2), 3).unwrap();
        assert_eq!(h.domains.len(), 1);
        assert_eq!(h.e, q(1));
        let r = verify_hhs_axioms(&h, &AxiomBounds::uniform(&h.e), 100, 1).unwrap();
        assert!(r.pass, "{r:#?}");
    }

    #[test]
    fn free_product_domains_are_factor_cosets() {
        let h = HhsStructure::free_product(&[1, 1], 3).unwrap();
        // cosets with a shortest element of length ≤ 2, for each of the two letters
        let expected: usize = (1..=2).map(|l| h.ball.as_ref().unwrap().elements.iter().filter(|x| x.len() < 3 && coset_rep(x, l) == **x).count()).sum();
        assert_eq!(h.domains.len(), 1 + expected);
        assert_eq!(h.domains.len(), 1 + 2 * 9);
        let r = verify_hhs_axioms(&h, &AxiomBounds::uniform(&h.e), 200, 2).unwrap();
        assert!(r.pass, "{r:#?}");
        assert!(HhsStructure::free_product(&[1], 3).is_err());
    }

    #[test]
    fn injected_rho_breaks_nesting() {
        let mut h = HhsStructure::free_product(&[1, 1], 3).unwrap();
        let far = h.ball.as_ref().unwrap().vertex_of(&w("aba")).unwrap();
        let other = h.ball.as_ref().unwrap().vertex_of(&w("BAB")).unwrap();
        for u in 1..h.domains.len() {
            h.inject_rho(u, 0, vec![i64::from(far), i64::from(other)]);
        }
        let r = verify_hhs_axioms(&h, &AxiomBounds::uniform(&h.e), 50, 3).unwrap();
        let n = r.get("2").unwrap();
        assert!(!n.pass);
        assert!(!n.witnesses.is_empty());
    }

    #[test]
    fn translation_counts_cyclic_syllables() {
        assert_eq!(cs_translation(&w("aaa")), 0);
        assert_eq!(cs_translation(&w("ab")), 2);
        assert_eq!(cs_translation(&w("abA")), 0);
        assert_eq!(cs_translation(&w("aabbaB")), 4);
    }

    #[test]
    fn bottleneck_on_a_cycle() {
        let g = MetricGraph::from_edges(6, (0..6).map(|i| (i, (i + 1) % 6))).unwrap();
        // two geodesics from 0 to 3; the one through 4 and 5 stays away from 1
        assert_eq!(bottleneck(&g, 0, 3, &[1]), 1);
        assert_eq!(bottleneck(&g, 0, 3, &[0]), 0);
    }

    const RELATOR: &str = "baBBBBBaBBabaaaaBABBBAABBAbbaBBaBAA";

    #[test]
    fn trivial_normal_subgroup_gives_the_base_structure() {
        let h = HhsStructure::free_product(&[1, 1], 3).unwrap();
        let inst = spinning_for(&h, &w(RELATOR), q(10), None).unwrap();
        let qh = build_quotient_structure(&h, inst, 2, 1).unwrap();
        assert_eq!(qh.point_class_count(), h.x.vertex_count());
        assert_eq!(qh.domain_count(), h.domain_count());
        assert_eq!(qh.x_bar.edge_count(), h.x.edge_count());
        let b = check_quotient_bounds(&qh, 200, 1).unwrap();
        assert_eq!(b.violations, 0, "{b:#?}");
        let r = verify_hhs_axioms(&qh, &qh.bounds, 200, 1).unwrap();
        assert!(r.pass, "{r:#?}");
        let p = peripheral_audit(&h, &qh.quot, &w(RELATOR)).unwrap();
        assert!(p.pass, "{p:#?}");
        assert_eq!(p.in_normal_closure, 0);
    }

    #[test]
    fn cyclic_toy_quotient_meets_the_bounds() {
        let h = HhsStructure::trivial(&Presentation::free(1), 10).unwrap();
        let inst = SpinningInstance::z_toy(10, 5, q(3)).unwrap();
        let qh = build_quotient_structure(&h, inst, 4, 1).unwrap();
        assert_eq!(qh.point_class_count(), 5);
        assert_eq!(qh.aleph, q(0));
        let b = check_quotient_bounds(&qh, 200, 2).unwrap();
        assert_eq!(b.violations, 0, "{b:#?}");
        let r = verify_hhs_axioms(&qh, &qh.bounds, 200, 2).unwrap();
        assert!(r.pass, "{r:#?}");
    }
}
