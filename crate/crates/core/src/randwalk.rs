//! Random walks on free groups and their quotients: sampling, drift and
//! translation-length estimates, quasi-axes and match detection.

use std::collections::BTreeSet;

use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::{q, q_frac, Q};
use crate::error::{Error, Result};
use crate::graph::{quasiconvexity_constant, Sampling, Subspace, Vertex, DEFAULT_EXHAUSTIVE_CAP};
use crate::groups::{free_words, CayleyBall, Presentation, Word};

/// Stream `trial` of the generator seeded by `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(trial);
    r
}

/// Finitely supported probability measure on a group.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Measure {
    pub support: Vec<(Word, f64)>,
    pub symmetric: bool,
}

impl Measure {
    /// Validates masses (positive, summing to 1) and records symmetry.
    pub fn new(support: Vec<(Word, f64)>) -> Result<Self> {
        if support.is_empty() {
            return Err(Error::Invalid("measure with empty support".into()));
        }
        if support.iter().any(|(_, p)| !(*p > 0.0) || !p.is_finite()) {
            return Err(Error::Invalid("masses must be positive".into()));
        }
        let total: f64 = support.iter().map(|(_, p)| p).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Invalid(format!("masses sum to {total}, not 1")));
        }
        let mass = |w: &Word| support.iter().filter(|(v, _)| v == w).map(|(_, p)| p).sum::<f64>();
        let symmetric = support.iter().all(|(w, p)| (mass(&w.inverse()) - mass(w)).abs() < 1e-12 && *p > 0.0);
        Ok(Measure { support, symmetric })
    }

    /// Uniform on the generators and their inverses.
    pub fn uniform(p: &Presentation) -> Self {
        let letters = p.letters();
        let m = 1.0 / letters.len() as f64;
        Measure::new(letters.into_iter().map(|l| (Word::generator(l), m)).collect()).expect("valid")
    }

    pub fn point_mass(w: Word) -> Self {
        Measure::new(vec![(w, 1.0)]).expect("valid")
    }

    /// A symmetric measure whose support generates a cyclic subgroup
    /// (checked as pairwise commuting support).
    pub fn is_elementary(&self, p: &Presentation) -> Result<bool> {
        if !self.symmetric {
            return Ok(false);
        }
        for (i, (a, _)) in self.support.iter().enumerate() {
            for (b, _) in &self.support[i + 1..] {
                if !p.equal(&p.multiply(a, b)?, &p.multiply(b, a)?)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    fn sampler(&self) -> WeightedIndex<f64> {
        WeightedIndex::new(self.support.iter().map(|(_, p)| *p)).expect("validated masses")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkSample {
    pub seed: u64,
    pub trial: u64,
    pub increments: Vec<Word>,
    /// `w_0 = 1, ..., w_n`, in normal form
    pub prefix_endpoints: Vec<Word>,
}

impl WalkSample {
    pub fn endpoint(&self) -> &Word {
        self.prefix_endpoints.last().expect("contains the identity")
    }
}

/// Walk of length `n` on stream `trial` of `seed`.
pub fn sample_walk(p: &Presentation, m: &Measure, n: usize, seed: u64, trial: u64) -> Result<WalkSample> {
    let mut rng = trial_rng(seed, trial);
    let dist = m.sampler();
    let mut increments = Vec::with_capacity(n);
    let mut prefix_endpoints = vec![Word::identity()];
    for _ in 0..n {
        let step = m.support[dist.sample(&mut rng)].0.clone();
        let next = p.multiply(prefix_endpoints.last().expect("non-empty"), &step)?;
        increments.push(step);
        prefix_endpoints.push(next);
    }
    Ok(WalkSample { seed, trial, increments, prefix_endpoints })
}

/// Endpoint only, freely reduced (free groups).
fn free_endpoint(m: &Measure, n: usize, seed: u64, trial: u64) -> Word {
    let mut rng = trial_rng(seed, trial);
    let dist = m.sampler();
    let mut w = Word::identity();
    for _ in 0..n {
        w = w.mul(&m.support[dist.sample(&mut rng)].0);
    }
    w
}

/// Endpoint of the walk on stream `trial`, in normal form.
pub fn walk_endpoint(p: &Presentation, m: &Measure, n: usize, seed: u64, trial: u64) -> Result<Word> {
    let w = free_endpoint(m, n, seed, trial);
    if p.is_free() {
        Ok(w)
    } else {
        p.normal_form(&w)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriftEstimate {
    pub n: usize,
    pub trials: usize,
    pub mean: f64,
    /// standard error of the mean
    pub stderr: f64,
    /// sample standard deviation of a single `|w_n| / n`
    pub sd: f64,
    pub samples: Vec<f64>,
}

impl DriftEstimate {
    /// `Δ̂ − 3·stderr`, the value used downstream.
    pub fn conservative(&self) -> f64 {
        self.mean - 3.0 * self.stderr
    }

    /// Relative spread of one walk, `sd / mean`.
    pub fn coefficient_of_variation(&self) -> f64 {
        if self.mean > 0.0 {
            self.sd / self.mean
        } else {
            f64::INFINITY
        }
    }
}

/// Mean of `|w_n| / n` over independent trials.  Word length is the
/// normal-form length, exact for free groups.
pub fn estimate_drift(p: &Presentation, m: &Measure, n: usize, trials: usize, seed: u64) -> Result<DriftEstimate> {
    if trials < 2 {
        return Err(Error::InsufficientSamples { need: 2, got: trials });
    }
    if n == 0 {
        return Err(Error::Invalid("walk length must be positive".into()));
    }
    if m.is_elementary(p)? {
        return Err(Error::ElementaryMeasure("support generates a cyclic subgroup".into()));
    }
    let samples: Vec<f64> = (0..trials as u64)
        .into_par_iter()
        .map(|t| walk_endpoint(p, m, n, seed, t).map(|w| w.len() as f64 / n as f64))
        .collect::<Result<_>>()?;
    let k = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / k;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0);
    let sd = var.sqrt();
    Ok(DriftEstimate { n, trials, mean, stderr: sd / k.sqrt(), sd, samples })
}

/// Stable translation length: cyclically reduced length for free groups,
/// `|g^k| / k` otherwise.
pub fn translation_length(p: &Presentation, g: &Word, k_max: u32) -> Result<Q> {
    if k_max < 2 {
        return Err(Error::Invalid("k_max must be at least 2".into()));
    }
    if p.is_free() {
        return Ok(q(g.cyclic_reduction().1.len() as i64));
    }
    let gk = p.normal_form(&g.pow(k_max as i64))?;
    Ok(q_frac(gk.len() as i64, k_max as i64))
}

/// Geodesic segment `start · dir[..i]`, `i = 0..=|dir|`, in a free group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub start: Word,
    pub dir: Word,
}

impl Segment {
    pub fn from_identity(w: &Word) -> Self {
        Segment { start: Word::identity(), dir: w.clone() }
    }

    pub fn len(&self) -> usize {
        self.dir.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dir.is_empty()
    }

    pub fn point(&self, i: usize) -> Word {
        self.start.mul(&self.dir.prefix(i))
    }

    pub fn points(&self) -> Vec<Word> {
        let mut out = Vec::with_capacity(self.len() + 1);
        let mut cur = self.start.clone();
        out.push(cur.clone());
        for &l in self.dir.letters() {
            cur.push(l);
            out.push(cur.clone());
        }
        out
    }
}

/// Broken geodesic `∪ g^r [y, g y]` for `|r| ≤ r_max`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuasiAxis {
    pub g: Word,
    pub y: Word,
    /// displacement of `y`, minimal over the ball
    pub displacement: usize,
    pub segment: Vec<Word>,
    pub span: Vec<Word>,
    /// span points inside the ball
    pub in_ball: Vec<Vertex>,
    /// measured quasiconvexity of the in-ball span
    pub quasiconvexity: u32,
    pub quasiconvexity_exact: bool,
}

impl QuasiAxis {
    /// The span as one geodesic segment (free groups, where it is one).
    pub fn as_segment(&self) -> Option<Segment> {
        let first = self.span.first()?;
        let last = self.span.last()?;
        let dir = first.inverse().mul(last);
        (dir.len() + 1 == self.span.len()).then(|| Segment { start: first.clone(), dir })
    }
}

/// Quasi-axis through the shortlex-least ball vertex of least displacement.
pub fn build_quasi_axis(ball: &CayleyBall, g: &Word, delta: &Q, r_max: u32) -> Result<QuasiAxis> {
    let p = &ball.presentation;
    let tau = translation_length(p, g, 8)?;
    let need = q(100) * delta;
    if tau <= need {
        return Err(Error::TranslationTooSmall(format!("τ = {tau} is not above 100δ = {need}")));
    }
    let g = p.normal_form(g)?;
    let disp = |x: &Word| -> Result<usize> { Ok(p.normal_form(&x.inverse().mul(&g).mul(x))?.len()) };
    let mut best: Option<(usize, &Word)> = None;
    for x in &ball.elements {
        let d = disp(x)?;
        if best.map_or(true, |(b, _)| d < b) {
            best = Some((d, x));
        }
    }
    let (displacement, y) = best.expect("ball contains the identity");
    let y = y.clone();
    let c = p.normal_form(&y.inverse().mul(&g).mul(&y))?;
    let segment: Vec<Word> = Segment { start: y.clone(), dir: c.clone() }.points();
    let mut span: Vec<Word> = Vec::new();
    for r in -(r_max as i64)..=(r_max as i64) {
        let shift = g.pow(r);
        let upto = if r == r_max as i64 { segment.len() } else { segment.len() - 1 };
        for s in &segment[..upto] {
            let pt = p.normal_form(&shift.mul(s))?;
            if span.last() != Some(&pt) {
                span.push(pt);
            }
        }
    }
    let in_ball: Vec<Vertex> = span.iter().filter_map(|w| ball.vertex_of(w)).collect();
    let (quasiconvexity, quasiconvexity_exact) = if in_ball.is_empty() {
        (0, true)
    } else {
        let s = Subspace::new(&ball.graph, in_ball.iter().copied())?;
        let mode = Sampling::auto(ball.vertex_count(), DEFAULT_EXHAUSTIVE_CAP, 400, 0);
        let m = quasiconvexity_constant(&ball.graph, &s, &mode)?;
        (m.value, m.exact)
    };
    Ok(QuasiAxis { g, y, displacement, segment, span, in_ball, quasiconvexity, quasiconvexity_exact })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchReport {
    /// index window `[i0, i1]` on `p`
    pub p_sub: (usize, usize),
    /// index window `[j0, j1]` on `q`
    pub q_sub: (usize, usize),
    pub g: Word,
    /// smaller of the two window diameters
    pub a: usize,
    /// Hausdorff distance between `g·p_sub` and `q_sub`
    pub b: usize,
}

/// How candidate elements were enumerated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchSearch {
    /// every element taking a shared subword of `p` onto one of `q`;
    /// complete for free groups when `A > 2B`
    SharedSubwords,
    /// all elements of length at most the given radius
    Ball(u32),
}

/// Candidates `g = q_j · p_i⁻¹` where `p` from `i` and `q` from `j` read the
/// same `m` letters, forwards or backwards.
fn shared_subword_candidates(p: &Segment, q: &Segment, m: usize) -> Vec<Word> {
    let (a, b) = (p.dir.letters(), q.dir.letters());
    let (na, nb) = (a.len(), b.len());
    let mut out: BTreeSet<Word> = BTreeSet::new();
    // forward runs: run[i][j] = common prefix of a[i..] and b[j..]
    let mut next = vec![0usize; nb + 1];
    for i in (0..na).rev() {
        let mut cur = vec![0usize; nb + 1];
        for j in (0..nb).rev() {
            if a[i] == b[j] {
                cur[j] = next[j + 1] + 1;
            }
        }
        for j in 0..nb {
            if cur[j] >= m && (i == 0 || j == 0 || a[i - 1] != b[j - 1]) {
                out.insert(q.point(j).mul(&p.point(i).inverse()));
            }
        }
        next = cur;
    }
    // backward runs: a[i + k] == -b[j - 1 - k]
    let mut prev = vec![0usize; nb + 1];
    for i in (0..na).rev() {
        let mut cur = vec![0usize; nb + 1];
        for j in 1..=nb {
            if a[i] == -b[j - 1] {
                cur[j] = prev[j - 1] + 1;
            }
        }
        for j in 1..=nb {
            if cur[j] >= m {
                out.insert(q.point(j).mul(&p.point(i).inverse()));
            }
        }
        prev = cur;
    }
    out.into_iter().collect()
}

/// Exact match test for one `g`: returns the widest valid window pair.
fn match_for(p: &Segment, q: &Segment, g: &Word, a: usize, b: usize) -> Option<MatchReport> {
    let (np, nq) = (p.len() + 1, q.len() + 1);
    // x_i = q.start⁻¹ · g · p_i, so d(g p_i, q_j) = d(x_i, Q[..j])
    let qd = q.dir.letters();
    let mut x = q.start.inverse().mul(g).mul(&p.start);
    let mut close: Vec<Vec<usize>> = Vec::with_capacity(np);
    for i in 0..np {
        if i > 0 {
            x.push(p.dir.letters()[i - 1]);
        }
        let l = x.common_prefix(&q.dir).min(qd.len());
        let xl = x.len();
        let row: Vec<usize> =
            (0..nq).filter(|&j| xl + j - 2 * l.min(j) <= b).collect();
        close.push(row);
    }
    // windows of p inside runs of points with a close partner
    let mut best: Option<MatchReport> = None;
    let mut i0 = 0;
    while i0 < np {
        if close[i0].is_empty() {
            i0 += 1;
            continue;
        }
        let mut end = i0;
        while end + 1 < np && !close[end + 1].is_empty() {
            end += 1;
        }
        if end - i0 >= a {
            for s in i0..=end {
                let mut cover = vec![false; nq];
                for t in s..=end {
                    for &j in &close[t] {
                        cover[j] = true;
                    }
                    if t - s < a {
                        continue;
                    }
                    // maximal runs of covered q-indices
                    let mut j = 0;
                    while j < nq {
                        if !cover[j] {
                            j += 1;
                            continue;
                        }
                        let j0 = j;
                        while j + 1 < nq && cover[j + 1] {
                            j += 1;
                        }
                        let j1 = j;
                        j += 1;
                        if j1 - j0 < a {
                            continue;
                        }
                        let ok = (s..=t).all(|i| close[i].iter().any(|&jj| jj >= j0 && jj <= j1));
                        if ok {
                            let width = (t - s).min(j1 - j0);
                            if best.as_ref().map_or(true, |m| width > m.a) {
                                best = Some(MatchReport { p_sub: (s, t), q_sub: (j0, j1), g: g.clone(), a: width, b: 0 });
                            }
                        }
                    }
                }
            }
        }
        i0 = end + 1;
    }
    best.map(|mut m| {
        m.b = hausdorff_words(p, q, g, m.p_sub, m.q_sub);
        m
    })
}

fn hausdorff_words(p: &Segment, q: &Segment, g: &Word, ps: (usize, usize), qs: (usize, usize)) -> usize {
    let gp: Vec<Word> = (ps.0..=ps.1).map(|i| g.mul(&p.point(i))).collect();
    let qq: Vec<Word> = (qs.0..=qs.1).map(|j| q.point(j)).collect();
    let one = gp.iter().map(|u| qq.iter().map(|v| u.distance(v)).min().unwrap_or(0)).max().unwrap_or(0);
    let two = qq.iter().map(|v| gp.iter().map(|u| u.distance(v)).min().unwrap_or(0)).max().unwrap_or(0);
    one.max(two)
}

/// Searches for an `(A, B, g)`-match between geodesic segments of a free
/// group, over the elements `g` accepted by `accept`.
///
/// With `A > 2B` the candidates are all elements carrying a shared subword
/// of length `A − 2B` of one segment onto the other, which is complete in a
/// tree.  Otherwise every element of length at most `conj_radius` is tried.
pub fn find_match(
    p: &Segment,
    q: &Segment,
    a: usize,
    b: usize,
    conj_radius: u32,
    accept: impl Fn(&Word) -> bool + Sync,
) -> Result<(Option<MatchReport>, MatchSearch)> {
    let rank = p.dir.max_generator().max(q.dir.max_generator()).max(p.start.max_generator()).max(1);
    let (cands, how) = if a > 2 * b {
        (shared_subword_candidates(p, q, a - 2 * b), MatchSearch::SharedSubwords)
    } else {
        let words = free_words(&Presentation::free(rank), conj_radius, 2_000_000)?;
        (words, MatchSearch::Ball(conj_radius))
    };
    let work = cands.len() as u128 * (p.len() as u128 + 1) * (q.len() as u128 + 1);
    if work > 20_000_000_000 {
        return Err(Error::BudgetExceeded(format!("match search over {} elements", cands.len())));
    }
    let found = cands
        .par_iter()
        .filter(|g| accept(g))
        .filter_map(|g| match_for(p, q, g, a, b))
        .reduce_with(|x, y| if (y.a, &x.g) > (x.a, &y.g) { y } else { x });
    Ok((found, how))
}

/// Whether `g` lies in the cyclic group generated by `w` (free groups).
pub fn in_cyclic_subgroup(g: &Word, w: &Word) -> bool {
    if g.is_identity() {
        return true;
    }
    let (u, c) = w.cyclic_reduction();
    let d = g.cyclic_reduction().1;
    if c.is_empty() || d.len() % c.len() != 0 {
        return false;
    }
    let k = (d.len() / c.len()) as i64;
    [k, -k].iter().any(|&e| u.mul(&c.pow(e)).mul(&u.inverse()) == *g)
}

/// C′(1/6) relator drawn as the cyclic core of a walk endpoint; failing
/// draws are redrawn on the next stream and counted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelatorDraw {
    pub walk_endpoint: Word,
    pub relator: Word,
    pub rejections: usize,
    pub stream: u64,
}

pub fn sample_small_cancellation_relator(
    rank: u8,
    m: &Measure,
    n: usize,
    seed: u64,
    first_stream: u64,
    max_attempts: usize,
) -> Result<RelatorDraw> {
    for attempt in 0..max_attempts {
        let stream = first_stream + attempt as u64;
        let w = free_endpoint(m, n, seed, stream);
        let c = w.cyclic_reduction().1;
        if c.is_empty() {
            continue;
        }
        let pres = Presentation::small_cancellation(rank, vec![c.clone()])?;
        if pres.piece_ratio()?.is_small_cancellation() {
            return Ok(RelatorDraw { walk_endpoint: w, relator: c, rejections: attempt, stream });
        }
    }
    Err(Error::SearchExhausted(format!("no C'(1/6) relator in {max_attempts} draws")))
}
