//! The random-quotient pipeline: walks, relator, axis constants, ledger,
//! spinning check, quotient, injectivity, hyperbolicity, triangle lifts and
//! the quotient hierarchy structure, reported as one JSON document and one
//! CSV row per seed.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::constants::{derive, parse_q, q, q_frac, q_to_f64, q_to_string, qserde, BaseConstants, Q};
use crate::error::{Error, Result};
use crate::graph::Vertex;
use crate::groups::{cayley_ball, Presentation, Word, DEFAULT_BALL_CAP};
use crate::hhs::{
    build_quotient_structure, check_quotient_bounds, measure_slimness, verify_hhs_axioms, AxiomReport, HhsStructure,
    QuotientBoundsReport, UniqueRepsReport,
};
use crate::randwalk::{
    build_quasi_axis, estimate_drift, find_match, sample_small_cancellation_relator, sample_walk, trial_rng, Measure,
    MatchSearch, Segment,
};
use crate::spinning::{
    build_quotient, compare_slimness, injectivity_report, lift_triangle, verify_spinning, walk_threshold,
    InjectivityReport, OracleCheck, SlimnessComparison, SpinningInstance, SpinningReport,
};

/// Version tag of every JSON report.
pub const SCHEMA: &str = "coarsequot/1";

/// Parses `F<rank>`.
pub fn parse_presentation(text: &str) -> Result<Presentation> {
    let rank = text
        .strip_prefix('F')
        .and_then(|r| r.parse::<u8>().ok())
        .filter(|&r| (1..=26).contains(&r))
        .ok_or_else(|| Error::Invalid(format!("presentation {text:?} is not F<rank>")))?;
    Ok(Presentation::free(rank))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// free group `F<rank>`
    pub presentation: String,
    /// walk length
    pub n: usize,
    /// number of independent walks; the first one gives the relator
    pub k: usize,
    pub seeds: Vec<u64>,
    pub ball_radius: u32,
    /// `ε` in `M₀ = εΔn + 4K + 4E + 2Φ`
    pub epsilon: String,
    pub drift_trials: usize,
    /// pass fraction required of per-seed checks in aggregate runs
    pub aas_fraction: f64,
    /// conjugator length for the normal-closure saturation
    pub budget: u32,
    pub ball_cap: usize,
    pub relator_attempts: usize,
    /// overrides `L = Δ̂n − 2B`
    pub spinning_l: Option<String>,
    pub family_radius: Option<u32>,
    pub spinning_samples: usize,
    pub triangles: usize,
    pub slim_samples: usize,
    /// match window `A = match_fraction · Δ̂n`
    pub match_fraction: String,
    pub match_b: usize,
    pub hhs: bool,
    pub hhs_samples: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            presentation: "F2".into(),
            n: 60,
            k: 1,
            seeds: vec![7],
            ball_radius: 8,
            epsilon: "1/5".into(),
            drift_trials: 200,
            aas_fraction: 0.95,
            budget: 4,
            ball_cap: DEFAULT_BALL_CAP,
            relator_attempts: 100_000,
            spinning_l: None,
            family_radius: None,
            spinning_samples: 20_000,
            triangles: 50,
            slim_samples: 400,
            match_fraction: "1/5".into(),
            match_b: 5,
            hhs: true,
            hhs_samples: 500,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let c: ExperimentConfig = serde_json::from_str(text).map_err(|e| Error::parse(e.line(), e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let eps = parse_q(&self.epsilon)?;
        if eps <= q(0) || eps >= q(1) {
            return Err(Error::Invalid(format!("ε = {} must lie in (0, 1)", self.epsilon)));
        }
        if self.k == 0 {
            return Err(Error::Invalid("k must be at least 1".into()));
        }
        if self.n == 0 || self.ball_radius == 0 || self.ball_cap == 0 || self.relator_attempts == 0 {
            return Err(Error::Invalid("walk length, radius and caps must be positive".into()));
        }
        if self.drift_trials < 2 {
            return Err(Error::Invalid("drift needs at least two trials".into()));
        }
        if !(0.0..=1.0).contains(&self.aas_fraction) {
            return Err(Error::Invalid("aas_fraction must lie in [0, 1]".into()));
        }
        parse_q(&self.match_fraction)?;
        if let Some(l) = &self.spinning_l {
            parse_q(l)?;
        }
        parse_presentation(&self.presentation)?;
        Ok(())
    }
}

/// Rational approximation of a measured float, to three decimals.
pub fn q_from_f64(x: f64) -> Q {
    q_frac((x * 1000.0).round() as i64, 1000)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WalkSection {
    pub n: usize,
    pub drift_mean: f64,
    pub drift_stderr: f64,
    pub drift_trials: usize,
    #[serde(with = "qserde")]
    pub drift: Q,
    pub endpoints: Vec<String>,
    pub relator: String,
    pub relator_length: usize,
    pub relator_rejections: usize,
    /// conjugator length of the relator inside the walk endpoint
    pub phi: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxisSection {
    pub displacement: usize,
    pub quasiconvexity: u32,
    pub exact: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchSection {
    pub a: usize,
    pub b: usize,
    pub pairs: usize,
    pub matches: usize,
    pub search: Vec<MatchSearch>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpinningSection {
    pub report: SpinningReport,
    /// the threshold came from the formula and was not positive
    pub threshold_vacuous: bool,
    #[serde(with = "qserde")]
    pub l_min: Q,
    pub meets_l_min: bool,
    pub lines: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuotientSection {
    pub ball_vertices: usize,
    pub cone_off_vertices: usize,
    pub classes: usize,
    pub base_classes: usize,
    pub generators: usize,
    pub oracle: OracleCheck,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TriangleSection {
    pub sampled: usize,
    pub closed: usize,
    pub strictly_decreasing: usize,
    pub minimal: usize,
    pub truncated: usize,
    pub max_bends: usize,
    pub failures: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HhsSection {
    pub axioms: AxiomReport,
    pub bounds: QuotientBoundsReport,
    pub unique_reps: UniqueRepsReport,
    pub domain_classes: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub stage: String,
    pub name: String,
    pub hard: bool,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub stage: String,
    pub error: String,
}

/// One seed of the pipeline. Sections stay empty after a failing stage.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub schema: String,
    pub seed: u64,
    pub config: ExperimentConfig,
    pub walk: Option<WalkSection>,
    pub axis: Option<AxisSection>,
    pub constants: Option<serde_json::Value>,
    pub matches: Option<MatchSection>,
    pub spinning: Option<SpinningSection>,
    pub quotient: Option<QuotientSection>,
    pub injectivity: Option<InjectivityReport>,
    pub slimness: Option<SlimnessComparison>,
    pub triangles: Option<TriangleSection>,
    pub hhs: Option<HhsSection>,
    pub checks: Vec<Check>,
    pub failure: Option<Failure>,
    pub pass: bool,
}

impl PipelineReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::parse(e.line(), e.to_string()))
    }

    fn check(&mut self, stage: &str, name: &str, hard: bool, pass: bool) {
        self.checks.push(Check { stage: stage.into(), name: name.into(), hard, pass });
    }

    /// Hard checks that failed, as `stage/name`.
    pub fn hard_failures(&self) -> Vec<String> {
        self.checks.iter().filter(|c| c.hard && !c.pass).map(|c| format!("{}/{}", c.stage, c.name)).collect()
    }
}

/// Runs every stage for one seed. Module errors end the run and are
/// recorded with the stage that raised them.
pub fn run_pipeline(cfg: &ExperimentConfig, seed: u64) -> PipelineReport {
    let mut rep = PipelineReport {
        schema: SCHEMA.into(),
        seed,
        config: cfg.clone(),
        walk: None,
        axis: None,
        constants: None,
        matches: None,
        spinning: None,
        quotient: None,
        injectivity: None,
        slimness: None,
        triangles: None,
        hhs: None,
        checks: Vec::new(),
        failure: None,
        pass: false,
    };
    if let Err((stage, e)) = stages(cfg, seed, &mut rep) {
        rep.failure = Some(Failure { stage: stage.into(), error: e.to_string() });
    }
    rep.pass = rep.failure.is_none() && rep.hard_failures().is_empty();
    rep
}

type Staged<T> = std::result::Result<T, (&'static str, Error)>;

fn at<T>(stage: &'static str, r: Result<T>) -> Staged<T> {
    r.map_err(|e| (stage, e))
}

fn stages(cfg: &ExperimentConfig, seed: u64, rep: &mut PipelineReport) -> Staged<()> {
    at("config", cfg.validate())?;
    let pres = at("config", parse_presentation(&cfg.presentation))?;
    let measure = Measure::uniform(&pres);
    let eps = at("config", parse_q(&cfg.epsilon))?;

    // walks and relator
    let drift = at("walk", estimate_drift(&pres, &measure, cfg.n, cfg.drift_trials, seed))?;
    let drift_q = q_from_f64(drift.mean);
    let walks = (0..cfg.k as u64)
        .map(|i| sample_walk(&pres, &measure, cfg.n, seed, 1_000_000 + i))
        .collect::<Result<Vec<_>>>();
    let walks = at("walk", walks)?;
    let draw =
        at("relator", sample_small_cancellation_relator(pres.rank, &measure, cfg.n, seed, 2_000_000, cfg.relator_attempts))?;
    let phi = (draw.walk_endpoint.len() - draw.relator.len()) / 2;
    rep.walk = Some(WalkSection {
        n: cfg.n,
        drift_mean: drift.mean,
        drift_stderr: drift.stderr,
        drift_trials: drift.trials,
        drift: drift_q.clone(),
        endpoints: walks.iter().map(|w| w.endpoint().to_string()).collect(),
        relator: draw.relator.to_string(),
        relator_length: draw.relator.len(),
        relator_rejections: draw.rejections,
        phi,
    });

    // ball, axis and ledger
    let ball = at("ball", cayley_ball(&pres, cfg.ball_radius, cfg.ball_cap))?;
    let delta = at("ball", measure_slimness(&ball.graph, cfg.slim_samples, seed))?;
    let axis = at("axis", build_quasi_axis(&ball, &draw.relator, &q(i64::from(delta)), 2))?;
    rep.axis = Some(AxisSection {
        displacement: axis.displacement,
        quasiconvexity: axis.quasiconvexity,
        exact: axis.quasiconvexity_exact,
    });
    let e = q(i64::from(delta.max(1)));
    let k = q(i64::from(axis.quasiconvexity));
    let phi_q = q(phi as i64);
    let m0 = &eps * &drift_q * q(cfg.n as i64) + q(4) * &k + q(4) * &e + q(2) * &phi_q;
    let base = BaseConstants { delta: q(i64::from(delta)), k, m0, e, phi: phi_q, ..Default::default() };
    let ledger = at("constants", derive(&base))?;
    rep.constants = Some(ledger.to_json());

    // matches between independent walk geodesics
    if cfg.k >= 2 {
        let frac = at("matches", parse_q(&cfg.match_fraction))?;
        let a = (q_to_f64(&(frac * &drift_q * q(cfg.n as i64)))).floor() as usize;
        let segs: Vec<Segment> = walks.iter().map(|w| Segment::from_identity(w.endpoint())).collect();
        let mut sec = MatchSection { a, b: cfg.match_b, pairs: 0, matches: 0, search: Vec::new() };
        for i in 0..segs.len() {
            for j in i + 1..segs.len() {
                let (m, how) = at("matches", find_match(&segs[i], &segs[j], a, cfg.match_b, 2, |_| true))?;
                sec.pairs += 1;
                sec.matches += usize::from(m.is_some());
                sec.search.push(how);
            }
        }
        let none = sec.matches == 0;
        rep.matches = Some(sec);
        rep.check("matches", "no cross match", false, none);
    }

    // spinning family
    let (l, vacuous) = match &cfg.spinning_l {
        Some(s) => (at("config", parse_q(s))?, false),
        None => {
            let l = walk_threshold(&drift_q, cfg.n, &ledger.b);
            let vac = l <= q(0);
            (l, vac)
        }
    };
    let inst = at("verify_spinning", SpinningInstance::new(ball.clone(), &draw.relator, l.clone(), cfg.family_radius))?;
    let spin = at("verify_spinning", verify_spinning(&inst, cfg.spinning_samples, seed))?;
    let spin_pass = spin.pass;
    rep.spinning = Some(SpinningSection {
        meets_l_min: l > ledger.l_min,
        l_min: ledger.l_min.clone(),
        threshold_vacuous: vacuous,
        lines: inst.lines.len(),
        report: spin,
    });
    rep.check("verify_spinning", "displacement above L", true, spin_pass);
    rep.check("verify_spinning", "L above L_min", false, l > ledger.l_min);
    if !spin_pass {
        return Ok(());
    }

    // quotient
    let quot = at("quotient", build_quotient(&inst, cfg.budget))?;
    let nb = ball.vertex_count();
    let base_classes = quot.class_of[..nb].iter().copied().max().map_or(0, |m| m as usize + 1);
    rep.quotient = Some(QuotientSection {
        ball_vertices: nb,
        cone_off_vertices: inst.vertex_count(),
        classes: quot.class_count(),
        base_classes,
        generators: quot.generators.len(),
        oracle: quot.oracle.clone(),
    });
    rep.check("quotient", "Dehn oracle agreement", true, quot.oracle.disagreements == 0);

    let tau = ledger.tau(&l);
    let inj = injectivity_report(&inst, &quot, &tau);
    rep.check("injectivity", "min displacement above tau", true, inj.pass);
    rep.injectivity = Some(inj);

    let slim = at("hyperbolicity", compare_slimness(&inst, &quot, cfg.slim_samples, seed))?;
    rep.check("hyperbolicity", "quotient slimness at most cone-off slimness", true, slim.pass);
    rep.slimness = Some(slim);

    // triangle lifts
    let mut rng = trial_rng(seed, 3_000_000);
    let mut tri = TriangleSection {
        sampled: 0,
        closed: 0,
        strictly_decreasing: 0,
        minimal: 0,
        truncated: 0,
        max_bends: 0,
        failures: Vec::new(),
    };
    for _ in 0..cfg.triangles {
        let t = [0, 1, 2].map(|_| rng.gen_range(0..base_classes) as Vertex);
        tri.sampled += 1;
        match lift_triangle(&inst, &quot, t) {
            Ok(r) => {
                tri.closed += usize::from(r.closed);
                tri.strictly_decreasing += usize::from(r.strictly_decreasing());
                tri.minimal += usize::from(r.minimal);
                tri.truncated += usize::from(r.truncated);
                tri.max_bends = tri.max_bends.max(r.bends);
                if !(r.closed && r.strictly_decreasing()) && tri.failures.len() < 10 {
                    tri.failures.push(format!("{t:?}: closed {}, trace {:?}", r.closed, r.complexity_trace));
                }
            }
            Err(e) => {
                if tri.failures.len() < 10 {
                    tri.failures.push(format!("{t:?}: {e}"));
                }
            }
        }
    }
    let lifted = tri.closed == tri.sampled && tri.strictly_decreasing == tri.sampled;
    rep.triangles = Some(tri);
    rep.check("lift_triangle", "every triangle closes with decreasing complexity", true, lifted);

    // quotient hierarchy structure over the trivial structure
    if cfg.hhs {
        let mut h = at("hhs", HhsStructure::trivial(&pres, cfg.ball_radius))?;
        h.e = q(i64::from(delta.max(1)));
        let qh = at("hhs", build_quotient_structure(&h, inst, cfg.budget, seed))?;
        let bounds = at("hhs", check_quotient_bounds(&qh, cfg.hhs_samples, seed))?;
        let axioms = at("hhs", verify_hhs_axioms(&qh, &qh.bounds, cfg.hhs_samples, seed))?;
        rep.check("hhs", "quotient projection bounds", true, bounds.violations == 0);
        rep.check("hhs", "quotient axiom suite", true, axioms.pass);
        rep.check("hhs", "unique representatives", false, qh.unique_reps.violations == 0);
        rep.hhs = Some(HhsSection {
            domain_classes: qh.domain_classes.len(),
            unique_reps: qh.unique_reps.clone(),
            axioms,
            bounds,
        });
    }
    Ok(())
}

/// Columns of the plotting table.
pub const PLOT_COLUMNS: [&str; 12] = [
    "seed",
    "n",
    "drift",
    "tau",
    "delta_hat",
    "delta_bar",
    "min_displacement",
    "spinning_pass",
    "oracle_pass",
    "slimness_pass",
    "triangles_pass",
    "pass",
];

/// One row per report, sorted by seed then walk length.
pub fn plot_rows(reports: &[PipelineReport]) -> Vec<Vec<String>> {
    let flag = |b: Option<bool>| b.map_or(String::new(), |b| b.to_string());
    let mut rows: Vec<(u64, usize, Vec<String>)> = reports
        .iter()
        .map(|r| {
            let check = |stage: &str| r.checks.iter().find(|c| c.stage == stage && c.hard).map(|c| c.pass);
            let row = vec![
                r.seed.to_string(),
                r.config.n.to_string(),
                r.walk.as_ref().map_or(String::new(), |w| format!("{}", w.drift_mean)),
                r.injectivity.as_ref().map_or(String::new(), |i| q_to_string(&i.tau)),
                r.slimness.as_ref().map_or(String::new(), |s| s.delta_hat.to_string()),
                r.slimness.as_ref().map_or(String::new(), |s| s.delta_bar.to_string()),
                r.injectivity.as_ref().and_then(|i| i.min_displacement).map_or(String::new(), |m| m.to_string()),
                flag(check("verify_spinning")),
                flag(check("quotient")),
                flag(check("hyperbolicity")),
                flag(check("lift_triangle")),
                r.pass.to_string(),
            ];
            (r.seed, r.config.n, row)
        })
        .collect();
    rows.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
    rows.into_iter().map(|r| r.2).collect()
}

/// The plotting table as CSV text.
pub fn plot_csv(reports: &[PipelineReport]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(PLOT_COLUMNS).map_err(|e| Error::Invalid(e.to_string()))?;
    for row in plot_rows(reports) {
        w.write_record(&row).map_err(|e| Error::Invalid(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Invalid(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Invalid(e.to_string()))
}

/// Endpoint of a sampled walk for a given seed and stream, exposed for
/// reproducing pipeline walks.
pub fn pipeline_walk(cfg: &ExperimentConfig, seed: u64, index: u64) -> Result<Word> {
    let pres = parse_presentation(&cfg.presentation)?;
    Ok(sample_walk(&pres, &Measure::uniform(&pres), cfg.n, seed, 1_000_000 + index)?.endpoint().clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ExperimentConfig {
        ExperimentConfig {
            n: 60,
            ball_radius: 4,
            budget: 8,
            drift_trials: 20,
            triangles: 5,
            hhs_samples: 50,
            spinning_samples: 500,
            ..Default::default()
        }
    }

    #[test]
    fn config_validation() {
        assert!(ExperimentConfig::default().validate().is_ok());
        let bad = ExperimentConfig { epsilon: "1".into(), ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = ExperimentConfig { k: 0, ..Default::default() };
        assert!(bad.validate().is_err());
        assert!(ExperimentConfig::from_json("{\"n\": 10, \"bogus\": 1}").is_err());
        assert_eq!(ExperimentConfig::from_json("{\"n\": 10}").unwrap().n, 10);
    }

    #[test]
    fn small_pipeline_passes_and_is_deterministic() {
        let cfg = small();
        let a = run_pipeline(&cfg, 7);
        assert!(a.pass, "{}", a.to_json());
        assert_eq!(a.schema, SCHEMA);
        let b = run_pipeline(&cfg, 7);
        assert_eq!(a.to_json(), b.to_json());
        let back = PipelineReport::from_json(&a.to_json()).unwrap();
        assert_eq!(plot_rows(&[back]).len(), 1);
    }

    #[test]
    fn large_threshold_fails_at_spinning() {
        let cfg = ExperimentConfig { spinning_l: Some("1000".into()), ..small() };
        let r = run_pipeline(&cfg, 7);
        assert!(!r.pass);
        assert_eq!(r.hard_failures(), vec!["verify_spinning/displacement above L".to_string()]);
        assert!(r.quotient.is_none());
    }
}
