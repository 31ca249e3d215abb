//! Command-line workbench: argument definitions and the subcommands, each
//! producing a JSON report and a pass flag.

use std::path::{Path as FsPath, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::coning::{build_cone_off, check_spriano, close_in_x_check, cone_off_slimness, strong_bgi_check};
use crate::constants::{derive, parse_q, q, q_to_string, BaseConstants, DerivedConstants};
use crate::error::{Error, Result};
use crate::experiment::{parse_presentation, plot_csv, run_pipeline, ExperimentConfig, PipelineReport, SCHEMA};
use crate::graph::io::{parse_family, parse_graph};
use crate::lemmas::{lemma_suite, measured_ledger};
use crate::graph::{
    quasiconvexity_constant, separation_m0, slim_constant, MetricGraph, Sampling, Subspace,
    DEFAULT_EXHAUSTIVE_CAP,
};
use crate::groups::Word;
use crate::hhs::{
    build_quotient_structure, check_quotient_bounds, peripheral_audit, spinning_for, verify_hhs_axioms, AxiomBounds,
    HhsStructure,
};
use crate::projcplx::{
    augment_with_points, bounded_path_image_check, build_projection_complex, geometric_family, r64_from_q,
    verify_projection_axioms,
};
use crate::randwalk::{estimate_drift, translation_length, Measure};
use crate::spinning::build_quotient;

#[derive(Debug, Parser)]
#[command(name = "coarsequot", version, about = "Coarse geometry of spinning quotients on finite graphs")]
pub struct Cli {
    /// seed for every sampled quantity
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// experiment configuration (JSON)
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// directory for reports; stdout when absent
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Hyperbolicity, quasiconvexity and separation of a graph and family
    Analyze(GraphArgs),
    /// The constants ledger for a base
    Constants(ConstantsArgs),
    /// Cone-off constants and checks
    Coneoff(GraphArgs),
    /// Projection axioms and the projection complex of a cone-off family
    Projcplx(ProjcplxArgs),
    /// Drift and translation lengths of random walks
    Walk(WalkArgs),
    /// The random-quotient pipeline, one report per seed
    Quotient,
    /// Hierarchy axioms of a built-in or tabulated structure
    HhsVerify(HhsArgs),
    /// Tidy CSV from pipeline reports
    PlotData(PlotArgs),
}

#[derive(Debug, Args)]
pub struct GraphArgs {
    /// edge list or graph JSON
    pub graph: PathBuf,
    /// JSON array of vertex-id arrays
    #[arg(long)]
    pub family: Option<PathBuf>,
    /// sampled pairs when the graph is too large for exhaustive checks
    #[arg(long, default_value_t = 400)]
    pub samples: usize,
}

#[derive(Debug, Args)]
pub struct ConstantsArgs {
    /// base constants JSON; zero base when absent
    #[arg(long)]
    pub base: Option<PathBuf>,
    /// evaluate τ at this L as well
    #[arg(long)]
    pub l: Option<String>,
    /// print a markdown table instead of JSON
    #[arg(long)]
    pub markdown: bool,
}

#[derive(Debug, Args)]
pub struct ProjcplxArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    /// check the family augmented with base points within this radius
    #[arg(long)]
    pub points: Option<u32>,
}

#[derive(Debug, Args)]
pub struct WalkArgs {
    #[arg(long, default_value = "F2")]
    pub presentation: String,
    #[arg(long, default_value_t = 2000)]
    pub n: usize,
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    /// words whose translation length to report
    #[arg(long)]
    pub word: Vec<String>,
}

#[derive(Debug, Args)]
pub struct HhsArgs {
    /// `trivial` or `free_product`
    #[arg(long, default_value = "free_product")]
    pub builtin: String,
    /// presentation `F<rank>`
    #[arg(long, default_value = "F2")]
    pub presentation: String,
    #[arg(long, default_value_t = 4)]
    pub radius: u32,
    /// JSON structure with explicit tables instead of a built-in
    #[arg(long)]
    pub fixture: Option<PathBuf>,
    /// also build the quotient by this relator and check its bounds
    #[arg(long)]
    pub relator: Option<String>,
    /// spinning threshold for the quotient
    #[arg(long, default_value = "0")]
    pub l: String,
    #[arg(long, default_value_t = 4)]
    pub budget: u32,
    #[arg(long, default_value_t = 500)]
    pub samples: usize,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    /// pipeline report files
    #[arg(required = true)]
    pub reports: Vec<PathBuf>,
}

/// Outcome of one subcommand: named documents and the hard-check verdict.
#[derive(Debug)]
pub struct Outcome {
    pub documents: Vec<(String, String)>,
    pub pass: bool,
}

/// Error tagged with the stage that raised it.
#[derive(Debug)]
pub struct StageError {
    pub stage: String,
    pub error: Error,
}

impl std::fmt::Display for StageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}] {}", self.stage, self.error)
    }
}

fn staged<T>(stage: &str, r: Result<T>) -> std::result::Result<T, StageError> {
    r.map_err(|error| StageError { stage: stage.into(), error })
}

fn read(path: &FsPath) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON values serialize")
}

fn sampling_for(n: usize, samples: usize, seed: u64) -> Sampling {
    Sampling::auto(n, DEFAULT_EXHAUSTIVE_CAP, samples, seed)
}

/// Measured geometry of a graph and family: δ, per-member K and M₀.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyGeometry {
    pub delta: u32,
    pub delta_exact: bool,
    pub k: Vec<u32>,
    pub m0: u32,
}

pub fn measure_family(g: &MetricGraph, family: &[Subspace], samples: usize, seed: u64) -> Result<FamilyGeometry> {
    let s = sampling_for(g.vertex_count(), samples, seed);
    let d = slim_constant(g, &s)?;
    let k = family.iter().map(|y| quasiconvexity_constant(g, y, &s).map(|m| m.value)).collect::<Result<Vec<_>>>()?;
    let kmax = k.iter().copied().max().unwrap_or(0);
    let m0 = if family.len() >= 2 { separation_m0(g, family, d.value, kmax)? } else { 0 };
    Ok(FamilyGeometry { delta: d.value, delta_exact: d.exact, k, m0 })
}

/// Ledger for measured geometry with `E = max(δ, 1)`.
pub fn ledger_for(geo: &FamilyGeometry) -> Result<DerivedConstants> {
    measured_ledger(geo.delta, geo.k.iter().copied().max().unwrap_or(0), geo.m0)
}

fn load_graph(a: &GraphArgs) -> Result<(MetricGraph, Vec<Subspace>)> {
    let g = parse_graph(&read(&a.graph)?)?;
    let fam = match &a.family {
        Some(p) => parse_family(&g, &read(p)?)?,
        None => Vec::new(),
    };
    Ok((g, fam))
}

pub fn cmd_analyze(a: &GraphArgs, seed: u64) -> Result<Outcome> {
    let (g, fam) = load_graph(a)?;
    let geo = measure_family(&g, &fam, a.samples, seed)?;
    let ledger = ledger_for(&geo)?;
    let doc = json!({
        "schema": SCHEMA,
        "command": "analyze",
        "vertices": g.vertex_count(),
        "edges": g.edge_count(),
        "delta": geo.delta,
        "delta_exact": geo.delta_exact,
        "subspaces": geo.k.iter().zip(&fam).map(|(k, y)| json!({"size": y.members().len(), "K": k})).collect::<Vec<_>>(),
        "M0": geo.m0,
        "constants": ledger.to_json(),
    });
    let mut doc = doc;
    let mut pass = true;
    if fam.len() >= 2 {
        let s = sampling_for(g.vertex_count(), a.samples, seed);
        let lemmas = lemma_suite(&g, &fam, &s, 2)?;
        pass = lemmas.pass;
        doc["lemmas"] = json!(lemmas);
    }
    Ok(Outcome { documents: vec![("analyze.json".into(), pretty(&doc))], pass })
}

pub fn cmd_constants(a: &ConstantsArgs) -> Result<Outcome> {
    let base: BaseConstants = match &a.base {
        Some(p) => serde_json::from_str(&read(p)?).map_err(|e| Error::parse(e.line(), e.to_string()))?,
        None => BaseConstants::default(),
    };
    let ledger = derive(&base)?;
    if a.markdown {
        return Ok(Outcome { documents: vec![("constants.md".into(), ledger.to_markdown())], pass: true });
    }
    let mut doc = json!({"schema": SCHEMA, "command": "constants", "ledger": ledger.to_json()});
    if let Some(l) = &a.l {
        doc["tau"] = json!({"L": l, "tau": q_to_string(&ledger.tau(&parse_q(l)?))});
    }
    Ok(Outcome { documents: vec![("constants.json".into(), pretty(&doc))], pass: true })
}

pub fn cmd_coneoff(a: &GraphArgs, seed: u64) -> Result<Outcome> {
    let (g, fam) = load_graph(a)?;
    if fam.is_empty() {
        return Err(Error::Invalid("coneoff needs --family".into()));
    }
    let geo = measure_family(&g, &fam, a.samples, seed)?;
    let ledger = ledger_for(&geo)?;
    let c = build_cone_off(&g, &fam)?;
    let s = sampling_for(g.vertex_count(), a.samples, seed);
    let slim = cone_off_slimness(&c, &s)?;
    let d = check_spriano(&c, &s)?;
    let bgi = strong_bgi_check(&c, &ledger.c, &s)?;
    let kmax = geo.k.iter().copied().max().unwrap_or(0);
    let close = close_in_x_check(&c, 2, d.value, kmax, &s)?;
    let pass = bgi.violations.is_empty() && close.violations.is_empty();
    let doc = json!({
        "schema": SCHEMA,
        "command": "coneoff",
        "base_vertices": g.vertex_count(),
        "cone_off_vertices": c.graph.vertex_count(),
        "delta": geo.delta,
        "K": geo.k,
        "M0": geo.m0,
        "cone_off_slimness": slim,
        "D": d,
        "strong_bgi": bgi,
        "close_in_x": close,
        "pass": pass,
    });
    Ok(Outcome { documents: vec![("coneoff.json".into(), pretty(&doc))], pass })
}

pub fn cmd_projcplx(a: &ProjcplxArgs, seed: u64) -> Result<Outcome> {
    let (g, fam) = load_graph(&a.graph)?;
    if fam.is_empty() {
        return Err(Error::Invalid("projcplx needs --family".into()));
    }
    let geo = measure_family(&g, &fam, a.graph.samples, seed)?;
    let ledger = ledger_for(&geo)?;
    let c = build_cone_off(&g, &fam)?;
    let theta = r64_from_q(&ledger.theta)?;
    let f = geometric_family(&c, theta)?;
    let axioms = verify_projection_axioms(&f, theta);
    let zhe = r64_from_q(&ledger.zhe)?;
    let complex = build_projection_complex(&f, zhe)?;
    let image = bounded_path_image_check(&complex, &f, theta)?;
    let mut pass = axioms.passed() && image.path_violations.is_empty() && image.geodesic_violations.is_empty();
    let mut doc = json!({
        "schema": SCHEMA,
        "command": "projcplx",
        "family": f.len(),
        "theta": q_to_string(&ledger.theta),
        "axioms": axioms,
        "complex_edges": complex.graph.edge_count(),
        "complex_connected": complex.connected,
        "path_image": image,
    });
    if let Some(r) = a.points {
        let with_r = derive(&BaseConstants { r: q(i64::from(r)), ..ledger.base.clone() })?;
        let big = r64_from_q(&with_r.big_theta)?;
        let aug = augment_with_points(&c, r, big)?;
        let rep = verify_projection_axioms(&aug, big);
        pass &= rep.passed();
        doc["augmented"] = json!({"elements": aug.len(), "R": r, "Theta": q_to_string(&with_r.big_theta), "axioms": rep});
    }
    doc["pass"] = json!(pass);
    Ok(Outcome { documents: vec![("projcplx.json".into(), pretty(&doc))], pass })
}

pub fn cmd_walk(a: &WalkArgs, seed: u64) -> Result<Outcome> {
    let p = parse_presentation(&a.presentation)?;
    let m = Measure::uniform(&p);
    let d = estimate_drift(&p, &m, a.n, a.trials, seed)?;
    let mut lengths = Vec::new();
    for w in &a.word {
        let word: Word = w.parse()?;
        lengths.push(json!({"word": w, "translation_length": q_to_string(&translation_length(&p, &word, 8)?)}));
    }
    let doc = json!({
        "schema": SCHEMA,
        "command": "walk",
        "presentation": a.presentation,
        "n": d.n,
        "trials": d.trials,
        "drift": d.mean,
        "stderr": d.stderr,
        "sd": d.sd,
        "translation_lengths": lengths,
    });
    Ok(Outcome { documents: vec![("walk.json".into(), pretty(&doc))], pass: true })
}

pub fn cmd_quotient(cfg: &ExperimentConfig, seeds: &[u64]) -> Outcome {
    let reports: Vec<PipelineReport> = seeds.par_iter().map(|&s| run_pipeline(cfg, s)).collect();
    let pass = reports.iter().all(|r| r.pass);
    let mut documents: Vec<(String, String)> =
        reports.iter().map(|r| (format!("quotient-seed{}.json", r.seed), r.to_json())).collect();
    match plot_csv(&reports) {
        Ok(csv) => documents.push(("quotient.csv".into(), csv)),
        Err(e) => documents.push(("quotient.csv.err".into(), e.to_string())),
    }
    Outcome { documents, pass }
}

pub fn cmd_hhs_verify(a: &HhsArgs, seed: u64) -> Result<Outcome> {
    let h = match &a.fixture {
        Some(p) => HhsStructure::from_json(&read(p)?)?,
        None => HhsStructure::builtin(&a.builtin, &parse_presentation(&a.presentation)?, a.radius)?,
    };
    let axioms = verify_hhs_axioms(&h, &AxiomBounds::uniform(&h.e), a.samples, seed)?;
    let mut pass = axioms.pass;
    let mut doc = json!({
        "schema": SCHEMA,
        "command": "hhs-verify",
        "structure": h.name,
        "domains": h.domains.len(),
        "E": q_to_string(&h.e),
        "axioms": axioms,
    });
    if let Some(r) = &a.relator {
        let relator: Word = r.parse()?;
        let inst = spinning_for(&h, &relator, parse_q(&a.l)?, None)?;
        let quot = build_quotient(&inst, a.budget)?;
        let peripheral = peripheral_audit(&h, &quot, &relator)?;
        let qh = build_quotient_structure(&h, inst, a.budget, seed)?;
        let bounds = check_quotient_bounds(&qh, a.samples, seed)?;
        let qaxioms = verify_hhs_axioms(&qh, &qh.bounds, a.samples, seed)?;
        pass &= peripheral.pass && bounds.violations == 0 && qaxioms.pass;
        doc["quotient"] = json!({
            "point_classes": qh.point_class_count(),
            "domain_classes": qh.domain_classes.len(),
            "aleph": q_to_string(&qh.aleph),
            "beth": q_to_string(&qh.beth),
            "bounds": bounds,
            "axioms": qaxioms,
            "unique_reps": qh.unique_reps,
            "peripheral": peripheral,
        });
    }
    doc["pass"] = json!(pass);
    Ok(Outcome { documents: vec![("hhs-verify.json".into(), pretty(&doc))], pass })
}

pub fn cmd_plot_data(a: &PlotArgs) -> Result<Outcome> {
    let reports = a.reports.iter().map(|p| PipelineReport::from_json(&read(p)?)).collect::<Result<Vec<_>>>()?;
    Ok(Outcome { documents: vec![("plot.csv".into(), plot_csv(&reports)?)], pass: true })
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig> {
    match &cli.config {
        Some(p) => ExperimentConfig::from_json(&read(p)?),
        None => Ok(ExperimentConfig::default()),
    }
}

/// Runs a parsed command line.
pub fn run(cli: &Cli) -> std::result::Result<Outcome, StageError> {
    let cfg = staged("config", load_config(cli))?;
    let seed = cli.seed.unwrap_or_else(|| cfg.seeds.first().copied().unwrap_or(0));
    match &cli.command {
        Command::Analyze(a) => staged("analyze", cmd_analyze(a, seed)),
        Command::Constants(a) => staged("constants", cmd_constants(a)),
        Command::Coneoff(a) => staged("coneoff", cmd_coneoff(a, seed)),
        Command::Projcplx(a) => staged("projcplx", cmd_projcplx(a, seed)),
        Command::Walk(a) => staged("walk", cmd_walk(a, seed)),
        Command::Quotient => {
            let seeds = cli.seed.map_or_else(|| cfg.seeds.clone(), |s| vec![s]);
            Ok(cmd_quotient(&cfg, &seeds))
        }
        Command::HhsVerify(a) => staged("hhs-verify", cmd_hhs_verify(a, seed)),
        Command::PlotData(a) => staged("plot-data", cmd_plot_data(a)),
    }
}

/// Writes documents to `out`, or returns them concatenated for stdout.
pub fn emit(outcome: &Outcome, out: Option<&FsPath>) -> Result<Option<String>> {
    match out {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
            for (name, body) in &outcome.documents {
                let p = dir.join(name);
                std::fs::write(&p, body).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
            }
            Ok(None)
        }
        None => Ok(Some(outcome.documents.iter().map(|(_, b)| b.trim_end().to_string() + "\n").collect())),
    }
}

/// A seed's stage failures in one line, for stderr.
pub fn failure_summary(outcome: &Outcome) -> Vec<String> {
    outcome
        .documents
        .iter()
        .filter(|(n, _)| n.ends_with(".json"))
        .filter_map(|(_, body)| PipelineReport::from_json(body).ok())
        .filter(|r| !r.pass)
        .map(|r| match &r.failure {
            Some(f) => format!("seed {}: [{}] {}", r.seed, f.stage, f.error),
            None => format!("seed {}: failed checks {}", r.seed, r.hard_failures().join(", ")),
        })
        .collect()
}
