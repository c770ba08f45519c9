//! The `spex` command line: fit, predict, eval, verify, gen.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::algorithms::{
    build_graph, cart_fit, emn_fit, imm_fit, spex_fit_graph, Algorithm, CentroidNorm, GraphSource,
};
use crate::data::{
    ingest, kmeans_fit, read_labels, read_points, synth, write_atomic, write_labels, write_points,
};
use crate::data::{Dataset, ReferenceClustering, SynthKind};
use crate::error::{Result, SpexError};
use crate::graph::{CliqueClusterGraph, CliqueWeights, GraphHandle, KnnWeightMode};
use crate::metrics::{ami, ari, tree_objective, AgreementReport};
use crate::theory::{corollary_suite, equivalence_suite, price_suite, theorem1_suite, SuiteReport};
use crate::tree::ExplainTree;

const KMEANS_MAX_ITER: usize = 300;

#[derive(Debug, Parser)]
#[command(
    name = "spex",
    version,
    about = "Explainable clustering with axis-aligned decision trees"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit a tree and write it with its assignments and metrics.
    Fit(FitArgs),
    /// Route points through a saved tree.
    Predict(PredictArgs),
    /// Compare two label files.
    Eval(EvalArgs),
    /// Run the theory suites.
    Verify(VerifyArgs),
    /// Write a synthetic dataset.
    Gen(GenArgs),
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// spex-clique, spex-knn, cart, imm or emn.
    #[arg(long, value_parser = Algorithm::from_str)]
    pub algo: Algorithm,
    /// Points CSV, one row per point.
    #[arg(long)]
    pub points: PathBuf,
    /// Reference labels, one integer per line.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    /// Ground-truth labels for ARI and AMI.
    #[arg(long)]
    pub truth: Option<PathBuf>,
    /// Built-in reference, `kmeans:<k>`; `--labels` wins when both are given.
    #[arg(long = "ref", value_parser = parse_ref)]
    pub reference: Option<usize>,
    /// Number of clusters for the built-in k-means reference.
    #[arg(long)]
    pub k: Option<usize>,
    /// Leaf budget; defaults to the number of reference clusters.
    #[arg(long)]
    pub leaves: Option<usize>,
    /// Neighbors per point for spex-knn.
    #[arg(long, default_value_t = 10)]
    pub kappa: usize,
    /// kNN edge weights: indicator-sum or union.
    #[arg(long, default_value = "indicator-sum", value_parser = KnnWeightMode::from_str)]
    pub weight_mode: KnnWeightMode,
    /// Centroid distance for IMM: l1 or l2.
    #[arg(long, default_value = "l2", value_parser = CentroidNorm::from_str)]
    pub norm: CentroidNorm,
    /// Skip the first row of the points CSV.
    #[arg(long)]
    pub header: bool,
    /// Seed for the built-in k-means.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// k-means restarts.
    #[arg(long, default_value_t = 10)]
    pub restarts: usize,
    /// Tree JSON output.
    #[arg(long)]
    pub out: PathBuf,
    /// Defaults to `metrics.json` next to `--out`.
    #[arg(long)]
    pub metrics: Option<PathBuf>,
    /// Defaults to `assignments.csv` next to `--out`.
    #[arg(long)]
    pub assignments: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    /// Tree JSON written by `fit`.
    #[arg(long)]
    pub tree: PathBuf,
    #[arg(long)]
    pub points: PathBuf,
    /// Skip the first row of the points CSV.
    #[arg(long)]
    pub header: bool,
    /// Leaf cluster per point, one per line.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Reference labels.
    #[arg(long)]
    pub truth: PathBuf,
    /// Predicted labels.
    #[arg(long)]
    pub pred: PathBuf,
    /// Metrics JSON; printed to stdout otherwise.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Theorem1,
    Corollary,
    Equivalence,
    Price,
    All,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = Suite::All)]
    pub suite: Suite,
    /// Random instances per suite.
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// JSON report; printed to stdout otherwise.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// two-moons, three-gaussians or cart-trap.
    #[arg(long, value_parser = SynthKind::from_str)]
    pub kind: SynthKind,
    #[arg(long)]
    pub n: usize,
    /// Standard deviation of the added gaussian noise.
    #[arg(long, default_value_t = 0.05)]
    pub noise: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Points CSV output.
    #[arg(long)]
    pub out: PathBuf,
    /// Ground-truth labels output.
    #[arg(long)]
    pub labels_out: Option<PathBuf>,
}

fn parse_ref(s: &str) -> std::result::Result<usize, String> {
    let k = s
        .strip_prefix("kmeans:")
        .ok_or_else(|| format!("expected kmeans:<k>, got {s:?}"))?;
    k.parse().map_err(|e| format!("bad k in {s:?}: {e}"))
}

/// Parses `args` (program name first) and runs the command.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    match dispatch(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var("SPEX_THREADS") else {
        return Ok(());
    };
    let threads: usize = v
        .trim()
        .parse()
        .map_err(|_| SpexError::invalid(format!("SPEX_THREADS={v:?} is not a count")))?;
    if threads > 0 {
        // a pool that already exists keeps its size
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    Ok(())
}

/// Runs one command; `Ok(false)` means a verification check failed.
pub fn dispatch(command: Command) -> Result<bool> {
    match command {
        Command::Fit(a) => fit(&a).map(|_| true),
        Command::Predict(a) => predict(&a).map(|_| true),
        Command::Eval(a) => eval(&a).map(|_| true),
        Command::Verify(a) => verify(&a),
        Command::Gen(a) => gen(&a).map(|_| true),
    }
}

fn sibling(out: &Path, name: &str) -> PathBuf {
    out.parent()
        .map_or_else(|| PathBuf::from(name), |p| p.join(name))
}

#[derive(Debug, Serialize)]
struct FitMetrics {
    algorithm: &'static str,
    leaves: usize,
    #[serde(rename = "ARI")]
    ari: Option<f64>,
    #[serde(rename = "AMI")]
    ami: Option<f64>,
    #[serde(rename = "REF")]
    ref_ari: Option<f64>,
    tree_objective: Option<f64>,
    warnings: Vec<String>,
}

fn to_json<T: Serialize>(v: &T) -> Result<Vec<u8>> {
    let mut s = serde_json::to_vec_pretty(v)?;
    s.push(b'\n');
    Ok(s)
}

fn resolve_reference(
    a: &FitArgs,
    ds: &Dataset,
    given: Option<ReferenceClustering>,
) -> Result<Option<ReferenceClustering>> {
    if given.is_some() {
        return Ok(given);
    }
    match a.reference.or(a.k) {
        Some(k) => Ok(Some(kmeans_fit(
            ds,
            k,
            a.restarts,
            a.seed,
            KMEANS_MAX_ITER,
        )?)),
        None => Ok(None),
    }
}

fn fit(a: &FitArgs) -> Result<()> {
    let (ds, given) = ingest(&a.points, a.labels.as_deref(), a.header)?;
    let truth = match &a.truth {
        None => None,
        Some(p) => {
            let raw = read_labels(p)?;
            if raw.len() != ds.n() {
                return Err(SpexError::LabelCountMismatch {
                    labels: raw.len(),
                    points: ds.n(),
                });
            }
            Some(
                ReferenceClustering::from_raw_labels(&raw)?
                    .labels()
                    .to_vec(),
            )
        }
    };
    let needs_reference = !matches!(a.algo, Algorithm::SpexKnn);
    let mut reference = resolve_reference(a, &ds, given)?;
    let name = match a.algo {
        Algorithm::Imm => "IMM",
        Algorithm::Emn => "EMN",
        _ => "this algorithm",
    };
    if needs_reference && reference.is_none() {
        let msg = match a.algo {
            Algorithm::Imm | Algorithm::Emn => {
                format!("{name} requires a centroid-bearing reference")
            }
            other => format!(
                "{} requires reference labels (--labels, --ref kmeans:<k> or --k)",
                other.name()
            ),
        };
        return Err(SpexError::MissingCentroids(msg));
    }
    let leaves = match (a.leaves, &reference) {
        (Some(l), _) => l,
        (None, Some(r)) => r.k(),
        (None, None) => {
            return Err(SpexError::invalid(
                "--leaves is required without a reference",
            ))
        }
    };
    if matches!(a.algo, Algorithm::Imm | Algorithm::Emn) {
        reference = match reference {
            Some(r) if r.centroids().is_none() => Some(r.with_mean_centroids(&ds)?),
            other => other,
        };
    }

    let fit = match a.algo {
        Algorithm::SpexClique | Algorithm::SpexKnn => {
            let source = match &reference {
                Some(r) if a.algo == Algorithm::SpexClique => GraphSource::Clique(r),
                _ => GraphSource::Knn {
                    kappa: a.kappa,
                    mode: a.weight_mode,
                },
            };
            let g = build_graph(&ds, source)?;
            spex_fit_graph(&ds, &g, leaves)?
        }
        Algorithm::Cart => cart_fit(&ds, reference.as_ref().expect("checked"), leaves)?,
        Algorithm::Imm | Algorithm::Emn => {
            let r = reference.as_ref().expect("checked");
            let f = if a.algo == Algorithm::Imm {
                imm_fit(&ds, r, a.norm)?
            } else {
                emn_fit(&ds, r)?
            };
            let mut fit = f.fit;
            if a.leaves.is_some_and(|l| l != fit.tree.leaf_count()) {
                fit.warnings.push(format!(
                    "{name} grows one leaf per cluster; --leaves is ignored"
                ));
            }
            fit
        }
    };
    let predicted = fit.tree.assign(&ds)?;

    let objective_graph: Option<GraphHandle> = match (a.algo, &reference) {
        (Algorithm::SpexKnn, _) => Some(build_graph(
            &ds,
            GraphSource::Knn {
                kappa: a.kappa,
                mode: a.weight_mode,
            },
        )?),
        (_, Some(r)) => Some(CliqueClusterGraph::new(r, CliqueWeights::Unit).into()),
        (_, None) => None,
    };
    let objective = objective_graph
        .map(|g| tree_objective(&g, &fit.partition()))
        .transpose()?;
    let agreement = AgreementReport::compute(
        &predicted,
        truth.as_deref(),
        reference.as_ref().map(|r| r.labels()),
    )?;
    let metrics = FitMetrics {
        algorithm: a.algo.name(),
        leaves: fit.tree.leaf_count(),
        ari: agreement.ari,
        ami: agreement.ami,
        ref_ari: agreement.ref_ari,
        tree_objective: objective,
        warnings: fit.warnings.clone(),
    };
    for w in &fit.warnings {
        eprintln!("warning: {w}");
    }

    write_atomic(&a.out, fit.tree.to_json().as_bytes())?;
    write_labels(
        &a.assignments
            .clone()
            .unwrap_or_else(|| sibling(&a.out, "assignments.csv")),
        &predicted,
    )?;
    write_atomic(
        &a.metrics
            .clone()
            .unwrap_or_else(|| sibling(&a.out, "metrics.json")),
        &to_json(&metrics)?,
    )?;
    print!("{agreement}");
    Ok(())
}

fn predict(a: &PredictArgs) -> Result<()> {
    let text = std::fs::read_to_string(&a.tree).map_err(|e| SpexError::Io {
        path: a.tree.clone(),
        source: e,
    })?;
    let tree = ExplainTree::from_json(&text)?;
    let ds = read_points(&a.points, a.header)?;
    write_labels(&a.out, &tree.assign(&ds)?)
}

#[derive(Debug, Serialize)]
struct EvalMetrics {
    #[serde(rename = "ARI")]
    ari: f64,
    #[serde(rename = "AMI")]
    ami: f64,
}

fn eval(a: &EvalArgs) -> Result<()> {
    let as_ids = |raw: Vec<i64>| -> Vec<usize> {
        let mut distinct = raw.clone();
        distinct.sort_unstable();
        distinct.dedup();
        raw.iter()
            .map(|l| distinct.binary_search(l).expect("present"))
            .collect()
    };
    let truth = as_ids(read_labels(&a.truth)?);
    let pred = as_ids(read_labels(&a.pred)?);
    let m = EvalMetrics {
        ari: ari(&truth, &pred)?,
        ami: ami(&truth, &pred)?,
    };
    let json = to_json(&m)?;
    match &a.out {
        Some(p) => write_atomic(p, &json),
        None => {
            print!("{}", String::from_utf8_lossy(&json));
            Ok(())
        }
    }
}

#[derive(Debug, Serialize)]
struct VerifyReport {
    passed: bool,
    suites: Vec<SuiteReport>,
}

type SuiteFn = fn(u64, usize) -> SuiteReport;

fn verify(a: &VerifyArgs) -> Result<bool> {
    if a.trials == 0 {
        return Err(SpexError::invalid("--trials must be at least 1"));
    }
    let runs: &[(Suite, SuiteFn)] = &[
        (Suite::Theorem1, theorem1_suite),
        (Suite::Corollary, corollary_suite),
        (Suite::Equivalence, equivalence_suite),
        (Suite::Price, price_suite),
    ];
    let suites: Vec<SuiteReport> = runs
        .iter()
        .filter(|(s, _)| a.suite == Suite::All || a.suite == *s)
        .map(|(_, f)| f(a.seed, a.trials))
        .collect();
    let passed = suites.iter().all(SuiteReport::passed);
    for s in &suites {
        let status = if s.passed() { "PASS" } else { "FAIL" };
        eprintln!("{status} {}", s.suite);
        for (name, c) in &s.checks {
            let kind = if c.asserted { "" } else { " (informational)" };
            eprintln!("  {name}: {}/{}{kind}", c.passed, c.applicable);
        }
    }
    let json = to_json(&VerifyReport { passed, suites })?;
    match &a.out {
        Some(p) => write_atomic(p, &json)?,
        None => print!("{}", String::from_utf8_lossy(&json)),
    }
    Ok(passed)
}

fn gen(a: &GenArgs) -> Result<()> {
    let (ds, labels) = synth(a.kind, a.n, a.noise, a.seed)?;
    write_points(&a.out, &ds)?;
    if let Some(p) = &a.labels_out {
        write_labels(p, &labels)?;
    }
    Ok(())
}
