//! `planwise` command line: plan, discover a bellwether, evaluate, and dump
//! thresholds or trees. Every command is a pure function of its inputs and
//! options, so re-runs produce byte-identical files.

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use planwise::bellwether::{discover, QualityMeasure};
use planwise::data::{
    load_community_dir, load_csv, load_project_dir, ClassRecord, Project, VersionedDataset,
};
use planwise::dtree::{DecisionTree, TreeParams};
use planwise::eval::{curve_csv, evaluate_windows, KTestResult};
use planwise::planners::{
    alves_thresholds, oliveira_thresholds, shatnawi_thresholds, train, Plan, Planner, PlannerKind,
    PlannerParams, ThresholdRule, XTree, DEFAULT_ALVES_PERCENTILE, DEFAULT_GAMMA,
    DEFAULT_MIN_COMPLIANCE, DEFAULT_P0, DEFAULT_P1, DEFAULT_SEED, DEFAULT_TAIL,
};
use planwise::refhints::suggest_refactoring_names;
use planwise::Metric;
use serde::Serialize;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

/// Version of every JSON document the CLI writes.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Parser)]
#[command(
    name = "planwise",
    version,
    about = "Defect-reduction planning from code metrics"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Recommend metric changes for every class of a release.
    Plan(PlanArgs),
    /// Find the project whose tree predicts the rest of a community best.
    Bellwether(BellwetherArgs),
    /// Run the K-test over every consecutive release window of a project.
    Evaluate(EvaluateArgs),
    /// Dump the rules a threshold baseline derives from training data.
    Thresholds(ThresholdArgs),
    /// Dump the decision tree grown on training data.
    Tree(TreeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PlannerChoice {
    Xtree,
    Belltree,
    Alves,
    Shatnawi,
    Oliveira,
}

impl PlannerChoice {
    pub fn kind(self) -> PlannerKind {
        match self {
            PlannerChoice::Xtree => PlannerKind::Xtree,
            PlannerChoice::Belltree => PlannerKind::Belltree,
            PlannerChoice::Alves => PlannerKind::Alves,
            PlannerChoice::Shatnawi => PlannerKind::Shatnawi,
            PlannerChoice::Oliveira => PlannerKind::Oliveira,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EvalPlanner {
    Xtree,
    Belltree,
    Alves,
    Shatnawi,
    Oliveira,
    /// Every planner; BELLTREE only when `--bellwether` is given.
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Baseline {
    Alves,
    Shatnawi,
    Oliveira,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Measure {
    GScore,
    F1,
    Accuracy,
}

impl From<Measure> for QualityMeasure {
    fn from(m: Measure) -> Self {
        match m {
            Measure::GScore => QualityMeasure::GScore,
            Measure::F1 => QualityMeasure::F1,
            Measure::Accuracy => QualityMeasure::Accuracy,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct TreeOpts {
    /// Maximum tree depth.
    #[arg(long, env = "PLANWISE_MAX_DEPTH", default_value_t = 10)]
    pub max_depth: usize,
    /// Minimum rows per leaf [default: max(5, N/50)].
    #[arg(long, env = "PLANWISE_MIN_LEAF")]
    pub min_leaf: Option<usize>,
}

impl TreeOpts {
    pub fn params(&self) -> TreeParams {
        TreeParams {
            max_depth: self.max_depth,
            min_leaf: self.min_leaf,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct PlannerOpts {
    /// A better leaf must score below gamma times the current one.
    #[arg(long, env = "PLANWISE_GAMMA", default_value_t = DEFAULT_GAMMA)]
    pub gamma: f64,
    /// Alves: LOC-weighted percentile.
    #[arg(long, env = "PLANWISE_PERCENTILE", default_value_t = DEFAULT_ALVES_PERCENTILE)]
    pub percentile: f64,
    /// Shatnawi: significance level of the logistic fit.
    #[arg(long, env = "PLANWISE_P0", default_value_t = DEFAULT_P0)]
    pub p0: f64,
    /// Shatnawi: acceptable risk level.
    #[arg(long, env = "PLANWISE_P1", default_value_t = DEFAULT_P1)]
    pub p1: f64,
    /// Oliveira: minimum compliance percentage.
    #[arg(long, env = "PLANWISE_MIN_COMPLIANCE", default_value_t = DEFAULT_MIN_COMPLIANCE)]
    pub min_compliance: f64,
    /// Oliveira: tail percentile.
    #[arg(long, env = "PLANWISE_TAIL", default_value_t = DEFAULT_TAIL)]
    pub tail: f64,
    /// Seed for suggested values.
    #[arg(long, env = "PLANWISE_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[command(flatten)]
    pub tree: TreeOpts,
}

impl PlannerOpts {
    pub fn params(&self) -> PlannerParams {
        PlannerParams {
            gamma: self.gamma,
            percentile: self.percentile,
            p0: self.p0,
            p1: self.p1,
            min_compliance: self.min_compliance,
            tail: self.tail,
            tree: self.tree.params(),
            seed: self.seed,
        }
    }
}

#[derive(Debug, Args)]
pub struct PlanArgs {
    #[arg(long, env = "PLANWISE_PLANNER", value_enum, default_value_t = PlannerChoice::Xtree)]
    pub planner: PlannerChoice,
    /// Training release CSVs, pooled (the bellwether's releases for belltree).
    #[arg(long, required = true, num_args = 1..)]
    pub train: Vec<PathBuf>,
    /// Release to plan for.
    #[arg(long)]
    pub test: PathBuf,
    /// Output file [default: stdout].
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, env = "PLANWISE_FORMAT", value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(flatten)]
    pub opts: PlannerOpts,
}

#[derive(Debug, Args)]
pub struct BellwetherArgs {
    /// Directory with one sub-directory of release CSVs per project.
    #[arg(long)]
    pub community: PathBuf,
    #[arg(long, env = "PLANWISE_MEASURE", value_enum, default_value_t = Measure::GScore)]
    pub measure: Measure,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub tree: TreeOpts,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Directory of release CSVs for one project (at least three).
    #[arg(long)]
    pub project: PathBuf,
    #[arg(long, env = "PLANWISE_PLANNER", value_enum, default_value_t = EvalPlanner::Xtree)]
    pub planner: EvalPlanner,
    /// Bellwether project directory; required for belltree.
    #[arg(long, required_if_eq("planner", "belltree"))]
    pub bellwether: Option<PathBuf>,
    /// Metric deltas within this band count as unchanged.
    #[arg(long, env = "PLANWISE_EPSILON", default_value_t = 0.0)]
    pub epsilon: f64,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub opts: PlannerOpts,
}

#[derive(Debug, Args)]
pub struct ThresholdArgs {
    #[arg(long, env = "PLANWISE_PLANNER", value_enum)]
    pub planner: Baseline,
    #[arg(long, required = true, num_args = 1..)]
    pub train: Vec<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, env = "PLANWISE_FORMAT", value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(flatten)]
    pub opts: PlannerOpts,
}

#[derive(Debug, Args)]
pub struct TreeArgs {
    #[arg(long, required = true, num_args = 1..)]
    pub train: Vec<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub tree: TreeOpts,
}

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Plan(a) => emit(a.out.as_deref(), &cmd_plan(a)?),
        Command::Bellwether(a) => emit(a.out.as_deref(), &cmd_bellwether(a)?),
        Command::Evaluate(a) => {
            let summary = cmd_evaluate(a)?;
            print!("{}", summary_table(&summary));
            Ok(())
        }
        Command::Thresholds(a) => emit(a.out.as_deref(), &cmd_thresholds(a)?),
        Command::Tree(a) => emit(a.out.as_deref(), &cmd_tree(a)?),
    }
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(p) => write_atomic(p, bytes),
        None => {
            std::io::stdout().write_all(bytes)?;
            Ok(())
        }
    }
}

/// Write via a temporary sibling and rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.persist(path)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn to_json(value: &impl Serialize) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    Ok(bytes)
}

fn pooled(paths: &[PathBuf]) -> Result<(Vec<String>, Vec<ClassRecord>)> {
    let mut labels = Vec::new();
    let mut records = Vec::new();
    for p in paths {
        let ds = load_csv(p)?;
        labels.push(ds.label());
        records.extend(ds.records);
    }
    Ok((labels, records))
}

#[derive(Serialize)]
struct PlanEntry<'a> {
    #[serde(flatten)]
    plan: &'a Plan,
    row: String,
    refactorings: Vec<String>,
}

#[derive(Serialize)]
struct PlanDoc<'a> {
    schema_version: u32,
    planner: &'static str,
    train: Vec<String>,
    test: String,
    plans: Vec<PlanEntry<'a>>,
}

/// One plan per class of the test release.
pub fn cmd_plan(args: &PlanArgs) -> Result<Vec<u8>> {
    let (train_labels, records) = pooled(&args.train)?;
    let test = load_csv(&args.test)?;
    let kind = args.planner.kind();
    let planner = train(kind, &args.opts.params(), &records);
    let plans: Vec<Plan> = test.records.iter().map(|r| planner.plan(r)).collect();
    match args.format {
        Format::Json => to_json(&PlanDoc {
            schema_version: SCHEMA_VERSION,
            planner: kind.name(),
            train: train_labels,
            test: test.label(),
            plans: plans
                .iter()
                .map(|p| PlanEntry {
                    plan: p,
                    row: p.row(),
                    refactorings: suggest_refactoring_names(p),
                })
                .collect(),
        }),
        Format::Csv => {
            let mut out = String::from("class,planner");
            for m in Metric::ALL {
                let _ = write!(out, ",{m}");
            }
            out.push_str(",expected_score_drop,refactorings\n");
            for p in &plans {
                let _ = write!(out, "{},{}", csv_field(&p.class_name), p.source_planner);
                for m in Metric::ALL {
                    let _ = write!(out, ",{}", p.action(m).direction.symbol());
                }
                let drop = p
                    .expected_score_drop
                    .map(|d| d.to_string())
                    .unwrap_or_default();
                let _ = writeln!(
                    out,
                    ",{drop},{}",
                    csv_field(&suggest_refactoring_names(p).join(";"))
                );
            }
            Ok(out.into_bytes())
        }
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[derive(Serialize)]
struct Versioned<'a, T: Serialize> {
    schema_version: u32,
    #[serde(flatten)]
    body: &'a T,
}

pub fn cmd_bellwether(args: &BellwetherArgs) -> Result<Vec<u8>> {
    let community = load_community_dir(&args.community)?;
    let report = discover(&community, args.measure.into(), args.tree.params())?;
    log::info!("bellwether: {}", report.bellwether);
    to_json(&Versioned {
        schema_version: SCHEMA_VERSION,
        body: &report,
    })
}

/// One row of the evaluation summary.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub planner: String,
    pub project: String,
    pub window: String,
    pub matched_classes: usize,
    pub aupec_reduced: Option<f64>,
    pub aupec_increased: Option<f64>,
    pub median_changes: f64,
}

impl SummaryRow {
    fn of(r: &KTestResult) -> SummaryRow {
        SummaryRow {
            planner: r.planner.clone(),
            project: r.project.clone(),
            window: window_label(r),
            matched_classes: r.matched_classes,
            aupec_reduced: r.aupec_reduced,
            aupec_increased: r.aupec_increased,
            median_changes: r.changes_per_plan.median,
        }
    }
}

fn window_label(r: &KTestResult) -> String {
    format!(
        "{}_{}_{}",
        r.train_version, r.test_version, r.validation_version
    )
}

#[derive(Serialize)]
struct KTestDoc<'a> {
    schema_version: u32,
    #[serde(flatten)]
    result: &'a KTestResult,
}

fn evaluation_planners(args: &EvaluateArgs) -> Vec<PlannerKind> {
    match args.planner {
        EvalPlanner::Xtree => vec![PlannerKind::Xtree],
        EvalPlanner::Belltree => vec![PlannerKind::Belltree],
        EvalPlanner::Alves => vec![PlannerKind::Alves],
        EvalPlanner::Shatnawi => vec![PlannerKind::Shatnawi],
        EvalPlanner::Oliveira => vec![PlannerKind::Oliveira],
        EvalPlanner::All => PlannerKind::ALL
            .into_iter()
            .filter(|k| *k != PlannerKind::Belltree || args.bellwether.is_some())
            .collect(),
    }
}

/// Evaluate every requested planner on every window of the project.
///
/// Writes `<out>/<planner>/<window>.json` and `<window>.curve.csv` per window
/// and `<out>/summary.csv`; returns the summary rows.
pub fn cmd_evaluate(args: &EvaluateArgs) -> Result<Vec<SummaryRow>> {
    let project = load_project_dir(&args.project)?;
    if project.versions.len() < 3 {
        anyhow::bail!(
            "{}: the K-test needs three releases (train, plan, validate); found {}",
            project.name,
            project.versions.len()
        );
    }
    let params = args.opts.params();
    let bellwether_tree = match &args.bellwether {
        Some(dir) => {
            let bw: Project = load_project_dir(dir)?;
            Some(DecisionTree::build(&bw.pooled(), params.tree))
        }
        None => None,
    };

    let mut summary = Vec::new();
    for kind in evaluation_planners(args) {
        let trainer = |v: &VersionedDataset| -> Box<dyn Planner> {
            match (kind, &bellwether_tree) {
                (PlannerKind::Belltree, Some(tree)) => Box::new(XTree {
                    name: kind.name().to_string(),
                    tree: tree.clone(),
                    gamma: params.gamma,
                    seed: params.seed,
                }),
                _ => train(kind, &params, &v.records),
            }
        };
        let results = evaluate_windows(&project, &trainer, args.epsilon)?;
        let dir = args.out.join(kind.name());
        for r in &results {
            let label = window_label(r);
            write_atomic(
                &dir.join(format!("{label}.json")),
                &to_json(&KTestDoc {
                    schema_version: SCHEMA_VERSION,
                    result: r,
                })?,
            )?;
            write_atomic(
                &dir.join(format!("{label}.curve.csv")),
                curve_csv(&r.curve).as_bytes(),
            )?;
            summary.push(SummaryRow::of(r));
        }
    }
    write_atomic(
        &args.out.join("summary.csv"),
        summary_csv(&summary).as_bytes(),
    )?;
    Ok(summary)
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.2}")).unwrap_or_else(|| "-".into())
}

pub fn summary_csv(rows: &[SummaryRow]) -> String {
    let mut out = String::from(
        "planner,project,window,matched_classes,aupec_reduced,aupec_increased,median_changes\n",
    );
    for r in rows {
        let field = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.planner,
            csv_field(&r.project),
            csv_field(&r.window),
            r.matched_classes,
            field(r.aupec_reduced),
            field(r.aupec_increased),
            r.median_changes
        );
    }
    out
}

/// Planner × window table with AUPEC for reduced (↓) and increased (↑) defects.
pub fn summary_table(rows: &[SummaryRow]) -> String {
    let mut out = format!(
        "{:<10} {:<24} {:>7} {:>8} {:>8} {:>8}\n",
        "planner", "window", "classes", "AUPEC↓", "AUPEC↑", "changes"
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{:<10} {:<24} {:>7} {:>8} {:>8} {:>8}",
            r.planner,
            format!("{} {}", r.project, r.window),
            r.matched_classes,
            opt(r.aupec_reduced),
            opt(r.aupec_increased),
            r.median_changes
        );
    }
    out
}

#[derive(Serialize)]
struct ThresholdDoc<'a> {
    schema_version: u32,
    planner: &'static str,
    train: Vec<String>,
    rules: &'a [ThresholdRule],
}

pub fn cmd_thresholds(args: &ThresholdArgs) -> Result<Vec<u8>> {
    let (labels, records) = pooled(&args.train)?;
    let p = args.opts.params();
    let (name, rules) = match args.planner {
        Baseline::Alves => ("alves", alves_thresholds(&records, p.percentile)),
        Baseline::Shatnawi => ("shatnawi", shatnawi_thresholds(&records, p.p0, p.p1)),
        Baseline::Oliveira => (
            "oliveira",
            oliveira_thresholds(&records, p.min_compliance, p.tail),
        ),
    };
    match args.format {
        Format::Json => to_json(&ThresholdDoc {
            schema_version: SCHEMA_VERSION,
            planner: name,
            train: labels,
            rules: &rules,
        }),
        Format::Csv => {
            let mut out = String::from("metric,upper,p_fraction\n");
            for r in &rules {
                let pf = r.p_fraction.map(|f| f.to_string()).unwrap_or_default();
                let _ = writeln!(out, "{},{},{pf}", r.metric, r.upper);
            }
            Ok(out.into_bytes())
        }
    }
}

#[derive(Serialize)]
struct TreeDoc<'a> {
    schema_version: u32,
    train: Vec<String>,
    tree: &'a DecisionTree,
}

pub fn cmd_tree(args: &TreeArgs) -> Result<Vec<u8>> {
    let (labels, records) = pooled(&args.train)?;
    if records.is_empty() {
        anyhow::bail!("no training rows");
    }
    let tree = DecisionTree::build(&records, args.tree.params());
    to_json(&TreeDoc {
        schema_version: SCHEMA_VERSION,
        train: labels,
        tree: &tree,
    })
}
