//! The `fuselab` command line.
//!
//! Exit status is 0 on success, 1 when a file cannot be read, parsed or
//! written, and 2 for usage errors (bad flags, unknown metric or method
//! names, invalid weights or grid steps). Diagnostics go to stderr.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use fuselab_core::fusion::{FusionConfig, FusionMethod, Normalization};
use fuselab_core::metrics::judged_at_k;
use fuselab_core::pool::{
    build_pool, collection_stats, condensed_eval, leave_one_out_bias, simulate_qrels,
};
use fuselab_core::tuner::{grid_search, GridSpec};
use fuselab_core::{evaluate, fuse_runs, Error as CoreError, MetricSpec, Qrels, Run};

use crate::config::{ConfigFile, CONFIG_ENV};
use crate::report::JudgedRow;
use crate::{pool_file, report, trec};

const DEFAULT_METRICS: &str = "mrr,ndcg@5,ndcg@10,recall@10,recall@100,map@1000";

#[derive(Debug, Parser)]
#[command(
    name = "fuselab",
    version,
    about = "Rank fusion, evaluation and pooling analysis over TREC files"
)]
pub struct Cli {
    /// TOML file of default flag values; falls back to $FUSELAB_CONFIG
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fuse run files into one run
    #[command(args_override_self = true)]
    Fuse(FuseArgs),
    /// Evaluate a run against qrels
    #[command(args_override_self = true)]
    Eval(EvalArgs),
    /// Grid-search linear fusion weights
    #[command(args_override_self = true)]
    Tune(TuneArgs),
    /// Build a depth-k pool, optionally simulating the qrels it would yield
    #[command(args_override_self = true)]
    Pool(PoolArgs),
    /// Judged counts and rates in the top k of each run
    #[command(args_override_self = true)]
    Judged(JudgedArgs),
    /// Leave-one-out pool bias for one contributing run
    #[command(args_override_self = true)]
    Bias(BiasArgs),
    /// Qrels statistics and judged rates of runs
    #[command(args_override_self = true)]
    Stats(StatsArgs),
}

#[derive(Debug, Args)]
pub struct FusionArgs {
    /// Input lists are cut to this depth before fusing
    #[arg(long)]
    pub depth: Option<usize>,
    /// Length of each fused list (defaults to the depth)
    #[arg(long)]
    pub output_depth: Option<usize>,
    /// none, minmax, zscore or rank
    #[arg(long)]
    pub normalization: Option<String>,
}

#[derive(Debug, Args)]
pub struct FuseArgs {
    #[arg(required = true, value_name = "RUN")]
    pub runs: Vec<PathBuf>,
    /// linear, combsum, combmnz, rrf, borda, condorcet or roundrobin
    #[arg(long, default_value = "linear")]
    pub method: String,
    /// Comma-separated linear weights, one per run (default: equal)
    #[arg(long)]
    pub weights: Option<String>,
    #[command(flatten)]
    pub fusion: FusionArgs,
    /// Reciprocal rank fusion constant
    #[arg(long)]
    pub rrf_k: Option<f64>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Table,
    Lines,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub run: PathBuf,
    #[arg(long)]
    pub qrels: PathBuf,
    /// Comma-separated metric names such as ndcg@5,mrr,map@1000
    #[arg(long, default_value = DEFAULT_METRICS)]
    pub metrics: String,
    /// Print fractions as percentages
    #[arg(long)]
    pub percent: bool,
    /// Drop unjudged documents before scoring
    #[arg(long)]
    pub condensed: bool,
    #[arg(long, value_enum, default_value_t = ReportFormat::Table)]
    pub format: ReportFormat,
    /// Only print the mean row of the table
    #[arg(long)]
    pub summary: bool,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TuneArgs {
    #[arg(required = true, value_name = "RUN")]
    pub runs: Vec<PathBuf>,
    #[arg(long)]
    pub qrels: PathBuf,
    /// Lattice step; 1/step must be an integer
    #[arg(long, default_value_t = 0.1)]
    pub step: f64,
    #[arg(long, default_value = "ndcg@5")]
    pub objective: String,
    #[command(flatten)]
    pub fusion: FusionArgs,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PoolArgs {
    #[arg(required = true, value_name = "RUN")]
    pub runs: Vec<PathBuf>,
    #[arg(long, default_value_t = 10)]
    pub depth: usize,
    /// Pool file to write (default: stdout)
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Full judgments used to simulate the pool's qrels
    #[arg(long, requires = "qrels_out")]
    pub oracle_qrels: Option<PathBuf>,
    /// Where to write the simulated qrels
    #[arg(long, requires = "oracle_qrels")]
    pub qrels_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct JudgedArgs {
    #[arg(required = true, value_name = "RUN")]
    pub runs: Vec<PathBuf>,
    #[arg(long)]
    pub qrels: PathBuf,
    #[arg(long, default_value_t = 20)]
    pub k: usize,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BiasArgs {
    #[arg(required = true, value_name = "RUN")]
    pub runs: Vec<PathBuf>,
    /// Tag of the run to hold out of the pool
    #[arg(long)]
    pub target: String,
    /// Full judgments standing in for complete assessment
    #[arg(long)]
    pub qrels: PathBuf,
    #[arg(long, default_value_t = 20)]
    pub depth: usize,
    #[arg(long, default_value = "recall@1000")]
    pub objective: String,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(value_name = "RUN")]
    pub runs: Vec<PathBuf>,
    #[arg(long)]
    pub qrels: PathBuf,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

/// A failed invocation and the status it exits with.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Data(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Data(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Data(m) => m,
        }
    }
}

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

/// Core errors caused by flag values are usage errors; the rest are about data.
fn core_failure(e: CoreError) -> Failure {
    match e {
        CoreError::WeightArityMismatch { .. }
        | CoreError::InvalidConfig(_)
        | CoreError::UnknownName { .. }
        | CoreError::UnknownMetric(_)
        | CoreError::InvalidGrid(_)
        | CoreError::TooFewRuns(_)
        | CoreError::UnknownRunTag(_) => usage(e),
        other => Failure::Data(other.to_string()),
    }
}

/// Parses `args` (program name first), applies the config file, runs the
/// subcommand and returns the exit status.
pub fn run(args: Vec<OsString>) -> i32 {
    let cli = match parse(args) {
        Ok(cli) => cli,
        Err(ParseOutcome::Clap(e)) => {
            let _ = e.print();
            return e.exit_code();
        }
        Err(ParseOutcome::Failure(f)) => {
            eprintln!("fuselab: {}", f.message());
            return f.exit_code();
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("fuselab: {}", f.message());
            f.exit_code()
        }
    }
}

enum ParseOutcome {
    Clap(clap::Error),
    Failure(Failure),
}

/// Finds `--config` and the subcommand position without a full parse, since
/// the file may supply otherwise required flags.
fn scan(args: &[OsString]) -> (Option<PathBuf>, Option<usize>) {
    let mut config = None;
    let mut sub = None;
    let mut i = 1;
    while i < args.len() {
        let a = args[i].to_string_lossy();
        if a == "--" {
            break;
        }
        if a == "--config" {
            config = args.get(i + 1).map(PathBuf::from);
            i += 2;
            continue;
        }
        if let Some(path) = a.strip_prefix("--config=") {
            config = Some(PathBuf::from(path));
        } else if sub.is_none() && !a.starts_with('-') {
            sub = Some(i);
        }
        i += 1;
    }
    (config, sub)
}

fn parse(mut args: Vec<OsString>) -> Result<Cli, ParseOutcome> {
    let command = Cli::command();
    let (config_path, sub) = scan(&args);
    let config_path = config_path.or_else(|| {
        std::env::var_os(CONFIG_ENV)
            .filter(|v| !v.is_empty())
            .map(PathBuf::from)
    });
    if let (Some(path), Some(i)) = (config_path, sub) {
        let name = args[i].to_string_lossy().into_owned();
        if let Some(subcommand) = command.find_subcommand(&name) {
            let file =
                ConfigFile::load(&path, &command).map_err(|e| ParseOutcome::Failure(usage(e)))?;
            let extra = file.args_for(subcommand);
            args.splice(i + 1..i + 1, extra.into_iter().map(OsString::from));
        }
    }
    let matches = command
        .try_get_matches_from(args)
        .map_err(ParseOutcome::Clap)?;
    Cli::from_arg_matches(&matches).map_err(ParseOutcome::Clap)
}

fn execute(command: Command) -> Result<(), Failure> {
    match command {
        Command::Fuse(a) => cmd_fuse(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Tune(a) => cmd_tune(a),
        Command::Pool(a) => cmd_pool(a),
        Command::Judged(a) => cmd_judged(a),
        Command::Bias(a) => cmd_bias(a),
        Command::Stats(a) => cmd_stats(a),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

fn read_run(path: &Path) -> Result<Run, Failure> {
    trec::parse_run(&read(path)?).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

fn read_runs(paths: &[PathBuf]) -> Result<Vec<Run>, Failure> {
    paths.iter().map(|p| read_run(p)).collect()
}

fn read_qrels(path: &Path) -> Result<Qrels, Failure> {
    trec::parse_qrels(&read(path)?).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

fn emit(output: Option<&Path>, text: &str) -> Result<(), Failure> {
    match output {
        Some(path) => {
            fs::write(path, text).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|()| out.flush())
                .map_err(|e| Failure::Data(format!("stdout: {e}")))
        }
    }
}

fn parse_metric(text: &str) -> Result<MetricSpec, Failure> {
    text.parse().map_err(core_failure)
}

fn parse_weights(text: &str) -> Result<Vec<f64>, Failure> {
    text.split(',')
        .map(|w| {
            w.trim()
                .parse::<f64>()
                .map_err(|_| usage(format!("invalid weight `{}`", w.trim())))
        })
        .collect()
}

fn base_config(method: FusionMethod, args: &FusionArgs) -> Result<FusionConfig, Failure> {
    let mut config = FusionConfig::new(method);
    if let Some(depth) = args.depth {
        config.depth = depth;
    }
    config.output_depth = args.output_depth;
    if let Some(n) = &args.normalization {
        config.normalization = Some(n.parse::<Normalization>().map_err(core_failure)?);
    }
    Ok(config)
}

/// Resolves and validates the fusion flags for `run_count` inputs.
pub fn fusion_config(args: &FuseArgs, run_count: usize) -> Result<FusionConfig, Failure> {
    let method: FusionMethod = args.method.parse().map_err(core_failure)?;
    let mut config = base_config(method, &args.fusion)?;
    if let Some(k) = args.rrf_k {
        config.rrf_k = k;
    }
    config.weights = match &args.weights {
        Some(w) => parse_weights(w)?,
        None if method == FusionMethod::Linear => vec![1.0 / run_count as f64; run_count],
        None => Vec::new(),
    };
    config.validate(run_count).map_err(core_failure)?;
    Ok(config)
}

fn cmd_fuse(args: FuseArgs) -> Result<(), Failure> {
    let config = fusion_config(&args, args.runs.len())?;
    let runs = read_runs(&args.runs)?;
    let fused = fuse_runs(&runs, &config).map_err(core_failure)?;
    emit(args.output.as_deref(), &trec::write_run(&fused))
}

fn cmd_eval(args: EvalArgs) -> Result<(), Failure> {
    let metrics = MetricSpec::parse_list(&args.metrics).map_err(core_failure)?;
    let run = read_run(&args.run)?;
    let qrels = read_qrels(&args.qrels)?;
    let report = if args.condensed {
        condensed_eval(&run, &qrels, &metrics)
    } else {
        evaluate(&run, &qrels, &metrics)
    };
    let skipped = report.skipped_query_ids().len();
    if skipped > 0 {
        eprintln!("fuselab: {skipped} queries not evaluated (no relevant judgments or missing from run or qrels)");
    }
    let text = match args.format {
        ReportFormat::Table => report::metric_table(&report, args.percent, !args.summary),
        ReportFormat::Lines => report::metric_lines(&report, args.percent),
    };
    emit(args.output.as_deref(), &text)
}

fn cmd_tune(args: TuneArgs) -> Result<(), Failure> {
    let objective = parse_metric(&args.objective)?;
    let grid = GridSpec::new(args.step, objective).map_err(core_failure)?;
    if args.runs.len() < 2 {
        return Err(core_failure(CoreError::TooFewRuns(args.runs.len())));
    }
    let base = base_config(FusionMethod::Linear, &args.fusion)?;
    let mut check = base.clone();
    check.weights = vec![1.0; args.runs.len()];
    check.validate(args.runs.len()).map_err(core_failure)?;
    let runs = read_runs(&args.runs)?;
    let qrels = read_qrels(&args.qrels)?;
    let tuned = grid_search(&runs, &qrels, &grid, &base).map_err(core_failure)?;
    emit(args.output.as_deref(), &report::tune_lines(&tuned))
}

fn cmd_pool(args: PoolArgs) -> Result<(), Failure> {
    if args.depth == 0 {
        return Err(usage("pool depth must be at least 1"));
    }
    let runs = read_runs(&args.runs)?;
    let oracle = args.oracle_qrels.as_deref().map(read_qrels).transpose()?;
    let pool = build_pool(&runs, args.depth).map_err(core_failure)?;
    emit(args.output.as_deref(), &pool_file::write_pool(&pool))?;
    if let (Some(oracle), Some(path)) = (oracle, args.qrels_out.as_deref()) {
        emit(
            Some(path),
            &trec::write_qrels(&simulate_qrels(&pool, &oracle)),
        )?;
    }
    Ok(())
}

fn cmd_judged(args: JudgedArgs) -> Result<(), Failure> {
    if args.k == 0 {
        return Err(usage("k must be at least 1"));
    }
    let runs = read_runs(&args.runs)?;
    let qrels = read_qrels(&args.qrels)?;
    let rows: Vec<(String, Vec<JudgedRow>)> = runs
        .iter()
        .map(|run| {
            let per_query = run
                .lists()
                .filter(|l| qrels.query(l.query_id()).is_some())
                .map(|l| {
                    let (fraction, count) = judged_at_k(l, &qrels, args.k);
                    JudgedRow {
                        query_id: l.query_id().to_string(),
                        count,
                        fraction,
                    }
                })
                .collect();
            (run.tag().to_string(), per_query)
        })
        .collect();
    emit(args.output.as_deref(), &report::judged_table(&rows, args.k))
}

fn cmd_bias(args: BiasArgs) -> Result<(), Failure> {
    let objective = parse_metric(&args.objective)?;
    if args.depth == 0 {
        return Err(usage("pool depth must be at least 1"));
    }
    let runs = read_runs(&args.runs)?;
    let qrels = read_qrels(&args.qrels)?;
    let bias = leave_one_out_bias(&runs, &args.target, &qrels, args.depth, &objective)
        .map_err(core_failure)?;
    emit(args.output.as_deref(), &report::bias_table(&bias))
}

fn cmd_stats(args: StatsArgs) -> Result<(), Failure> {
    let runs = read_runs(&args.runs)?;
    let qrels = read_qrels(&args.qrels)?;
    emit(
        args.output.as_deref(),
        &report::stats_tables(&collection_stats(&runs, &qrels)),
    )
}
