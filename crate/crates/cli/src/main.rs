//! `subsel` — benchmark harness for noisy subset selection.
//!
//! Subcommands reproduce the standard experiment protocol at configurable
//! scale: single seeded runs, algorithm × k grids, noise-level sweeps and
//! θ sweeps, all with derived per-run seeds and machine-readable output.

mod dataset;
mod output;
mod runner;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use dataset::{Dataset, DatasetKind, NoiseSettings};
use runner::{build_cells, run_group, CellSpec, ResultRow};
use std::path::PathBuf;
use std::process::ExitCode;
use subsel::algorithms::{AlgorithmId, SingletonPolicy};
use subsel::Theta;

#[derive(Parser)]
#[command(
    name = "subsel",
    version,
    about = "Noisy subset selection benchmark harness (greedy, POSS, PONSS, PORE)"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// One seeded run of one algorithm; writes a result row and the full
    /// run record with its anytime checkpoint series.
    Run(RunArgs),
    /// Full algorithm × k × run grid with per-cell aggregates.
    Experiment(ExperimentArgs),
    /// Experiment grid per noise level (IC simulations, row sample size,
    /// or ε, depending on the dataset kind).
    NoiseSweep(NoiseSweepArgs),
    /// PONSS/PORE grid over θ values at fixed k.
    ThetaSweep(ThetaSweepArgs),
    /// Exact value of an explicit subset (reporting channel).
    Eval(EvalArgs),
}

#[derive(Args)]
struct DataArgs {
    /// Dataset path; relative paths also resolve under $SUBSEL_DATA_DIR.
    #[arg(long)]
    dataset: PathBuf,

    /// Dataset kind; inferred from the extension when omitted
    /// (.edges/.el/.txt → graph, .libsvm/.svm/.tab → tabular,
    /// .cov → coverage).
    #[arg(long, value_enum)]
    kind: Option<DatasetKind>,

    /// Expand each edge-list line into both directions.
    #[arg(long)]
    undirected: bool,

    /// IC simulations per noisy evaluation (graph datasets).
    #[arg(long, default_value_t = 10)]
    sims_noisy: usize,

    /// IC simulations behind each exact reported value (graph datasets).
    #[arg(long, default_value_t = 10_000)]
    sims_exact: usize,

    /// Rows drawn per noisy evaluation (tabular datasets).
    #[arg(long, default_value_t = 1000)]
    sample_size: usize,

    /// Multiplicative noise half-width in [0, 1) (coverage datasets).
    #[arg(long, default_value_t = 0.0)]
    epsilon: f64,
}

impl DataArgs {
    fn load(&self) -> Result<Dataset> {
        Dataset::load(&self.dataset, self.kind, self.undirected)
    }

    fn noise(&self) -> NoiseSettings {
        NoiseSettings {
            sims_noisy: self.sims_noisy,
            sims_exact: self.sims_exact,
            sample_size: self.sample_size,
            epsilon: self.epsilon,
        }
    }
}

#[derive(Args)]
struct CommonRunArgs {
    /// θ-domination margin; defaults per kind (graph/coverage 0.15,
    /// tabular 0.05).
    #[arg(long)]
    theta: Option<f64>,

    /// Bucket cap B for PONSS/PORE (default: k).
    #[arg(long = "B")]
    bucket_cap: Option<usize>,

    /// Base seed; per-run seeds are derived from it and the grid
    /// coordinates.
    #[arg(long, default_value_t = 42)]
    seed: u64,

    /// Evaluation cap override for the Pareto algorithms
    /// (default ⌊2ek²n⌋ per k).
    #[arg(long)]
    budget: Option<u64>,

    /// Anytime checkpoint interval, in k·n evaluation units.
    #[arg(long)]
    checkpoint_kn: Option<u64>,

    /// Scoring for size-1 solutions under the robust evaluation.
    #[arg(long, value_enum, default_value_t = SingletonArg::Fallback)]
    robust_singleton: SingletonArg,

    /// Output path stem; writes <out>.csv, <out>.summary.csv and
    /// <out>.meta.json.
    #[arg(long, default_value = "results")]
    out: PathBuf,

    /// Worker threads for grid cells (0 = one per core).
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SingletonArg {
    /// f1({v}) = one sample of F({v}).
    Fallback,
    /// f1({v}) = F(∅)/1 = 0 (literal leave-one-out value).
    Literal,
}

impl From<SingletonArg> for SingletonPolicy {
    fn from(value: SingletonArg) -> SingletonPolicy {
        match value {
            SingletonArg::Fallback => SingletonPolicy::Fallback,
            SingletonArg::Literal => SingletonPolicy::Literal,
        }
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    common: CommonRunArgs,

    /// Algorithm: greedy | poss | ponss | pore | pore-f.
    #[arg(long, value_parser = parse_algorithm)]
    algo: AlgorithmId,

    /// Cardinality bound.
    #[arg(long)]
    k: usize,
}

#[derive(Args)]
struct ExperimentArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    common: CommonRunArgs,

    /// Algorithms to compare (repeatable or comma-separated).
    #[arg(long, value_parser = parse_algorithm, value_delimiter = ',', required = true)]
    algo: Vec<AlgorithmId>,

    /// Cardinality bounds (comma-separated).
    #[arg(long, value_delimiter = ',', required = true)]
    k: Vec<usize>,

    /// Independent runs per (algorithm, k) cell.
    #[arg(long, default_value_t = 30)]
    runs: u32,
}

#[derive(Args)]
struct NoiseSweepArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    common: CommonRunArgs,

    /// Algorithms to compare.
    #[arg(long, value_parser = parse_algorithm, value_delimiter = ',',
          default_values_t = [AlgorithmId::Greedy, AlgorithmId::Poss, AlgorithmId::Ponss, AlgorithmId::Pore])]
    algo: Vec<AlgorithmId>,

    /// Noise levels: simulation counts (graph), sample sizes (tabular) or
    /// ε values (coverage). Defaults per kind: 5,10,15,20 / 400,700,1000,
    /// 1300 / 0,0.1,0.3.
    #[arg(long, value_delimiter = ',')]
    levels: Vec<f64>,

    /// Cardinality bound (default per kind: graph 7, tabular 16,
    /// coverage 8).
    #[arg(long)]
    k: Option<usize>,

    #[arg(long, default_value_t = 30)]
    runs: u32,
}

#[derive(Args)]
struct ThetaSweepArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    common: CommonRunArgs,

    /// θ-aware algorithm to sweep: ponss | pore.
    #[arg(long, value_parser = parse_algorithm, default_value = "pore")]
    algo: AlgorithmId,

    /// θ grid (default 0.1,0.2,...,0.9).
    #[arg(long, value_delimiter = ',',
          default_values_t = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9])]
    thetas: Vec<f64>,

    /// Cardinality bound.
    #[arg(long, default_value_t = 7)]
    k: usize,

    #[arg(long, default_value_t = 30)]
    runs: u32,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    data: DataArgs,

    /// Subset as comma-separated 0-based item indices; omit or pass an
    /// empty string for ∅.
    #[arg(long, default_value = "")]
    subset: String,
}

impl EvalArgs {
    fn members(&self) -> Result<Vec<usize>> {
        self.subset
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<usize>()
                    .with_context(|| format!("bad item index {t:?}"))
            })
            .collect()
    }
}

fn parse_algorithm(s: &str) -> Result<AlgorithmId, String> {
    AlgorithmId::parse(s)
        .ok_or_else(|| format!("unknown algorithm {s:?}; use greedy|poss|ponss|pore|pore-f"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(args) => with_workers(args.common.workers, || cmd_run(&args)),
        Command::Experiment(args) => with_workers(args.common.workers, || cmd_experiment(&args)),
        Command::NoiseSweep(args) => with_workers(args.common.workers, || cmd_noise_sweep(&args)),
        Command::ThetaSweep(args) => with_workers(args.common.workers, || cmd_theta_sweep(&args)),
        Command::Eval(args) => cmd_eval(&args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

fn with_workers(
    workers: usize,
    body: impl FnOnce() -> Result<()> + Send,
) -> Result<()> {
    if workers == 0 {
        return body();
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .context("cannot build worker pool")?
        .install(body)
}

fn resolve_theta(requested: Option<f64>, kind: DatasetKind) -> Result<Theta> {
    Ok(Theta::new(requested.unwrap_or_else(|| kind.default_theta()))?)
}

fn cmd_run(args: &RunArgs) -> Result<()> {
    let data = args.data.load()?;
    let theta = resolve_theta(args.common.theta, data.kind)?;
    let objective = data.objective(&args.data.noise())?;
    let cells = build_cells(
        args.common.seed,
        &data.label,
        data.ground_size(),
        &[args.algo],
        &[args.k],
        1,
        theta,
        args.common.bucket_cap,
        args.common.budget,
        args.common.checkpoint_kn,
        args.common.robust_singleton.into(),
    )?;
    let mut results = run_group(objective.as_ref(), &cells);
    let (row, record) = results.pop().expect("one cell");

    output::write_rows(&output::csv_path(&args.common.out), &[row.clone()])?;
    output::write_json(
        &output::run_json_path(&args.common.out),
        &output::run_record_json(&record),
    )?;
    output::write_json(
        &output::meta_path(&args.common.out),
        &meta_common(args.algo.name(), &data, args, &cells),
    )?;
    println!(
        "{} on {} (k={}, seed={}): exact value {} after {} evaluations",
        row.algorithm, row.dataset, row.k, row.seed, row.exact_value, row.evals_used
    );
    println!(
        "wrote {} / {} / {}",
        output::csv_path(&args.common.out).display(),
        output::run_json_path(&args.common.out).display(),
        output::meta_path(&args.common.out).display()
    );
    Ok(())
}

fn meta_common(
    command: &str,
    data: &Dataset,
    args: &RunArgs,
    cells: &[CellSpec],
) -> serde_json::Value {
    serde_json::json!({
        "command": command,
        "dataset": { "path": args.data.dataset.display().to_string(), "label": data.label, "n": data.ground_size() },
        "noise": noise_json(&args.data),
        "theta": cells.first().map(|c| c.theta.value()),
        "bucket_cap": cells.first().map(|c| c.bucket_cap),
        "base_seed": args.common.seed,
        "budget": cells.first().map(|c| c.budget),
        "checkpoint_kn": args.common.checkpoint_kn,
        "robust_singleton": format!("{:?}", args.common.robust_singleton).to_lowercase(),
        "k": args.k,
        "version": env!("CARGO_PKG_VERSION"),
    })
}

fn noise_json(data: &DataArgs) -> serde_json::Value {
    serde_json::json!({
        "sims_noisy": data.sims_noisy,
        "sims_exact": data.sims_exact,
        "sample_size": data.sample_size,
        "epsilon": data.epsilon,
    })
}

fn cmd_experiment(args: &ExperimentArgs) -> Result<()> {
    let data = args.data.load()?;
    let theta = resolve_theta(args.common.theta, data.kind)?;
    let objective = data.objective(&args.data.noise())?;
    let cells = build_cells(
        args.common.seed,
        &data.label,
        data.ground_size(),
        &args.algo,
        &args.k,
        args.runs,
        theta,
        args.common.bucket_cap,
        args.common.budget,
        args.common.checkpoint_kn,
        args.common.robust_singleton.into(),
    )?;
    let results = run_group(objective.as_ref(), &cells);
    let rows: Vec<ResultRow> = results.into_iter().map(|(row, _)| row).collect();
    let meta = serde_json::json!({
        "command": "experiment",
        "dataset": { "path": args.data.dataset.display().to_string(), "label": data.label, "n": data.ground_size() },
        "noise": noise_json(&args.data),
        "algorithms": args.algo.iter().map(|a| a.name()).collect::<Vec<_>>(),
        "k": args.k,
        "runs": args.runs,
        "theta": theta.value(),
        "bucket_cap": args.common.bucket_cap,
        "base_seed": args.common.seed,
        "budget_override": args.common.budget,
        "checkpoint_kn": args.common.checkpoint_kn,
        "robust_singleton": format!("{:?}", args.common.robust_singleton).to_lowercase(),
        "version": env!("CARGO_PKG_VERSION"),
    });
    finish_grid(&args.common.out, rows, &meta)
}

fn cmd_noise_sweep(args: &NoiseSweepArgs) -> Result<()> {
    let data = args.data.load()?;
    let theta = resolve_theta(args.common.theta, data.kind)?;
    let k = args.k.unwrap_or_else(|| data.kind.default_sweep_k());
    let levels = if args.levels.is_empty() {
        data.default_levels()
    } else {
        args.levels.clone()
    };
    let base_noise = args.data.noise();
    let mut rows: Vec<ResultRow> = Vec::new();
    for &level in &levels {
        let noise = data.apply_level(&base_noise, level)?;
        let label = data.level_label(level);
        let objective = data.objective(&noise)?;
        let cells = build_cells(
            args.common.seed,
            &label,
            data.ground_size(),
            &args.algo,
            &[k],
            args.runs,
            theta,
            args.common.bucket_cap,
            args.common.budget,
            args.common.checkpoint_kn,
            args.common.robust_singleton.into(),
        )?;
        rows.extend(run_group(objective.as_ref(), &cells).into_iter().map(|(row, _)| row));
    }
    let meta = serde_json::json!({
        "command": "noise-sweep",
        "dataset": { "path": args.data.dataset.display().to_string(), "label": data.label, "n": data.ground_size() },
        "noise_base": noise_json(&args.data),
        "levels": levels,
        "algorithms": args.algo.iter().map(|a| a.name()).collect::<Vec<_>>(),
        "k": k,
        "runs": args.runs,
        "theta": theta.value(),
        "bucket_cap": args.common.bucket_cap,
        "base_seed": args.common.seed,
        "budget_override": args.common.budget,
        "version": env!("CARGO_PKG_VERSION"),
    });
    finish_grid(&args.common.out, rows, &meta)
}

fn cmd_theta_sweep(args: &ThetaSweepArgs) -> Result<()> {
    if !matches!(args.algo, AlgorithmId::Ponss | AlgorithmId::Pore) {
        bail!("theta-sweep applies to θ-aware algorithms: ponss or pore");
    }
    let data = args.data.load()?;
    let objective = data.objective(&args.data.noise())?;
    let mut rows: Vec<ResultRow> = Vec::new();
    for &theta_value in &args.thetas {
        let theta = Theta::new(theta_value)?;
        let cells = build_cells(
            args.common.seed,
            &data.label,
            data.ground_size(),
            &[args.algo],
            &[args.k],
            args.runs,
            theta,
            args.common.bucket_cap,
            args.common.budget,
            args.common.checkpoint_kn,
            args.common.robust_singleton.into(),
        )?;
        rows.extend(run_group(objective.as_ref(), &cells).into_iter().map(|(row, _)| row));
    }
    let meta = serde_json::json!({
        "command": "theta-sweep",
        "dataset": { "path": args.data.dataset.display().to_string(), "label": data.label, "n": data.ground_size() },
        "noise": noise_json(&args.data),
        "algorithm": args.algo.name(),
        "thetas": args.thetas,
        "k": args.k,
        "runs": args.runs,
        "bucket_cap": args.common.bucket_cap,
        "base_seed": args.common.seed,
        "budget_override": args.common.budget,
        "version": env!("CARGO_PKG_VERSION"),
    });
    finish_grid(&args.common.out, rows, &meta)
}

fn finish_grid(out: &PathBuf, rows: Vec<ResultRow>, meta: &serde_json::Value) -> Result<()> {
    output::write_rows(&output::csv_path(out), &rows)?;
    let cells = output::write_summary(&output::summary_path(out), &rows)?;
    output::write_json(&output::meta_path(out), meta)?;
    println!(
        "wrote {} rows ({} cells) to {} (+ {}, {})",
        rows.len(),
        cells,
        output::csv_path(out).display(),
        output::summary_path(out).display(),
        output::meta_path(out).display()
    );
    Ok(())
}

fn cmd_eval(args: &EvalArgs) -> Result<()> {
    let data = args.data.load()?;
    let objective = data.objective(&args.data.noise())?;
    let set = subsel::ItemSet::from_members(data.ground_size(), &args.members()?)?;
    println!("{}", objective.evaluate_exact(&set));
    Ok(())
}
