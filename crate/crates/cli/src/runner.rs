//! Grid construction and parallel execution with per-cell derived seeds.

use anyhow::{bail, Result};
use rayon::prelude::*;
use std::time::Instant;
use subsel::algorithms::{self, AlgoConfig, AlgorithmId, RunRecord, SingletonPolicy};
use subsel::budget::pareto_budget;
use subsel::seeding::{derive_seed, hash_str};
use subsel::{Objective, Theta};

/// One run of one algorithm at one grid coordinate.
#[derive(Clone, Debug)]
pub struct CellSpec {
    pub algorithm: AlgorithmId,
    pub dataset: String,
    pub k: usize,
    pub theta: Theta,
    pub bucket_cap: usize,
    pub run_index: u32,
    pub seed: u64,
    /// Evaluation cap for the Pareto algorithms.
    pub budget: u64,
    pub checkpoint_kn: Option<u64>,
    pub singleton_policy: SingletonPolicy,
}

/// One line of the results CSV.
#[derive(Clone, Debug)]
pub struct ResultRow {
    pub algorithm: String,
    pub dataset: String,
    pub k: usize,
    pub theta: f64,
    pub bucket_cap: usize,
    pub budget: u64,
    pub seed: u64,
    pub run: u32,
    pub exact_value: f64,
    pub evals_used: u64,
    pub wall_ms: u128,
}

/// Derives the per-run seed from the base seed and the cell coordinates.
/// Every coordinate participates, so no two grid cells share a stream.
pub fn cell_seed(
    base: u64,
    algorithm: AlgorithmId,
    dataset: &str,
    k: usize,
    theta: f64,
    bucket_cap: usize,
    run_index: u32,
) -> u64 {
    derive_seed(
        base,
        &[
            hash_str(algorithm.name()),
            hash_str(dataset),
            k as u64,
            theta.to_bits(),
            bucket_cap as u64,
            u64::from(run_index),
        ],
    )
}

/// Builds the full grid (algorithm × k × run) for one objective group.
#[allow(clippy::too_many_arguments)]
pub fn build_cells(
    base_seed: u64,
    dataset: &str,
    n: usize,
    algorithms: &[AlgorithmId],
    ks: &[usize],
    runs: u32,
    theta: Theta,
    bucket_cap: Option<usize>,
    budget_override: Option<u64>,
    checkpoint_kn: Option<u64>,
    singleton_policy: SingletonPolicy,
) -> Result<Vec<CellSpec>> {
    let mut cells = Vec::new();
    for &algorithm in algorithms {
        for &k in ks {
            if k < 1 || k > n {
                bail!("k={k} is outside [1, {n}] for dataset {dataset}");
            }
            let cap = bucket_cap.unwrap_or(k);
            let budget = budget_override.unwrap_or_else(|| pareto_budget(k, n));
            for run_index in 0..runs {
                cells.push(CellSpec {
                    algorithm,
                    dataset: dataset.to_string(),
                    k,
                    theta,
                    bucket_cap: cap,
                    run_index,
                    seed: cell_seed(
                        base_seed,
                        algorithm,
                        dataset,
                        k,
                        theta.value(),
                        cap,
                        run_index,
                    ),
                    budget,
                    checkpoint_kn,
                    singleton_policy,
                });
            }
        }
    }
    Ok(cells)
}

/// Executes one cell.
pub fn run_cell(objective: &dyn Objective, cell: &CellSpec) -> (ResultRow, RunRecord) {
    let mut cfg = AlgoConfig::new(cell.k)
        .with_theta(cell.theta)
        .with_bucket_cap(cell.bucket_cap)
        .with_singleton_policy(cell.singleton_policy);
    if let Some(every) = cell.checkpoint_kn {
        cfg = cfg.with_checkpoints(every);
    }
    let started = Instant::now();
    let record = algorithms::run(cell.algorithm, objective, &cfg, Some(cell.budget), cell.seed);
    let wall_ms = started.elapsed().as_millis();
    let row = ResultRow {
        algorithm: cell.algorithm.name().to_string(),
        dataset: cell.dataset.clone(),
        k: cell.k,
        theta: cell.theta.value(),
        bucket_cap: cell.bucket_cap,
        budget: cell.budget,
        seed: cell.seed,
        run: cell.run_index,
        exact_value: record.final_exact,
        evals_used: record.evals_used,
        wall_ms,
    };
    (row, record)
}

/// Runs all cells of a group in parallel, preserving cell order in the
/// output.
pub fn run_group(objective: &dyn Objective, cells: &[CellSpec]) -> Vec<(ResultRow, RunRecord)> {
    cells
        .par_iter()
        .map(|cell| run_cell(objective, cell))
        .collect()
}
