//! Results CSV, per-cell summary CSV, run JSON and metadata JSON.
//!
//! The raw CSV carries one row per run under the fixed header
//! `algorithm,dataset,k,theta,B,budget,seed,run,exact_value,evals_used,wall_ms`.
//! Every column except `wall_ms` is deterministic for a given
//! configuration and base seed. Aggregates go to a sibling
//! `<out>.summary.csv`, one row per grid cell.

use crate::runner::ResultRow;
use anyhow::{Context, Result};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use subsel::algorithms::RunRecord;
use subsel::analysis::summarize;

pub const CSV_HEADER: [&str; 11] = [
    "algorithm",
    "dataset",
    "k",
    "theta",
    "B",
    "budget",
    "seed",
    "run",
    "exact_value",
    "evals_used",
    "wall_ms",
];

pub const SUMMARY_HEADER: [&str; 10] = [
    "algorithm",
    "dataset",
    "k",
    "theta",
    "B",
    "budget",
    "runs",
    "exact_mean",
    "exact_std",
    "evals_mean",
];

pub fn csv_path(out: &Path) -> PathBuf {
    out.with_extension("csv")
}

pub fn summary_path(out: &Path) -> PathBuf {
    out.with_extension("summary.csv")
}

pub fn meta_path(out: &Path) -> PathBuf {
    out.with_extension("meta.json")
}

pub fn run_json_path(out: &Path) -> PathBuf {
    out.with_extension("run.json")
}

pub fn write_rows(path: &Path, rows: &[ResultRow]) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)
        .with_context(|| format!("cannot write {}", path.display()))?;
    writer.write_record(CSV_HEADER)?;
    for row in rows {
        writer.write_record([
            row.algorithm.clone(),
            row.dataset.clone(),
            row.k.to_string(),
            row.theta.to_string(),
            row.bucket_cap.to_string(),
            row.budget.to_string(),
            row.seed.to_string(),
            row.run.to_string(),
            row.exact_value.to_string(),
            row.evals_used.to_string(),
            row.wall_ms.to_string(),
        ])?;
    }
    writer.flush()?;
    Ok(())
}

/// One summary row per (algorithm, dataset, k, theta, B, budget) cell, in
/// first-appearance order.
pub fn write_summary(path: &Path, rows: &[ResultRow]) -> Result<usize> {
    type Key = (String, String, usize, u64, usize, u64);
    let mut order: Vec<Key> = Vec::new();
    let mut groups: BTreeMap<Key, Vec<&ResultRow>> = BTreeMap::new();
    for row in rows {
        let key = (
            row.algorithm.clone(),
            row.dataset.clone(),
            row.k,
            row.theta.to_bits(),
            row.bucket_cap,
            row.budget,
        );
        if !groups.contains_key(&key) {
            order.push(key.clone());
        }
        groups.entry(key).or_default().push(row);
    }
    let mut writer = csv::Writer::from_path(path)
        .with_context(|| format!("cannot write {}", path.display()))?;
    writer.write_record(SUMMARY_HEADER)?;
    for key in &order {
        let group = &groups[key];
        let exact = summarize(&group.iter().map(|r| r.exact_value).collect::<Vec<_>>());
        let evals_mean = group.iter().map(|r| r.evals_used as f64).sum::<f64>()
            / group.len() as f64;
        writer.write_record([
            key.0.clone(),
            key.1.clone(),
            key.2.to_string(),
            f64::from_bits(key.3).to_string(),
            key.4.to_string(),
            key.5.to_string(),
            exact.runs.to_string(),
            exact.mean.to_string(),
            exact.std_dev.to_string(),
            evals_mean.to_string(),
        ])?;
    }
    writer.flush()?;
    Ok(order.len())
}

/// Full RunRecord (final subset and the anytime checkpoint series) as
/// JSON.
pub fn run_record_json(record: &RunRecord) -> serde_json::Value {
    serde_json::json!({
        "algorithm": record.algorithm.name(),
        "seed": record.seed,
        "k": record.k,
        "final_members": record.final_set.members(),
        "final_exact": record.final_exact,
        "evals_used": record.evals_used,
        "iterations": record.iterations,
        "checkpoints": record
            .checkpoints
            .iter()
            .map(|cp| {
                serde_json::json!({
                    "kn": cp.kn,
                    "members": cp.set.members(),
                    "exact_value": cp.exact_value,
                })
            })
            .collect::<Vec<_>>(),
    })
}

pub fn write_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    std::fs::write(path, format!("{}\n", serde_json::to_string_pretty(value)?))
        .with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}
