//! Dataset resolution: path lookup, kind inference and objective
//! construction.

use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use subsel::influence::{make_influence_objective, Graph};
use subsel::objectives::{
    make_coverage, wrap_multiplicative_noise, CoverageInstance, NoiseModel,
};
use subsel::regression::{make_regression_objective, RegressionData};
use subsel::Objective;

/// Environment variable naming a directory searched for relative dataset
/// paths that do not resolve as given.
pub const DATA_DIR_ENV: &str = "SUBSEL_DATA_DIR";

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DatasetKind {
    /// Edge list → influence maximization (Independent Cascade).
    Graph,
    /// Sparse rows `label idx:val ...` → sparse regression.
    Tabular,
    /// Max-coverage instance → synthetic noise harness.
    Coverage,
}

impl DatasetKind {
    fn infer(path: &Path) -> Option<DatasetKind> {
        let ext = path.extension()?.to_str()?.to_ascii_lowercase();
        match ext.as_str() {
            "edges" | "el" | "edgelist" | "txt" => Some(DatasetKind::Graph),
            "libsvm" | "svm" | "svmlight" | "tab" => Some(DatasetKind::Tabular),
            "cov" | "coverage" => Some(DatasetKind::Coverage),
            _ => None,
        }
    }

    /// θ default used by the corresponding experiments when none is given.
    pub fn default_theta(self) -> f64 {
        match self {
            DatasetKind::Graph | DatasetKind::Coverage => 0.15,
            DatasetKind::Tabular => 0.05,
        }
    }

    /// Default cardinality bound for noise sweeps.
    pub fn default_sweep_k(self) -> usize {
        match self {
            DatasetKind::Graph => 7,
            DatasetKind::Tabular => 16,
            DatasetKind::Coverage => 8,
        }
    }
}

/// Per-evaluation noise configuration; sweeps vary exactly one field.
#[derive(Clone, Copy, Debug)]
pub struct NoiseSettings {
    /// IC simulations per noisy call (graph).
    pub sims_noisy: usize,
    /// IC simulations for the exact reporting channel (graph).
    pub sims_exact: usize,
    /// Row sample per noisy call (tabular).
    pub sample_size: usize,
    /// Multiplicative noise half-width (coverage).
    pub epsilon: f64,
}

/// A loaded dataset, reusable across noise levels of a sweep.
pub struct Dataset {
    pub label: String,
    pub kind: DatasetKind,
    payload: Payload,
}

enum Payload {
    Graph(Graph),
    Tabular(RegressionData),
    Coverage(CoverageInstance),
}

impl Dataset {
    /// Loads `path` (also trying `$SUBSEL_DATA_DIR/path`), inferring the
    /// kind from the extension unless `kind` is given.
    pub fn load(path: &Path, kind: Option<DatasetKind>, undirected: bool) -> Result<Dataset> {
        let resolved = resolve_path(path)?;
        let kind = kind
            .or_else(|| DatasetKind::infer(&resolved))
            .with_context(|| {
                format!(
                    "cannot infer dataset kind from {:?}; pass --kind",
                    resolved
                )
            })?;
        let label = resolved
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| resolved.display().to_string());
        let reader = || -> Result<BufReader<File>> {
            Ok(BufReader::new(File::open(&resolved).with_context(|| {
                format!("cannot open dataset {:?}", resolved)
            })?))
        };
        let payload = match kind {
            DatasetKind::Graph => Payload::Graph(Graph::load_edge_list(reader()?, undirected)?),
            DatasetKind::Tabular => {
                let raw = RegressionData::load_tabular(reader()?, None)?;
                let normalized = raw.normalize()?;
                for dropped in normalized.dropped_columns() {
                    eprintln!("warning: dropping constant feature column {}", dropped + 1);
                }
                Payload::Tabular(normalized)
            }
            DatasetKind::Coverage => {
                Payload::Coverage(CoverageInstance::from_reader(reader()?)?)
            }
        };
        Ok(Dataset {
            label,
            kind,
            payload,
        })
    }

    /// Ground-set size `n`.
    pub fn ground_size(&self) -> usize {
        match &self.payload {
            Payload::Graph(g) => g.node_count(),
            Payload::Tabular(d) => d.n_features(),
            Payload::Coverage(c) => c.item_count(),
        }
    }

    /// Builds the objective for one noise setting.
    pub fn objective(&self, noise: &NoiseSettings) -> Result<Box<dyn Objective>> {
        Ok(match &self.payload {
            Payload::Graph(g) => Box::new(make_influence_objective(
                g.clone(),
                noise.sims_noisy,
                noise.sims_exact,
            )?),
            Payload::Tabular(d) => {
                if noise.sample_size > d.n_rows() {
                    bail!(
                        "--sample-size {} exceeds the {} data rows",
                        noise.sample_size,
                        d.n_rows()
                    );
                }
                Box::new(make_regression_objective(d.clone(), noise.sample_size)?)
            }
            Payload::Coverage(c) => Box::new(wrap_multiplicative_noise(
                make_coverage(c.clone()),
                NoiseModel::uniform(noise.epsilon)?,
            )),
        })
    }

    /// Suffix identifying a sweep level in the dataset column.
    pub fn level_label(&self, level: f64) -> String {
        match self.kind {
            DatasetKind::Graph => format!("{}@sims={}", self.label, level as usize),
            DatasetKind::Tabular => format!("{}@sample={}", self.label, level as usize),
            DatasetKind::Coverage => format!("{}@eps={}", self.label, level),
        }
    }

    /// Applies a sweep level to the noise settings.
    pub fn apply_level(&self, base: &NoiseSettings, level: f64) -> Result<NoiseSettings> {
        let mut out = *base;
        match self.kind {
            DatasetKind::Graph => {
                if level < 1.0 || level.fract() != 0.0 {
                    bail!("simulation counts must be positive integers, got {level}");
                }
                out.sims_noisy = level as usize;
                out.sims_exact = out.sims_exact.max(out.sims_noisy);
            }
            DatasetKind::Tabular => {
                if level < 1.0 || level.fract() != 0.0 {
                    bail!("sample sizes must be positive integers, got {level}");
                }
                out.sample_size = level as usize;
            }
            DatasetKind::Coverage => {
                if !(0.0..1.0).contains(&level) {
                    bail!("epsilon levels must lie in [0, 1), got {level}");
                }
                out.epsilon = level;
            }
        }
        Ok(out)
    }

    /// Default sweep levels per kind: simulation counts, sample sizes, or
    /// noise half-widths.
    pub fn default_levels(&self) -> Vec<f64> {
        match self.kind {
            DatasetKind::Graph => vec![5.0, 10.0, 15.0, 20.0],
            DatasetKind::Tabular => vec![400.0, 700.0, 1000.0, 1300.0],
            DatasetKind::Coverage => vec![0.0, 0.1, 0.3],
        }
    }
}

fn resolve_path(path: &Path) -> Result<PathBuf> {
    if path.exists() {
        return Ok(path.to_path_buf());
    }
    if path.is_relative() {
        if let Ok(dir) = std::env::var(DATA_DIR_ENV) {
            let candidate = Path::new(&dir).join(path);
            if candidate.exists() {
                return Ok(candidate);
            }
        }
    }
    bail!("dataset {:?} not found (also tried ${})", path, DATA_DIR_ENV);
}
