//! Experiment configuration, dispatch and result files.
//!
//! Every experiment is deterministic for a given master seed: workers draw
//! from streams derived from `(seed, path)` and results are reduced in index
//! order, so serial and parallel runs write identical CSVs.

mod config;
mod experiments;

use std::fs;
use std::path::Path;
use std::time::Instant;

use serde::Serialize;

use crate::error::Result;

pub use config::{Experiment, ExperimentConfig, DEFAULT_SEED, SEED_ENV};

/// One CSV table produced by an experiment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Table {
    /// File stem suffix; the primary table has none.
    pub suffix: Option<&'static str>,
    pub csv: Vec<u8>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ResultRecord {
    pub experiment: Experiment,
    /// Fully resolved configuration, sufficient to re-run.
    pub config: ExperimentConfig,
    pub seed: u64,
    pub duration_secs: f64,
    /// Aggregate statistics.
    pub summary: serde_json::Value,
    /// Per-trial metrics the aggregates are computed from.
    pub trials: serde_json::Value,
    #[serde(skip)]
    pub tables: Vec<Table>,
}

impl ResultRecord {
    /// Writes `<name>.json` and one `<name>[_suffix].csv` per table into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        let name = self.experiment.name();
        for t in &self.tables {
            let file = match t.suffix {
                Some(s) => format!("{name}_{s}.csv"),
                None => format!("{name}.csv"),
            };
            fs::write(dir.join(file), &t.csv)?;
        }
        fs::write(dir.join(format!("{name}.json")), serde_json::to_string_pretty(self)?)?;
        Ok(())
    }
}

/// Runs the configured experiment and, when an output path is set, writes
/// its files there.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ResultRecord> {
    let cfg = cfg.resolved()?;
    let start = Instant::now();
    let out = experiments::run(&cfg)?;
    let record = ResultRecord {
        experiment: cfg.experiment,
        seed: cfg.seed(),
        config: cfg.clone(),
        duration_secs: start.elapsed().as_secs_f64(),
        summary: out.summary,
        trials: out.trials,
        tables: out.tables,
    };
    if let Some(dir) = &cfg.out {
        record.write(dir)?;
    }
    Ok(record)
}

pub(crate) fn csv_table<S: Serialize>(suffix: Option<&'static str>, rows: impl IntoIterator<Item = S>) -> Result<Table> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let csv = w.into_inner().map_err(|e| crate::error::Error::Io(e.into_error()))?;
    Ok(Table { suffix, csv })
}
