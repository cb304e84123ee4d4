//! Critical-value calibration runs and the table set consumed by the
//! replication study.

use std::collections::BTreeMap;
use std::path::Path;

use crate::empirical::{CriticalValueTable, SupStatistic};
use crate::error::{Error, Result};
use crate::simlab::config::{EstimatorKind, ExperimentConfig};
use crate::simlab::run_in_pool;

/// Simulate a sup statistic, extract the requested upper percentiles, and
/// persist the table as JSON. Identical inputs produce identical bytes.
pub fn run_calibration(
    statistic: SupStatistic,
    n: usize,
    c0: f64,
    reps: usize,
    alphas: &[f64],
    seed: u64,
    workers: usize,
    out: &Path,
) -> Result<CriticalValueTable> {
    let table = run_in_pool(workers, || {
        CriticalValueTable::build(statistic, n, c0, reps, seed, alphas)
    })?;
    table.save(out)?;
    Ok(table)
}

/// The critical-value tables a replication study draws from.
#[derive(Debug, Clone, Default)]
pub struct CalibrationSet {
    tables: BTreeMap<SupStatistic, CriticalValueTable>,
}

impl CalibrationSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, table: CriticalValueTable) {
        self.tables.insert(table.statistic, table);
    }

    pub fn get(&self, statistic: SupStatistic) -> Option<&CriticalValueTable> {
        self.tables.get(&statistic)
    }

    /// Load the tables the config references and check them against the
    /// config: every statistic required by the requested estimators must be
    /// present, calibrated at exactly the config's n, and tabulate every
    /// requested level.
    pub fn load_for(config: &ExperimentConfig) -> Result<Self> {
        let mut set = Self::new();
        for (stat, path) in &config.table_paths {
            let table = CriticalValueTable::load(path)?;
            if table.statistic != *stat {
                return Err(Error::TableMismatch(format!(
                    "{} holds a {} table but was given as table_{}",
                    path.display(),
                    table.statistic.name(),
                    stat.name()
                )));
            }
            set.insert(table);
        }
        set.validate_for(config)?;
        Ok(set)
    }

    /// Check table availability/consistency without touching the filesystem.
    pub fn validate_for(&self, config: &ExperimentConfig) -> Result<()> {
        for stat in required_statistics(config) {
            let table = self.get(stat).ok_or_else(|| {
                Error::MissingTable(format!(
                    "{} at n={} (set table_{} in the config or run `calibrate`)",
                    stat.name(),
                    config.n,
                    stat.name()
                ))
            })?;
            table.require_n(config.n as u64)?;
            for &alpha in &config.alphas {
                table.lookup(alpha)?;
            }
        }
        Ok(())
    }
}

/// Which statistics the configured estimator set needs tables for.
pub(crate) fn required_statistics(config: &ExperimentConfig) -> Vec<SupStatistic> {
    let mut stats = Vec::new();
    let cjl_needs_table =
        config.estimators.contains(&EstimatorKind::Cjl) && config.a_n_override.is_none();
    if cjl_needs_table {
        stats.push(config.cjl_stat);
    }
    if config
        .estimators
        .iter()
        .any(|e| matches!(e, EstimatorKind::Mr | EstimatorKind::MrPlus))
    {
        stats.push(SupStatistic::WStar);
    }
    stats.sort();
    stats.dedup();
    stats
}
