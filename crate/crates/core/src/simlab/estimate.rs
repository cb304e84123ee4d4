//! Apply a lower bound to a user file of z-scores using a persisted
//! critical-value table.

use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::empirical::{CriticalValueTable, SortedSample, SupStatistic};
use crate::error::{Error, Result};
use crate::estimator::{
    cjl_estimate, mr_lower_bound, mr_plus_lower_bound, survival_transform, Grid,
};
use crate::simlab::config::EstimatorKind;

/// The winning grid pair of the grid estimator, for diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WinnerInfo {
    pub pair_index: usize,
    pub t_lower: f64,
    pub t_upper: f64,
    pub mu_hat: f64,
}

/// Result of estimating from a data file.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateFileReport {
    pub input: String,
    pub n: usize,
    pub estimator: EstimatorKind,
    pub alpha: f64,
    pub statistic: SupStatistic,
    pub table_n: u64,
    /// Critical value drawn from the table.
    pub a: f64,
    /// The lower confidence bound on the non-null fraction.
    pub eps_hat: f64,
    pub winner: Option<WinnerInfo>,
    pub warnings: Vec<String>,
}

fn parse_zscores(path: &Path) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut values = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let v: f64 = line.parse().map_err(|_| Error::ParseLine {
            line: idx + 1,
            content: line.to_string(),
        })?;
        if !v.is_finite() {
            return Err(Error::ParseLine {
                line: idx + 1,
                content: line.to_string(),
            });
        }
        values.push(v);
    }
    if values.is_empty() {
        return Err(Error::invalid(format!(
            "{}: no data (empty file)",
            path.display()
        )));
    }
    Ok(values)
}

fn check_statistic(estimator: EstimatorKind, statistic: SupStatistic) -> Result<()> {
    let ok = match estimator {
        EstimatorKind::Cjl => {
            matches!(statistic, SupStatistic::WPlus | SupStatistic::WPlusPlus)
        }
        EstimatorKind::Mr | EstimatorKind::MrPlus => statistic == SupStatistic::WStar,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::TableMismatch(format!(
            "estimator {} cannot use a {} table",
            estimator.name(),
            statistic.name()
        )))
    }
}

/// Read newline-delimited z-scores, pick the critical value at `alpha` from
/// the persisted table, and compute the lower bound.
///
/// The table must match the data length: exact matches are silent, a
/// mismatch within a factor of 2 proceeds with a warning (recorded in the
/// report and printed to stderr), and anything beyond that is refused.
pub fn estimate_from_file(
    input: &Path,
    alpha: f64,
    table_path: &Path,
    estimator: EstimatorKind,
) -> Result<EstimateFileReport> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid(format!("alpha={alpha} outside (0, 1)")));
    }
    let values = parse_zscores(input)?;
    let n = values.len();
    if n < 2 {
        return Err(Error::invalid("need at least 2 observations"));
    }
    let sample = SortedSample::from_unsorted(values)?;

    let table = CriticalValueTable::load(table_path)?;
    check_statistic(estimator, table.statistic)?;
    let mut warnings = Vec::new();
    if table.n != n as u64 {
        let ratio = table.n.max(n as u64) as f64 / table.n.min(n as u64) as f64;
        if ratio > 2.0 {
            return Err(Error::TableMismatch(format!(
                "table calibrated at n={} but the file has n={n} (beyond 2x; recalibrate)",
                table.n
            )));
        }
        let w = format!(
            "table calibrated at n={} used for n={n}; critical value is approximate",
            table.n
        );
        eprintln!("warning: {w}");
        warnings.push(w);
    }
    let a = table.lookup(alpha)?;

    let (eps_hat, winner) = match estimator {
        EstimatorKind::Cjl => {
            let result = cjl_estimate(&sample, a);
            let winner = result.winner.map(|j| {
                let grid = Grid::new(n as u64).expect("n >= 2");
                WinnerInfo {
                    pair_index: j,
                    t_lower: grid.points()[j],
                    t_upper: grid.points()[j + 1],
                    mu_hat: result.pairs[j].mu_hat.expect("winning pair solved"),
                }
            });
            (result.eps_hat, winner)
        }
        EstimatorKind::Mr => (mr_lower_bound(&survival_transform(&sample), a), None),
        EstimatorKind::MrPlus => (mr_plus_lower_bound(&survival_transform(&sample), a), None),
    };

    Ok(EstimateFileReport {
        input: input.display().to_string(),
        n,
        estimator,
        alpha,
        statistic: table.statistic,
        table_n: table.n,
        a,
        eps_hat,
        winner,
        warnings,
    })
}
