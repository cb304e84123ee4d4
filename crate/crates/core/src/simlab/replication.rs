//! Paired replication studies: every cycle draws one sample and evaluates
//! every configured `(estimator, alpha)` column on it, then the per-column
//! ratio distributions are summarized the way the reference comparison
//! table reports them.

use std::fs;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::empirical::SortedSample;
use crate::error::{Error, Result};
use crate::estimator::{
    cjl_estimate_given_ecdf, mr_lower_bound, mr_plus_lower_bound, survival_transform, Grid,
};
use crate::mixture::sample_with_rng;
use crate::simlab::calibration::CalibrationSet;
use crate::simlab::config::{EstimatorKind, ExperimentConfig};
use crate::simlab::{fmt_g12, lil_norm, run_in_pool};

/// Histogram of `estimate / epsilon` ratios: 50 equal bins over
/// `[0, max(3, observed max)]` plus an overflow bin, with a log-count
/// companion for heavy tails.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    pub upper: f64,
    pub bin_width: f64,
    pub counts: Vec<u64>,
    pub overflow: u64,
    pub log1p_counts: Vec<f64>,
}

pub const HISTOGRAM_BINS: usize = 50;

impl Histogram {
    fn build(ratios: &[f64]) -> Self {
        let observed_max = ratios.iter().cloned().fold(0.0f64, f64::max);
        let upper = observed_max.max(3.0);
        let bin_width = upper / HISTOGRAM_BINS as f64;
        let mut counts = vec![0u64; HISTOGRAM_BINS];
        let mut overflow = 0u64;
        for &x in ratios {
            let idx = (x / bin_width).floor() as usize;
            if idx < HISTOGRAM_BINS {
                counts[idx] += 1;
            } else if x <= upper {
                counts[HISTOGRAM_BINS - 1] += 1; // x == upper lands in the last bin
            } else {
                overflow += 1;
            }
        }
        let log1p_counts = counts.iter().map(|&c| (c as f64).ln_1p()).collect();
        Self {
            upper,
            bin_width,
            counts,
            overflow,
            log1p_counts,
        }
    }
}

/// Distribution summary of `estimate / epsilon` over the cycles.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioStats {
    pub max: f64,
    pub mean: f64,
    pub median: f64,
    pub std_dev: f64,
    /// `E[(ratio - 1)^2]`.
    pub relative_mse: f64,
    /// `E[(1 - ratio)_+]`.
    pub plus_risk: f64,
    pub histogram: Histogram,
}

impl RatioStats {
    fn build(ratios: &[f64]) -> Self {
        let n = ratios.len() as f64;
        let mean = ratios.iter().sum::<f64>() / n;
        let max = ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut sorted = ratios.to_vec();
        sorted.sort_unstable_by(f64::total_cmp);
        let median = if sorted.len() % 2 == 1 {
            sorted[sorted.len() / 2]
        } else {
            0.5 * (sorted[sorted.len() / 2 - 1] + sorted[sorted.len() / 2])
        };
        let var = if ratios.len() > 1 {
            ratios.iter().map(|&x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        let relative_mse = ratios.iter().map(|&x| (x - 1.0) * (x - 1.0)).sum::<f64>() / n;
        let plus_risk = ratios.iter().map(|&x| (1.0 - x).max(0.0)).sum::<f64>() / n;
        Self {
            max,
            mean,
            median,
            std_dev: var.sqrt(),
            relative_mse,
            plus_risk,
            histogram: Histogram::build(ratios),
        }
    }
}

/// Aggregates for one `(estimator, alpha)` column.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportEntry {
    pub estimator: EstimatorKind,
    pub alpha: f64,
    /// The critical value (or override) actually used.
    pub a: f64,
    /// `a / sqrt(2 ln ln n)`, the tabulated normalization.
    pub a_normalized: Option<f64>,
    /// Empirical `P(estimate > epsilon)`.
    pub overestimation_frequency: f64,
    /// `None` for pure-null truths (`epsilon = 0`), where only the
    /// overestimation frequency is meaningful.
    pub ratio_stats: Option<RatioStats>,
}

/// The full study output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplicationReport {
    pub config_hash: String,
    pub n: usize,
    pub reps: usize,
    pub seed: u64,
    pub epsilon_true: f64,
    pub entries: Vec<ReportEntry>,
}

/// Estimates from one cycle, in column order.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleRecord {
    pub cycle: usize,
    pub estimates: Vec<f64>,
}

#[derive(Debug, Clone, Copy)]
struct Column {
    estimator: EstimatorKind,
    alpha: f64,
    a: f64,
}

fn resolve_columns(config: &ExperimentConfig, tables: &CalibrationSet) -> Result<Vec<Column>> {
    tables.validate_for(config)?;
    let mut columns = Vec::new();
    for &estimator in &config.estimators {
        for &alpha in &config.alphas {
            let a = match estimator {
                EstimatorKind::Cjl => match config.a_n_override {
                    Some(a) => a,
                    None => tables
                        .get(config.cjl_stat)
                        .expect("validated")
                        .lookup(alpha)?,
                },
                EstimatorKind::Mr | EstimatorKind::MrPlus => tables
                    .get(crate::empirical::SupStatistic::WStar)
                    .expect("validated")
                    .lookup(alpha)?,
            };
            columns.push(Column {
                estimator,
                alpha,
                a,
            });
        }
    }
    Ok(columns)
}

fn evaluate_cycle(
    config: &ExperimentConfig,
    columns: &[Column],
    grid: &Grid,
    cycle: usize,
) -> Result<CycleRecord> {
    let mixture = config.mixture()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(cycle as u64);
    let sample = sample_with_rng(&mixture, config.n, config.mode, &mut rng);

    let needs_cjl = columns.iter().any(|c| c.estimator == EstimatorKind::Cjl);
    let needs_mr = columns
        .iter()
        .any(|c| matches!(c.estimator, EstimatorKind::Mr | EstimatorKind::MrPlus));

    let ecdf_values: Vec<f64> = if needs_cjl {
        grid.points().iter().map(|&t| sample.ecdf_at(t)).collect()
    } else {
        Vec::new()
    };
    let uniforms: Option<SortedSample> = needs_mr.then(|| survival_transform(&sample));

    let estimates = columns
        .iter()
        .map(|col| match col.estimator {
            EstimatorKind::Cjl => {
                cjl_estimate_given_ecdf(grid, &ecdf_values, config.n, col.a).eps_hat
            }
            EstimatorKind::Mr => mr_lower_bound(uniforms.as_ref().expect("computed"), col.a),
            EstimatorKind::MrPlus => {
                mr_plus_lower_bound(uniforms.as_ref().expect("computed"), col.a)
            }
        })
        .collect();
    Ok(CycleRecord {
        cycle,
        estimates,
    })
}

/// Run the study: `reps` cycles, each drawing one sample (stream = cycle
/// index of the master seed) and evaluating every column on it. Returns the
/// aggregate report and the per-cycle dump, both independent of worker
/// count.
pub fn run_replication_study(
    config: &ExperimentConfig,
    tables: &CalibrationSet,
) -> Result<(ReplicationReport, Vec<CycleRecord>)> {
    if config.n < 2 {
        return Err(Error::Config("replication needs n >= 2".into()));
    }
    let columns = resolve_columns(config, tables)?;
    let grid = Grid::new(config.n as u64)?;
    let mut cycles: Vec<CycleRecord> = run_in_pool(config.workers, || {
        (0..config.reps)
            .into_par_iter()
            .map(|cycle| evaluate_cycle(config, &columns, &grid, cycle))
            .collect::<Result<Vec<_>>>()
    })?;
    cycles.sort_by_key(|c| c.cycle);

    let epsilon_true = config.true_epsilon()?;
    let norm = lil_norm(config.n);
    let entries = columns
        .iter()
        .enumerate()
        .map(|(idx, col)| {
            let estimates: Vec<f64> = cycles.iter().map(|c| c.estimates[idx]).collect();
            let over = estimates.iter().filter(|&&e| e > epsilon_true).count() as f64
                / estimates.len() as f64;
            let ratio_stats = (epsilon_true > 0.0).then(|| {
                let ratios: Vec<f64> =
                    estimates.iter().map(|&e| e / epsilon_true).collect();
                RatioStats::build(&ratios)
            });
            ReportEntry {
                estimator: col.estimator,
                alpha: col.alpha,
                a: col.a,
                a_normalized: norm.map(|s| col.a / s),
                overestimation_frequency: over,
                ratio_stats,
            }
        })
        .collect();

    let report = ReplicationReport {
        config_hash: config.hash(),
        n: config.n,
        reps: config.reps,
        seed: config.seed,
        epsilon_true,
        entries,
    };
    Ok((report, cycles))
}

/// Write `report.json`, `summary.csv`, `cycles.csv`, and `histograms.csv`
/// into `dir`. Returns the paths written.
pub fn write_replication_outputs(
    report: &ReplicationReport,
    cycles: &[CycleRecord],
    dir: &Path,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();

    let json_path = dir.join("report.json");
    let mut json = serde_json::to_string_pretty(report).expect("report serializes");
    json.push('\n');
    fs::write(&json_path, json).map_err(|e| Error::io(&json_path, e))?;
    written.push(json_path);

    let summary_path = dir.join("summary.csv");
    let mut out = format!(
        "# sparsemix replication summary; config_hash={}; columns: estimator,alpha,a,a_normalized,overestimation_frequency,max_ratio,mean_ratio,median_ratio,std_dev_ratio,relative_mse,plus_risk\n",
        report.config_hash
    );
    for e in &report.entries {
        let norm = e
            .a_normalized
            .map(fmt_g12)
            .unwrap_or_else(|| "nan".into());
        let tail = match &e.ratio_stats {
            Some(s) => format!(
                "{},{},{},{},{},{}",
                fmt_g12(s.max),
                fmt_g12(s.mean),
                fmt_g12(s.median),
                fmt_g12(s.std_dev),
                fmt_g12(s.relative_mse),
                fmt_g12(s.plus_risk)
            ),
            None => "nan,nan,nan,nan,nan,nan".into(),
        };
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            e.estimator,
            fmt_g12(e.alpha),
            fmt_g12(e.a),
            norm,
            fmt_g12(e.overestimation_frequency),
            tail
        ));
    }
    fs::write(&summary_path, out).map_err(|e| Error::io(&summary_path, e))?;
    written.push(summary_path);

    let cycles_path = dir.join("cycles.csv");
    let labels: Vec<String> = report
        .entries
        .iter()
        .map(|e| format!("{}@{}", e.estimator, e.alpha))
        .collect();
    let mut out = format!(
        "# sparsemix per-cycle estimates; config_hash={}; columns: cycle,{}\n",
        report.config_hash,
        labels.join(",")
    );
    for c in cycles {
        out.push_str(&c.cycle.to_string());
        for v in &c.estimates {
            out.push(',');
            out.push_str(&fmt_g12(*v));
        }
        out.push('\n');
    }
    fs::write(&cycles_path, out).map_err(|e| Error::io(&cycles_path, e))?;
    written.push(cycles_path);

    let hist_path = dir.join("histograms.csv");
    let mut out = format!(
        "# sparsemix ratio histograms; config_hash={}; columns: estimator,alpha,bin_lo,bin_hi,count,log1p_count\n",
        report.config_hash
    );
    for e in &report.entries {
        if let Some(stats) = &e.ratio_stats {
            let h = &stats.histogram;
            for (i, &c) in h.counts.iter().enumerate() {
                out.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    e.estimator,
                    fmt_g12(e.alpha),
                    fmt_g12(i as f64 * h.bin_width),
                    fmt_g12((i + 1) as f64 * h.bin_width),
                    c,
                    fmt_g12(h.log1p_counts[i])
                ));
            }
            out.push_str(&format!(
                "{},{},{},inf,{},{}\n",
                e.estimator,
                fmt_g12(e.alpha),
                fmt_g12(h.upper),
                h.overflow,
                fmt_g12((h.overflow as f64).ln_1p())
            ));
        }
    }
    fs::write(&hist_path, out).map_err(|e| Error::io(&hist_path, e))?;
    written.push(hist_path);

    Ok(written)
}
