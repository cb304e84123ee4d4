//! `sparsemix`: calibrate critical values, run replication studies and
//! boundary sweeps, and compute lower confidence bounds from z-score files.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use sparsemix::simlab::{
    estimate_from_file, run_boundary_map, run_calibration, run_replication_study,
    write_boundary_csv, write_replication_outputs, BoundaryConfig, CalibrationSet, EstimatorKind,
    ExperimentConfig,
};
use sparsemix::{SamplingMode, SupStatistic};

#[derive(Parser)]
#[command(name = "sparsemix", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a sup statistic and persist its upper percentiles as JSON.
    Calibrate {
        /// Sample size the statistic is calibrated for.
        #[arg(long)]
        n: usize,
        /// Statistic kind: wn_plus, wn_plus_plus, or wn_star.
        #[arg(long)]
        stat: String,
        /// Number of Monte Carlo replicates.
        #[arg(long)]
        reps: usize,
        /// Comma-separated levels, strictly increasing, e.g. 0.05,0.10,0.25.
        #[arg(long)]
        alphas: String,
        #[arg(long)]
        seed: u64,
        /// Output path for the JSON table.
        #[arg(long)]
        out: PathBuf,
        /// Window constant for wn_plus_plus.
        #[arg(long, default_value_t = 3.0)]
        c0: f64,
        /// Worker threads (0 = all cores).
        #[arg(long, default_value_t = 0)]
        workers: usize,
    },
    /// Run a replication study from a key=value config file.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Output directory for report.json, summary.csv, cycles.csv,
        /// histograms.csv.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Override config keys, e.g. --set reps=100 --set seed=7.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        sets: Vec<String>,
    },
    /// Sweep a (beta, r) grid and write per-cell medians with region flags.
    Boundary {
        /// Beta range as LO:HI:STEPS (inside (0.5, 1)).
        #[arg(long)]
        beta: String,
        /// r range as LO:HI:STEPS (inside (0, 1)).
        #[arg(long)]
        r: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        reps: usize,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1000)]
        calibration_reps: usize,
        /// Statistic calibrating the estimator: wn_plus or wn_plus_plus.
        #[arg(long, default_value = "wn_plus_plus")]
        cjl_stat: String,
        #[arg(long, default_value = "binomial")]
        mode: String,
        #[arg(long, default_value_t = 3.0)]
        c0: f64,
        #[arg(long, default_value_t = 0)]
        workers: usize,
    },
    /// Lower confidence bound from a file of newline-delimited z-scores.
    Estimate {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        alpha: f64,
        /// Persisted critical-value table (wn_plus/wn_plus_plus for cjl,
        /// wn_star for mr and mr_plus).
        #[arg(long)]
        table: PathBuf,
        #[arg(long, default_value = "cjl")]
        estimator: String,
        /// Also write the JSON report here.
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

fn parse_alphas(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .with_context(|| format!("bad alpha {s:?}"))
        })
        .collect()
}

fn parse_range(text: &str, name: &str) -> Result<(f64, f64, usize)> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        bail!("{name} must be LO:HI:STEPS, got {text:?}");
    }
    Ok((
        parts[0].parse().with_context(|| format!("{name} lo"))?,
        parts[1].parse().with_context(|| format!("{name} hi"))?,
        parts[2].parse().with_context(|| format!("{name} steps"))?,
    ))
}

fn parse_mode(text: &str) -> Result<SamplingMode> {
    match text {
        "binomial" => Ok(SamplingMode::Binomial),
        "fixed_count" => Ok(SamplingMode::FixedCount),
        other => bail!("mode {other:?} (expected binomial or fixed_count)"),
    }
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Calibrate {
            n,
            stat,
            reps,
            alphas,
            seed,
            out,
            c0,
            workers,
        } => {
            let stat: SupStatistic = stat.parse()?;
            let alphas = parse_alphas(&alphas)?;
            let table = run_calibration(stat, n, c0, reps, &alphas, seed, workers, &out)?;
            println!(
                "calibrated {} at n={n} with {reps} reps -> {}",
                stat.name(),
                out.display()
            );
            for q in &table.quantiles {
                println!("  alpha={:<6} a={:.6}", q.alpha, q.a);
            }
        }
        Command::Simulate { config, out, sets } => {
            let overrides: Vec<(String, String)> = sets
                .iter()
                .map(|s| {
                    s.split_once('=')
                        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                        .with_context(|| format!("--set expects KEY=VALUE, got {s:?}"))
                })
                .collect::<Result<_>>()?;
            let config = ExperimentConfig::load(&config, &overrides)?;
            let tables = CalibrationSet::load_for(&config)?;
            let (report, cycles) = run_replication_study(&config, &tables)?;
            let written = write_replication_outputs(&report, &cycles, &out)?;
            println!(
                "ran {} cycles at n={} (hash {})",
                report.reps, report.n, report.config_hash
            );
            for entry in &report.entries {
                match &entry.ratio_stats {
                    Some(s) => println!(
                        "  {}@{}: P(over)={:.4} mean={:.4} median={:.4} max={:.3}",
                        entry.estimator,
                        entry.alpha,
                        entry.overestimation_frequency,
                        s.mean,
                        s.median,
                        s.max
                    ),
                    None => println!(
                        "  {}@{}: P(over)={:.4} (null truth)",
                        entry.estimator, entry.alpha, entry.overestimation_frequency
                    ),
                }
            }
            for path in written {
                println!("wrote {}", path.display());
            }
        }
        Command::Boundary {
            beta,
            r,
            n,
            reps,
            alpha,
            seed,
            out,
            calibration_reps,
            cjl_stat,
            mode,
            c0,
            workers,
        } => {
            let config = BoundaryConfig {
                beta: parse_range(&beta, "--beta")?,
                r: parse_range(&r, "--r")?,
                n,
                reps,
                alpha,
                seed,
                calibration_reps,
                mode: parse_mode(&mode)?,
                cjl_stat: cjl_stat.parse()?,
                c0,
                workers,
            };
            let cells = run_boundary_map(&config)?;
            write_boundary_csv(&cells, &config, &out)?;
            println!("wrote {} cells to {}", cells.len(), out.display());
        }
        Command::Estimate {
            input,
            alpha,
            table,
            estimator,
            json,
        } => {
            let estimator: EstimatorKind = estimator.parse()?;
            let report = estimate_from_file(&input, alpha, &table, estimator)?;
            println!("input:      {} ({} z-scores)", report.input, report.n);
            println!(
                "estimator:  {} at level alpha={} (a={:.6} from {} @ n={})",
                report.estimator,
                report.alpha,
                report.a,
                report.statistic.name(),
                report.table_n
            );
            println!("lower bound on the non-null fraction: {:.6}", report.eps_hat);
            if let Some(w) = &report.winner {
                println!(
                    "winning pair: j={} (t={:.4}..{:.4}), mu_hat={:.4}",
                    w.pair_index, w.t_lower, w.t_upper, w.mu_hat
                );
            }
            let blob = serde_json::to_string_pretty(&report)?;
            if let Some(path) = json {
                std::fs::write(&path, format!("{blob}\n"))
                    .with_context(|| format!("writing {}", path.display()))?;
                println!("wrote {}", path.display());
            } else {
                println!("{blob}");
            }
        }
    }
    Ok(())
}
