//! Detection-boundary sweeps: a grid of `(beta, r)` calibrations, each run
//! for a number of cycles, reporting the median relative estimate next to
//! the detectability and competitor-consistency flags.

use std::fs;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::empirical::{CriticalValueTable, SupStatistic};
use crate::error::{Error, Result};
use crate::estimator::cjl_estimate;
use crate::mixture::{sample_with_rng, SamplingMode, SparseCalibration};
use crate::simlab::{derive_seed, fmt_g12, run_in_pool};

#[derive(Debug, Clone)]
pub struct BoundaryConfig {
    /// `(lo, hi, steps)` for beta; `steps >= 2` points inclusive of both ends.
    pub beta: (f64, f64, usize),
    pub r: (f64, f64, usize),
    pub n: usize,
    pub reps: usize,
    pub alpha: f64,
    pub seed: u64,
    pub calibration_reps: usize,
    pub mode: SamplingMode,
    pub cjl_stat: SupStatistic,
    pub c0: f64,
    pub workers: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct BoundaryCell {
    pub beta: f64,
    pub r: f64,
    pub detectable: bool,
    pub mr_consistent: bool,
    pub median_ratio: f64,
}

const CALIBRATION_TAG: u64 = 0xCA11B;

fn axis(range: (f64, f64, usize), name: &str) -> Result<Vec<f64>> {
    let (lo, hi, steps) = range;
    if steps < 2 {
        return Err(Error::Config(format!("{name} grid needs at least 2 steps")));
    }
    if !(lo < hi) {
        return Err(Error::Config(format!("{name} range must satisfy lo < hi")));
    }
    Ok((0..steps)
        .map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64)
        .collect())
}

/// Sweep the `(beta, r)` grid. One calibration run (seed derived from the
/// master) serves every cell; cell `(i, j)` gets its own derived seed and
/// its cycles use streams `0..reps` under it.
pub fn run_boundary_map(config: &BoundaryConfig) -> Result<Vec<BoundaryCell>> {
    let betas = axis(config.beta, "beta")?;
    let rs = axis(config.r, "r")?;
    for &b in &betas {
        SparseCalibration::new(config.n as u64, b, rs[0])?;
    }
    for &r in &rs {
        SparseCalibration::new(config.n as u64, betas[0], r)?;
    }
    if config.reps == 0 {
        return Err(Error::Config("reps must be at least 1".into()));
    }

    let a_n = run_in_pool(config.workers, || {
        CriticalValueTable::build(
            config.cjl_stat,
            config.n,
            config.c0,
            config.calibration_reps,
            derive_seed(config.seed, CALIBRATION_TAG),
            &[config.alpha],
        )
    })?
    .lookup(config.alpha)?;

    let mut cells: Vec<(usize, f64, f64)> = Vec::with_capacity(betas.len() * rs.len());
    for &beta in &betas {
        for &r in &rs {
            cells.push((cells.len(), beta, r));
        }
    }

    run_in_pool(config.workers, || {
        cells
            .par_iter()
            .map(|&(cell_index, beta, r)| {
                let cal = SparseCalibration::new(config.n as u64, beta, r)?;
                let mixture = cal.mixture();
                let cell_seed = derive_seed(config.seed, 1 + cell_index as u64);
                let mut ratios: Vec<f64> = (0..config.reps)
                    .map(|cycle| {
                        let mut rng = ChaCha8Rng::seed_from_u64(cell_seed);
                        rng.set_stream(cycle as u64);
                        let sample =
                            sample_with_rng(&mixture, config.n, config.mode, &mut rng);
                        cjl_estimate(&sample, a_n).eps_hat / mixture.epsilon()
                    })
                    .collect();
                ratios.sort_unstable_by(f64::total_cmp);
                let median = if ratios.len() % 2 == 1 {
                    ratios[ratios.len() / 2]
                } else {
                    0.5 * (ratios[ratios.len() / 2 - 1] + ratios[ratios.len() / 2])
                };
                Ok(BoundaryCell {
                    beta,
                    r,
                    detectable: cal.is_detectable(),
                    mr_consistent: cal.mr_consistent(),
                    median_ratio: median,
                })
            })
            .collect()
    })
}

/// CSV emission; the header documents the columns and run parameters.
pub fn write_boundary_csv(
    cells: &[BoundaryCell],
    config: &BoundaryConfig,
    path: &Path,
) -> Result<()> {
    let mut out = format!(
        "# sparsemix boundary map; n={}; reps={}; alpha={}; seed={}; cjl_stat={}; columns: beta,r,detectable,mr_consistent,median_ratio\n",
        config.n,
        config.reps,
        config.alpha,
        config.seed,
        config.cjl_stat.name()
    );
    for c in cells {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt_g12(c.beta),
            fmt_g12(c.r),
            c.detectable,
            c.mr_consistent,
            fmt_g12(c.median_ratio)
        ));
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}
