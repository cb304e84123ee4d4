//! Seeded, parallel experiment runner: critical-value calibration,
//! replication studies, detection-boundary sweeps, and estimation from user
//! data files. This is the library behind the CLI.
//!
//! Reproducibility scheme: every random stream is a ChaCha8 generator
//! addressed by `(seed, stream)`. Replication cycle `i` uses stream `i` of
//! the master seed; boundary cells derive a per-cell seed with a splitmix64
//! mix of the master seed and the cell index, then use stream `i` per cycle.
//! Aggregation always happens after collection, in cycle order, so outputs
//! are byte-identical for any worker count.

mod boundary;
mod calibration;
mod config;
mod estimate;
mod replication;

pub use boundary::{run_boundary_map, write_boundary_csv, BoundaryCell, BoundaryConfig};
pub use calibration::{run_calibration, CalibrationSet};
pub use config::{EstimatorKind, ExperimentConfig, TruthSpec};
pub use estimate::{estimate_from_file, EstimateFileReport, WinnerInfo};
pub use replication::{
    run_replication_study, write_replication_outputs, CycleRecord, Histogram, RatioStats,
    ReplicationReport, ReportEntry,
};

pub(crate) fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic sub-seed for a tagged purpose under a master seed.
pub(crate) fn derive_seed(master: u64, tag: u64) -> u64 {
    splitmix64(master ^ splitmix64(tag))
}

/// Run `f` on a dedicated pool of `workers` threads (0 = the global default).
pub(crate) fn run_in_pool<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> T {
    if workers == 0 {
        f()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .expect("thread pool construction")
            .install(f)
    }
}

/// Floats in CSV output carry 12 significant digits.
pub(crate) fn fmt_g12(x: f64) -> String {
    if x == 0.0 {
        "0".to_string()
    } else {
        format!("{x:.11e}")
    }
}

/// `sqrt(2 ln ln n)` normalization for tabulated critical values; `None`
/// when it is not defined (tiny n).
pub(crate) fn lil_norm(n: usize) -> Option<f64> {
    let ll = (n as f64).ln().ln();
    (ll > 0.0).then(|| (2.0 * ll).sqrt())
}
