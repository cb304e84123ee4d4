//! Estimation and one-sided lower confidence bounds for the fraction of
//! non-null components in a sparse Gaussian mixture.
//!
//! The model: n independent z-scores, each standard normal with probability
//! `1 - epsilon` and mean-shifted normal (positive shift) with probability
//! `epsilon`. This crate provides
//!
//! - high-accuracy standard normal kernels ([`normal`]),
//! - mixture models, the `(beta, r)` sparse calibration, the detection
//!   boundary, and seeded sampling ([`mixture`]),
//! - empirical-CDF machinery: the weighted confidence envelope, the
//!   sup-statistics `Y_n`, `W*_n`, `W+_n`, `W++_n`, and Monte Carlo
//!   critical-value tables ([`empirical`]),
//! - the grid estimator for the non-null fraction together with the
//!   Meinshausen-Rice competitors ([`estimator`]),
//! - closed-form rate functions used as diagnostics ([`theory`]),
//! - a seeded, parallel experiment runner behind the CLI ([`simlab`]).

pub mod empirical;
mod error;
pub mod estimator;
pub mod mixture;
pub mod normal;
pub mod simlab;
pub mod theory;

pub use empirical::{
    critical_value, simulate_sup_statistic, CriticalValueTable, EnvelopeBound, SortedSample,
    SupStatistic,
};
pub use error::{Error, Result};
pub use estimator::{EstimateResult, Grid, PairDiagnostic};
pub use mixture::{
    DiscreteOneSidedMixture, GaussianMixture, SamplingMode, SparseCalibration, TwoPointMixture,
};
pub use theory::{RateRegime, Regime};
