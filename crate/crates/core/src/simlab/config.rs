//! Flat key=value experiment configuration. Every key mirrors a CLI flag;
//! CLI flags override file values. The canonical serialization of a config
//! is hashed into every output file header.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::empirical::{SupStatistic, DEFAULT_C0};
use crate::error::{Error, Result};
use crate::mixture::{SamplingMode, SparseCalibration, TwoPointMixture};

/// Which lower bounds to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, serde::Serialize)]
pub enum EstimatorKind {
    #[serde(rename = "cjl")]
    Cjl,
    #[serde(rename = "mr")]
    Mr,
    #[serde(rename = "mr_plus")]
    MrPlus,
}

impl EstimatorKind {
    pub fn name(&self) -> &'static str {
        match self {
            EstimatorKind::Cjl => "cjl",
            EstimatorKind::Mr => "mr",
            EstimatorKind::MrPlus => "mr_plus",
        }
    }
}

impl std::str::FromStr for EstimatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cjl" => Ok(EstimatorKind::Cjl),
            "mr" => Ok(EstimatorKind::Mr),
            "mr_plus" => Ok(EstimatorKind::MrPlus),
            other => Err(Error::Config(format!(
                "unknown estimator {other:?} (expected cjl, mr, or mr_plus)"
            ))),
        }
    }
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The true mixture: sparse-calibrated or explicit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TruthSpec {
    Calibrated { beta: f64, r: f64 },
    Explicit { epsilon: f64, mu: f64 },
}

/// Everything a replication study needs, captured in one reproducible
/// artifact.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub n: usize,
    pub truth: TruthSpec,
    pub mode: SamplingMode,
    pub estimators: Vec<EstimatorKind>,
    pub alphas: Vec<f64>,
    pub reps: usize,
    pub calibration_reps: usize,
    pub seed: u64,
    /// Fixed envelope parameter for the grid estimator (the deterministic
    /// mean-squared-error schedule); bypasses the critical-value table.
    pub a_n_override: Option<f64>,
    /// Which statistic calibrates the grid estimator at level alpha.
    pub cjl_stat: SupStatistic,
    pub c0: f64,
    pub workers: usize,
    /// Paths to persisted critical-value tables, keyed by statistic.
    pub table_paths: BTreeMap<SupStatistic, PathBuf>,
}

#[derive(Debug, Default)]
struct Builder {
    n: Option<usize>,
    beta: Option<f64>,
    r: Option<f64>,
    epsilon: Option<f64>,
    mu: Option<f64>,
    mode: Option<SamplingMode>,
    estimators: Option<Vec<EstimatorKind>>,
    alphas: Option<Vec<f64>>,
    reps: Option<usize>,
    calibration_reps: Option<usize>,
    seed: Option<u64>,
    a_n: Option<f64>,
    cjl_stat: Option<SupStatistic>,
    c0: Option<f64>,
    workers: Option<usize>,
    table_paths: BTreeMap<SupStatistic, PathBuf>,
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("key {key}: cannot parse {value:?}")))
}

impl Builder {
    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "n" => self.n = Some(parse_num(key, value)?),
            "beta" => self.beta = Some(parse_num(key, value)?),
            "r" => self.r = Some(parse_num(key, value)?),
            "epsilon" => self.epsilon = Some(parse_num(key, value)?),
            "mu" => self.mu = Some(parse_num(key, value)?),
            "mode" => {
                self.mode = Some(match value {
                    "binomial" => SamplingMode::Binomial,
                    "fixed_count" => SamplingMode::FixedCount,
                    other => {
                        return Err(Error::Config(format!(
                            "mode {other:?} (expected binomial or fixed_count)"
                        )))
                    }
                })
            }
            "estimators" => {
                let kinds: Result<Vec<EstimatorKind>> =
                    value.split(',').map(|s| s.trim().parse()).collect();
                self.estimators = Some(kinds?);
            }
            "alphas" => {
                let alphas: Result<Vec<f64>> = value
                    .split(',')
                    .map(|s| parse_num("alphas", s.trim()))
                    .collect();
                self.alphas = Some(alphas?);
            }
            "reps" => self.reps = Some(parse_num(key, value)?),
            "calibration_reps" => self.calibration_reps = Some(parse_num(key, value)?),
            "seed" => self.seed = Some(parse_num(key, value)?),
            "a_n" => self.a_n = Some(parse_num(key, value)?),
            "cjl_stat" => {
                let stat: SupStatistic = value.parse()?;
                if stat == SupStatistic::WStar {
                    return Err(Error::Config(
                        "cjl_stat must be wn_plus or wn_plus_plus".into(),
                    ));
                }
                self.cjl_stat = Some(stat);
            }
            "c0" => self.c0 = Some(parse_num(key, value)?),
            "workers" => self.workers = Some(parse_num(key, value)?),
            "table_wn_plus" => {
                self.table_paths
                    .insert(SupStatistic::WPlus, PathBuf::from(value));
            }
            "table_wn_plus_plus" => {
                self.table_paths
                    .insert(SupStatistic::WPlusPlus, PathBuf::from(value));
            }
            "table_wn_star" => {
                self.table_paths
                    .insert(SupStatistic::WStar, PathBuf::from(value));
            }
            other => return Err(Error::Config(format!("unknown config key {other:?}"))),
        }
        Ok(())
    }

    fn finish(self) -> Result<ExperimentConfig> {
        let n = self.n.ok_or_else(|| Error::Config("missing key: n".into()))?;
        let reps = self.reps.ok_or_else(|| Error::Config("missing key: reps".into()))?;
        let seed = self.seed.ok_or_else(|| Error::Config("missing key: seed".into()))?;
        let alphas = self
            .alphas
            .ok_or_else(|| Error::Config("missing key: alphas".into()))?;
        if reps == 0 {
            return Err(Error::Config("reps must be at least 1".into()));
        }
        if alphas.is_empty() {
            return Err(Error::Config("alphas must be nonempty".into()));
        }
        for w in alphas.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::Config("alphas must be strictly increasing".into()));
            }
        }
        if alphas[0] <= 0.0 || *alphas.last().unwrap() >= 1.0 {
            return Err(Error::Config("alphas must lie in (0, 1)".into()));
        }
        let truth = match (self.beta, self.r, self.epsilon, self.mu) {
            (Some(beta), Some(r), None, None) => TruthSpec::Calibrated { beta, r },
            (None, None, Some(epsilon), mu) => {
                let mu = mu.unwrap_or(1.0);
                if epsilon > 0.0 {
                    TwoPointMixture::new(epsilon, mu)?;
                }
                TruthSpec::Explicit { epsilon, mu }
            }
            (None, None, None, _) => {
                return Err(Error::Config(
                    "truth unspecified: set beta and r, or epsilon (and mu)".into(),
                ))
            }
            _ => {
                return Err(Error::Config(
                    "set either (beta, r) or (epsilon, mu), not a mixture of both".into(),
                ))
            }
        };
        if let TruthSpec::Calibrated { beta, r } = truth {
            SparseCalibration::new(n as u64, beta, r)?;
        }
        Ok(ExperimentConfig {
            n,
            truth,
            mode: self.mode.unwrap_or(SamplingMode::Binomial),
            estimators: self.estimators.unwrap_or(vec![EstimatorKind::Cjl]),
            alphas,
            reps,
            calibration_reps: self.calibration_reps.unwrap_or(1000),
            seed,
            a_n_override: self.a_n,
            cjl_stat: self.cjl_stat.unwrap_or(SupStatistic::WPlusPlus),
            c0: self.c0.unwrap_or(DEFAULT_C0),
            workers: self.workers.unwrap_or(0),
            table_paths: self.table_paths,
        })
    }
}

impl ExperimentConfig {
    /// Parse a flat key=value file, then apply `(key, value)` overrides (the
    /// CLI passes its explicit flags here so they win over the file).
    pub fn load(path: &Path, overrides: &[(String, String)]) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, overrides)
    }

    pub fn parse(text: &str, overrides: &[(String, String)]) -> Result<Self> {
        let mut builder = Builder::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Config(format!(
                "line {}: expected key=value, got {line:?}",
                idx + 1
            )))?;
            builder.set(key.trim(), value.trim())?;
        }
        for (key, value) in overrides {
            builder.set(key, value)?;
        }
        builder.finish()
    }

    /// The true mixture to sample from. For `epsilon = 0` the mean is a
    /// placeholder (never drawn).
    pub fn mixture(&self) -> Result<TwoPointMixture> {
        match self.truth {
            TruthSpec::Calibrated { beta, r } => {
                Ok(SparseCalibration::new(self.n as u64, beta, r)?.mixture())
            }
            TruthSpec::Explicit { epsilon, mu } => {
                if epsilon == 0.0 {
                    TwoPointMixture::new(0.0, mu.max(1.0))
                } else {
                    TwoPointMixture::new(epsilon, mu)
                }
            }
        }
    }

    pub fn true_epsilon(&self) -> Result<f64> {
        Ok(match self.truth {
            TruthSpec::Calibrated { .. } => self.mixture()?.epsilon(),
            TruthSpec::Explicit { epsilon, .. } => epsilon,
        })
    }

    /// Canonical serialization: sorted key=value lines. This is what gets
    /// hashed into output headers, so it excludes volatile fields (worker
    /// count, table paths) that do not affect the numbers.
    pub fn canonical_string(&self) -> String {
        let mut pairs: Vec<(String, String)> = vec![
            ("n".into(), self.n.to_string()),
            (
                "mode".into(),
                match self.mode {
                    SamplingMode::Binomial => "binomial".into(),
                    SamplingMode::FixedCount => "fixed_count".into(),
                },
            ),
            (
                "estimators".into(),
                self.estimators
                    .iter()
                    .map(|e| e.name())
                    .collect::<Vec<_>>()
                    .join(","),
            ),
            (
                "alphas".into(),
                self.alphas
                    .iter()
                    .map(|a| format!("{a}"))
                    .collect::<Vec<_>>()
                    .join(","),
            ),
            ("reps".into(), self.reps.to_string()),
            ("calibration_reps".into(), self.calibration_reps.to_string()),
            ("seed".into(), self.seed.to_string()),
            ("cjl_stat".into(), self.cjl_stat.name().into()),
            ("c0".into(), format!("{}", self.c0)),
        ];
        match self.truth {
            TruthSpec::Calibrated { beta, r } => {
                pairs.push(("beta".into(), format!("{beta}")));
                pairs.push(("r".into(), format!("{r}")));
            }
            TruthSpec::Explicit { epsilon, mu } => {
                pairs.push(("epsilon".into(), format!("{epsilon}")));
                pairs.push(("mu".into(), format!("{mu}")));
            }
        }
        if let Some(a) = self.a_n_override {
            pairs.push(("a_n".into(), format!("{a}")));
        }
        pairs.sort();
        let mut out = String::new();
        for (k, v) in pairs {
            out.push_str(&k);
            out.push('=');
            out.push_str(&v);
            out.push('\n');
        }
        out
    }

    /// First 16 hex digits of the SHA-256 of the canonical serialization.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical_string().as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}
