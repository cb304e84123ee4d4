//! Mixture models, the sparse `(beta, r)` calibration, the detection
//! boundary, informative thresholds, and seeded sampling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, StandardNormal};

use crate::empirical::SortedSample;
use crate::error::{Error, Result};
use crate::normal;

/// Contamination model `(1 - epsilon) N(0,1) + epsilon N(mu, 1)` with `mu > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPointMixture {
    epsilon: f64,
    mu: f64,
}

impl TwoPointMixture {
    pub fn new(epsilon: f64, mu: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&epsilon) || !epsilon.is_finite() {
            return Err(Error::invalid(format!("mixing fraction {epsilon} outside [0, 1]")));
        }
        if !(mu > 0.0) || !mu.is_finite() {
            return Err(Error::invalid(format!("non-null mean {mu} must be positive")));
        }
        Ok(Self { epsilon, mu })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }
}

/// One-sided mixture with a finite discrete law on the non-null means:
/// `(1 - epsilon) N(0,1) + epsilon * sum_k w_k N(mu_k, 1)`, all `mu_k > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteOneSidedMixture {
    epsilon: f64,
    atoms: Vec<(f64, f64)>, // (mu_k, weight_k)
}

impl DiscreteOneSidedMixture {
    pub fn new(epsilon: f64, atoms: Vec<(f64, f64)>) -> Result<Self> {
        if !(0.0..=1.0).contains(&epsilon) || !epsilon.is_finite() {
            return Err(Error::invalid(format!("mixing fraction {epsilon} outside [0, 1]")));
        }
        if atoms.is_empty() {
            return Err(Error::invalid("mixture needs at least one atom"));
        }
        let mut total = 0.0;
        for &(mu, w) in &atoms {
            if !(mu > 0.0) || !mu.is_finite() {
                return Err(Error::invalid(format!("atom mean {mu} must be positive")));
            }
            if !(w > 0.0) || !w.is_finite() {
                return Err(Error::invalid(format!("atom weight {w} must be positive")));
            }
            total += w;
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(format!("atom weights sum to {total}, not 1")));
        }
        Ok(Self { epsilon, atoms })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }
}

/// Common surface for the mixture models: exact CDF, mixing fraction, and
/// the draw of a non-null mean used by sampling.
pub trait GaussianMixture {
    fn epsilon(&self) -> f64;
    fn cdf(&self, t: f64) -> f64;
    /// Non-null mean selected by a uniform variate `u` in (0, 1).
    fn signal_mean(&self, u: f64) -> f64;
}

impl GaussianMixture for TwoPointMixture {
    fn epsilon(&self) -> f64 {
        self.epsilon
    }

    fn cdf(&self, t: f64) -> f64 {
        (1.0 - self.epsilon) * normal::cdf(t) + self.epsilon * normal::cdf(t - self.mu)
    }

    fn signal_mean(&self, _u: f64) -> f64 {
        self.mu
    }
}

impl GaussianMixture for DiscreteOneSidedMixture {
    fn epsilon(&self) -> f64 {
        self.epsilon
    }

    fn cdf(&self, t: f64) -> f64 {
        let signal: f64 = self
            .atoms
            .iter()
            .map(|&(mu, w)| w * normal::cdf(t - mu))
            .sum();
        (1.0 - self.epsilon) * normal::cdf(t) + self.epsilon * signal
    }

    fn signal_mean(&self, u: f64) -> f64 {
        let mut acc = 0.0;
        for &(mu, w) in &self.atoms {
            acc += w;
            if u <= acc {
                return mu;
            }
        }
        self.atoms.last().expect("atoms nonempty").0
    }
}

/// Sparse calibration `epsilon = n^(-beta)`, `mu = sqrt(2 r ln n)` with
/// `1/2 < beta < 1` and `0 < r < 1`. Logs are natural throughout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SparseCalibration {
    n: u64,
    beta: f64,
    r: f64,
}

impl SparseCalibration {
    /// Requires `n >= 2` (the calibrated mean `sqrt(2 r ln n)` must be positive).
    pub fn new(n: u64, beta: f64, r: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid(format!("n={n} too small for the calibration")));
        }
        if !(beta > 0.5 && beta < 1.0) {
            return Err(Error::invalid(format!("beta={beta} outside (1/2, 1)")));
        }
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::invalid(format!("r={r} outside (0, 1)")));
        }
        Ok(Self { n, beta, r })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// The calibrated two-point mixture.
    pub fn mixture(&self) -> TwoPointMixture {
        let n = self.n as f64;
        TwoPointMixture {
            epsilon: n.powf(-self.beta),
            mu: (2.0 * self.r * n.ln()).sqrt(),
        }
    }

    /// Whether `(beta, r)` lies strictly above the detection boundary.
    pub fn is_detectable(&self) -> bool {
        self.r > detection_boundary(self.beta)
    }

    /// Whether the Meinshausen-Rice bound is consistent here: `r > 2 beta - 1`.
    pub fn mr_consistent(&self) -> bool {
        self.r > 2.0 * self.beta - 1.0
    }
}

/// Alias for [`SparseCalibration::mixture`], the `(n, beta, r)` calibration map.
pub fn calibrate(cal: &SparseCalibration) -> TwoPointMixture {
    cal.mixture()
}

/// Detection boundary `rho*(beta)`: below it no test separates
/// `epsilon = 0` from `epsilon = n^(-beta)`.
///
/// Panics unless `1/2 < beta < 1`.
pub fn detection_boundary(beta: f64) -> f64 {
    assert!(beta > 0.5 && beta < 1.0, "detection_boundary: beta={beta} outside (1/2, 1)");
    if beta <= 0.75 {
        beta - 0.5
    } else {
        let s = 1.0 - (1.0 - beta).sqrt();
        s * s
    }
}

/// Most informative threshold for the grid estimator, `sqrt(2 q ln n)` with
/// `q = 4r`, `(beta+r)^2/(4r)`, or `r` by regime (ties at `beta = 3r` go to
/// the first branch). Panics on an undetectable calibration.
pub fn informative_threshold_cjl(cal: &SparseCalibration) -> f64 {
    assert!(cal.is_detectable(), "informative threshold undefined below the detection boundary");
    let (beta, r) = (cal.beta, cal.r);
    let q = if beta >= 3.0 * r {
        4.0 * r
    } else if beta > r {
        (beta + r) * (beta + r) / (4.0 * r)
    } else {
        r
    };
    (2.0 * q * (cal.n as f64).ln()).sqrt()
}

/// Most informative threshold for the Meinshausen-Rice bound,
/// `(2 - sqrt(2 - (2 beta - 1)/r)) * mu_n`; `None` where that bound is not
/// consistent (`r <= 2 beta - 1`) and the threshold is not of interest.
pub fn informative_threshold_mr(cal: &SparseCalibration) -> Option<f64> {
    if !cal.mr_consistent() {
        return None;
    }
    let multiplier = 2.0 - (2.0 - (2.0 * cal.beta - 1.0) / cal.r).sqrt();
    Some(multiplier * cal.mixture().mu)
}

/// How the number of non-null draws is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SamplingMode {
    /// Count drawn from Binomial(n, epsilon) — the literal mixture model.
    Binomial,
    /// Exactly `round(n * epsilon)` non-null draws.
    FixedCount,
}

/// Draw `n` observations from the mixture, sorted ascending.
///
/// Deterministic given `(model, n, mode, seed)`: the stream is a ChaCha8
/// generator seeded with `seed`, independent of thread count or platform.
/// Panics when `n == 0`.
pub fn sample<M: GaussianMixture>(model: &M, n: usize, mode: SamplingMode, seed: u64) -> SortedSample {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_with_rng(model, n, mode, &mut rng)
}

/// Sampling core reused by the experiment runner with externally derived streams.
pub fn sample_with_rng<M: GaussianMixture>(
    model: &M,
    n: usize,
    mode: SamplingMode,
    rng: &mut ChaCha8Rng,
) -> SortedSample {
    assert!(n > 0, "sample: n must be positive");
    let eps = model.epsilon();
    let signals = match mode {
        SamplingMode::Binomial => Binomial::new(n as u64, eps)
            .expect("epsilon validated at construction")
            .sample(rng) as usize,
        SamplingMode::FixedCount => (n as f64 * eps).round() as usize,
    };
    let mut values = Vec::with_capacity(n);
    for _ in 0..n - signals {
        values.push(rng.sample::<f64, _>(StandardNormal));
    }
    for _ in 0..signals {
        let mean = model.signal_mean(rng.random::<f64>());
        values.push(mean + rng.sample::<f64, _>(StandardNormal));
    }
    SortedSample::from_unsorted(values).expect("draws are finite")
}
