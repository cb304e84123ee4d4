//! Closed-form convergence-rate and threshold functions, used as overlays
//! and acceptance references. Constants in the underlying bounds are
//! generic, so every rate is reported as exponents only:
//! `n^exponent * (ln n)^log_power * (ln ln n)^loglog_power`.

 
use crate::mixture::SparseCalibration;
use crate::normal;

/// Which of the three `(beta, r)` cases applies. Ties at `beta = 3r` go to
/// [`Regime::BetaGe3r`] and ties at `beta = r` to [`Regime::BetaLeR`],
/// uniformly across all rate functions (the exponents are continuous there,
/// only log powers differ).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    BetaGe3r,
    Middle,
    BetaLeR,
}

fn regime_of(beta: f64, r: f64) -> Regime {
    if beta >= 3.0 * r {
        Regime::BetaGe3r
    } else if beta <= r {
        Regime::BetaLeR
    } else {
        Regime::Middle
    }
}

/// A polynomial-in-n rate with log corrections.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateRegime {
    pub regime: Regime,
    pub exponent: f64,
    pub log_power: f64,
    pub loglog_power: f64,
}

impl RateRegime {
    /// `n^exponent * (ln n)^log_power * (ln ln n)^loglog_power` (no constant).
    pub fn evaluate(&self, n: u64) -> f64 {
        let ln_n = (n as f64).ln();
        (self.exponent * ln_n).exp()
            * ln_n.powf(self.log_power)
            * if self.loglog_power != 0.0 {
                ln_n.ln().powf(self.loglog_power)
            } else {
                1.0
            }
    }
}

fn require_detectable(cal: &SparseCalibration) {
    assert!(
        cal.is_detectable(),
        "rate functions are defined only above the detection boundary"
    );
}

fn mse_exponent(beta: f64, r: f64, regime: Regime) -> f64 {
    match regime {
        Regime::BetaGe3r => -1.0 - 2.0 * r + 2.0 * beta,
        Regime::Middle => -1.0 + (beta + r) * (beta + r) / (4.0 * r),
        Regime::BetaLeR => -1.0 + beta,
    }
}

/// Upper bound on the relative mean squared error of the grid estimator
/// with the large deterministic envelope schedule.
pub fn mse_upper_rate(cal: &SparseCalibration) -> RateRegime {
    require_detectable(cal);
    let regime = regime_of(cal.beta(), cal.r());
    RateRegime {
        regime,
        exponent: mse_exponent(cal.beta(), cal.r(), regime),
        log_power: match regime {
            Regime::BetaGe3r | Regime::Middle => 5.5,
            Regime::BetaLeR => 4.0,
        },
        loglog_power: 0.0,
    }
}

/// Minimax lower bound for the same risk: identical exponents, smaller log
/// powers.
pub fn mse_lower_rate(cal: &SparseCalibration) -> RateRegime {
    require_detectable(cal);
    let regime = regime_of(cal.beta(), cal.r());
    RateRegime {
        regime,
        exponent: mse_exponent(cal.beta(), cal.r(), regime),
        log_power: match regime {
            Regime::BetaGe3r => 1.0,
            Regime::Middle => 2.5,
            Regime::BetaLeR => 0.0,
        },
        loglog_power: 0.0,
    }
}

/// Bounds on the expected relative shortfall `E(1 - est/eps)_+` of a level
/// `1 - alpha` lower confidence limit: `(lower bound, upper bound)` rates.
/// Exponents are exactly half the mean-squared-error exponents.
pub fn ci_deficit_rates(cal: &SparseCalibration) -> (RateRegime, RateRegime) {
    require_detectable(cal);
    let (beta, r) = (cal.beta(), cal.r());
    let regime = regime_of(beta, r);
    let exponent = match regime {
        Regime::BetaGe3r => -0.5 - r + beta,
        Regime::Middle => -0.5 + (beta + r) * (beta + r) / (8.0 * r),
        Regime::BetaLeR => -0.5 + 0.5 * beta,
    };
    let lower = RateRegime {
        regime,
        exponent,
        log_power: match regime {
            Regime::BetaGe3r => 0.5,
            Regime::Middle => 1.25,
            Regime::BetaLeR => 0.0,
        },
        loglog_power: 0.0,
    };
    let upper = RateRegime {
        regime,
        exponent,
        log_power: match regime {
            Regime::BetaGe3r | Regime::Middle => 1.25,
            Regime::BetaLeR => 0.0,
        },
        loglog_power: 0.5,
    };
    (lower, upper)
}

/// Leading term of the variance-to-gap ratio
/// `F(t*)(1 - F(t*)) / (Phi(t*) - F(t*))^2` at the most informative
/// threshold, by regime:
///
/// - `beta >= 3r`: `sqrt(pi r ln n) * n^(2 beta - 2 r)`
/// - `r < beta < 3r`: `[beta (beta - r) / (beta + r)] * sqrt(4 pi ln n / r) * n^((beta+r)^2/(4r))`
/// - `beta <= r`: `2 n^beta`
pub fn lemma81_ratio(cal: &SparseCalibration) -> f64 {
    require_detectable(cal);
    let (beta, r) = (cal.beta(), cal.r());
    let n = cal.n() as f64;
    let ln_n = n.ln();
    match regime_of(beta, r) {
        Regime::BetaGe3r => {
            (std::f64::consts::PI * r * ln_n).sqrt() * ((2.0 * beta - 2.0 * r) * ln_n).exp()
        }
        Regime::Middle => {
            let q = (beta + r) * (beta + r) / (4.0 * r);
            beta * (beta - r) / (beta + r)
                * (4.0 * std::f64::consts::PI * ln_n / r).sqrt()
                * (q * ln_n).exp()
        }
        Regime::BetaLeR => 2.0 * (beta * ln_n).exp(),
    }
}

/// The same quantity computed exactly from a CDF at any point `t`.
/// Panics when `F(t)` is degenerate or `Phi(t) <= F(t)` (gap nonpositive).
pub fn ratio_numeric<F: Fn(f64) -> f64>(true_cdf: F, t: f64) -> f64 {
    let ft = true_cdf(t);
    assert!(ft > 0.0 && ft < 1.0, "ratio_numeric: degenerate F(t)={ft}");
    let gap = normal::cdf(t) - ft;
    assert!(gap > 0.0, "ratio_numeric: Phi(t) <= F(t) at t={t}");
    ft * (1.0 - ft) / (gap * gap)
}
