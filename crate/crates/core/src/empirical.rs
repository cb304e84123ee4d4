//! Empirical-CDF machinery: the weighted confidence envelope, the
//! sup-statistics over various windows, and Monte Carlo critical-value
//! tables with JSON persistence.
//!
//! All suprema of `|V_n(t) - t| / sqrt(t (1 - t))`-type processes are exact,
//! not grid approximations: on every flat piece of the empirical CDF the
//! weighted discrepancy is monotone in `t`, so the supremum is attained at a
//! jump (one-sided limits) or a window endpoint, and those candidates are
//! enumerated exhaustively.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Open01;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::normal;

/// Sample held sorted ascending; the basis of all empirical-CDF work.
#[derive(Debug, Clone, PartialEq)]
pub struct SortedSample {
    values: Vec<f64>,
}

impl SortedSample {
    /// Sorts and validates: nonempty, all finite.
    pub fn from_unsorted(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("sample must be nonempty"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("sample contains a non-finite value"));
        }
        values.sort_unstable_by(f64::total_cmp);
        Ok(Self { values })
    }

    /// Accepts already-sorted data; validates order and finiteness.
    pub fn from_sorted(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("sample must be nonempty"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("sample contains a non-finite value"));
        }
        if values.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::invalid("sample is not sorted"));
        }
        Ok(Self { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Right-continuous empirical CDF: `#{X_i <= t} / n`.
    pub fn ecdf_at(&self, t: f64) -> f64 {
        self.count_le(t) as f64 / self.values.len() as f64
    }

    /// `#{X_i <= t}`.
    pub fn count_le(&self, t: f64) -> usize {
        self.values.partition_point(|&x| x <= t)
    }

    /// `#{X_i < t}`.
    pub fn count_lt(&self, t: f64) -> usize {
        self.values.partition_point(|&x| x < t)
    }
}

/// Simultaneous bounds on the true CDF at one point, the two roots of
/// `n (F_n - F)^2 = a^2 F (1 - F)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeBound {
    pub lower: f64,
    pub upper: f64,
}

/// Invert the weighted-discrepancy inequality at a point: given the
/// empirical value `fn_t` and the envelope parameter `a_n`, return both
/// roots of the quadratic `n (fn_t - F)^2 = a_n^2 F (1 - F)`.
///
/// The small root is recovered from the product of roots rather than the
/// quadratic formula, which would cancel catastrophically near `fn_t = 0`.
/// Panics when `a_n < 0` or `fn_t` is outside `[0, 1]`.
pub fn envelope(fn_t: f64, a_n: f64, n: usize) -> EnvelopeBound {
    assert!(a_n >= 0.0, "envelope: negative a_n");
    assert!((0.0..=1.0).contains(&fn_t), "envelope: fn_t={fn_t} outside [0, 1]");
    assert!(n >= 1, "envelope: empty sample");
    let s = a_n * a_n / n as f64;
    let disc = s * (s + 4.0 * fn_t * (1.0 - fn_t));
    let denom = 2.0 * (1.0 + s);
    let upper = ((2.0 * fn_t + s + disc.sqrt()) / denom).min(1.0);
    let lower = if upper > 0.0 {
        (fn_t * fn_t / ((1.0 + s) * upper)).min(fn_t)
    } else {
        0.0
    };
    EnvelopeBound { lower, upper }
}

/// One candidate of a weighted-sup evaluation: empirical value `v` against
/// position `u`, weighted by `sqrt(u (1 - u))`.
#[inline]
fn weighted_value(n_sqrt: f64, v: f64, u: f64) -> f64 {
    n_sqrt * (v - u).abs() / (u * (1.0 - u)).sqrt()
}

/// Exact sup of `sqrt(n) |V_n(t) - t| / sqrt(t (1 - t))` over a closed
/// window `[lo, hi]` in (0, 1), for sorted points `us`.
///
/// Candidates: the window endpoints with the right-continuous empirical
/// value, right limits at every jump in `[lo, hi]`, and left limits at every
/// jump in `(lo, hi]`.
fn weighted_sup_window(us: &[f64], lo: f64, hi: f64) -> f64 {
    debug_assert!(lo <= hi && lo > 0.0 && hi < 1.0);
    let n = us.len();
    let n_f = n as f64;
    let n_sqrt = n_f.sqrt();
    let count_le = |t: f64| us.partition_point(|&x| x <= t);
    let mut best = weighted_value(n_sqrt, count_le(lo) as f64 / n_f, lo)
        .max(weighted_value(n_sqrt, count_le(hi) as f64 / n_f, hi));
    let start = us.partition_point(|&x| x < lo);
    for (idx, &u) in us.iter().enumerate().skip(start) {
        if u > hi {
            break;
        }
        // right limit at u (the value of V_n at u itself)
        let right = (idx + 1) as f64 / n_f;
        best = best.max(weighted_value(n_sqrt, right, u));
        // left limit, attained from inside the window only when u > lo
        if u > lo {
            let left = idx as f64 / n_f;
            best = best.max(weighted_value(n_sqrt, left, u));
        }
    }
    best
}

/// Exact sup over all of (0, 1): the weighted discrepancy tends to zero at
/// both ends beyond the extreme order statistics, so the supremum is
/// attained at a jump and enumerating both limits at every jump is exact.
fn weighted_sup_open(us: &[f64]) -> f64 {
    let n_f = us.len() as f64;
    let n_sqrt = n_f.sqrt();
    let mut best = 0.0f64;
    for (idx, &u) in us.iter().enumerate() {
        best = best.max(weighted_value(n_sqrt, (idx + 1) as f64 / n_f, u));
        best = best.max(weighted_value(n_sqrt, idx as f64 / n_f, u));
    }
    best
}

/// The statistic `Y_n`: sup over `t` in `[0, sqrt(2 ln n)]` of
/// `sqrt(n) |F_n(t) - F(t)| / sqrt(F(t) (1 - F(t)))` for a proper CDF `F`.
///
/// Panics when `F` is degenerate (0 or 1) anywhere on the window.
pub fn y_n_statistic<F: Fn(f64) -> f64>(sample: &SortedSample, true_cdf: F) -> f64 {
    let n = sample.len();
    let n_f = n as f64;
    let n_sqrt = n_f.sqrt();
    let hi = (2.0 * n_f.ln()).sqrt();
    let check = |t: f64| -> f64 {
        let ft = true_cdf(t);
        assert!(
            ft > 0.0 && ft < 1.0,
            "y_n_statistic: true_cdf degenerate at t={t} (F={ft})"
        );
        ft
    };
    let mut best = weighted_value(n_sqrt, sample.ecdf_at(0.0), check(0.0))
        .max(weighted_value(n_sqrt, sample.ecdf_at(hi), check(hi)));
    let start = sample.count_lt(0.0);
    let values = sample.values();
    for (idx, &x) in values.iter().enumerate().skip(start) {
        if x > hi {
            break;
        }
        let fx = check(x);
        best = best.max(weighted_value(n_sqrt, (idx + 1) as f64 / n_f, fx));
        if x > 0.0 {
            best = best.max(weighted_value(n_sqrt, idx as f64 / n_f, fx));
        }
    }
    best
}

/// Which normalized-uniform-empirical-process supremum to simulate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SupStatistic {
    /// Window `[1/2, Phi(sqrt(2 ln n))]`.
    #[serde(rename = "wn_plus")]
    WPlus,
    /// Data-dependent window `[V_n(1/2) - sqrt(c0 ln n)/sqrt(n), Phi(sqrt(2 ln n))]`,
    /// lower end clipped to `1/(2n)` when nonpositive.
    #[serde(rename = "wn_plus_plus")]
    WPlusPlus,
    /// The full sup over (0, 1) — heavy-tailed.
    #[serde(rename = "wn_star")]
    WStar,
}

impl SupStatistic {
    pub fn name(&self) -> &'static str {
        match self {
            SupStatistic::WPlus => "wn_plus",
            SupStatistic::WPlusPlus => "wn_plus_plus",
            SupStatistic::WStar => "wn_star",
        }
    }
}

impl std::str::FromStr for SupStatistic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "wn_plus" => Ok(SupStatistic::WPlus),
            "wn_plus_plus" => Ok(SupStatistic::WPlusPlus),
            "wn_star" => Ok(SupStatistic::WStar),
            other => Err(Error::invalid(format!(
                "unknown statistic {other:?} (expected wn_plus, wn_plus_plus, or wn_star)"
            ))),
        }
    }
}

/// Default `c0` for the data-dependent window of `W++_n`.
pub const DEFAULT_C0: f64 = 3.0;

fn sup_one_rep(kind: SupStatistic, n: usize, c0: f64, seed: u64, rep: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(rep);
    let mut us: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Open01)).collect();
    us.sort_unstable_by(f64::total_cmp);
    sup_of_sorted_uniforms(kind, &us, c0)
}

/// The sup statistic of one already-sorted uniform sample.
pub fn sup_of_sorted_uniforms(kind: SupStatistic, us: &[f64], c0: f64) -> f64 {
    let n = us.len();
    assert!(n >= 1, "sup statistic of an empty sample");
    let n_f = n as f64;
    match kind {
        SupStatistic::WStar => weighted_sup_open(us),
        SupStatistic::WPlus => {
            let hi = normal::cdf((2.0 * n_f.ln()).sqrt());
            weighted_sup_window(us, 0.5, hi)
        }
        SupStatistic::WPlusPlus => {
            assert!(c0 > 0.0, "W++ needs a positive c0");
            let hi = normal::cdf((2.0 * n_f.ln()).sqrt());
            let vn_half = us.partition_point(|&x| x <= 0.5) as f64 / n_f;
            let lo_raw = vn_half - (c0 * n_f.ln()).sqrt() / n_f.sqrt();
            let lo = if lo_raw <= 0.0 { 0.5 / n_f } else { lo_raw };
            assert!(lo <= hi, "W++ window is empty for n={n}");
            weighted_sup_window(us, lo, hi)
        }
    }
}

/// Simulate `reps` independent realizations of a sup statistic at sample
/// size `n`. Replicate `i` uses the ChaCha8 stream `(seed, stream = i)`, so
/// results are identical for any thread count and the same uniforms back
/// every statistic kind at a common `(n, seed)`.
pub fn simulate_sup_statistic(
    kind: SupStatistic,
    n: usize,
    c0: f64,
    reps: usize,
    seed: u64,
) -> Vec<f64> {
    assert!(reps >= 1, "simulate_sup_statistic: reps must be positive");
    (0..reps as u64)
        .into_par_iter()
        .map(|rep| sup_one_rep(kind, n, c0, seed, rep))
        .collect()
}

/// Upper-percentile critical value: the `ceil((1 - alpha) R)`-th order
/// statistic of `R` simulated values (conservative convention).
pub fn critical_value(values: &[f64], alpha: f64) -> f64 {
    assert!(!values.is_empty(), "critical_value: no simulated values");
    assert!(alpha > 0.0 && alpha < 1.0, "critical_value: alpha={alpha} outside (0, 1)");
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let r = sorted.len();
    let k = ((1.0 - alpha) * r as f64 - 1e-9).ceil() as usize;
    sorted[k.clamp(1, r) - 1]
}

/// One `(alpha, a)` row of a persisted critical-value table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantileEntry {
    pub alpha: f64,
    pub a: f64,
}

/// Monte Carlo quantiles of a sup statistic, keyed by `(statistic, n)` and
/// persisted as JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalValueTable {
    pub statistic: SupStatistic,
    pub n: u64,
    pub c0: Option<f64>,
    pub reps: u64,
    pub seed: u64,
    pub quantiles: Vec<QuantileEntry>,
}

impl CriticalValueTable {
    /// Simulate and extract the requested upper percentiles. Tables meant
    /// for persisted reuse should use `reps >= 1000`; smaller runs are
    /// accepted (and useful for determinism checks) but warn on save.
    pub fn build(
        statistic: SupStatistic,
        n: usize,
        c0: f64,
        reps: usize,
        seed: u64,
        alphas: &[f64],
    ) -> Result<Self> {
        if alphas.is_empty() {
            return Err(Error::invalid("no alpha levels requested"));
        }
        for w in alphas.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::invalid("alpha levels must be strictly increasing"));
            }
        }
        if alphas[0] <= 0.0 || *alphas.last().unwrap() >= 1.0 {
            return Err(Error::invalid("alpha levels must lie in (0, 1)"));
        }
        let sims = simulate_sup_statistic(statistic, n, c0, reps, seed);
        let quantiles = alphas
            .iter()
            .map(|&alpha| QuantileEntry {
                alpha,
                a: critical_value(&sims, alpha),
            })
            .collect();
        Ok(Self {
            statistic,
            n: n as u64,
            c0: match statistic {
                SupStatistic::WPlusPlus => Some(c0),
                _ => None,
            },
            reps: reps as u64,
            seed,
            quantiles,
        })
    }

    /// Critical value at an exactly-tabulated level.
    pub fn lookup(&self, alpha: f64) -> Result<f64> {
        self.quantiles
            .iter()
            .find(|q| (q.alpha - alpha).abs() < 1e-12)
            .map(|q| q.a)
            .ok_or_else(|| {
                let have: Vec<String> =
                    self.quantiles.iter().map(|q| q.alpha.to_string()).collect();
                Error::TableMismatch(format!(
                    "alpha={alpha} not tabulated for {} at n={} (have: {})",
                    self.statistic.name(),
                    self.n,
                    have.join(", ")
                ))
            })
    }

    /// Reject a table whose sample size differs from the request.
    pub fn require_n(&self, n: u64) -> Result<()> {
        if self.n != n {
            return Err(Error::TableMismatch(format!(
                "table for {} was calibrated at n={}, requested n={n}",
                self.statistic.name(),
                self.n
            )));
        }
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        if self.reps < 1000 {
            eprintln!(
                "warning: persisting a critical-value table with only {} reps",
                self.reps
            );
        }
        let mut json =
            serde_json::to_string_pretty(self).expect("table serialization cannot fail");
        json.push('\n');
        fs::write(path, json).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let table: Self = serde_json::from_str(&text).map_err(|e| Error::Json {
            path: path.into(),
            source: e,
        })?;
        table.validate()?;
        Ok(table)
    }

    fn validate(&self) -> Result<()> {
        if self.quantiles.is_empty() {
            return Err(Error::TableMismatch("table has no quantiles".into()));
        }
        let mut by_alpha: BTreeMap<u64, f64> = BTreeMap::new();
        for q in &self.quantiles {
            if !(q.alpha > 0.0 && q.alpha < 1.0) {
                return Err(Error::TableMismatch(format!("alpha={} outside (0, 1)", q.alpha)));
            }
            by_alpha.insert(q.alpha.to_bits(), q.a);
        }
        // critical values must be nonincreasing in alpha
        let mut prev = f64::INFINITY;
        for (_, a) in by_alpha {
            if a > prev {
                return Err(Error::TableMismatch(
                    "critical values are not nonincreasing in alpha".into(),
                ));
            }
            prev = a;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mixture::{sample, GaussianMixture, SamplingMode, TwoPointMixture};
    use proptest::prelude::*;

    fn sorted(v: Vec<f64>) -> SortedSample {
        SortedSample::from_unsorted(v).unwrap()
    }

    #[test]
    fn ecdf_basics() {
        let s = sorted(vec![1.0, 0.3, -0.5, 2.5]);
        assert_eq!(s.ecdf_at(0.3), 0.5);
        assert_eq!(s.ecdf_at(-1.0), 0.0);
        assert_eq!(s.ecdf_at(2.5), 1.0);
        assert_eq!(s.ecdf_at(3.0), 1.0);
    }

    #[test]
    fn sorted_sample_validation() {
        assert!(SortedSample::from_unsorted(vec![]).is_err());
        assert!(SortedSample::from_unsorted(vec![1.0, f64::NAN]).is_err());
        assert!(SortedSample::from_sorted(vec![2.0, 1.0]).is_err());
    }

    #[test]
    fn envelope_boundary_cases() {
        let b = envelope(0.0, 1.0, 100);
        assert_eq!(b.lower, 0.0);
        assert!((b.upper - 0.009900990099009901).abs() < 1e-16);
        let b = envelope(0.5, 1.0, 100);
        assert!((b.upper - 0.5497518595104995).abs() < 1e-15);
        assert!((b.lower - 0.4502481404895005).abs() < 1e-15);
        let b = envelope(0.5, 0.0, 100);
        assert_eq!((b.lower, b.upper), (0.5, 0.5));
    }

    #[test]
    #[should_panic(expected = "negative a_n")]
    fn envelope_rejects_negative_a() {
        envelope(0.5, -1.0, 10);
    }

    proptest! {
        // Both envelope roots satisfy the defining relation
        // sqrt(n) |fn - v| = a sqrt(v (1 - v)), and they bracket fn.
        #[test]
        fn envelope_roots_satisfy_defining_relation(
            fn_t in 0.0f64..=1.0,
            a in 0.0f64..30.0,
            n in 1usize..1_000_000,
        ) {
            let b = envelope(fn_t, a, n);
            prop_assert!(b.lower <= fn_t + 1e-15 && fn_t <= b.upper + 1e-15);
            for v in [b.lower, b.upper] {
                let lhs = (n as f64).sqrt() * (fn_t - v).abs();
                let rhs = a * (v * (1.0 - v)).sqrt();
                prop_assert!((lhs - rhs).abs() <= 1e-10 * lhs.abs().max(rhs.abs()).max(1.0),
                    "fn={fn_t} a={a} n={n} v={v}: {lhs} vs {rhs}");
            }
        }

        // Envelope nesting: larger a gives a wider interval.
        #[test]
        fn envelope_nesting(fn_t in 0.0f64..=1.0, a in 0.0f64..10.0, extra in 0.0f64..10.0, n in 1usize..100_000) {
            let small = envelope(fn_t, a, n);
            let large = envelope(fn_t, a + extra, n);
            prop_assert!(large.lower <= small.lower + 1e-15);
            prop_assert!(large.upper >= small.upper - 1e-15);
        }
    }

    #[test]
    fn y_n_single_point_window() {
        // n = 1: window is {0}; |1 - 0.5| / sqrt(0.25) = 1
        let s = sorted(vec![0.0]);
        assert_eq!(y_n_statistic(&s, normal::cdf), 1.0);
    }

    #[test]
    fn y_n_frozen_small_instance() {
        let s = sorted(vec![-0.5, 0.3, 1.0, 2.5]);
        let y = y_n_statistic(&s, normal::cdf);
        assert!((y - 1.8914453503586881).abs() < 1e-12, "y={y}");
    }

    #[test]
    fn y_n_smaller_under_the_true_cdf() {
        // the statistic measures discrepancy: the generating CDF scores far
        // below a grossly shifted one on the same sample
        let m = TwoPointMixture::new(0.3, 2.0).unwrap();
        let s = sample(&m, 2000, SamplingMode::Binomial, 4);
        let honest = y_n_statistic(&s, |t| m.cdf(t));
        let shifted = y_n_statistic(&s, |t| normal::cdf(t - 1.0));
        assert!(honest < shifted / 5.0, "honest={honest} shifted={shifted}");
    }

    #[test]
    #[should_panic(expected = "degenerate")]
    fn y_n_rejects_degenerate_cdf() {
        let s = sorted(vec![0.5]);
        y_n_statistic(&s, |_| 1.0);
    }

    // frozen 5-point uniform set computed by exhaustive candidate evaluation
    const US5: [f64; 5] = [0.05, 0.2, 0.45, 0.7, 0.9];

    #[test]
    fn sup_frozen_values() {
        assert!(
            (sup_of_sorted_uniforms(SupStatistic::WStar, &US5, DEFAULT_C0)
                - 1.5389675281277311)
                .abs()
                < 1e-12
        );
        assert!(
            (sup_of_sorted_uniforms(SupStatistic::WPlus, &US5, DEFAULT_C0)
                - 0.7453559924999299)
                .abs()
                < 1e-12
        );
        assert!(
            (sup_of_sorted_uniforms(SupStatistic::WPlusPlus, &US5, DEFAULT_C0)
                - 1.118033988749895)
                .abs()
                < 1e-12
        );
    }

    #[test]
    fn simulate_is_deterministic_and_seed_sensitive() {
        let a = simulate_sup_statistic(SupStatistic::WPlus, 50, DEFAULT_C0, 8, 42);
        let b = simulate_sup_statistic(SupStatistic::WPlus, 50, DEFAULT_C0, 8, 42);
        assert_eq!(a, b);
        let c = simulate_sup_statistic(SupStatistic::WPlus, 50, DEFAULT_C0, 1, 43);
        assert_ne!(a[0], c[0]);
    }

    #[test]
    fn wplus_dominated_by_wstar_per_replicate() {
        let plus = simulate_sup_statistic(SupStatistic::WPlus, 200, DEFAULT_C0, 50, 7);
        let star = simulate_sup_statistic(SupStatistic::WStar, 200, DEFAULT_C0, 50, 7);
        for (p, s) in plus.iter().zip(&star) {
            assert!(p <= s, "W+ {p} exceeded W* {s} on a shared sample");
        }
    }

    #[test]
    fn y_n_equals_wplus_through_the_normal_transform() {
        // for a standard normal sample, Y_n with F = Phi equals the uniform
        // W+ statistic of the transformed points
        let m = TwoPointMixture::new(0.0, 1.0).unwrap();
        let s = sample(&m, 300, SamplingMode::Binomial, 11);
        let y = y_n_statistic(&s, normal::cdf);
        let us: Vec<f64> = s.values().iter().map(|&x| normal::cdf(x)).collect();
        let w = sup_of_sorted_uniforms(SupStatistic::WPlus, &us, DEFAULT_C0);
        assert!((y - w).abs() < 1e-10, "y={y} w={w}");
    }

    #[test]
    fn lil_normalization_sanity() {
        // median of W* / sqrt(2 ln ln n) should sit near 1; convergence from
        // above is slow, so the window is loose (measured 1.32 at n=1e4,
        // 1.087 at n=1e7 in the reference comparison)
        for &n in &[10_000usize, 100_000] {
            let sims = simulate_sup_statistic(SupStatistic::WStar, n, DEFAULT_C0, 201, 3);
            let mut sorted = sims;
            sorted.sort_unstable_by(f64::total_cmp);
            let median = sorted[100];
            let norm = (2.0 * (n as f64).ln().ln()).sqrt();
            let ratio = median / norm;
            assert!((0.8..=1.4).contains(&ratio), "n={n}: median ratio {ratio}");
        }
    }

    #[test]
    fn tail_comparison_lemma_monte_carlo() {
        // P{Y_n >= c} <= 2 P{W+ >= c} + 3 binomial se, for a two-point truth
        // with mu inside [0, sqrt(2 ln n)], at the 0.90 and 0.95 W+ quantiles
        let n = 1000;
        let reps = 400;
        let wplus = simulate_sup_statistic(SupStatistic::WPlus, n, DEFAULT_C0, reps, 21);
        let m = TwoPointMixture::new(0.1, 2.0).unwrap();
        let truth = move |t: f64| {
            (1.0 - 0.1) * normal::cdf(t) + 0.1 * normal::cdf(t - 2.0)
        };
        let yn: Vec<f64> = (0..reps as u64)
            .map(|i| {
                let mut rng = ChaCha8Rng::seed_from_u64(500);
                rng.set_stream(i);
                let s = crate::mixture::sample_with_rng(&m, n, SamplingMode::Binomial, &mut rng);
                y_n_statistic(&s, truth)
            })
            .collect();
        for alpha in [0.10, 0.05] {
            let c = critical_value(&wplus, alpha);
            let p_w = wplus.iter().filter(|&&w| w >= c).count() as f64 / reps as f64;
            let p_y = yn.iter().filter(|&&y| y >= c).count() as f64 / reps as f64;
            let bound_p = (2.0 * p_w).min(1.0);
            let se = (bound_p * (1.0 - bound_p) / reps as f64).sqrt();
            assert!(
                p_y <= bound_p + 3.0 * se,
                "alpha={alpha}: P(Y>=c)={p_y} vs bound {bound_p} + 3se {se}"
            );
        }
    }

    #[test]
    fn critical_value_order_statistic_convention() {
        let values: Vec<f64> = (1..=100).map(|i| i as f64).collect();
        assert_eq!(critical_value(&values, 0.05), 95.0);
        assert_eq!(critical_value(&[7.0], 0.3), 7.0);
        assert_eq!(critical_value(&values, 0.999), 1.0);
    }

    #[test]
    #[should_panic(expected = "outside (0, 1)")]
    fn critical_value_rejects_bad_alpha() {
        critical_value(&[1.0], 0.0);
    }

    #[test]
    fn table_roundtrip_and_n_check() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("table.json");
        let table = CriticalValueTable::build(
            SupStatistic::WPlus,
            100,
            DEFAULT_C0,
            2000,
            9,
            &[0.05, 0.10, 0.25],
        )
        .unwrap();
        table.save(&path).unwrap();
        let loaded = CriticalValueTable::load(&path).unwrap();
        assert_eq!(table, loaded);
        assert!(loaded.require_n(100).is_ok());
        assert!(loaded.require_n(200).is_err());
        assert!(loaded.lookup(0.10).is_ok());
        assert!(loaded.lookup(0.11).is_err());
        // critical values nonincreasing in alpha
        assert!(loaded.lookup(0.05).unwrap() >= loaded.lookup(0.25).unwrap());
        // same build is byte-identical
        let again = CriticalValueTable::build(
            SupStatistic::WPlus,
            100,
            DEFAULT_C0,
            2000,
            9,
            &[0.05, 0.10, 0.25],
        )
        .unwrap();
        assert_eq!(
            serde_json::to_string(&table).unwrap(),
            serde_json::to_string(&again).unwrap()
        );
    }

    #[test]
    fn table_serializes_with_spec_field_names() {
        let table = CriticalValueTable {
            statistic: SupStatistic::WStar,
            n: 10,
            c0: None,
            reps: 5,
            seed: 1,
            quantiles: vec![QuantileEntry { alpha: 0.1, a: 2.0 }],
        };
        let json = serde_json::to_string(&table).unwrap();
        assert!(json.contains("\"statistic\":\"wn_star\""));
        assert!(json.contains("\"c0\":null"));
        assert!(json.contains("\"quantiles\":[{\"alpha\":0.1,\"a\":2.0}]"));
    }
}
