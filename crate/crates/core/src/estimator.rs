//! The inference engine: the tail-mass ratio `D`, its monotone inversion,
//! the evaluation grid, the grid-max lower bound for the non-null fraction,
//! the sparsest-mixture construction, and the Meinshausen-Rice competitors.

use crate::empirical::{envelope, SortedSample};
use crate::error::{Error, Result};
use crate::normal;

/// `D(mu; tau, tau') = [Phi(tau) - Phi(tau - mu)] / [Phi(tau') - Phi(tau' - mu)]`,
/// strictly decreasing in `mu > 0` for `tau < tau'`, with range
/// `(Phi(tau)/Phi(tau'), pdf(tau)/pdf(tau'))`.
pub fn d_ratio(mu: f64, tau: f64, tau_prime: f64) -> f64 {
    assert!(mu > 0.0, "d_ratio: mu={mu} must be positive");
    assert!(tau < tau_prime, "d_ratio: need tau < tau', got {tau} >= {tau_prime}");
    normal::cdf_diff(tau, tau - mu) / normal::cdf_diff(tau_prime, tau_prime - mu)
}

/// The open range of `D(.; tau, tau')`: `(inf, sup)` attained in the limits
/// `mu -> infinity` and `mu -> 0+`. The supremum `pdf(tau)/pdf(tau')` is
/// evaluated as `exp((tau'^2 - tau^2)/2)` to avoid underflow.
pub fn d_ratio_bounds(tau: f64, tau_prime: f64) -> (f64, f64) {
    assert!(tau < tau_prime, "d_ratio_bounds: need tau < tau'");
    let inf = normal::cdf(tau) / normal::cdf(tau_prime);
    let sup = (0.5 * (tau_prime * tau_prime - tau * tau)).exp();
    (inf, sup)
}

const MU_BRACKET_FLOOR: f64 = 1e-8;

/// Invert `D(.; tau, tau')` at `target`: the unique root when `target` lies
/// strictly inside the range, `None` otherwise.
///
/// Bisection on a doubling bracket, run to f64 resolution; strict
/// monotonicity makes the result exact to rounding (in particular the
/// residual `|D(mu) - target|` is far below 1e-10 wherever `D` has any
/// slope at all).
pub fn solve_mu(target: f64, tau: f64, tau_prime: f64) -> Option<f64> {
    let (inf, sup) = d_ratio_bounds(tau, tau_prime);
    if !(target > inf && target < sup) {
        return None;
    }
    let mut lo = MU_BRACKET_FLOOR;
    if d_ratio(lo, tau, tau_prime) < target {
        // root below the bracket floor; treat as the sup boundary
        return None;
    }
    let mut hi = 1.0;
    let mut doublings = 0;
    while d_ratio(hi, tau, tau_prime) > target {
        doublings += 1;
        if doublings > 64 {
            return None;
        }
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break; // interval no longer representable
        }
        if d_ratio(mid, tau, tau_prime) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// The sparsest one-sided mixture through two CDF points: find
/// `(epsilon*, mu*)` so that the two-point CDF passes through `(tau, a)` and
/// `(tau', b)`. `None` when the induced ratio leaves the range of `D`.
///
/// Panics unless `0 < a < Phi(tau)`, `0 < b < Phi(tau')`, and `tau < tau'`.
pub fn two_point_through(tau: f64, a: f64, tau_prime: f64, b: f64) -> Option<(f64, f64)> {
    assert!(tau < tau_prime, "two_point_through: need tau < tau'");
    let phi_tau = normal::cdf(tau);
    let phi_tau_prime = normal::cdf(tau_prime);
    assert!(a > 0.0 && a < phi_tau, "two_point_through: a={a} outside (0, Phi(tau))");
    assert!(
        b > 0.0 && b < phi_tau_prime,
        "two_point_through: b={b} outside (0, Phi(tau'))"
    );
    let target = (phi_tau - a) / (phi_tau_prime - b);
    let mu = solve_mu(target, tau, tau_prime)?;
    let eps = (phi_tau - a) / normal::cdf_diff(tau, tau - mu);
    Some((eps, mu))
}

/// The evaluation grid: `floor(2 ln n) + 1` points from 0 with spacing
/// `1 / sqrt(2 ln n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    n: u64,
    points: Vec<f64>,
}

impl Grid {
    pub fn new(n: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid(format!("grid needs n >= 2, got {n}")));
        }
        let two_ln_n = 2.0 * (n as f64).ln();
        let count = two_ln_n.floor() as usize + 1;
        let spacing = 1.0 / two_ln_n.sqrt();
        let points = (0..count).map(|j| j as f64 * spacing).collect();
        Ok(Self { n, points })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn spacing(&self) -> f64 {
        1.0 / (2.0 * (self.n as f64).ln()).sqrt()
    }

    /// Number of adjacent pairs `(t_j, t_{j+1})`.
    pub fn pair_count(&self) -> usize {
        self.points.len() - 1
    }
}

/// Per-pair diagnostics of the grid estimator.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct PairDiagnostic {
    /// Index `j` of the pair `(t_j, t_{j+1})`, 0-based.
    pub pair_index: usize,
    /// Solved signal mean, `None` when the pair had no solution.
    pub mu_hat: Option<f64>,
    pub eps_hat: f64,
}

/// The grid-max estimate with its diagnostics.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct EstimateResult {
    /// The lower bound: max over pairs, clamped to [0, 1].
    pub eps_hat: f64,
    /// Pair index attaining the max, `None` when every pair gave 0.
    pub winner: Option<usize>,
    /// Whether clamping to [0, 1] changed the raw maximum.
    pub clamped: bool,
    pub pairs: Vec<PairDiagnostic>,
}

/// The grid-max lower bound from a sample: for each adjacent grid pair,
/// over/under-shoot the empirical CDF by the envelope at level `a_n`, invert
/// `D`, convert to a mixing-fraction estimate, and take the maximum.
///
/// Per-pair rule: with positive numerator `Phi(t_j) - F+(t_j)` and
/// denominator `Phi(t_j+1) - F-(t_j+1)`, the solved mean is clamped to the
/// model's support bound `sqrt(2 ln n)`; targets at or below `D(sqrt(2 ln n))`
/// (the "mean would be infinite" side) use the bound itself. Targets at or
/// above the `mu -> 0` supremum, or any non-positive numerator/denominator,
/// yield 0 for that pair. The clamp keeps the estimate a valid lower bound
/// whenever the non-null means respect the support bound, and it is what
/// makes the procedure informative at practical sample sizes.
///
/// `a_n` comes either from a critical-value table (coverage) or from the
/// deterministic mean-squared-error schedule. Panics when the sample has
/// fewer than 2 points (the grid degenerates).
pub fn cjl_estimate(sample: &SortedSample, a_n: f64) -> EstimateResult {
    let n = sample.len();
    assert!(n >= 2, "cjl_estimate: need at least 2 observations");
    let grid = Grid::new(n as u64).expect("n >= 2");
    let ecdf_values: Vec<f64> = grid.points().iter().map(|&t| sample.ecdf_at(t)).collect();
    cjl_estimate_given_ecdf(&grid, &ecdf_values, n, a_n)
}

/// Core of [`cjl_estimate`] on precomputed grid ECDF values, so one sample
/// can be evaluated at many envelope levels without re-searching.
pub fn cjl_estimate_given_ecdf(
    grid: &Grid,
    ecdf_values: &[f64],
    n: usize,
    a_n: f64,
) -> EstimateResult {
    assert!(a_n >= 0.0, "cjl_estimate: negative a_n");
    assert_eq!(ecdf_values.len(), grid.points().len());
    let points = grid.points();
    let mu_cap = (2.0 * (n as f64).ln()).sqrt();
    let mut pairs = Vec::with_capacity(grid.pair_count());
    let mut best = 0.0f64;
    let mut winner = None;
    for j in 0..grid.pair_count() {
        let (t_j, t_next) = (points[j], points[j + 1]);
        let upper_j = envelope(ecdf_values[j], a_n, n).upper;
        let lower_next = envelope(ecdf_values[j + 1], a_n, n).lower;
        let numerator = normal::cdf(t_j) - upper_j;
        let denominator = normal::cdf(t_next) - lower_next;
        let mut diag = PairDiagnostic {
            pair_index: j,
            mu_hat: None,
            eps_hat: 0.0,
        };
        if numerator > 0.0 && denominator > 0.0 {
            let target = numerator / denominator;
            let (_, sup) = d_ratio_bounds(t_j, t_next);
            let mu_hat = if target >= sup {
                None // mean would have to be zero; no usable estimate
            } else if target <= d_ratio(mu_cap, t_j, t_next) {
                Some(mu_cap)
            } else {
                solve_mu(target, t_j, t_next)
            };
            if let Some(mu_hat) = mu_hat {
                let eps = (numerator / normal::cdf_diff(t_j, t_j - mu_hat)).clamp(0.0, 1.0);
                diag.mu_hat = Some(mu_hat);
                diag.eps_hat = eps;
            }
        }
        if diag.eps_hat > best {
            best = diag.eps_hat;
            winner = Some(j);
        }
        pairs.push(diag);
    }
    // per-pair values are already clamped; flag when any raw value hit 1
    let clamped = pairs.iter().any(|p| p.eps_hat >= 1.0);
    EstimateResult {
        eps_hat: best,
        winner,
        clamped,
        pairs,
    }
}

/// Map z-scores to the p-value scale `p_i = 1 - Phi(x_i)`. The result is
/// sorted ascending (the transform reverses order), which is the input
/// convention for the Meinshausen-Rice bounds.
pub fn survival_transform(sample: &SortedSample) -> SortedSample {
    let mut us: Vec<f64> = sample
        .values()
        .iter()
        .rev()
        .map(|&x| normal::survival(x))
        .collect();
    // survival is monotone but ties in the far tail can collapse; enforce order
    for i in 1..us.len() {
        if us[i] < us[i - 1] {
            us[i] = us[i - 1];
        }
    }
    SortedSample::from_sorted(us).expect("survival values are finite")
}

/// Meinshausen-Rice lower bound on uniform-scale data:
/// `sup over t in (0,1) of [V_n(t) - t - (a*/sqrt(n)) sqrt(t(1-t))] / (1 - t)`,
/// clamped to [0, 1]. Evaluated exactly at the jump candidates (the weighted
/// discrepancy is monotone on flat pieces and vanishes toward both ends).
pub fn mr_lower_bound(uniforms: &SortedSample, a_star: f64) -> f64 {
    mr_sup(uniforms, a_star, true)
}

/// The modified bound without the `1/(1 - t)` amplification — slightly more
/// conservative, but immune to the heavy tail near `t = 1`.
pub fn mr_plus_lower_bound(uniforms: &SortedSample, a_star: f64) -> f64 {
    mr_sup(uniforms, a_star, false)
}

fn mr_sup(uniforms: &SortedSample, a_star: f64, divide: bool) -> f64 {
    assert!(a_star >= 0.0, "mr bound: negative a*");
    let us = uniforms.values();
    let n_f = us.len() as f64;
    let scale = a_star / n_f.sqrt();
    let mut best = 0.0f64;
    for (idx, &u) in us.iter().enumerate() {
        debug_assert!((0.0..=1.0).contains(&u), "uniform-scale input expected");
        let penalty = scale * (u * (1.0 - u)).sqrt();
        for v in [(idx + 1) as f64 / n_f, idx as f64 / n_f] {
            let numerator = v - u - penalty;
            let candidate = if divide {
                if u >= 1.0 {
                    continue;
                }
                numerator / (1.0 - u)
            } else {
                numerator
            };
            if candidate > best {
                best = candidate;
            }
        }
    }
    best.min(1.0)
}

/// Deterministic approximation of the grid estimator at a single threshold
/// (stochastic term replaced by the envelope penalty around the true CDF):
/// `[Phi(t) - F(t) - (a_n/sqrt(n)) sqrt(F(t)(1-F(t)))] / [Phi(t) - Phi(t-mu)]`.
///
/// Panics when the denominator is not positive.
pub fn oracle_cjl_approx<F: Fn(f64) -> f64>(t: f64, true_cdf: F, mu: f64, a_n: f64, n: u64) -> f64 {
    assert!(mu > 0.0, "oracle_cjl_approx: mu must be positive");
    let denominator = normal::cdf_diff(t, t - mu);
    assert!(denominator > 0.0, "oracle_cjl_approx: degenerate denominator");
    let ft = true_cdf(t);
    (normal::cdf(t) - ft - a_n / (n as f64).sqrt() * (ft * (1.0 - ft)).sqrt()) / denominator
}

/// Deterministic approximation of the Meinshausen-Rice bound at a single
/// threshold, in z-space:
/// `[Phi(t) - F(t) - (a*/sqrt(n)) sqrt(Phi(t)(1-Phi(t)))] / Phi(t)`.
///
/// This is the p-value-space form of the bound pushed through `t`; the
/// denominator `Phi(t)` is what drives its heavy tail as `t -> -infinity`.
pub fn oracle_mr_approx<F: Fn(f64) -> f64>(t: f64, true_cdf: F, a_star: f64, n: u64) -> f64 {
    let phi_t = normal::cdf(t);
    assert!(phi_t > 0.0, "oracle_mr_approx: degenerate denominator");
    let penalty = a_star / (n as f64).sqrt() * (phi_t * (1.0 - phi_t)).sqrt();
    (phi_t - true_cdf(t) - penalty) / phi_t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mixture::{DiscreteOneSidedMixture, GaussianMixture, TwoPointMixture};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn d_ratio_symmetry_case() {
        assert!((d_ratio(1.0, 0.0, 1.0) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn d_ratio_frozen_value() {
        assert!((d_ratio(2.0, 1.0, 2.0) - 1.4304655440218122).abs() < 1e-13);
    }

    #[test]
    fn d_ratio_bounds_are_the_mu_limits() {
        let (inf, sup) = d_ratio_bounds(0.0, 1.0);
        assert!((sup - 1.6487212707001282).abs() < 1e-14); // e^{1/2}
        assert!((inf - normal::cdf(0.0) / normal::cdf(1.0)).abs() < 1e-15);
        // D approaches the bounds at the ends of the mu range
        assert!((d_ratio(1e-7, 0.0, 1.0) - sup).abs() < 1e-6);
        assert!((d_ratio(60.0, 0.0, 1.0) - inf).abs() < 1e-12);
    }

    #[test]
    #[should_panic(expected = "must be positive")]
    fn d_ratio_rejects_nonpositive_mu() {
        d_ratio(0.0, 0.0, 1.0);
    }

    #[test]
    #[should_panic(expected = "need tau < tau'")]
    fn d_ratio_rejects_reversed_taus() {
        d_ratio(1.0, 2.0, 1.0);
    }

    #[test]
    fn solve_mu_round_trips() {
        let target = d_ratio(2.0, 1.0, 2.0);
        let mu = solve_mu(target, 1.0, 2.0).unwrap();
        assert!((mu - 2.0).abs() < 1e-7, "mu={mu}");
        let mu = solve_mu(1.0, 0.0, 1.0).unwrap();
        assert!((mu - 1.0).abs() < 1e-7, "mu={mu}");
    }

    #[test]
    fn solve_mu_rejects_out_of_range_targets() {
        // above sup = e^{1.5} = 4.4817
        assert!(solve_mu(5.0, 1.0, 2.0).is_none());
        // below inf
        let inf = d_ratio_bounds(1.0, 2.0).0;
        assert!(solve_mu(inf * 0.99, 1.0, 2.0).is_none());
    }

    #[test]
    fn d_monotone_and_invertible_over_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for _ in 0..200 {
            let tau: f64 = rng.random_range(0.0..5.5);
            let tau_prime: f64 = tau + rng.random_range(0.05..2.0);
            let inf = d_ratio_bounds(tau, tau_prime).0;
            let mut prev = f64::INFINITY;
            for k in 0..100 {
                let mu = 0.01 + (10.0 - 0.01) * k as f64 / 99.0;
                let d = d_ratio(mu, tau, tau_prime);
                // allow last-ulp wiggle where both tails have saturated
                assert!(d <= prev * (1.0 + 1e-13), "increased at mu={mu}");
                // strict decrease while the values are still resolvable in
                // f64; at extreme mu the ratio saturates at its infimum
                if prev.is_finite() && prev - inf > 1e-11 * prev {
                    assert!(d < prev, "not strictly decreasing at mu={mu}");
                }
                prev = d;
            }
            let mu_true: f64 = rng.random_range(0.05..8.0);
            let mu_hat = solve_mu(d_ratio(mu_true, tau, tau_prime), tau, tau_prime)
                .expect("in-range target");
            assert!(
                (mu_hat - mu_true).abs() <= 1e-7 * mu_true.max(1.0),
                "roundtrip {mu_true} -> {mu_hat} at ({tau}, {tau_prime})"
            );
        }
    }

    #[test]
    fn identification_recovers_two_point_parameters() {
        let m = TwoPointMixture::new(0.1, 2.0).unwrap();
        let (a, b) = (m.cdf(1.0), m.cdf(2.0));
        assert!((a - 0.7730757968548344).abs() < 1e-15);
        assert!((b - 0.9295248812466387).abs() < 1e-15);
        let (eps, mu) = two_point_through(1.0, a, 2.0, b).unwrap();
        assert!((eps - 0.1).abs() < 1e-7);
        assert!((mu - 2.0).abs() < 1e-6);
    }

    #[test]
    fn identification_over_random_mixtures() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..200 {
            let eps: f64 = rng.random_range(1e-4..0.5);
            let mu: f64 = rng.random_range(0.5..5.0);
            let m = TwoPointMixture::new(eps, mu).unwrap();
            let tau: f64 = rng.random_range(0.0..3.5);
            let tau_prime = tau + rng.random_range(0.1..(4.0 - tau).max(0.2));
            let (e, g) = two_point_through(tau, m.cdf(tau), tau_prime, m.cdf(tau_prime))
                .expect("exact two-point values identify");
            assert!((e - eps).abs() / eps < 1e-6, "eps {eps} -> {e}");
            assert!((g - mu).abs() / mu < 1e-6, "mu {mu} -> {g}");
        }
    }

    #[test]
    fn sparsest_mixture_lower_bounds_discrete_truth() {
        // Lemma-style oracle: the two-point mixture through two points of a
        // discrete one-sided mixture CDF never overstates epsilon
        let m = DiscreteOneSidedMixture::new(0.2, vec![(1.0, 0.5), (3.0, 0.5)]).unwrap();
        let (a, b) = (m.cdf(1.0), m.cdf(2.0));
        let (eps_star, _) = two_point_through(1.0, a, 2.0, b).unwrap();
        assert!(eps_star <= 0.2 + 1e-12, "eps* = {eps_star}");
    }

    #[test]
    fn grid_shapes() {
        let g = Grid::new(10_000_000).unwrap();
        assert_eq!(g.points().len(), 33);
        assert_eq!(g.points()[0], 0.0);
        assert!((g.spacing() - 0.17612789223079019).abs() < 1e-15);
        assert!((g.points()[32] - 5.636092551385286).abs() < 1e-12);
        let g = Grid::new(10_000).unwrap();
        assert_eq!(g.points().len(), 19);
        assert!((g.spacing() - 0.23299530089232804).abs() < 1e-15);
        assert!(Grid::new(1).is_err());
        let g = Grid::new(2).unwrap();
        assert_eq!(g.points().len(), 2);
    }

    #[test]
    fn cjl_small_instance_frozen() {
        // frozen by exhaustive hand computation: both pair targets fall below
        // the attainable D range, so both means clamp to sqrt(2 ln 4)
        let s = SortedSample::from_unsorted(vec![-0.5, 0.3, 1.0, 2.5]).unwrap();
        let r = cjl_estimate(&s, 0.5);
        assert!((r.eps_hat - 0.28591350644869479).abs() < 1e-12, "eps={}", r.eps_hat);
        assert_eq!(r.winner, Some(0));
        assert_eq!(r.pairs.len(), 2);
        let cap = (2.0 * 4f64.ln()).sqrt();
        for p in &r.pairs {
            assert!((p.mu_hat.unwrap() - cap).abs() < 1e-12);
        }
        assert!((r.pairs[1].eps_hat - 0.179717025025415).abs() < 1e-12);
    }

    // deterministic n=50 sample: mixture quantiles of (eps=0.4, mu=2.5) at
    // levels (i + 1/2)/50 — tracks the true CDF closely
    const SAMPLE_50: [f64; 50] = [
        -2.128074914698382, -1.6449634818233958, -1.3832182852044224, -1.1921941800805873,
        -1.0370121117357702, -0.9035703708677804, -0.7846605284291224, -0.6760565826137138,
        -0.5750410872268384, -0.47974311628753225, -0.3888029418383706, -0.30118644296751595,
        -0.21607502091886743, -0.1327964923332385, -0.050779557044748784, 0.030477504179533838,
        0.11142916759848716, 0.19249909765416476, 0.2740924410677667, 0.35660492228127094,
        0.4404290561874748, 0.5259572352283425, 0.6135808658593923, 0.7036840963002848,
        0.7966300709477655, 0.8927373515398348, 0.9922447928919486, 1.0952657758897808,
        1.2017382818059843, 1.3113854260175501, 1.4237078185199357, 1.5380268309166474,
        1.653580966188575, 1.769652233429974, 1.8856837610321562, 2.0013569884527684,
        2.1166201573530676, 2.231681343462715, 2.3469879819187236, 2.4632128519307948,
        2.5812614866950025, 2.702314074709004, 2.827919843541013, 2.9601785198874304,
        3.10208500045541, 3.2582216408909432, 3.4363064181471814, 3.651300512451489,
        3.939963383322491, 4.460069136687868,
    ];

    #[test]
    fn cjl_frozen_rich_instance() {
        let s = SortedSample::from_unsorted(SAMPLE_50.to_vec()).unwrap();
        let r = cjl_estimate(&s, 0.1);
        assert!((r.eps_hat - 0.39959259114555854).abs() < 1e-9, "eps={}", r.eps_hat);
        assert_eq!(r.winner, Some(3));
        let winner = &r.pairs[3];
        // the winning pair is genuinely solved, not clamped
        assert!((winner.mu_hat.unwrap() - 2.48149882023259).abs() < 1e-6);
        assert!(!r.clamped);
        // true epsilon was 0.4: the bound stays below it on this sample
        assert!(r.eps_hat <= 0.4);
        // wider envelope: every pair clamps to sqrt(2 ln 50) and the bound drops
        let r = cjl_estimate(&s, 1.0);
        assert!((r.eps_hat - 0.30546500937751264).abs() < 1e-12, "eps={}", r.eps_hat);
        assert_eq!(r.winner, Some(3));
        let cap = (2.0 * 50f64.ln()).sqrt();
        assert!((r.pairs[3].mu_hat.unwrap() - cap).abs() < 1e-12);
    }

    #[test]
    fn cjl_monotone_in_envelope_level() {
        let s = SortedSample::from_unsorted(SAMPLE_50.to_vec()).unwrap();
        let mut prev = f64::INFINITY;
        for k in 0..12 {
            let a = 0.05 * k as f64;
            let e = cjl_estimate(&s, a).eps_hat;
            assert!(e <= prev + 1e-12, "a={a}: {e} > {prev}");
            prev = e;
        }
    }

    #[test]
    fn cjl_huge_envelope_gives_zero() {
        let s = SortedSample::from_unsorted(SAMPLE_50.to_vec()).unwrap();
        // a_n so large that the upper envelope exceeds Phi everywhere
        let r = cjl_estimate(&s, 1e3);
        assert_eq!(r.eps_hat, 0.0);
        assert_eq!(r.winner, None);
    }

    #[test]
    fn y_n_frozen_on_rich_sample() {
        let s = SortedSample::from_unsorted(SAMPLE_50.to_vec()).unwrap();
        let m = TwoPointMixture::new(0.4, 2.5).unwrap();
        let y = crate::empirical::y_n_statistic(&s, move |t| m.cdf(t));
        assert!((y - 0.18824415287446421).abs() < 1e-10, "y={y}");
    }

    const UNIFORMS_20: [f64; 20] = [
        0.003952847075210474, 0.02053959590644373, 0.04419417382415922, 0.07320775232173161,
        0.1067268710306828, 0.14421121662339584, 0.18527850657860992, 0.22963966338592295,
        0.27706610222111255, 0.32737115786214277, 0.3803986395874728, 0.43601533803296416,
        0.49410588440130926, 0.5545690894739806, 0.617315255764832, 0.6822641533892866,
        0.7493434626391292, 0.8184875533567997, 0.8896365128522997, 0.9627353608339105,
    ];

    #[test]
    fn mr_frozen_values() {
        let u = SortedSample::from_sorted(UNIFORMS_20.to_vec()).unwrap();
        let mr = mr_lower_bound(&u, 0.8);
        assert!((mr - 0.13356199674917853).abs() < 1e-12, "mr={mr}");
        let plus = mr_plus_lower_bound(&u, 0.8);
        assert!((plus - 0.09522032644906135).abs() < 1e-12, "mr+={plus}");
    }

    #[test]
    fn mr_hand_cases() {
        let u = SortedSample::from_sorted(vec![0.2, 0.6]).unwrap();
        assert_eq!(mr_lower_bound(&u, 0.0), 1.0);
        assert!((mr_plus_lower_bound(&u, 0.0) - 0.4).abs() < 1e-15);
        // penalty large enough that the numerator is negative everywhere
        assert_eq!(mr_lower_bound(&u, 50.0), 0.0);
        assert_eq!(mr_plus_lower_bound(&u, 50.0), 0.0);
    }

    #[test]
    fn mr_plus_never_exceeds_mr_when_positive() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let n = rng.random_range(5..200);
            let mut us: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
            us.sort_unstable_by(f64::total_cmp);
            let u = SortedSample::from_sorted(us).unwrap();
            let a: f64 = rng.random_range(0.0..3.0);
            let mr = mr_lower_bound(&u, a);
            let plus = mr_plus_lower_bound(&u, a);
            if mr > 0.0 {
                assert!(plus <= mr + 1e-12, "mr={mr} mr+={plus}");
            }
        }
    }

    #[test]
    fn survival_transform_reverses_and_sorts() {
        let s = SortedSample::from_unsorted(vec![-1.0, 0.0, 2.0]).unwrap();
        let u = survival_transform(&s);
        assert_eq!(u.len(), 3);
        assert!((u.values()[0] - normal::survival(2.0)).abs() < 1e-16);
        assert!((u.values()[2] - normal::survival(-1.0)).abs() < 1e-16);
        assert!(u.values().windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn oracle_cjl_identities() {
        let m = TwoPointMixture::new(0.01, 2.0).unwrap();
        // a_n = 0 with the exact CDF and the true mu returns exactly epsilon
        for t in [0.5, 1.0, 2.0, 3.0] {
            let v = oracle_cjl_approx(t, |x| m.cdf(x), 2.0, 0.0, 1000);
            assert!((v - 0.01).abs() < 1e-12, "t={t}: {v}");
        }
    }

    #[test]
    fn oracle_mr_identity_and_downward_bias() {
        let eps = 0.01;
        let mu = 2.0;
        let m = TwoPointMixture::new(eps, mu).unwrap();
        // a* = 0 with the exact CDF: eps * (Phi(t) - Phi(t - mu)) / Phi(t),
        // strictly below eps — the built-in bias of the competitor
        for t in [-1.0, 0.0, 1.0, 2.5] {
            let v = oracle_mr_approx(t, |x| m.cdf(x), 0.0, 1000);
            let want = eps * normal::cdf_diff(t, t - mu) / normal::cdf(t);
            assert!((v - want).abs() < 1e-14, "t={t}");
            assert!(v < eps);
        }
    }

    #[test]
    fn oracle_cjl_informative_threshold_is_near_argmax() {
        // at (beta, r) = (4/7, 1/2), n = 1e6, the closed-form threshold
        // should score within 25% of the best grid value of the approximation
        let cal = crate::mixture::SparseCalibration::new(1_000_000, 4.0 / 7.0, 0.5).unwrap();
        let m = cal.mixture();
        let a_n = 2.0;
        let t_star = crate::mixture::informative_threshold_cjl(&cal);
        let hi = (2.0 * 1_000_000f64.ln()).sqrt();
        let mut best = f64::MIN;
        for k in 0..=2000 {
            let t = hi * k as f64 / 2000.0;
            if t <= 0.0 {
                continue;
            }
            let v = oracle_cjl_approx(t, |x| m.cdf(x), m.mu(), a_n, 1_000_000);
            best = best.max(v);
        }
        let at_star = oracle_cjl_approx(t_star, |x| m.cdf(x), m.mu(), a_n, 1_000_000);
        assert!(best > 0.0);
        assert!(at_star >= 0.75 * best, "at t*: {at_star} vs max {best}");
    }

    #[test]
    fn underestimation_coupling_when_truth_inside_envelope() {
        // whenever the true CDF lies inside the envelope at all grid points,
        // the estimate cannot exceed the true epsilon
        let m = TwoPointMixture::new(0.15, 2.2).unwrap();
        let mut checked = 0;
        for seed in 0..30u64 {
            let s = crate::mixture::sample(&m, 400, crate::mixture::SamplingMode::Binomial, seed);
            let grid = Grid::new(400).unwrap();
            let a_n = 2.5;
            let inside = grid.points().iter().all(|&t| {
                let b = envelope(s.ecdf_at(t), a_n, 400);
                let f = m.cdf(t);
                b.lower <= f && f <= b.upper
            });
            if inside {
                checked += 1;
                let r = cjl_estimate(&s, a_n);
                assert!(r.eps_hat <= 0.15 + 1e-12, "seed {seed}: {}", r.eps_hat);
            }
        }
        assert!(checked > 0, "no replicate had the truth inside the envelope");
    }
}
