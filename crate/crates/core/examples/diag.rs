use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sparsemix::estimator::{d_ratio, solve_mu, two_point_through};
use sparsemix::mixture::{DiscreteOneSidedMixture, GaussianMixture};

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let mut worst: (f64, Option<(DiscreteOneSidedMixture, f64, f64)>) = (f64::NEG_INFINITY, None);
    for _ in 0..1000 {
        let eps: f64 = rng.random_range(0.01..1.0);
        let n_atoms: usize = rng.random_range(1..=5);
        let raw: Vec<f64> = (0..n_atoms).map(|_| rng.random_range(0.05..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let atoms: Vec<(f64, f64)> = raw
            .iter()
            .map(|w| (rng.random_range(0.05..5.0), w / total))
            .collect();
        let m = DiscreteOneSidedMixture::new(eps, atoms).unwrap();
        let tau: f64 = rng.random_range(0.0..3.8);
        let tau_prime = tau + rng.random_range(0.05..(4.0 - tau).max(0.1));
        let (eps_star, _) = two_point_through(tau, m.cdf(tau), tau_prime, m.cdf(tau_prime)).unwrap();
        if eps_star - eps > worst.0 {
            worst = (eps_star - eps, Some((m, tau, tau_prime)));
        }
    }
    let (excess, info) = worst;
    let (m, tau, tp) = info.unwrap();
    println!("worst excess {excess:.3e}: eps={} atoms={:?} tau={tau} tau'={tp}", m.epsilon(), m.atoms());
    let (a, b) = (m.cdf(tau), m.cdf(tp));
    let target = (sparsemix::normal::cdf(tau) - a) / (sparsemix::normal::cdf(tp) - b);
    let mu = solve_mu(target, tau, tp).unwrap();
    println!("  target={target:.17} mu_hat={mu:.17}");
    println!("  D at mu_hat = {:.17}", d_ratio(mu, tau, tp));
    for d in [-1e-7f64, 0.0, 1e-7] {
        println!("  D(mu{d:+e}) - target = {:+.3e}", d_ratio(mu + d, tau, tp) - target);
    }
}
