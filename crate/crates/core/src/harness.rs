//! Independent checks on the pricing engines.
//!
//! The oracle re-derives geometric prices by brute force, sharing no code
//! with the solvers beyond claim validation and golden-section search. The
//! simulators estimate long-run growth and log-normal moments by Monte
//! Carlo. Every path draws from its own ChaCha stream keyed by
//! `(seed, path_index)` and partial sums are combined in a fixed pairwise
//! tree, so results are bit-identical whatever the thread count.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::claim::{DiscreteClaim, Market};
use crate::error::{Error, Result};
use crate::lognormal::LognormalSpec;
use crate::numerics::golden_section_max;

/// Candidate prices per refinement level of the oracle.
pub const ORACLE_U_POINTS: usize = 2000;
pub const ORACLE_LEVELS: usize = 3;
/// Fractions scanned per price before local refinement.
pub const ORACLE_Z_POINTS: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub n_paths: usize,
    /// Draws per path for discrete claims.
    pub n_periods: usize,
    pub seed: u64,
    /// Brownian increment length for continuous paths.
    pub time_step: f64,
}

impl SimulationConfig {
    pub fn new(n_paths: usize, n_periods: usize, seed: u64, time_step: f64) -> Result<Self> {
        let config = Self {
            n_paths,
            n_periods,
            seed,
            time_step,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_paths == 0 || self.n_periods == 0 {
            return Err(Error::InvalidSpec("simulation needs at least one path and one period".into()));
        }
        if !(self.time_step > 0.0 && self.time_step.is_finite()) {
            return Err(Error::InvalidSpec("time step must be positive".into()));
        }
        Ok(())
    }

    pub fn samples(&self) -> usize {
        self.n_paths * self.n_periods
    }
}

impl Default for SimulationConfig {
    /// 10⁶ draws: 1000 paths of 1000 periods.
    fn default() -> Self {
        Self {
            n_paths: 1000,
            n_periods: 1000,
            seed: 20_240_601,
            time_step: 1.0,
        }
    }
}

/// Sample estimate of a growth factor `exp(E log R)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthEstimate {
    pub growth: f64,
    /// Delta-method standard error of `growth`.
    pub std_error: f64,
    pub samples: usize,
}

/// One line of a verification report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub check_name: String,
    pub computed: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckRecord {
    pub fn new(check_name: impl Into<String>, computed: f64, expected: f64, tolerance: f64) -> Self {
        Self {
            check_name: check_name.into(),
            computed,
            expected,
            tolerance,
            pass: (computed - expected).abs() <= tolerance,
        }
    }

    /// Membership of `[lo, hi]`, recorded as midpoint and half-width.
    pub fn within(check_name: impl Into<String>, computed: f64, lo: f64, hi: f64) -> Self {
        Self::new(check_name, computed, 0.5 * (lo + hi), 0.5 * (hi - lo))
    }
}

/// Sum in a fixed binary tree over the slice.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        xs.iter().sum()
    } else {
        let (a, b) = xs.split_at(xs.len() / 2);
        pairwise_sum(a) + pairwise_sum(b)
    }
}

fn path_rng(seed: u64, path: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(path as u64);
    rng
}

/// Per-path sums of `f` over the path's samples, then a pairwise reduction
/// of each moment.
fn simulate_moments<const K: usize, F>(n_paths: usize, f: F) -> [f64; K]
where
    F: Fn(usize) -> [f64; K] + Send + Sync,
{
    let per_path: Vec<[f64; K]> = (0..n_paths).into_par_iter().map(f).collect();
    std::array::from_fn(|k| pairwise_sum(&per_path.iter().map(|m| m[k]).collect::<Vec<_>>()))
}

fn growth_estimate(sum: f64, sum_sq: f64, n: usize) -> GrowthEstimate {
    let n_f = n as f64;
    let mean = sum / n_f;
    let var = if n > 1 {
        ((sum_sq - n_f * mean * mean) / (n_f - 1.0)).max(0.0)
    } else {
        0.0
    };
    let growth = mean.exp();
    GrowthEstimate {
        growth,
        std_error: growth * (var / n_f).sqrt(),
        samples: n,
    }
}

/// Maximal log-growth at price `u` by a dense fraction scan refined with
/// golden-section search around the best cell. `-inf` if nothing is
/// admissible.
fn max_log_growth(payoffs: &[f64], probs: &[f64], h_min: f64, u: f64) -> f64 {
    let log_growth = |z: f64| -> f64 {
        let mut acc = 0.0;
        for (&h, &p) in payoffs.iter().zip(probs) {
            let rel = 1.0 + z * (h / u - 1.0);
            if rel <= 0.0 {
                return f64::NEG_INFINITY;
            }
            acc += p * rel.ln();
        }
        acc
    };

    // Wealth stays positive while 1 + z (h_min/u - 1) > 0.
    let (z_max, closed) = if h_min > 0.0 {
        (1.0, true)
    } else {
        ((u / (u - h_min)).min(1.0), h_min == 0.0 || u / (u - h_min) > 1.0)
    };
    let last = if closed { ORACLE_Z_POINTS } else { ORACLE_Z_POINTS - 1 };
    let step = z_max / ORACLE_Z_POINTS as f64;

    let (best_k, _) = (0..=last)
        .map(|k| (k, log_growth(k as f64 * step)))
        .fold((0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });

    let lo = best_k.saturating_sub(1) as f64 * step;
    let hi = if best_k + 1 <= last {
        (best_k + 1) as f64 * step
    } else if closed {
        z_max
    } else {
        z_max * (1.0 - 1e-12)
    };
    let (_, refined) = golden_section_max(log_growth, (lo, hi), 1e-9 * z_max);
    refined.max(log_growth(best_k as f64 * step))
}

/// Brute-force geometric price: the `u` at which the maximal growth factor
/// crosses `1 + r`.
///
/// Maximal growth is non-increasing in `u`, so each level binary-searches
/// a `2000`-point grid for the crossing cell and the next level subdivides
/// that cell. The search runs over `(1e-9 E/(1+r), E/(1+r)]`; by Jensen no
/// crossing lies above. Stops once the cell is narrower than
/// `grid_resolution` or after three levels, returning the cell midpoint.
pub fn oracle_geometric_price(claim: &DiscreteClaim, market: Market, grid_resolution: f64) -> Result<f64> {
    let mean = claim.expectation();
    if mean <= 0.0 {
        return Err(Error::NonPositiveExpectation(mean));
    }
    let (payoffs, probs): (Vec<f64>, Vec<f64>) = claim.support().map(|o| (o.payoff, o.prob)).unzip();
    let h_min = claim.min_payoff();
    let target = market.growth_factor().ln();
    let g = |u: f64| max_log_growth(&payoffs, &probs, h_min, u);

    let mut hi = mean / market.growth_factor();
    if g(hi) >= target {
        return Ok(hi);
    }
    let mut lo = 1e-9 * hi;
    let g_lo = g(lo);
    if g_lo < target {
        return Err(Error::NoCrossing { best: g_lo.exp() });
    }

    for _ in 0..ORACLE_LEVELS {
        if hi - lo <= grid_resolution {
            break;
        }
        // Invariant: g(grid[i_lo]) ≥ target > g(grid[i_hi]).
        let width = (hi - lo) / ORACLE_U_POINTS as f64;
        let (mut i_lo, mut i_hi) = (0usize, ORACLE_U_POINTS);
        while i_hi - i_lo > 1 {
            let mid = (i_lo + i_hi) / 2;
            if g(lo + mid as f64 * width) >= target {
                i_lo = mid;
            } else {
                i_hi = mid;
            }
        }
        let next_lo = lo + i_lo as f64 * width;
        let next_hi = if i_hi == ORACLE_U_POINTS { hi } else { lo + i_hi as f64 * width };
        lo = next_lo;
        hi = next_hi;
    }
    Ok(0.5 * (lo + hi))
}

/// Long-run growth factor of investing fraction `z` of wealth in a claim
/// bought at `u`, estimated over `n_paths × n_periods` i.i.d. draws.
pub fn simulate_growth(claim: &DiscreteClaim, u: f64, z: f64, config: &SimulationConfig) -> Result<GrowthEstimate> {
    config.validate()?;
    let (payoffs, probs): (Vec<f64>, Vec<f64>) = claim.support().map(|o| (o.payoff, o.prob)).unzip();
    let log_rel: Vec<f64> = payoffs
        .iter()
        .map(|&h| (1.0 + z * (h / u - 1.0)).ln())
        .collect();
    if log_rel.iter().any(|l| !l.is_finite()) {
        return Err(Error::DomainViolation { u, z });
    }
    let pick = WeightedIndex::new(&probs).map_err(|_| Error::EmptyClaim)?;

    let [sum, sum_sq] = simulate_moments(config.n_paths, |path| {
        let mut rng = path_rng(config.seed, path);
        let mut acc = [0.0; 2];
        for _ in 0..config.n_periods {
            let l = log_rel[pick.sample(&mut rng)];
            acc[0] += l;
            acc[1] += l * l;
        }
        acc
    });
    Ok(growth_estimate(sum, sum_sq, config.samples()))
}

/// Draws `W_t` from Gaussian increments of length `time_step`.
fn brownian_endpoint(rng: &mut ChaCha8Rng, t: f64, time_step: f64) -> f64 {
    let mut w = 0.0;
    let mut elapsed = 0.0;
    while elapsed < t {
        let dt = time_step.min(t - elapsed);
        let n: f64 = StandardNormal.sample(rng);
        w += dt.sqrt() * n;
        elapsed += dt;
    }
    w
}

/// Growth factor of investing fraction `z` in `S_t` bought at `u`, with
/// one Brownian path per sample.
pub fn simulate_lognormal_growth(
    spec: &LognormalSpec,
    u: f64,
    z: f64,
    config: &SimulationConfig,
) -> Result<GrowthEstimate> {
    spec.validate()?;
    config.validate()?;
    let drift = (spec.r - spec.c) * spec.t;
    let [sum, sum_sq] = simulate_moments(config.n_paths, |path| {
        let mut rng = path_rng(config.seed, path);
        let w = brownian_endpoint(&mut rng, spec.t, config.time_step);
        let h = spec.s0 * (drift + spec.sigma * w).exp();
        let l = (1.0 + z * (h / u - 1.0)).ln();
        [l, l * l]
    });
    if !sum.is_finite() {
        return Err(Error::DomainViolation { u, z });
    }
    Ok(growth_estimate(sum, sum_sq, config.n_paths))
}

/// `E|f - g|²` for `f = S1` with down-probability `q = 1/n` and the
/// constant `g = S0 (1 + b)`, alongside `S0² (b - a)² / n`.
pub fn l2_identity_check(s0: f64, a: f64, b: f64, n: usize) -> (f64, f64) {
    let q = 1.0 / n as f64;
    let p = 1.0 - q;
    let g = s0 * (1.0 + b);
    let lhs = p * (s0 * (1.0 + b) - g).powi(2) + q * (s0 * (1.0 + a) - g).powi(2);
    let rhs = s0 * s0 * (b - a).powi(2) / n as f64;
    (lhs, rhs)
}

/// Monte-Carlo checks of the martingale-measure moments, with `S0 = 1`:
/// `E(S_t) = e^{rt}`, `V(S_t)/E(S_t)² = e^{σ²t} - 1` and `E(G_t) = 1` for
/// `G_t = exp(-σ²t/2 + σ W_t)`. Tolerances are four standard errors.
pub fn lognormal_moment_check(sigma: f64, r: f64, t: f64, config: &SimulationConfig) -> Result<Vec<CheckRecord>> {
    config.validate()?;
    let [s_sum, s_sq, s_cube, s_quad] = simulate_moments(config.n_paths, |path| {
        let mut rng = path_rng(config.seed, path);
        let w = brownian_endpoint(&mut rng, t, config.time_step);
        let g = (-0.5 * sigma * sigma * t + sigma * w).exp();
        [g, g * g, g * g * g, g * g * g * g]
    });
    let n = config.n_paths as f64;
    let (m1, m2, m3, m4) = (s_sum / n, s_sq / n, s_cube / n, s_quad / n);
    let growth = (r * t).exp();

    let var_g = (m2 - m1 * m1) * n / (n - 1.0).max(1.0);
    let se_mean = (var_g / n).sqrt();

    // V/E² = m2/m1² - 1; delta method over the sample means of (G, G²).
    let ratio = m2 / (m1 * m1) - 1.0;
    let (d1, d2) = (-2.0 * m2 / (m1 * m1 * m1), 1.0 / (m1 * m1));
    let cov12 = m3 - m1 * m2;
    let var22 = m4 - m2 * m2;
    let se_ratio = ((d1 * d1 * var_g + 2.0 * d1 * d2 * cov12 + d2 * d2 * var22) / n).max(0.0).sqrt();

    Ok(vec![
        CheckRecord::new("lognormal_mean", growth * m1, growth, 4.0 * growth * se_mean),
        CheckRecord::new(
            "lognormal_relative_variance",
            ratio,
            (sigma * sigma * t).exp_m1(),
            4.0 * se_ratio,
        ),
        CheckRecord::new("martingale_mean", m1, 1.0, 4.0 * se_mean),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::claim::TwoPointClaim;
    use crate::growth::geometric_price_two_point;

    fn two_point(alpha: f64, beta: f64, p: f64) -> DiscreteClaim {
        TwoPointClaim::new(alpha, beta, p).unwrap().to_discrete()
    }

    fn small_config(seed: u64) -> SimulationConfig {
        SimulationConfig::new(64, 500, seed, 1.0).unwrap()
    }

    #[test]
    fn oracle_published_prices() {
        let market = Market::new(0.2).unwrap();
        let u = oracle_geometric_price(&two_point(12.0, 1.1, 0.99), market, 1e-9).unwrap();
        assert!((u - 9.764).abs() < 1e-3, "{u}");
        let u = oracle_geometric_price(&two_point(108.0, -1.0, 0.99), market, 1e-9).unwrap();
        assert!((u - 86.079).abs() < 1e-3, "{u}");
    }

    #[test]
    fn oracle_constant_claim() {
        let market = Market::new(0.05).unwrap();
        let u = oracle_geometric_price(&DiscreteClaim::constant(21.0).unwrap(), market, 1e-9).unwrap();
        assert!((u - 20.0).abs() <= 1e-9);
    }

    #[test]
    fn oracle_matches_solver_on_three_outcomes() {
        use crate::growth::geometric_price_general;
        let claim = DiscreteClaim::from_pairs(&[(2.7, 0.25), (1.0, 0.5), (0.3, 0.25)]).unwrap();
        let market = Market::new(0.05).unwrap();
        let oracle = oracle_geometric_price(&claim, market, 1e-10).unwrap();
        let solver = geometric_price_general(&claim, market).unwrap().price().unwrap();
        assert!((oracle - solver).abs() < 1e-6, "{oracle} vs {solver}");
    }

    #[test]
    fn oracle_reports_missing_crossing() {
        // (1 - E/alpha)^q (1 - E/beta)^p = 1.160 ≤ 1.2.
        let claim = two_point(2.0, -1.0, 0.6);
        let err = oracle_geometric_price(&claim, Market::new(0.2).unwrap(), 1e-9).unwrap_err();
        match err {
            Error::NoCrossing { best } => assert!((best - 1.160).abs() < 1e-3, "{best}"),
            other => panic!("{other:?}"),
        }
        let solver = geometric_price_two_point(&TwoPointClaim::new(2.0, -1.0, 0.6).unwrap(), Market::new(0.2).unwrap());
        assert!(solver.unwrap().price().is_none());
    }

    #[test]
    fn zero_fraction_grows_by_exactly_one() {
        let est = simulate_growth(&two_point(12.0, 1.1, 0.99), 9.764, 0.0, &small_config(1)).unwrap();
        assert_eq!((est.growth, est.std_error), (1.0, 0.0));
    }

    #[test]
    fn samuelson_growth_matches_closed_form() {
        let config = SimulationConfig::default();
        let est = simulate_growth(&two_point(2.7, 0.3, 0.5), 1.0, 50.0 / 119.0, &config).unwrap();
        let exact = 12.0 / 119f64.sqrt();
        assert_eq!(est.samples, 1_000_000);
        assert!((est.growth - exact).abs() < 4.0 * est.std_error, "{} ± {}", est.growth, est.std_error);
    }

    #[test]
    fn seeded_runs_are_bit_identical_across_thread_counts() {
        let claim = two_point(2.7, 0.3, 0.5);
        let run = |threads: usize| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| simulate_growth(&claim, 1.0, 0.4, &small_config(7)).unwrap())
        };
        let single = run(1);
        assert_eq!(single.growth.to_bits(), run(4).growth.to_bits());
        assert_eq!(single.std_error.to_bits(), run(3).std_error.to_bits());
        assert_ne!(single.growth, simulate_growth(&claim, 1.0, 0.4, &small_config(8)).unwrap().growth);
    }

    #[test]
    fn pairwise_sum_is_exact_on_integers() {
        let xs: Vec<f64> = (1..=1000).map(f64::from).collect();
        assert_eq!(pairwise_sum(&xs), 500_500.0);
        assert_eq!(pairwise_sum(&[]), 0.0);
    }

    #[test]
    fn l2_identity_examples() {
        let (lhs, rhs) = l2_identity_check(1.0, 0.1, 11.0, 100);
        assert!((lhs - 1.1881).abs() < 1e-12 && (rhs - 1.1881).abs() < 1e-12);
        let (lhs, _) = l2_identity_check(1.0, 0.1, 11.0, 1_000_000_000);
        assert!(lhs < 1e-6);
        assert_eq!(l2_identity_check(2.0, 0.3, 0.3, 10), (0.0, 0.0));
    }

    #[test]
    fn moment_identities_hold() {
        let config = SimulationConfig::new(1_000_000, 1, 11, 1.0).unwrap();
        let report = lognormal_moment_check(0.4, 0.04, 2.0, &config).unwrap();
        assert!((report[1].expected - 0.3771).abs() < 1e-4);
        for check in &report {
            assert!(check.pass, "{check:?}");
        }
    }

    #[test]
    fn vanishing_volatility_has_no_variance() {
        let config = SimulationConfig::new(1000, 1, 3, 1.0).unwrap();
        let report = lognormal_moment_check(1e-8, 0.04, 1.0, &config).unwrap();
        assert!(report[1].computed.abs() < 1e-12);
    }

    #[test]
    fn check_record_json() {
        let rec = CheckRecord::new("x", 1.0, 1.5, 0.25);
        let json = serde_json::to_string(&rec).unwrap();
        assert_eq!(json, r#"{"check_name":"x","computed":1.0,"expected":1.5,"tolerance":0.25,"pass":false}"#);
        assert!(CheckRecord::within("band", 1.0002, 1.0, 1.00033).pass);
        assert!(!CheckRecord::within("band", 0.9999, 1.0, 1.00033).pass);
    }
}
