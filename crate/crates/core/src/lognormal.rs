//! Geometric prices of the log-normal asset `S_t = S0 exp((r - c) t + σ W_t)`.
//!
//! The growth-optimal price `u` and fraction `z` at horizon `t` solve
//!
//! ```text
//! E[ log(S_t z/u - z + 1) ] = r t
//! E[ (S_t - u) / (S_t z - u z + u) ] = 0
//! ```
//!
//! with `W_t ~ N(0, t)`. Expectations are Gauss-Hermite sums after the
//! substitution `x = sqrt(2t) s`, and the pair is solved by damped 2-D
//! Newton.
//!
//! Full investment is optimal exactly when `E[1/S_t] exp(E[log S_t]) ≤ e^{rt}`,
//! which reduces to `σ²/2 ≤ r` whatever the drift offset `c`. In that
//! regime the price is `S0 e^{-ct}`, i.e. `S0` when `c = 0`. For
//! `σ²/2 > r` the price sits above `S0` unless the drift is lowered;
//! [`LognormalPricer::calibrate`] finds the offset that pins the price
//! floor at `S0` over a horizon grid.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{gauss_hermite_rule, newton_1d, newton_2d, NumericsError, QuadratureRule, SolverConfig, System2};

pub const DEFAULT_QUADRATURE_ORDER: usize = 96;
pub const DEFAULT_CALIBRATION_GRID: usize = 16;

/// Headroom above `σ²/2 - r` searched for the drift offset.
const CALIBRATION_MARGIN: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LognormalSpec {
    pub s0: f64,
    pub r: f64,
    pub sigma: f64,
    /// Drift offset subtracted from `r`.
    pub c: f64,
    pub t: f64,
}

impl LognormalSpec {
    pub fn new(s0: f64, r: f64, sigma: f64, c: f64, t: f64) -> Result<Self> {
        let spec = Self { s0, r, sigma, c, t };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |what: &str| Err(Error::InvalidSpec(what.to_string()));
        if !(self.s0 > 0.0 && self.s0.is_finite()) {
            return fail("S0 must be positive");
        }
        if !self.r.is_finite() {
            return fail("r must be finite");
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return fail("sigma must be positive");
        }
        if !(self.c >= 0.0 && self.c.is_finite()) {
            return fail("drift offset c must be non-negative");
        }
        if !(self.t > 0.0 && self.t.is_finite()) {
            return fail("horizon t must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VolatilityRegime {
    /// `σ²/2 ≤ r`: full investment is optimal.
    Small,
    /// `σ²/2 > r`: the optimal fraction is interior.
    Large,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LognormalQuote {
    pub u: f64,
    pub z: f64,
    pub regime: VolatilityRegime,
    /// Growth equation residual `E[log(...)] - rt`.
    pub growth_residual: f64,
    /// First-order condition residual; for `z = 1` the violation of the
    /// boundary optimality condition (zero when it holds).
    pub foc_residual: f64,
    pub iterations: usize,
}

/// `σ²/2 ≤ r`, with a few ulps of slack so that `σ = 0.2, r = 0.02`
/// lands on the boundary despite `0.2²` rounding up.
pub fn is_small_volatility(sigma: f64, r: f64) -> bool {
    0.5 * sigma * sigma <= r + 4.0 * f64::EPSILON * r.abs()
}

pub fn regime(sigma: f64, r: f64) -> VolatilityRegime {
    if is_small_volatility(sigma, r) {
        VolatilityRegime::Small
    } else {
        VolatilityRegime::Large
    }
}

/// Outcome of a drift-correction calibration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub c: f64,
    /// Smallest and largest `u(t)/S0` over the grid at `c`.
    pub band_lo: f64,
    pub band_hi: f64,
    pub grid: Vec<f64>,
    /// Whether the sampled price floor was non-increasing in `c`; when it
    /// is not, the root is located by a fine scan before bisecting.
    pub monotone: bool,
}

/// One row of the calibration CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationRow {
    pub sigma: f64,
    pub r: f64,
    pub t_max: f64,
    pub c: f64,
    pub band_hi: f64,
    pub grid_size: usize,
    pub quadrature_nodes: usize,
}

/// `grid_size` evenly spaced horizons in `(0, t_max]`.
pub fn uniform_grid(t_max: f64, grid_size: usize) -> Vec<f64> {
    (1..=grid_size).map(|i| t_max * i as f64 / grid_size as f64).collect()
}

/// Quadrature sample of `S_t / S0`: values and probability weights.
struct Sample {
    ratio: Vec<f64>,
    prob: Vec<f64>,
    rt: f64,
}

impl Sample {
    fn new(rule: &QuadratureRule, r: f64, sigma: f64, c: f64, t: f64) -> Self {
        let scale = (2.0 * t).sqrt();
        let norm = std::f64::consts::PI.sqrt();
        let (ratio, prob) = rule
            .iter()
            .map(|(s, w)| (((r - c) * t + sigma * scale * s).exp(), w / norm))
            .unzip();
        Self { ratio, prob, rt: r * t }
    }

    fn expect(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.ratio.iter().zip(&self.prob).map(|(&h, &p)| p * f(h)).sum()
    }

    /// Growth-maximizing fraction at price ratio `v`. Every `h > 0`, so all
    /// of `[0, 1]` is admissible and the first-order condition is decreasing.
    fn optimal_fraction(&self, v: f64, config: &SolverConfig) -> Result<f64, NumericsError> {
        let foc = |z: f64| {
            let [_, f2] = self.residual([v, z]);
            let [_, [_, df2]] = self.jacobian([v, z]);
            (f2, df2)
        };
        if foc(0.0).0 <= 0.0 {
            return Ok(0.0);
        }
        if foc(1.0).0 >= 0.0 {
            return Ok(1.0);
        }
        newton_1d(foc, (0.0, 1.0), config)
    }

    /// Price ratio at which the maximal growth equals `rt`, by Newton on
    /// `v` with the fraction re-optimized at each step. The envelope
    /// theorem makes `∂F1/∂v` the total derivative. The root lies between
    /// the full-investment price and `E[h] e^{-rt}`.
    fn nested_solve(&self, config: &SolverConfig) -> Result<[f64; 2], NumericsError> {
        let lo = (self.expect(f64::ln) - self.rt).exp();
        let hi = self.expect(|h| h) * (-self.rt).exp();
        let outer = |v: f64| match self.optimal_fraction(v, config) {
            Ok(z) => {
                let [f1, _] = self.residual([v, z]);
                let [[df1, _], _] = self.jacobian([v, z]);
                (f1, df1)
            }
            Err(_) => (f64::NAN, f64::NAN),
        };
        let v = newton_1d(outer, (lo, hi), config)?;
        Ok([v, self.optimal_fraction(v, config)?])
    }
}

/// The optimality system in `(v, z)` with `v = u / S0`.
impl System2 for Sample {
    fn residual(&self, x: [f64; 2]) -> [f64; 2] {
        let [v, z] = x;
        let mut growth = 0.0;
        let mut foc = 0.0;
        for (&h, &p) in self.ratio.iter().zip(&self.prob) {
            let excess = h / v - 1.0;
            let rel = 1.0 + z * excess;
            growth += p * rel.ln();
            foc += p * excess / rel;
        }
        [growth - self.rt, foc]
    }

    fn jacobian(&self, x: [f64; 2]) -> [[f64; 2]; 2] {
        let [v, z] = x;
        let mut j = [[0.0; 2]; 2];
        for (&h, &p) in self.ratio.iter().zip(&self.prob) {
            let excess = h / v - 1.0;
            let rel = 1.0 + z * excess;
            let d_excess = -h / (v * v);
            j[0][0] += p * z * d_excess / rel;
            j[0][1] += p * excess / rel;
            j[1][0] += p * d_excess / (rel * rel);
            j[1][1] -= p * excess * excess / (rel * rel);
        }
        j
    }

    fn in_domain(&self, x: [f64; 2]) -> bool {
        let [v, z] = x;
        v > 0.0 && z > 0.0 && self.ratio.iter().all(|&h| 1.0 + z * (h / v - 1.0) > 0.0)
    }
}

/// Prices log-normal claims with a fixed quadrature rule.
#[derive(Debug, Clone)]
pub struct LognormalPricer {
    rule: Arc<QuadratureRule>,
    config: SolverConfig,
}

impl LognormalPricer {
    pub fn new(order: usize) -> Result<Self> {
        Ok(Self {
            rule: gauss_hermite_rule(order)?,
            config: SolverConfig::default(),
        })
    }

    pub fn with_config(mut self, config: SolverConfig) -> Self {
        self.config = config;
        self
    }

    pub fn quadrature_order(&self) -> usize {
        self.rule.order()
    }

    /// Geometric price. Returns `S0` exactly in the small-volatility
    /// regime with `c = 0`; otherwise solves the optimality system.
    pub fn price(&self, spec: &LognormalSpec) -> Result<LognormalQuote> {
        spec.validate()?;
        if spec.c == 0.0 && is_small_volatility(spec.sigma, spec.r) {
            return Ok(LognormalQuote {
                u: spec.s0,
                z: 1.0,
                regime: VolatilityRegime::Small,
                growth_residual: 0.0,
                foc_residual: 0.0,
                iterations: 0,
            });
        }
        self.solve(spec)
    }

    /// Solves the optimality system numerically with no closed-form
    /// shortcut.
    pub fn solve(&self, spec: &LognormalSpec) -> Result<LognormalQuote> {
        spec.validate()?;
        let sample = Sample::new(&self.rule, spec.r, spec.sigma, spec.c, spec.t);
        let regime = regime(spec.sigma, spec.r);

        // Full investment: u = exp(E log S_t - rt), optimal iff u ≤ 1/E[1/S_t].
        let mean_log = sample.expect(f64::ln);
        let mean_inv = sample.expect(f64::recip);
        let v_full = (mean_log - sample.rt).exp();
        if v_full * mean_inv <= 1.0 {
            let growth_residual = sample.expect(|h| (h / v_full).ln()) - sample.rt;
            return Ok(LognormalQuote {
                u: spec.s0 * v_full,
                z: 1.0,
                regime,
                growth_residual,
                foc_residual: 0.0,
                iterations: 0,
            });
        }

        // Seed with the best fraction at u = S0; if the joint iteration
        // stalls, restart it from the nested solution.
        let z0 = sample
            .optimal_fraction(1.0, &self.config)
            .map_err(Error::NewtonDivergence)?
            .clamp(1e-6, 1.0 - 1e-6);
        let solution = newton_2d(&sample, [1.0, z0], &self.config)
            .or_else(|_| {
                let seed = sample.nested_solve(&self.config)?;
                newton_2d(&sample, seed, &self.config)
            })
            .map_err(|e| match e {
                NumericsError::DomainExit { x } => Error::QuadratureDomainViolation {
                    u: spec.s0 * x[0],
                    z: x[1],
                },
                other => Error::NewtonDivergence(other),
            })?;
        let [v, z] = solution.root;
        let [growth_residual, foc_residual] = sample.residual(solution.root);
        Ok(LognormalQuote {
            u: spec.s0 * v,
            z,
            regime,
            growth_residual,
            foc_residual,
            iterations: solution.iterations,
        })
    }

    /// `E[1/h] exp(E[log h])` for `h = S_t`; full investment is optimal
    /// iff this is at most `e^{rt}`.
    pub fn full_investment_criterion(&self, spec: &LognormalSpec) -> f64 {
        let sample = Sample::new(&self.rule, spec.r, spec.sigma, spec.c, spec.t);
        sample.expect(f64::recip) * sample.expect(f64::ln).exp()
    }

    /// `e^{-rt} E[S_t]` when the drift equals `r` (martingale measure):
    /// `S0` for every volatility.
    pub fn martingale_price(&self, spec: &LognormalSpec) -> f64 {
        let drift_adjust = spec.sigma * spec.sigma / 2.0;
        let sample = Sample::new(&self.rule, spec.r - drift_adjust, spec.sigma, 0.0, spec.t);
        spec.s0 * (-spec.r * spec.t).exp() * sample.expect(|h| h)
    }

    /// `u(t; c)/S0` at each horizon. Grid points are priced in parallel;
    /// each is independent so the result matches a sequential run.
    pub fn price_ratios(&self, r: f64, sigma: f64, c: f64, grid: &[f64]) -> Result<Vec<f64>> {
        grid.par_iter()
            .map(|&t| Ok(self.solve(&LognormalSpec::new(1.0, r, sigma, c, t)?)?.u))
            .collect()
    }

    /// The largest drift offset `c ≥ 0` that keeps `u(t; c) ≥ S0` on every
    /// grid horizon, i.e. the root of `min_t u(t; c)/S0 = 1`.
    ///
    /// The floor is sampled over `[0, σ²/2 - r + margin]` first; when the
    /// samples are non-increasing the first sign change brackets the root,
    /// otherwise a 200-point scan does. Bisection finishes to `1e-12` and
    /// returns the feasible end of the bracket.
    pub fn calibrate(&self, r: f64, sigma: f64, grid: &[f64]) -> Result<Calibration> {
        if grid.is_empty() || grid.iter().any(|&t| !(t > 0.0)) {
            return Err(Error::InvalidSpec("calibration grid must be non-empty and positive".into()));
        }
        if is_small_volatility(sigma, r) {
            return Ok(Calibration {
                c: 0.0,
                band_lo: 1.0,
                band_hi: 1.0,
                grid: grid.to_vec(),
                monotone: true,
            });
        }

        let floor = |c: f64| -> Result<f64> {
            let ratios = self.price_ratios(r, sigma, c, grid)?;
            Ok(ratios.into_iter().fold(f64::INFINITY, f64::min) - 1.0)
        };

        let c_max = 0.5 * sigma * sigma - r + CALIBRATION_MARGIN;
        let sample_floor = |n: usize| -> Result<Vec<(f64, f64)>> {
            (0..=n)
                .map(|i| {
                    let c = c_max * i as f64 / n as f64;
                    Ok((c, floor(c)?))
                })
                .collect()
        };

        let mut samples = sample_floor(8)?;
        let monotone = samples.windows(2).all(|w| w[1].1 <= w[0].1);
        if !monotone {
            samples = sample_floor(200)?;
        }
        if samples[0].1 < 0.0 {
            return Err(Error::CalibrationFailure { c_max: 0.0 });
        }
        let idx = samples
            .iter()
            .position(|&(_, f)| f < 0.0)
            .ok_or(Error::CalibrationFailure { c_max })?;
        let (mut lo, mut hi) = (samples[idx - 1].0, samples[idx].0);

        while hi - lo > 1e-12 {
            let mid = 0.5 * (lo + hi);
            if floor(mid)? >= 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }

        let ratios = self.price_ratios(r, sigma, lo, grid)?;
        Ok(Calibration {
            c: lo,
            band_lo: ratios.iter().copied().fold(f64::INFINITY, f64::min),
            band_hi: ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            grid: grid.to_vec(),
            monotone,
        })
    }
}

/// [`LognormalPricer::price`] with the default 96-node rule.
pub fn geometric_price_lognormal(spec: &LognormalSpec) -> Result<LognormalQuote> {
    LognormalPricer::new(DEFAULT_QUADRATURE_ORDER)?.price(spec)
}

/// [`LognormalPricer::calibrate`] on `grid_size` even steps up to `t_max`.
pub fn calibrate_drift_correction(r: f64, sigma: f64, t_max: f64, grid_size: usize) -> Result<Calibration> {
    LognormalPricer::new(DEFAULT_QUADRATURE_ORDER)?.calibrate(r, sigma, &uniform_grid(t_max, grid_size))
}

/// `e^{-rt} E[S_t]` under `μ = r`.
pub fn martingale_price_lognormal(spec: &LognormalSpec) -> Result<f64> {
    spec.validate()?;
    Ok(LognormalPricer::new(DEFAULT_QUADRATURE_ORDER)?.martingale_price(spec))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::claim::{Market, TwoPointClaim};
    use crate::growth::geometric_price_two_point;
    use proptest::prelude::*;

    fn pricer() -> LognormalPricer {
        LognormalPricer::new(DEFAULT_QUADRATURE_ORDER).unwrap()
    }

    fn spec(r: f64, sigma: f64, c: f64, t: f64) -> LognormalSpec {
        LognormalSpec::new(1.0, r, sigma, c, t).unwrap()
    }

    #[test]
    fn small_volatility_check() {
        assert!(is_small_volatility(0.2, 0.02));
        assert!(!is_small_volatility(0.4, 0.04));
        assert!(is_small_volatility(0.1, 0.2));
    }

    #[test]
    fn spec_validation() {
        assert!(LognormalSpec::new(0.0, 0.04, 0.4, 0.0, 1.0).is_err());
        assert!(LognormalSpec::new(1.0, 0.04, 0.0, 0.0, 1.0).is_err());
        assert!(LognormalSpec::new(1.0, 0.04, 0.4, -0.1, 1.0).is_err());
        assert!(LognormalSpec::new(1.0, 0.04, 0.4, 0.0, 0.0).is_err());
    }

    #[test]
    fn large_volatility_band_with_published_offset() {
        let p = pricer();
        for t in [0.25, 0.5, 1.0, 1.5, 2.0] {
            let q = p.price(&spec(0.04, 0.4, 0.00616, t)).unwrap();
            assert_eq!(q.regime, VolatilityRegime::Large);
            assert!(q.u >= 1.0 && q.u < 1.00033 + 1e-5, "t={t}: {}", q.u);
            assert!(q.z > 0.0 && q.z < 1.0);
            assert!(q.growth_residual.abs() < 1e-8 && q.foc_residual.abs() < 1e-8);
        }
    }

    #[test]
    fn small_volatility_prices_at_spot() {
        for t in [0.1, 1.0, 5.0] {
            let q = pricer().price(&LognormalSpec::new(3.0, 0.2, 0.4, 0.0, t).unwrap()).unwrap();
            assert_eq!((q.u, q.z, q.regime), (3.0, 1.0, VolatilityRegime::Small));
            // The numerical path agrees.
            let solved = pricer().solve(&LognormalSpec::new(3.0, 0.2, 0.4, 0.0, t).unwrap()).unwrap();
            assert!((solved.u - 3.0).abs() < 1e-12 && solved.z == 1.0);
        }
    }

    #[test]
    fn small_volatility_with_offset_discounts_drift() {
        let q = pricer().price(&spec(0.2, 0.4, 0.01, 2.0)).unwrap();
        assert_eq!(q.z, 1.0);
        assert!((q.u - (-0.02f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn vanishing_horizon_prices_at_spot() {
        for (r, sigma, c) in [(0.04, 0.4, 0.00616), (0.2, 0.4, 0.0), (0.01, 0.5, 0.0)] {
            let q = pricer().price(&spec(r, sigma, c, 1e-6)).unwrap();
            assert!((q.u - 1.0).abs() < 1e-4, "{r},{sigma}: {}", q.u);
        }
    }

    #[test]
    fn regime_boundary_is_continuous() {
        // σ²/2 = r up to rounding.
        let (sigma, r) = (0.2, 0.02);
        for t in uniform_grid(2.0, 16) {
            let q = pricer().solve(&spec(r, sigma, 0.0, t)).unwrap();
            assert!((q.u - 1.0).abs() < 1e-6, "t={t}: {}", q.u);
        }
    }

    #[test]
    fn martingale_price_is_spot() {
        for (s0, sigma, t) in [(1.0, 0.4, 2.0), (7.5, 0.9, 0.3), (2.0, 1e-4, 1.0)] {
            let m = martingale_price_lognormal(&LognormalSpec::new(s0, 0.04, sigma, 0.0, t).unwrap()).unwrap();
            assert!((m - s0).abs() < 1e-12 * s0, "{m}");
        }
    }

    #[test]
    fn quadrature_refinement_is_stable() {
        let coarse = pricer();
        let fine = LognormalPricer::new(2 * DEFAULT_QUADRATURE_ORDER).unwrap();
        for t in [0.25, 1.0, 2.0] {
            for (r, sigma, c) in [(0.04, 0.4, 0.00616), (0.01, 0.5, 0.0)] {
                let a = coarse.price(&spec(r, sigma, c, t)).unwrap().u;
                let b = fine.price(&spec(r, sigma, c, t)).unwrap().u;
                assert!((a - b).abs() < 1e-8 * b, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn newton_residuals_decrease_to_tolerance() {
        let sample = Sample::new(&gauss_hermite_rule(96).unwrap(), 0.04, 0.4, 0.00616, 1.0);
        let sol = newton_2d(&sample, [1.0, 0.5], &SolverConfig::default()).unwrap();
        assert!(sol.history.windows(2).all(|w| w[1] < w[0]));
        assert!(sol.residual < 1e-12);
        let u = sol.root[0];
        assert!((1.0..1.00033 + 1e-5).contains(&u));
    }

    #[test]
    fn calibration_reproduces_offset() {
        let cal = calibrate_drift_correction(0.04, 0.4, 2.0, 16).unwrap();
        assert!((cal.c - 0.00616).abs() < 5e-4, "{}", cal.c);
        assert!(cal.band_lo >= 1.0 && cal.band_hi < 1.00033 + 1e-4);
        assert!(cal.monotone);
    }

    #[test]
    fn nested_solution_matches_joint_newton() {
        let config = SolverConfig::default();
        let rule = gauss_hermite_rule(96).unwrap();
        for (r, sigma, c, t) in [(0.04, 0.4, 0.00616, 1.0), (0.01, 0.5, 0.2, 0.5), (0.01, 0.3, 0.06, 1.0)] {
            let sample = Sample::new(&rule, r, sigma, c, t);
            let nested = sample.nested_solve(&config).unwrap();
            let joint = pricer().solve(&spec(r, sigma, c, t)).unwrap();
            assert!((nested[0] - joint.u).abs() < 1e-10, "{nested:?} vs {joint:?}");
            assert!((nested[1] - joint.z).abs() < 1e-7);
        }
    }

    #[test]
    fn low_rate_calibrations_converge() {
        for sigma in [0.3, 0.4, 0.5] {
            let cal = calibrate_drift_correction(0.01, sigma, 1.0, 16).unwrap();
            assert!(cal.band_lo >= 1.0 && cal.band_hi < 1.0052, "{sigma}: {cal:?}");
        }
    }

    #[test]
    fn calibration_in_small_volatility_is_trivial() {
        let cal = calibrate_drift_correction(0.2, 0.4, 2.0, 16).unwrap();
        assert_eq!((cal.c, cal.band_hi), (0.0, 1.0));
    }

    #[test]
    fn calibration_is_deterministic_across_threads() {
        let grid = uniform_grid(1.0, 8);
        let parallel = pricer().price_ratios(0.01, 0.5, 0.03, &grid).unwrap();
        let sequential: Vec<f64> = grid
            .iter()
            .map(|&t| pricer().solve(&spec(0.01, 0.5, 0.03, t)).unwrap().u)
            .collect();
        assert_eq!(parallel, sequential);
    }

    #[test]
    fn price_decreases_in_drift_offset() {
        let p = pricer();
        for t in [0.5, 2.0] {
            let us: Vec<f64> = (0..20)
                .map(|i| p.price(&spec(0.04, 0.4, 0.001 * i as f64, t)).unwrap().u)
                .collect();
            assert!(us.windows(2).all(|w| w[1] < w[0]));
        }
    }

    #[test]
    fn moment_matched_two_point_is_close() {
        let (r, sigma, t) = (0.04f64, 0.4f64, 0.25f64);
        for c in [0.0, 0.00616] {
            let ln = pricer().price(&spec(r, sigma, c, t)).unwrap().u;
            let (m, s) = ((r - c) * t, sigma * t.sqrt());
            let claim = TwoPointClaim::new((m + s).exp(), (m - s).exp(), 0.5).unwrap();
            let market = Market::new((r * t).exp() - 1.0).unwrap();
            let two = geometric_price_two_point(&claim, market).unwrap().price().unwrap();
            assert!((two / ln - 1.0).abs() < 0.02, "{two} vs {ln}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn scale_invariant_in_spot(s0 in 0.01f64..1000.0, t in 0.05f64..2.0, sigma in 0.3f64..0.8) {
            let base = pricer().price(&spec(0.04, sigma, 0.0, t)).unwrap();
            let scaled = pricer().price(&LognormalSpec::new(s0, 0.04, sigma, 0.0, t).unwrap()).unwrap();
            prop_assert!((scaled.u - s0 * base.u).abs() <= 1e-12 * scaled.u);
            prop_assert!((scaled.z - base.z).abs() <= 1e-12);
        }
    }
}
