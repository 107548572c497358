//! Claims, markets, and the three elementary statistics every pricing rule
//! is built from: expectation, geometric mean and harmonic mean.
//!
//! A claim is a random payoff at the end of one period. Payoffs may be
//! negative. Probabilities are validated, never renormalized.
//!
//! JSON schema:
//!
//! ```json
//! {"type":"two_point","alpha":12.0,"beta":1.1,"p":0.99}
//! {"type":"discrete","outcomes":[{"payoff":2.7,"prob":0.5},{"payoff":0.3,"prob":0.5}]}
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on `|Σ p_i - 1|`.
pub const PROBABILITY_SUM_TOL: f64 = 1e-12;

fn check_probability(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidProbability(p))
    }
}

fn check_payoff(h: f64) -> Result<()> {
    if h.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinitePayoff(h))
    }
}

/// Payoff `alpha` with probability `p`, `beta` with probability `1 - p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TwoPointFields")]
pub struct TwoPointClaim {
    alpha: f64,
    beta: f64,
    p: f64,
}

#[derive(Deserialize)]
struct TwoPointFields {
    alpha: f64,
    beta: f64,
    p: f64,
}

impl TryFrom<TwoPointFields> for TwoPointClaim {
    type Error = Error;

    fn try_from(f: TwoPointFields) -> Result<Self> {
        Self::new(f.alpha, f.beta, f.p)
    }
}

impl TwoPointClaim {
    pub fn new(alpha: f64, beta: f64, p: f64) -> Result<Self> {
        check_payoff(alpha)?;
        check_payoff(beta)?;
        check_probability(p)?;
        Ok(Self { alpha, beta, p })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        1.0 - self.p
    }

    pub fn expectation(&self) -> f64 {
        self.to_discrete().expectation()
    }

    pub fn geometric_mean(&self) -> Result<f64> {
        self.to_discrete().geometric_mean()
    }

    pub fn harmonic_mean(&self) -> Result<f64> {
        self.to_discrete().harmonic_mean()
    }

    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        Self::new(lambda * self.alpha, lambda * self.beta, self.p)
    }

    pub fn to_discrete(&self) -> DiscreteClaim {
        DiscreteClaim {
            outcomes: vec![
                Outcome { payoff: self.alpha, prob: self.p },
                Outcome { payoff: self.beta, prob: self.q() },
            ],
        }
    }
}

impl From<TwoPointClaim> for DiscreteClaim {
    fn from(claim: TwoPointClaim) -> Self {
        claim.to_discrete()
    }
}

impl TryFrom<&DiscreteClaim> for TwoPointClaim {
    type Error = Error;

    fn try_from(claim: &DiscreteClaim) -> Result<Self> {
        match claim.outcomes() {
            [up, down] => Self::new(up.payoff, down.payoff, up.prob),
            other => Err(Error::PreconditionViolation(format!(
                "expected two outcomes, found {}",
                other.len()
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub payoff: f64,
    pub prob: f64,
}

/// Finite-support claim. Duplicate payoffs are kept as separate outcomes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DiscreteFields")]
pub struct DiscreteClaim {
    outcomes: Vec<Outcome>,
}

#[derive(Deserialize)]
struct DiscreteFields {
    outcomes: Vec<Outcome>,
}

impl TryFrom<DiscreteFields> for DiscreteClaim {
    type Error = Error;

    fn try_from(f: DiscreteFields) -> Result<Self> {
        Self::new(f.outcomes)
    }
}

impl DiscreteClaim {
    pub fn new(outcomes: Vec<Outcome>) -> Result<Self> {
        if outcomes.is_empty() {
            return Err(Error::EmptyClaim);
        }
        let mut total = 0.0;
        for o in &outcomes {
            check_payoff(o.payoff)?;
            check_probability(o.prob)?;
            total += o.prob;
        }
        if (total - 1.0).abs() > PROBABILITY_SUM_TOL {
            return Err(Error::ProbabilitySum(total));
        }
        Ok(Self { outcomes })
    }

    /// From `(payoff, probability)` pairs.
    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        Self::new(pairs.iter().map(|&(payoff, prob)| Outcome { payoff, prob }).collect())
    }

    /// The riskless claim paying `c` surely.
    pub fn constant(c: f64) -> Result<Self> {
        Self::new(vec![Outcome { payoff: c, prob: 1.0 }])
    }

    pub fn outcomes(&self) -> &[Outcome] {
        &self.outcomes
    }

    /// Outcomes that can actually occur (`prob > 0`).
    pub fn support(&self) -> impl Iterator<Item = &Outcome> + '_ {
        self.outcomes.iter().filter(|o| o.prob > 0.0)
    }

    pub fn min_payoff(&self) -> f64 {
        self.support().map(|o| o.payoff).fold(f64::INFINITY, f64::min)
    }

    pub fn max_payoff(&self) -> f64 {
        self.support().map(|o| o.payoff).fold(f64::NEG_INFINITY, f64::max)
    }

    /// True when every possible outcome pays the same amount.
    pub fn is_riskless(&self) -> bool {
        self.min_payoff() == self.max_payoff()
    }

    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        Self::new(
            self.outcomes
                .iter()
                .map(|o| Outcome { payoff: lambda * o.payoff, prob: o.prob })
                .collect(),
        )
    }

    /// `Σ p_i h_i`, exact for riskless claims.
    pub fn expectation(&self) -> f64 {
        if self.is_riskless() {
            return self.min_payoff();
        }
        self.outcomes.iter().map(|o| o.prob * o.payoff).sum()
    }

    /// `exp(Σ p_i log h_i)`; every possible payoff must be positive.
    pub fn geometric_mean(&self) -> Result<f64> {
        self.require_positive()?;
        if self.is_riskless() {
            return Ok(self.min_payoff());
        }
        Ok(self.support().map(|o| o.prob * o.payoff.ln()).sum::<f64>().exp())
    }

    /// `1 / Σ (p_i / h_i)`; every possible payoff must be positive.
    pub fn harmonic_mean(&self) -> Result<f64> {
        self.require_positive()?;
        if self.is_riskless() {
            return Ok(self.min_payoff());
        }
        Ok(1.0 / self.support().map(|o| o.prob / o.payoff).sum::<f64>())
    }

    fn require_positive(&self) -> Result<()> {
        match self.support().find(|o| o.payoff <= 0.0) {
            Some(o) => Err(Error::NonPositivePayoff(o.payoff)),
            None => Ok(()),
        }
    }
}

/// Either claim shape, as read from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Claim {
    TwoPoint(TwoPointClaim),
    Discrete(DiscreteClaim),
}

impl Claim {
    pub fn to_discrete(&self) -> DiscreteClaim {
        match self {
            Claim::TwoPoint(c) => c.to_discrete(),
            Claim::Discrete(c) => c.clone(),
        }
    }

    /// The two-point form, if the claim has exactly two outcomes.
    pub fn as_two_point(&self) -> Option<TwoPointClaim> {
        match self {
            Claim::TwoPoint(c) => Some(*c),
            Claim::Discrete(c) => TwoPointClaim::try_from(c).ok(),
        }
    }
}

/// Riskless rate per period.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MarketFields")]
pub struct Market {
    r: f64,
}

#[derive(Deserialize)]
struct MarketFields {
    r: f64,
}

impl TryFrom<MarketFields> for Market {
    type Error = Error;

    fn try_from(f: MarketFields) -> Result<Self> {
        Self::new(f.r)
    }
}

impl Market {
    pub fn new(r: f64) -> Result<Self> {
        if r.is_finite() && r > -1.0 {
            Ok(Self { r })
        } else {
            Err(Error::InvalidMarket(format!("rate {r} must exceed -1")))
        }
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// `1 + r`.
    pub fn growth_factor(&self) -> f64 {
        1.0 + self.r
    }
}

/// Single-step market: riskless `B0 -> B0 (1 + r)`, risky `S0 -> S0 (1 + b)`
/// with probability `p` or `S0 (1 + a)` otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinomialAsset {
    b0: f64,
    s0: f64,
    r: f64,
    a: f64,
    b: f64,
    p: f64,
}

impl BinomialAsset {
    pub fn new(b0: f64, s0: f64, r: f64, a: f64, b: f64, p: f64) -> Result<Self> {
        if !(b0 > 0.0 && s0 > 0.0) {
            return Err(Error::InvalidMarket(format!("B0 = {b0} and S0 = {s0} must be positive")));
        }
        if !(-1.0 < a && a < r && r < b) {
            return Err(Error::InvalidMarket(format!("need -1 < a < r < b, got a = {a}, r = {r}, b = {b}")));
        }
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidMarket(format!("up probability {p} must lie in (0, 1)")));
        }
        Ok(Self { b0, s0, r, a, b, p })
    }

    pub fn b0(&self) -> f64 {
        self.b0
    }

    pub fn s0(&self) -> f64 {
        self.s0
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        1.0 - self.p
    }

    pub fn market(&self) -> Market {
        Market { r: self.r }
    }

    pub fn up_price(&self) -> f64 {
        self.s0 * (1.0 + self.b)
    }

    pub fn down_price(&self) -> f64 {
        self.s0 * (1.0 + self.a)
    }
}
