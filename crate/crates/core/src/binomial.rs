//! Replication (rational) and martingale prices in the single-step binomial
//! market.
//!
//! Rational prices depend on which payoff lands in which state, so they take
//! a [`StateClaim`]. Martingale prices only see the distribution and take a
//! probability-labelled [`TwoPointClaim`].

use serde::{Deserialize, Serialize};

use crate::claim::{BinomialAsset, Market, TwoPointClaim};

/// Payoffs in the up state (`S1 = S0 (1 + b)`) and the down state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateClaim {
    pub up: f64,
    pub down: f64,
}

impl StateClaim {
    pub fn new(up: f64, down: f64) -> Self {
        Self { up, down }
    }
}

/// Units held of the riskless and the risky asset. Either may be negative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HedgePortfolio {
    pub riskless_units: f64,
    pub risky_units: f64,
}

impl HedgePortfolio {
    /// Cost at time 0.
    pub fn cost(&self, asset: &BinomialAsset) -> f64 {
        self.riskless_units * asset.b0() + self.risky_units * asset.s0()
    }

    /// Value at time 1 in the up and down states.
    pub fn payoff(&self, asset: &BinomialAsset) -> StateClaim {
        let bond = self.riskless_units * asset.b0() * (1.0 + asset.r());
        StateClaim {
            up: bond + self.risky_units * asset.up_price(),
            down: bond + self.risky_units * asset.down_price(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RationalQuote {
    pub price: f64,
    pub portfolio: HedgePortfolio,
}

/// Cost of the portfolio that replicates `claim` in both states.
pub fn rational_price(claim: StateClaim, asset: &BinomialAsset) -> RationalQuote {
    let s0 = asset.s0();
    let risky_units = (claim.up - claim.down) / (s0 * (asset.b() - asset.a()));
    let riskless_units = (claim.up - risky_units * asset.up_price()) / (asset.b0() * (1.0 + asset.r()));
    let portfolio = HedgePortfolio {
        riskless_units,
        risky_units,
    };
    RationalQuote {
        price: portfolio.cost(asset),
        portfolio,
    }
}

/// Risk-neutral probabilities `p* = (r - a)/(b - a)`, `q* = (b - r)/(b - a)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MartingaleMeasure {
    pub p_star: f64,
    pub q_star: f64,
}

impl MartingaleMeasure {
    /// `(p* up + q* down) / (1 + r)`.
    pub fn discounted_expectation(&self, claim: StateClaim, r: f64) -> f64 {
        (self.p_star * claim.up + self.q_star * claim.down) / (1.0 + r)
    }
}

pub fn martingale_measure(asset: &BinomialAsset) -> MartingaleMeasure {
    let spread = asset.b() - asset.a();
    MartingaleMeasure {
        p_star: (asset.r() - asset.a()) / spread,
        q_star: (asset.b() - asset.r()) / spread,
    }
}

/// `(alpha p + beta q) / (1 + r)`: the quoted probabilities are taken to be
/// the martingale measure.
pub fn martingale_price(claim: &TwoPointClaim, market: Market) -> f64 {
    claim.expectation() / market.growth_factor()
}
