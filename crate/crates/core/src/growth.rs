//! Geometric (growth-optimal) prices.
//!
//! An investor pays `u` per unit of a claim and puts a fraction `z` of
//! wealth into it, keeping the rest in cash. One period multiplies wealth by
//! `h z / u - z + 1` when the claim pays `h`, so the growth rate is
//!
//! ```text
//! G(u, z) = exp( Σ p_i log(h_i z / u - z + 1) )
//! ```
//!
//! The geometric price is the `u` at which the best achievable growth,
//! `sup_z G(u, z)` over admissible `0 ≤ z ≤ 1`, equals the riskless `1 + r`.
//!
//! For two outcomes there is a closed form when full investment (`z = 1`)
//! is optimal, and otherwise a scalar equation in `u` whose two roots
//! straddle the expectation; only the lower one has `0 < z ≤ 1`.
//! [`geometric_price_general`] handles any finite claim by bisection on `u`
//! around an inner one-dimensional maximization in `z`.

use serde::{Deserialize, Serialize};

use crate::claim::{DiscreteClaim, Market, TwoPointClaim};
use crate::error::{Error, Result};
use crate::numerics::{golden_section_max, newton_1d, SolverConfig};

/// Relative shrink applied to a domain-imposed fraction limit.
const DOMAIN_MARGIN: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// `z = 1` is optimal; the price is the discounted geometric mean.
    FullInvestment,
    /// `0 < z < 1` solves the first-order condition.
    Interior,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometricQuote {
    pub u: f64,
    pub z: f64,
    pub branch: Branch,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum GeometricPrice {
    Priced(GeometricQuote),
    /// The rate is too large for any positive price. `condition` is the
    /// best growth attainable as `u -> 0`; for two-point claims this is
    /// `(1 - E/α)^q (1 - E/β)^p`.
    NoSolution { condition: f64 },
}

impl GeometricPrice {
    pub fn quote(&self) -> Option<&GeometricQuote> {
        match self {
            GeometricPrice::Priced(q) => Some(q),
            GeometricPrice::NoSolution { .. } => None,
        }
    }

    pub fn price(&self) -> Option<f64> {
        self.quote().map(|q| q.u)
    }
}

/// Argmax and maximum of the growth rate in `z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FractionOptimum {
    pub z: f64,
    pub growth: f64,
}

fn check_price(u: f64) -> Result<()> {
    if u > 0.0 && u.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositivePrice(u))
    }
}

fn check_rate(market: Market) -> Result<f64> {
    if market.r() > 0.0 {
        Ok(market.r())
    } else {
        Err(Error::InvalidMarket(format!(
            "geometric pricing needs r > 0, got {}",
            market.r()
        )))
    }
}

/// `Σ p log(1 + z (h/u - 1))`, `-inf` outside the log domain.
fn log_growth(claim: &DiscreteClaim, u: f64, z: f64) -> f64 {
    let mut acc = 0.0;
    for o in claim.support() {
        let rel = 1.0 + z * (o.payoff / u - 1.0);
        if rel <= 0.0 {
            return f64::NEG_INFINITY;
        }
        acc += o.prob * rel.ln();
    }
    acc
}

/// First and second `z`-derivatives of [`log_growth`].
fn log_growth_derivatives(claim: &DiscreteClaim, u: f64, z: f64) -> (f64, f64) {
    claim.support().fold((0.0, 0.0), |(d1, d2), o| {
        let excess = o.payoff / u - 1.0;
        let ratio = excess / (1.0 + z * excess);
        (d1 + o.prob * ratio, d2 - o.prob * ratio * ratio)
    })
}

/// `exp(Σ p_i log(h_i z/u - z + 1))`.
pub fn growth_rate(claim: &DiscreteClaim, u: f64, z: f64) -> Result<f64> {
    check_price(u)?;
    if !(0.0..=1.0).contains(&z) {
        return Err(Error::PreconditionViolation(format!("fraction {z} outside [0, 1]")));
    }
    let lg = log_growth(claim, u, z);
    if lg == f64::NEG_INFINITY {
        return Err(Error::DomainViolation { u, z });
    }
    Ok(lg.exp())
}

/// Largest admissible fraction: 1, or just inside the point where the
/// worst outcome would wipe out wealth (`z < u / (u - h)` for `h ≤ 0`).
pub fn admissible_limit(claim: &DiscreteClaim, u: f64) -> f64 {
    let min_h = claim.min_payoff();
    if min_h > 0.0 {
        1.0
    } else {
        (u / (u - min_h)).min(1.0) * (1.0 - DOMAIN_MARGIN)
    }
}

/// Maximizes the growth rate over admissible `z` at price `u`.
///
/// The log-growth is concave in `z`, so the endpoint slopes decide whether
/// the optimum is `0`, the admissible limit, or interior. Interior optima
/// are located by golden-section search and polished by Newton on the
/// first-order condition `Σ p (h/u - 1) / (h z/u - z + 1) = 0`.
pub fn optimal_fraction(claim: &DiscreteClaim, u: f64) -> Result<FractionOptimum> {
    check_price(u)?;
    if claim.max_payoff() <= 0.0 {
        return Err(Error::PreconditionViolation("claim has no positive payoff".into()));
    }

    let z_max = admissible_limit(claim, u);
    let (slope_at_zero, _) = log_growth_derivatives(claim, u, 0.0);
    if slope_at_zero <= 0.0 {
        return Ok(FractionOptimum { z: 0.0, growth: 1.0 });
    }
    let (slope_at_max, _) = log_growth_derivatives(claim, u, z_max);
    if slope_at_max >= 0.0 {
        return Ok(FractionOptimum {
            z: z_max,
            growth: log_growth(claim, u, z_max).exp(),
        });
    }

    let (z_golden, _) = golden_section_max(|z| log_growth(claim, u, z), (0.0, z_max), 1e-7 * z_max);
    let slope = |z: f64| log_growth_derivatives(claim, u, z).0;
    let width = 1e-6 * z_max;
    let (lo, hi) = ((z_golden - width).max(0.0), (z_golden + width).min(z_max));
    let bracket = if slope(lo) > 0.0 && slope(hi) < 0.0 { (lo, hi) } else { (0.0, z_max) };
    let z = newton_1d(|z| log_growth_derivatives(claim, u, z), bracket, &SolverConfig::default())?;
    Ok(FractionOptimum {
        z,
        growth: log_growth(claim, u, z).exp(),
    })
}

/// `z = (E - u) u / ((α - u)(u - β))`, the fraction solving the two-point
/// first-order condition at price `u`.
pub fn interior_fraction(claim: &TwoPointClaim, u: f64) -> f64 {
    let e = claim.expectation();
    (e - u) * u / ((claim.alpha() - u) * (u - claim.beta()))
}

/// Residuals of the two-point optimality system at `(u, z)`: the growth
/// equation `(αz/u - z + 1)^p (βz/u - z + 1)^q - (1 + r)` and the
/// first-order condition `p(α/u - 1)(βz/u - z + 1) + q(β/u - 1)(αz/u - z + 1)`.
pub fn optimality_residuals(claim: &TwoPointClaim, market: Market, u: f64, z: f64) -> [f64; 2] {
    let (p, q) = (claim.p(), claim.q());
    let x = claim.alpha() * z / u - z + 1.0;
    let y = claim.beta() * z / u - z + 1.0;
    [
        x.powf(p) * y.powf(q) - market.growth_factor(),
        p * (claim.alpha() / u - 1.0) * y + q * (claim.beta() / u - 1.0) * x,
    ]
}

/// A root of the interior two-point price equation and its fraction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InteriorRoot {
    pub u: f64,
    pub z: f64,
}

/// Both real roots of
/// `((E - α)/(u - α))^q ((E - β)/(u - β))^p = 1 + r`,
/// one on each side of `E` inside `(min(α, β), max(α, β))`, lower first.
pub fn interior_roots(claim: &TwoPointClaim, market: Market) -> Result<[InteriorRoot; 2]> {
    let (p, q) = (claim.p(), claim.q());
    if !(p > 0.0 && p < 1.0) || claim.alpha() == claim.beta() {
        return Err(Error::PreconditionViolation(
            "interior equation needs two distinct outcomes with 0 < p < 1".into(),
        ));
    }
    let (hi, p_hi, lo, p_lo) = if claim.alpha() > claim.beta() {
        (claim.alpha(), p, claim.beta(), q)
    } else {
        (claim.beta(), q, claim.alpha(), p)
    };
    let e = claim.expectation();
    let target = market.growth_factor().ln();

    // The high outcome's wealth relative is (E - lo)/(u - lo), the low
    // outcome's is (hi - E)/(hi - u). Convex in u with minimum -ln(1+r) at E.
    let excess = |u: f64| {
        let value = p_hi * ((e - lo) / (u - lo)).ln() + p_lo * ((hi - e) / (hi - u)).ln() - target;
        let slope = -p_hi / (u - lo) + p_lo / (hi - u);
        (value, slope)
    };

    // Step in from each pole until the equation is positive.
    let inside = |pole: f64| {
        let mut offset = e - pole;
        for _ in 0..300 {
            offset *= 0.1;
            let u = pole + offset;
            if excess(u).0 > 0.0 {
                return Ok(u);
            }
        }
        Err(Error::BracketFailure { lo, hi })
    };

    let config = SolverConfig::default();
    let low = newton_1d(excess, (inside(lo)?, e), &config)?;
    let high = newton_1d(excess, (e, inside(hi)?), &config)?;
    Ok([low, high].map(|u| InteriorRoot {
        u,
        z: interior_fraction(claim, u),
    }))
}

/// Geometric price of a two-outcome claim.
///
/// * Both payoffs positive and `α^p β^q/(1+r) ≤ 1/(p/α + q/β)`: full
///   investment at the discounted geometric mean.
/// * Mixed signs with `(1 - E/α)^q (1 - E/β)^p ≤ 1 + r`: no solution.
/// * Otherwise the interior root with `u > 0` and `0 < z ≤ 1`.
///
/// `p ∈ {0, 1}` is priced as the riskless surviving payoff.
pub fn geometric_price_two_point(claim: &TwoPointClaim, market: Market) -> Result<GeometricPrice> {
    let r = check_rate(market)?;
    let e = claim.expectation();
    if e <= 0.0 {
        return Err(Error::NonPositiveExpectation(e));
    }
    let growth = 1.0 + r;

    if claim.p() == 0.0 || claim.p() == 1.0 || claim.alpha() == claim.beta() {
        return Ok(GeometricPrice::Priced(GeometricQuote {
            u: e / growth,
            z: 1.0,
            branch: Branch::FullInvestment,
        }));
    }

    if claim.alpha() > 0.0 && claim.beta() > 0.0 {
        let u = claim.geometric_mean()? / growth;
        if u <= claim.harmonic_mean()? {
            return Ok(GeometricPrice::Priced(GeometricQuote {
                u,
                z: 1.0,
                branch: Branch::FullInvestment,
            }));
        }
    }

    if claim.alpha() * claim.beta() < 0.0 {
        let condition = (1.0 - e / claim.alpha()).powf(claim.q()) * (1.0 - e / claim.beta()).powf(claim.p());
        if condition <= growth {
            return Ok(GeometricPrice::NoSolution { condition });
        }
    }

    interior_roots(claim, market)?
        .into_iter()
        .find(|root| root.u > 0.0 && root.z > 0.0 && root.z <= 1.0 + 1e-12)
        .map(|root| {
            GeometricPrice::Priced(GeometricQuote {
                u: root.u,
                z: root.z.min(1.0),
                branch: Branch::Interior,
            })
        })
        .ok_or_else(|| Error::PreconditionViolation("no interior root with 0 < z <= 1".into()))
}

/// Closed form for equiprobable outcomes `α ≥ β ≥ 0`.
///
/// Full investment at `sqrt(αβ)/(1+r)` when `E ≤ (1+r) sqrt(αβ)`, else
/// `u = κα + (1-κ)β` with `κ = (1 - sqrt(1 - 1/(1+r)²))/2`.
pub fn symmetric_two_point_price(claim: &TwoPointClaim, market: Market) -> Result<GeometricQuote> {
    let r = check_rate(market)?;
    if (claim.p() - 0.5).abs() > 1e-15 {
        return Err(Error::PreconditionViolation(format!(
            "equiprobable closed form needs p = 1/2, got {}",
            claim.p()
        )));
    }
    let (hi, lo) = if claim.alpha() >= claim.beta() {
        (claim.alpha(), claim.beta())
    } else {
        (claim.beta(), claim.alpha())
    };
    if lo < 0.0 {
        return Err(Error::PreconditionViolation(format!(
            "equiprobable closed form needs non-negative payoffs, got {lo}"
        )));
    }
    let e = 0.5 * (hi + lo);
    if e <= 0.0 {
        return Err(Error::NonPositiveExpectation(e));
    }
    let growth = 1.0 + r;
    let gm = (hi * lo).sqrt();
    if e <= growth * gm {
        return Ok(GeometricQuote {
            u: gm / growth,
            z: 1.0,
            branch: Branch::FullInvestment,
        });
    }
    let kappa = 0.5 * (1.0 - (1.0 - 1.0 / (growth * growth)).sqrt());
    let u = kappa * hi + (1.0 - kappa) * lo;
    Ok(GeometricQuote {
        u,
        z: (e - u) * u / ((hi - u) * (u - lo)),
        branch: Branch::Interior,
    })
}

/// Geometric price of any finite claim.
///
/// The maximized growth `sup_z G(u, z)` falls strictly in `u` while it
/// exceeds 1, and never exceeds `1 + r` at `E/(1 + r)`, so the price is
/// bracketed by `(u_lo, E/(1 + r)]` and found by bisection. With positive
/// payoffs `u_lo` sits just below the discounted geometric mean; otherwise
/// near zero, where failing to reach `1 + r` means no price exists.
pub fn geometric_price_general(claim: &DiscreteClaim, market: Market) -> Result<GeometricPrice> {
    let r = check_rate(market)?;
    let e = claim.expectation();
    if e <= 0.0 {
        return Err(Error::NonPositiveExpectation(e));
    }
    let growth = 1.0 + r;
    let target = growth.ln();

    if claim.is_riskless() {
        return Ok(GeometricPrice::Priced(GeometricQuote {
            u: e / growth,
            z: 1.0,
            branch: Branch::FullInvestment,
        }));
    }

    let excess = |u: f64| -> Result<f64> { Ok(optimal_fraction(claim, u)?.growth.ln() - target) };

    let mut hi = e / growth;
    let mut lo = if claim.min_payoff() > 0.0 {
        claim.geometric_mean()? / growth * (1.0 - 1e-9)
    } else {
        e * 1e-12
    };

    let excess_lo = excess(lo)?;
    if excess_lo < 0.0 {
        if claim.min_payoff() > 0.0 {
            return Err(Error::BracketFailure { lo, hi });
        }
        return Ok(GeometricPrice::NoSolution {
            condition: (excess_lo + target).exp(),
        });
    }

    for _ in 0..200 {
        if hi - lo <= 4.0 * f64::EPSILON * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if excess(mid)? >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    let u = 0.5 * (lo + hi);
    let optimum = optimal_fraction(claim, u)?;
    let branch = if optimum.z >= 1.0 {
        Branch::FullInvestment
    } else {
        Branch::Interior
    };
    Ok(GeometricPrice::Priced(GeometricQuote {
        u,
        z: optimum.z,
        branch,
    }))
}
