//! Recomputes every published number and compares it with the printed
//! value at the precision it was printed with.

use growthprice::binomial::{martingale_price, rational_price, StateClaim};
use growthprice::growth::{geometric_price_two_point, optimal_fraction};
use growthprice::harness::{simulate_growth, CheckRecord, SimulationConfig};
use growthprice::lognormal::{uniform_grid, LognormalPricer, LognormalSpec, DEFAULT_CALIBRATION_GRID};
use growthprice::{BinomialAsset, Market, Result, TwoPointClaim};

use crate::output::render_rows;

/// Published values are printed to three decimals.
const PRINTED: f64 = 1e-3;
const EXACT: f64 = 1e-9;

fn two(alpha: f64, beta: f64, p: f64) -> Result<TwoPointClaim> {
    TwoPointClaim::new(alpha, beta, p)
}

fn geometric(alpha: f64, beta: f64, p: f64, market: Market) -> Result<f64> {
    Ok(geometric_price_two_point(&two(alpha, beta, p)?, market)?
        .price()
        .unwrap_or(f64::NAN))
}

pub fn reproduce(seed: u64, quad_order: usize) -> Result<Vec<CheckRecord>> {
    let m = Market::new(0.2)?;
    let asset = BinomialAsset::new(1.0, 1.0, 0.2, 0.1, 11.0, 0.99)?;
    let mut rows = Vec::new();

    let hedge = rational_price(StateClaim::new(108.0, -1.0), &asset);
    rows.push(CheckRecord::new(
        "rational {12,1.1}",
        rational_price(StateClaim::new(12.0, 1.1), &asset).price,
        1.0,
        EXACT,
    ));
    rows.push(CheckRecord::new(
        "rational {12,12}",
        rational_price(StateClaim::new(12.0, 12.0), &asset).price,
        10.0,
        EXACT,
    ));
    rows.push(CheckRecord::new("rational {108,-1}", hedge.price, 0.0, EXACT));
    rows.push(CheckRecord::new("hedge bond units {108,-1}", hedge.portfolio.riskless_units, -10.0, EXACT));
    rows.push(CheckRecord::new("hedge stock units {108,-1}", hedge.portfolio.risky_units, 10.0, EXACT));

    let f = two(12.0, 1.1, 0.99)?;
    rows.push(CheckRecord::new("harmonic mean {12,1.1}", f.harmonic_mean()?, 10.918, PRINTED));
    rows.push(CheckRecord::new("expectation {108,-1}", two(108.0, -1.0, 0.99)?.expectation(), 106.91, EXACT));
    rows.push(CheckRecord::new("geometric {12,1.1}", geometric(12.0, 1.1, 0.99, m)?, 9.764, PRINTED));
    rows.push(CheckRecord::new("geometric {108,-1}", geometric(108.0, -1.0, 0.99, m)?, 86.079, PRINTED));
    rows.push(CheckRecord::new("martingale {12,1.1}", martingale_price(&f, m), 9.909, PRINTED));

    for ((alpha, beta), published) in [(60.0, 60.0), (119.0, 1.0), (120.0, 0.0), (160.0, -40.0)]
        .into_iter()
        .zip([50.0, 27.387, 26.834, 4.723])
    {
        let claim = two(alpha, beta, 0.5)?;
        rows.push(CheckRecord::new(
            format!("martingale {{{alpha},{beta}}}"),
            martingale_price(&claim, m),
            50.0,
            EXACT,
        ));
        rows.push(CheckRecord::new(
            format!("geometric {{{alpha},{beta}}}"),
            geometric(alpha, beta, 0.5, m)?,
            published,
            PRINTED,
        ));
    }

    let gamble = two(2.7, 0.3, 0.5)?.to_discrete();
    let kelly = optimal_fraction(&gamble, 1.0)?;
    rows.push(CheckRecord::new("fair-coin gamble fraction", kelly.z, 0.420, PRINTED));
    rows.push(CheckRecord::new("fair-coin gamble growth", kelly.growth, 1.100, PRINTED));
    let config = SimulationConfig {
        seed,
        ..SimulationConfig::default()
    };
    let sim = simulate_growth(&gamble, 1.0, kelly.z, &config)?;
    rows.push(CheckRecord::new(
        "fair-coin gamble simulated growth",
        sim.growth,
        12.0 / 119f64.sqrt(),
        4.0 * sim.std_error,
    ));

    let pricer = LognormalPricer::new(quad_order)?;
    let spot = LognormalSpec::new(1.0, 0.04, 0.4, 0.0, 2.0)?;
    rows.push(CheckRecord::new("log-normal martingale price", pricer.martingale_price(&spot), 1.0, EXACT));
    let small = pricer.price(&LognormalSpec::new(1.0, 0.2, 0.4, 0.0, 5.0)?)?;
    rows.push(CheckRecord::new("small-volatility price / S0", small.u, 1.0, EXACT));

    let grid = uniform_grid(2.0, DEFAULT_CALIBRATION_GRID);
    let band = pricer.price_ratios(0.04, 0.4, 0.00616, &grid)?;
    let (lo, hi) = band
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &u| (lo.min(u), hi.max(u)));
    // The printed band is [S0, 1.00033 S0), checked to 1e-6 below and 1e-4
    // above.
    rows.push(CheckRecord::within("band low in [1, 1.00043], c = 0.00616", lo, 1.0 - 1e-6, 1.00033 + 1e-4));
    rows.push(CheckRecord::new("band high, c = 0.00616", hi, 1.00033, 1e-4));
    let cal = pricer.calibrate(0.04, 0.4, &grid)?;
    rows.push(CheckRecord::new("drift correction c(0.4, 0.04)", cal.c, 0.00616, 5e-4));

    let sweep_grid = uniform_grid(1.0, DEFAULT_CALIBRATION_GRID);
    for sigma in [0.3, 0.4, 0.5] {
        for r in [0.01, 0.04] {
            let cal = pricer.calibrate(r, sigma, &sweep_grid)?;
            rows.push(CheckRecord::within(
                format!("band high in [1, 1.0052], sigma {sigma}, r {r}"),
                cal.band_hi,
                1.0,
                1.0052,
            ));
        }
    }
    Ok(rows)
}

pub fn render_text(rows: &[CheckRecord]) -> String {
    let width = rows.iter().map(|r| r.check_name.len()).max().unwrap_or(0);
    let mut out = format!(
        "{:<width$}  {:>12}  {:>12}  {:>10}  {:>10}  status\n",
        "check", "computed", "published", "|delta|", "tolerance"
    );
    for r in rows {
        out.push_str(&format!(
            "{:<width$}  {:>12.6}  {:>12.6}  {:>10.2e}  {:>10.2e}  {}\n",
            r.check_name,
            r.computed,
            r.expected,
            (r.computed - r.expected).abs(),
            r.tolerance,
            if r.pass { "ok" } else { "MISMATCH" }
        ));
    }
    let failed: Vec<(String, String)> = rows
        .iter()
        .filter(|r| !r.pass)
        .map(|r| (r.check_name.clone(), format!("{} vs {}", r.computed, r.expected)))
        .collect();
    if !failed.is_empty() {
        out.push_str("\nfailures:\n");
        out.push_str(&render_rows(&failed));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_row_reproduces() {
        let rows = reproduce(SimulationConfig::default().seed, 96).unwrap();
        for r in &rows {
            assert!(r.pass, "{r:?}");
        }
        for published in [9.764, 86.079, 9.909, 50.0, 27.387, 26.834, 4.723, 0.420, 1.100, 0.00616] {
            assert!(rows.iter().any(|r| r.expected == published), "{published}");
        }
    }
}
