//! `growthprice` command line: rational, martingale and geometric prices,
//! Kelly fractions, log-normal pricing and drift calibration.
//!
//! Exit codes: 0 ok, 1 reproduction mismatch, 2 input error, 3 no
//! geometric price exists, 4 numerical failure.

pub mod output;
pub mod tables;

use std::fs::OpenOptions;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use growthprice::binomial::{martingale_measure, martingale_price, rational_price, StateClaim};
use growthprice::growth::{geometric_price_general, geometric_price_two_point, growth_rate, optimal_fraction, Branch, GeometricPrice};
use growthprice::harness::SimulationConfig;
use growthprice::lognormal::{is_small_volatility, uniform_grid, CalibrationRow, LognormalPricer, LognormalSpec, VolatilityRegime};
use growthprice::{BinomialAsset, Claim, Error, Market, TwoPointClaim};

pub use output::{Method, OutputRecord};

#[derive(Debug, Parser)]
#[command(name = "growthprice", version, about = "Rational, martingale and growth-optimal prices of contingent claims")]
pub struct Cli {
    /// Print JSON at full precision instead of a table.
    #[arg(long, global = true)]
    pub json: bool,
    /// Write output to FILE; `calibrate` appends a CSV row instead.
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Seed for Monte-Carlo checks.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Price a claim by one of the three rules.
    Price(PriceArgs),
    /// Growth-optimal fraction of wealth in a claim bought at a given price.
    Kelly(KellyArgs),
    /// Geometric price of a log-normal asset.
    Lognormal(LognormalArgs),
    /// Drift correction keeping log-normal prices at or above S0.
    Calibrate(CalibrateArgs),
    /// Recompute every published number and compare.
    PaperTables(QuadArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Rational,
    Martingale,
    Geometric,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPointInput {
    pub alpha: f64,
    pub beta: f64,
    pub p: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarketInput {
    pub a: f64,
    pub b: f64,
    pub s0: f64,
    pub b0: f64,
}

fn parse_reals(s: &str, min: usize, max: usize) -> Result<Vec<f64>, String> {
    let values: Vec<f64> = s
        .split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|e| format!("{v:?}: {e}")))
        .collect::<Result<_, _>>()?;
    if values.len() < min || values.len() > max {
        return Err(format!("expected {min}..={max} comma-separated numbers, got {}", values.len()));
    }
    Ok(values)
}

fn parse_two_point(s: &str) -> Result<TwoPointInput, String> {
    let v = parse_reals(s, 2, 3)?;
    Ok(TwoPointInput {
        alpha: v[0],
        beta: v[1],
        p: v.get(2).copied(),
    })
}

fn parse_market(s: &str) -> Result<MarketInput, String> {
    let v = parse_reals(s, 4, 4)?;
    Ok(MarketInput {
        a: v[0],
        b: v[1],
        s0: v[2],
        b0: v[3],
    })
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct ClaimSource {
    /// Payoff ALPHA with probability P (default 0.5), else BETA. ALPHA is
    /// the up-state payoff for rational pricing.
    #[arg(long, value_name = "ALPHA,BETA[,P]", allow_hyphen_values = true, value_parser = parse_two_point)]
    pub two_point: Option<TwoPointInput>,
    /// JSON claim file.
    #[arg(long, value_name = "FILE")]
    pub claim: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PriceArgs {
    #[arg(long, value_enum)]
    pub method: MethodArg,
    /// Riskless rate per period.
    #[arg(long, allow_hyphen_values = true)]
    pub rate: f64,
    /// Binomial market: down return a, up return b, spot S0, bond B0.
    #[arg(long, value_name = "A,B,S0,B0", allow_hyphen_values = true, value_parser = parse_market)]
    pub market: Option<MarketInput>,
    #[command(flatten)]
    pub claim: ClaimSource,
}

#[derive(Debug, Args)]
pub struct KellyArgs {
    #[command(flatten)]
    pub claim: ClaimSource,
    /// Price paid per unit of claim.
    #[arg(long)]
    pub price: f64,
}

#[derive(Debug, Args)]
pub struct QuadArgs {
    /// Gauss-Hermite nodes.
    #[arg(long, env = "GROWTHPRICE_QUAD_ORDER", default_value_t = 96)]
    pub quad_order: usize,
}

#[derive(Debug, Args)]
pub struct LognormalArgs {
    #[arg(long = "r", allow_hyphen_values = true)]
    pub r: f64,
    #[arg(long)]
    pub sigma: f64,
    /// Drift offset.
    #[arg(long, default_value_t = 0.0)]
    pub c: f64,
    #[arg(long)]
    pub t: f64,
    #[arg(long, default_value_t = 1.0)]
    pub s0: f64,
    #[command(flatten)]
    pub quad: QuadArgs,
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    #[arg(long = "r", allow_hyphen_values = true)]
    pub r: f64,
    #[arg(long)]
    pub sigma: f64,
    #[arg(long)]
    pub t_max: f64,
    /// Horizons in (0, t_max].
    #[arg(long, default_value_t = 16)]
    pub grid: usize,
    #[command(flatten)]
    pub quad: QuadArgs,
}

/// A failed command and the exit code it maps to.
#[derive(Debug, Clone, PartialEq)]
pub enum Failure {
    Input(String),
    NoSolution(String),
    Numerical(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::NoSolution(_) => 3,
            Failure::Numerical(_) => 4,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::NoSolution(m) | Failure::Numerical(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::NoCrossing { .. } => Failure::NoSolution(msg),
            Error::BracketFailure { .. }
            | Error::QuadratureDomainViolation { .. }
            | Error::NewtonDivergence(_)
            | Error::CalibrationFailure { .. }
            | Error::Numerics(_) => Failure::Numerical(msg),
            _ => Failure::Input(msg),
        }
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure::Input(format!("{}: {e}", path.display()))
}

fn load_claim(source: &ClaimSource) -> Result<Claim, Failure> {
    if let Some(tp) = source.two_point {
        return Ok(Claim::TwoPoint(TwoPointClaim::new(tp.alpha, tp.beta, tp.p.unwrap_or(0.5))?));
    }
    let path = source.claim.as_ref().expect("clap enforces one claim source");
    let text = std::fs::read_to_string(path).map_err(|e| io_failure(path, e))?;
    serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn price(args: &PriceArgs) -> Result<OutputRecord, Failure> {
    let claim = load_claim(&args.claim)?;
    let market = Market::new(args.rate)?;
    match args.method {
        MethodArg::Rational => {
            let m = args
                .market
                .ok_or_else(|| Failure::Input("rational pricing needs --market a,b,S0,B0".into()))?;
            let tp = claim
                .as_two_point()
                .ok_or_else(|| Failure::Input("rational pricing needs a two-point claim".into()))?;
            let p = if tp.p() > 0.0 && tp.p() < 1.0 { tp.p() } else { 0.5 };
            let asset = BinomialAsset::new(m.b0, m.s0, args.rate, m.a, m.b, p)?;
            let quote = rational_price(StateClaim::new(tp.alpha(), tp.beta()), &asset);
            Ok(OutputRecord::new(Method::Rational, quote.price)
                .diagnostic("riskless_units", quote.portfolio.riskless_units)
                .diagnostic("risky_units", quote.portfolio.risky_units))
        }
        MethodArg::Martingale => {
            if let Some(m) = args.market {
                let tp = claim
                    .as_two_point()
                    .ok_or_else(|| Failure::Input("a binomial market prices two-point claims only".into()))?;
                let asset = BinomialAsset::new(m.b0, m.s0, args.rate, m.a, m.b, 0.5)?;
                let measure = martingale_measure(&asset);
                let value = measure.discounted_expectation(StateClaim::new(tp.alpha(), tp.beta()), args.rate);
                return Ok(OutputRecord::new(Method::Martingale, value).diagnostic("p_star", measure.p_star));
            }
            let value = match claim.as_two_point() {
                Some(tp) => martingale_price(&tp, market),
                None => claim.to_discrete().expectation() / market.growth_factor(),
            };
            Ok(OutputRecord::new(Method::Martingale, value))
        }
        MethodArg::Geometric => {
            let (result, two_point) = match &claim {
                Claim::TwoPoint(tp) => (geometric_price_two_point(tp, market)?, true),
                Claim::Discrete(d) => (geometric_price_general(d, market)?, false),
            };
            match result {
                GeometricPrice::Priced(q) => {
                    let growth = growth_rate(&claim.to_discrete(), q.u, q.z)?;
                    Ok(OutputRecord::new(Method::Geometric, q.u)
                        .with_z(q.z)
                        .with_branch(branch_name(q.branch))
                        .diagnostic("growth_residual", growth - market.growth_factor()))
                }
                GeometricPrice::NoSolution { condition } => {
                    let lhs = if two_point { "(1 - E/alpha)^q (1 - E/beta)^p" } else { "sup growth as u -> 0" };
                    Err(Failure::NoSolution(format!(
                        "no geometric price: {lhs} = {condition:.3} does not exceed 1 + r = {:.3}",
                        market.growth_factor()
                    )))
                }
            }
        }
    }
}

fn branch_name(b: Branch) -> &'static str {
    match b {
        Branch::FullInvestment => "full_investment",
        Branch::Interior => "interior",
    }
}

fn kelly(args: &KellyArgs) -> Result<OutputRecord, Failure> {
    let claim = load_claim(&args.claim)?.to_discrete();
    let opt = optimal_fraction(&claim, args.price)?;
    Ok(OutputRecord::new(Method::Geometric, args.price)
        .with_z(opt.z)
        .diagnostic("growth", opt.growth))
}

fn pricer(quad: &QuadArgs) -> Result<LognormalPricer, Failure> {
    Ok(LognormalPricer::new(quad.quad_order)?)
}

fn lognormal(args: &LognormalArgs) -> Result<OutputRecord, Failure> {
    let spec = LognormalSpec::new(args.s0, args.r, args.sigma, args.c, args.t)?;
    let q = pricer(&args.quad)?.price(&spec)?;
    let regime = match q.regime {
        VolatilityRegime::Small => "small_volatility",
        VolatilityRegime::Large => "large_volatility",
    };
    Ok(OutputRecord::new(Method::Geometric, q.u)
        .with_z(q.z)
        .with_branch(regime)
        .diagnostic("u_over_s0", q.u / args.s0)
        .diagnostic("growth_residual", q.growth_residual)
        .diagnostic("foc_residual", q.foc_residual)
        .diagnostic("iterations", q.iterations as f64)
        .diagnostic("quadrature_nodes", args.quad.quad_order as f64))
}

fn calibrate(args: &CalibrateArgs) -> Result<CalibrationRow, Failure> {
    if args.grid == 0 || !(args.t_max > 0.0) {
        return Err(Failure::Input("--grid must be positive and --t-max > 0".into()));
    }
    if is_small_volatility(args.sigma, args.r) {
        eprintln!("note: sigma^2/2 <= r, full investment is optimal and no drift correction is needed (c = 0)");
    }
    let cal = pricer(&args.quad)?.calibrate(args.r, args.sigma, &uniform_grid(args.t_max, args.grid))?;
    Ok(CalibrationRow {
        sigma: args.sigma,
        r: args.r,
        t_max: args.t_max,
        c: cal.c,
        band_hi: cal.band_hi,
        grid_size: args.grid,
        quadrature_nodes: args.quad.quad_order,
    })
}

fn append_csv(path: &Path, row: &CalibrationRow) -> Result<(), Failure> {
    let file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| io_failure(path, e))?;
    let empty = file.metadata().map_err(|e| io_failure(path, e))?.len() == 0;
    let mut writer = csv::WriterBuilder::new().has_headers(empty).from_writer(file);
    writer
        .serialize(row)
        .and_then(|_| writer.flush().map_err(csv::Error::from))
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn render(record: &OutputRecord, json: bool, decimals: usize) -> String {
    if json {
        record.render_json() + "\n"
    } else {
        record.render_text(decimals)
    }
}

/// Runs the command, writing its report to `stdout` or `--out`. Returns
/// the exit code on success paths (0, or 1 for a reproduction mismatch).
pub fn run(cli: &Cli, stdout: &mut dyn Write) -> Result<u8, Failure> {
    let (text, code) = match &cli.command {
        Command::Price(args) => (render(&price(args)?, cli.json, 3), 0),
        Command::Kelly(args) => (render(&kelly(args)?, cli.json, 3), 0),
        Command::Lognormal(args) => (render(&lognormal(args)?, cli.json, 6), 0),
        Command::Calibrate(args) => {
            let row = calibrate(args)?;
            if let Some(path) = &cli.out {
                append_csv(path, &row)?;
            }
            let text = if cli.json {
                serde_json::to_string_pretty(&row).expect("row serializes") + "\n"
            } else {
                output::render_rows(&[
                    ("c".into(), format!("{:.7}", row.c)),
                    ("band_hi".into(), format!("{:.7}", row.band_hi)),
                ])
            };
            write_out(stdout, None, &text)?;
            return Ok(0);
        }
        Command::PaperTables(quad) => {
            let seed = cli.seed.unwrap_or(SimulationConfig::default().seed);
            let rows = tables::reproduce(seed, quad.quad_order)?;
            let code = u8::from(rows.iter().any(|r| !r.pass));
            let text = if cli.json {
                serde_json::to_string_pretty(&rows).expect("rows serialize") + "\n"
            } else {
                tables::render_text(&rows)
            };
            (text, code)
        }
    };
    write_out(stdout, cli.out.as_deref(), &text)?;
    Ok(code)
}

fn write_out(stdout: &mut dyn Write, out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| io_failure(path, e)),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Input(format!("stdout: {e}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_claim_lists() {
        assert_eq!(
            parse_two_point("108,-1").unwrap(),
            TwoPointInput {
                alpha: 108.0,
                beta: -1.0,
                p: None
            }
        );
        assert_eq!(parse_two_point("12, 1.1, 0.99").unwrap().p, Some(0.99));
        assert!(parse_two_point("1").is_err());
        assert!(parse_two_point("1,x").is_err());
        let m = parse_market("0.1,11,1,1").unwrap();
        assert_eq!((m.a, m.b, m.s0, m.b0), (0.1, 11.0, 1.0, 1.0));
        assert!(parse_market("0.1,11,1").is_err());
    }

    #[test]
    fn error_classes_map_to_exit_codes() {
        assert_eq!(Failure::from(Error::EmptyClaim).exit_code(), 2);
        assert_eq!(Failure::from(Error::NoCrossing { best: 1.1 }).exit_code(), 3);
        assert_eq!(Failure::from(Error::CalibrationFailure { c_max: 0.1 }).exit_code(), 4);
    }
}
