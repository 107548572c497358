//! Rational, martingale and geometric (growth-optimal) prices of contingent
//! claims in the one-period binomial model and the log-normal model.

pub mod binomial;
pub mod claim;
pub mod error;
pub mod growth;
pub mod harness;
pub mod lognormal;
pub mod numerics;

pub use binomial::{martingale_measure, martingale_price, rational_price, HedgePortfolio, MartingaleMeasure, RationalQuote, StateClaim};
pub use claim::{BinomialAsset, Claim, DiscreteClaim, Market, Outcome, TwoPointClaim};
pub use error::{Error, Result};
pub use growth::{
    geometric_price_general, geometric_price_two_point, growth_rate, optimal_fraction, symmetric_two_point_price, Branch,
    FractionOptimum, GeometricPrice, GeometricQuote,
};
pub use harness::{CheckRecord, GrowthEstimate, SimulationConfig};
pub use lognormal::{
    calibrate_drift_correction, geometric_price_lognormal, martingale_price_lognormal, Calibration, CalibrationRow,
    LognormalPricer, LognormalQuote, LognormalSpec, VolatilityRegime,
};
