use thiserror::Error;

use crate::numerics::NumericsError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("probability {0} is outside [0, 1]")]
    InvalidProbability(f64),
    #[error("probabilities sum to {0}, expected 1")]
    ProbabilitySum(f64),
    #[error("claim has no outcomes")]
    EmptyClaim,
    #[error("payoff {0} is not finite")]
    NonFinitePayoff(f64),
    #[error("payoff {0} is not positive")]
    NonPositivePayoff(f64),
    #[error("invalid market: {0}")]
    InvalidMarket(String),
    #[error("expected payoff {0} is not positive")]
    NonPositiveExpectation(f64),
    #[error("price {0} is not positive")]
    NonPositivePrice(f64),
    #[error("fraction {z} leaves the log domain at price {u}")]
    DomainViolation { u: f64, z: f64 },
    #[error("precondition violated: {0}")]
    PreconditionViolation(String),
    #[error("no price bracket found in [{lo}, {hi}]")]
    BracketFailure { lo: f64, hi: f64 },
    #[error("invalid log-normal parameters: {0}")]
    InvalidSpec(String),
    #[error("log argument non-positive at a quadrature node (u = {u}, z = {z})")]
    QuadratureDomainViolation { u: f64, z: f64 },
    #[error("Newton iteration diverged: {0}")]
    NewtonDivergence(NumericsError),
    #[error("no drift correction in [0, {c_max}] keeps the price floor")]
    CalibrationFailure { c_max: f64 },
    #[error("maximized growth never reaches 1 + r (best {best})")]
    NoCrossing { best: f64 },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
