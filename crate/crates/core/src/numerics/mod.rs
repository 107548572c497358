//! Root finding, line search and Gaussian quadrature used by the pricing
//! engines.
//!
//! Everything here is stateless apart from the memoized Gauss-Hermite rules.

mod golden;
mod newton;
mod quadrature;

pub use golden::golden_section_max;
pub use newton::{newton_1d, newton_2d, Newton2dSolution, System2};
pub use quadrature::{gauss_hermite_rule, QuadratureRule};

use thiserror::Error;

/// Iteration limits and tolerances shared by the Newton solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub max_iterations: usize,
    /// Absolute tolerance on the residual (max-norm for systems).
    pub residual_tol: f64,
    /// Relative tolerance on the bracket width / step length.
    pub step_tol: f64,
    pub damping_max_halvings: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iterations: 100,
            residual_tol: 1e-12,
            step_tol: 1e-14,
            damping_max_halvings: 60,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("no sign change on [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    NoSignChange {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    MaxIterations { iterations: usize, residual: f64 },
    #[error("singular Jacobian (condition estimate {condition:e})")]
    SingularJacobian { condition: f64 },
    #[error("damped step could not be kept inside the domain at {x:?}")]
    DomainExit { x: [f64; 2] },
    #[error("damped step could not reduce the residual {residual:e}")]
    Stagnation { residual: f64 },
    #[error("quadrature order must be at least 2, got {0}")]
    InvalidOrder(usize),
}
