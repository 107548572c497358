use super::{NumericsError, SolverConfig};

/// Bracketed Newton iteration with bisection fallback.
///
/// `f` returns the value and derivative at a point. A Newton step is taken
/// only when it lands inside the current bracket and shrinks the step
/// faster than bisection would; otherwise the bracket is halved. Returns
/// once `|f| < residual_tol` or the bracket has collapsed to `step_tol`
/// relative width.
pub fn newton_1d<F>(mut f: F, bracket: (f64, f64), config: &SolverConfig) -> Result<f64, NumericsError>
where
    F: FnMut(f64) -> (f64, f64),
{
    let (lo, hi) = bracket;
    let (f_lo, _) = f(lo);
    let (f_hi, _) = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if !(f_lo * f_hi < 0.0) {
        return Err(NumericsError::NoSignChange { lo, hi, f_lo, f_hi });
    }

    // Orient so that f(neg) < 0 < f(pos).
    let (mut neg, mut pos) = if f_lo < 0.0 { (lo, hi) } else { (hi, lo) };
    let mut x = 0.5 * (lo + hi);
    let mut dx_old = (hi - lo).abs();
    let mut dx = dx_old;
    let mut residual = f64::INFINITY;

    for _ in 0..config.max_iterations {
        let (fx, dfx) = f(x);
        residual = fx.abs();
        if residual < config.residual_tol {
            return Ok(x);
        }
        if fx < 0.0 {
            neg = x;
        } else {
            pos = x;
        }

        let newton_x = x - fx / dfx;
        let inside = (newton_x - neg) * (newton_x - pos) < 0.0;
        if !dfx.is_finite() || dfx == 0.0 || !inside || (2.0 * fx).abs() > (dx_old * dfx).abs() {
            dx_old = dx;
            dx = 0.5 * (pos - neg);
            x = neg + dx;
        } else {
            dx_old = dx;
            dx = fx / dfx;
            x = newton_x;
        }

        if (pos - neg).abs() <= config.step_tol * x.abs().max(1.0) {
            return Ok(x);
        }
    }

    Err(NumericsError::MaxIterations {
        iterations: config.max_iterations,
        residual,
    })
}

/// A square 2x2 nonlinear system for [`newton_2d`].
pub trait System2 {
    fn residual(&self, x: [f64; 2]) -> [f64; 2];

    /// Row-major Jacobian `J[i][j] = dF_i / dx_j`. Defaults to forward
    /// differences with step `1e-7 * max(1, |x_j|)`.
    fn jacobian(&self, x: [f64; 2]) -> [[f64; 2]; 2] {
        let f0 = self.residual(x);
        let mut jac = [[0.0; 2]; 2];
        for j in 0..2 {
            let h = 1e-7 * x[j].abs().max(1.0);
            let mut xh = x;
            xh[j] += h;
            let fh = self.residual(xh);
            for i in 0..2 {
                jac[i][j] = (fh[i] - f0[i]) / h;
            }
        }
        jac
    }

    /// Feasible region; damping keeps every accepted iterate inside it.
    fn in_domain(&self, _x: [f64; 2]) -> bool {
        true
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Newton2dSolution {
    pub root: [f64; 2],
    /// Max-norm of the residual at `root`.
    pub residual: f64,
    pub iterations: usize,
    /// Residual max-norm at the start point and after each accepted step.
    pub history: Vec<f64>,
}

const MAX_CONDITION: f64 = 1e14;

fn max_norm(v: [f64; 2]) -> f64 {
    v[0].abs().max(v[1].abs())
}

/// Damped Newton-Raphson for a 2x2 system.
///
/// Each step is halved until the trial point is inside the system's domain
/// and strictly lowers the residual max-norm, so the accepted residuals are
/// monotonically decreasing.
pub fn newton_2d<S>(system: &S, x0: [f64; 2], config: &SolverConfig) -> Result<Newton2dSolution, NumericsError>
where
    S: System2 + ?Sized,
{
    if !system.in_domain(x0) {
        return Err(NumericsError::DomainExit { x: x0 });
    }
    let mut x = x0;
    let mut norm = max_norm(system.residual(x));
    let mut history = vec![norm];

    for iteration in 0..config.max_iterations {
        if norm < config.residual_tol {
            return Ok(Newton2dSolution {
                root: x,
                residual: norm,
                iterations: iteration,
                history,
            });
        }

        let f = system.residual(x);
        let [[a, b], [c, d]] = system.jacobian(x);
        let det = a * d - b * c;
        let jac_norm = (a.abs() + b.abs()).max(c.abs() + d.abs());
        let inv_norm = (d.abs() + b.abs()).max(c.abs() + a.abs()) / det.abs();
        let condition = jac_norm * inv_norm;
        if det == 0.0 || !condition.is_finite() || condition > MAX_CONDITION {
            return Err(NumericsError::SingularJacobian { condition });
        }
        let step = [-(d * f[0] - b * f[1]) / det, -(-c * f[0] + a * f[1]) / det];

        let mut lambda = 1.0;
        let mut feasible = false;
        let mut accepted = None;
        for _ in 0..=config.damping_max_halvings {
            let trial = [x[0] + lambda * step[0], x[1] + lambda * step[1]];
            if system.in_domain(trial) {
                feasible = true;
                let trial_norm = max_norm(system.residual(trial));
                if trial_norm.is_finite() && trial_norm < norm {
                    accepted = Some((trial, trial_norm));
                    break;
                }
            }
            lambda *= 0.5;
        }

        match accepted {
            Some((trial, trial_norm)) => {
                x = trial;
                norm = trial_norm;
                history.push(norm);
            }
            None if feasible => return Err(NumericsError::Stagnation { residual: norm }),
            None => return Err(NumericsError::DomainExit { x }),
        }
    }

    if norm < config.residual_tol {
        return Ok(Newton2dSolution {
            root: x,
            residual: norm,
            iterations: config.max_iterations,
            history,
        });
    }
    Err(NumericsError::MaxIterations {
        iterations: config.max_iterations,
        residual: norm,
    })
}
