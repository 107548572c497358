//! Python bindings. Claims, markets and log-normal parameters are classes;
//! pricing rules are module functions.

use growthprice::binomial::{self, StateClaim};
use growthprice::growth::{self, Branch, GeometricPrice};
use growthprice::harness::{self, SimulationConfig};
use growthprice::lognormal::{self, LognormalPricer, VolatilityRegime};
use growthprice::{Error, Market};
use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

create_exception!(growthprice, NoSolutionError, PyValueError, "No positive price attains the riskless growth.");
create_exception!(growthprice, NumericalError, PyRuntimeError, "A solver failed to converge.");

fn to_py(e: Error) -> PyErr {
    let msg = e.to_string();
    match e {
        Error::NoCrossing { .. } => NoSolutionError::new_err(msg),
        Error::BracketFailure { .. }
        | Error::QuadratureDomainViolation { .. }
        | Error::NewtonDivergence(_)
        | Error::CalibrationFailure { .. }
        | Error::Numerics(_) => NumericalError::new_err(msg),
        _ => PyValueError::new_err(msg),
    }
}

fn market(r: f64) -> PyResult<Market> {
    Market::new(r).map_err(to_py)
}

#[pyclass(name = "TwoPointClaim", frozen, from_py_object)]
#[derive(Clone)]
struct PyTwoPointClaim(growthprice::TwoPointClaim);

#[pymethods]
impl PyTwoPointClaim {
    #[new]
    #[pyo3(signature = (alpha, beta, p = 0.5))]
    fn new(alpha: f64, beta: f64, p: f64) -> PyResult<Self> {
        growthprice::TwoPointClaim::new(alpha, beta, p).map(Self).map_err(to_py)
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.0.alpha()
    }

    #[getter]
    fn beta(&self) -> f64 {
        self.0.beta()
    }

    #[getter]
    fn p(&self) -> f64 {
        self.0.p()
    }

    fn expectation(&self) -> f64 {
        self.0.expectation()
    }

    fn geometric_mean(&self) -> PyResult<f64> {
        self.0.geometric_mean().map_err(to_py)
    }

    fn harmonic_mean(&self) -> PyResult<f64> {
        self.0.harmonic_mean().map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("TwoPointClaim(alpha={}, beta={}, p={})", self.0.alpha(), self.0.beta(), self.0.p())
    }
}

#[pyclass(name = "DiscreteClaim", frozen, from_py_object)]
#[derive(Clone)]
struct PyDiscreteClaim(growthprice::DiscreteClaim);

#[pymethods]
impl PyDiscreteClaim {
    /// `outcomes` is a list of `(payoff, probability)` pairs.
    #[new]
    fn new(outcomes: Vec<(f64, f64)>) -> PyResult<Self> {
        growthprice::DiscreteClaim::from_pairs(&outcomes).map(Self).map_err(to_py)
    }

    #[getter]
    fn outcomes(&self) -> Vec<(f64, f64)> {
        self.0.outcomes().iter().map(|o| (o.payoff, o.prob)).collect()
    }

    fn expectation(&self) -> f64 {
        self.0.expectation()
    }

    fn geometric_mean(&self) -> PyResult<f64> {
        self.0.geometric_mean().map_err(to_py)
    }

    fn harmonic_mean(&self) -> PyResult<f64> {
        self.0.harmonic_mean().map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("DiscreteClaim({:?})", self.outcomes())
    }
}

/// Either claim class.
#[derive(FromPyObject)]
enum AnyClaim {
    TwoPoint(PyTwoPointClaim),
    Discrete(PyDiscreteClaim),
}

impl AnyClaim {
    fn discrete(&self) -> growthprice::DiscreteClaim {
        match self {
            AnyClaim::TwoPoint(c) => c.0.to_discrete(),
            AnyClaim::Discrete(c) => c.0.clone(),
        }
    }
}

#[pyclass(name = "BinomialAsset", frozen, from_py_object)]
#[derive(Clone)]
struct PyBinomialAsset(growthprice::BinomialAsset);

#[pymethods]
impl PyBinomialAsset {
    #[new]
    #[pyo3(signature = (b0, s0, r, a, b, p = 0.5))]
    fn new(b0: f64, s0: f64, r: f64, a: f64, b: f64, p: f64) -> PyResult<Self> {
        growthprice::BinomialAsset::new(b0, s0, r, a, b, p).map(Self).map_err(to_py)
    }

    /// Risk-neutral `(p*, q*)`.
    fn martingale_measure(&self) -> (f64, f64) {
        let m = binomial::martingale_measure(&self.0);
        (m.p_star, m.q_star)
    }
}

#[pyclass(name = "GeometricQuote", frozen, get_all)]
struct PyGeometricQuote {
    u: f64,
    z: f64,
    branch: &'static str,
}

#[pymethods]
impl PyGeometricQuote {
    fn __repr__(&self) -> String {
        format!("GeometricQuote(u={}, z={}, branch='{}')", self.u, self.z, self.branch)
    }
}

#[pyclass(name = "LognormalSpec", frozen, get_all, from_py_object)]
#[derive(Clone)]
struct PyLognormalSpec {
    s0: f64,
    r: f64,
    sigma: f64,
    c: f64,
    t: f64,
}

impl PyLognormalSpec {
    fn spec(&self) -> growthprice::LognormalSpec {
        growthprice::LognormalSpec {
            s0: self.s0,
            r: self.r,
            sigma: self.sigma,
            c: self.c,
            t: self.t,
        }
    }
}

#[pymethods]
impl PyLognormalSpec {
    #[new]
    #[pyo3(signature = (r, sigma, t, c = 0.0, s0 = 1.0))]
    fn new(r: f64, sigma: f64, t: f64, c: f64, s0: f64) -> PyResult<Self> {
        growthprice::LognormalSpec::new(s0, r, sigma, c, t).map_err(to_py)?;
        Ok(Self { s0, r, sigma, c, t })
    }
}

#[pyclass(name = "LognormalQuote", frozen, get_all)]
struct PyLognormalQuote {
    u: f64,
    z: f64,
    regime: &'static str,
    growth_residual: f64,
    foc_residual: f64,
    iterations: usize,
}

#[pymethods]
impl PyLognormalQuote {
    fn __repr__(&self) -> String {
        format!("LognormalQuote(u={}, z={}, regime='{}')", self.u, self.z, self.regime)
    }
}

/// Replication cost of the state claim `(up, down)` and the hedge
/// `(riskless_units, risky_units)`.
#[pyfunction]
fn rational_price(up: f64, down: f64, asset: PyBinomialAsset) -> (f64, (f64, f64)) {
    let q = binomial::rational_price(StateClaim::new(up, down), &asset.0);
    (q.price, (q.portfolio.riskless_units, q.portfolio.risky_units))
}

/// Discounted expectation under the claim's own probabilities.
#[pyfunction]
fn martingale_price(claim: AnyClaim, r: f64) -> PyResult<f64> {
    let m = market(r)?;
    Ok(match claim {
        AnyClaim::TwoPoint(c) => binomial::martingale_price(&c.0, m),
        AnyClaim::Discrete(c) => c.0.expectation() / m.growth_factor(),
    })
}

/// Growth-optimal price; raises `NoSolutionError` when none exists.
#[pyfunction]
fn geometric_price(claim: AnyClaim, r: f64) -> PyResult<PyGeometricQuote> {
    let m = market(r)?;
    let price = match &claim {
        AnyClaim::TwoPoint(c) => growth::geometric_price_two_point(&c.0, m),
        AnyClaim::Discrete(c) => growth::geometric_price_general(&c.0, m),
    }
    .map_err(to_py)?;
    match price {
        GeometricPrice::Priced(q) => Ok(PyGeometricQuote {
            u: q.u,
            z: q.z,
            branch: match q.branch {
                Branch::FullInvestment => "full_investment",
                Branch::Interior => "interior",
            },
        }),
        GeometricPrice::NoSolution { condition } => Err(NoSolutionError::new_err(format!(
            "best attainable growth {condition} does not exceed 1 + r = {}",
            m.growth_factor()
        ))),
    }
}

/// `(z, growth)` maximizing the growth rate at price `u`.
#[pyfunction]
fn optimal_fraction(claim: AnyClaim, u: f64) -> PyResult<(f64, f64)> {
    let opt = growth::optimal_fraction(&claim.discrete(), u).map_err(to_py)?;
    Ok((opt.z, opt.growth))
}

#[pyfunction]
fn growth_rate(claim: AnyClaim, u: f64, z: f64) -> PyResult<f64> {
    growth::growth_rate(&claim.discrete(), u, z).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (spec, quad_order = lognormal::DEFAULT_QUADRATURE_ORDER))]
fn geometric_price_lognormal(py: Python<'_>, spec: PyLognormalSpec, quad_order: usize) -> PyResult<PyLognormalQuote> {
    let q = py
        .detach(|| LognormalPricer::new(quad_order)?.price(&spec.spec()))
        .map_err(to_py)?;
    Ok(PyLognormalQuote {
        u: q.u,
        z: q.z,
        regime: match q.regime {
            VolatilityRegime::Small => "small_volatility",
            VolatilityRegime::Large => "large_volatility",
        },
        growth_residual: q.growth_residual,
        foc_residual: q.foc_residual,
        iterations: q.iterations,
    })
}

#[pyfunction]
fn martingale_price_lognormal(spec: PyLognormalSpec) -> PyResult<f64> {
    lognormal::martingale_price_lognormal(&spec.spec()).map_err(to_py)
}

/// `(c, band_lo, band_hi)` on `grid_size` even horizons up to `t_max`.
#[pyfunction]
#[pyo3(signature = (r, sigma, t_max, grid_size = lognormal::DEFAULT_CALIBRATION_GRID))]
fn calibrate_drift_correction(py: Python<'_>, r: f64, sigma: f64, t_max: f64, grid_size: usize) -> PyResult<(f64, f64, f64)> {
    let cal = py
        .detach(|| lognormal::calibrate_drift_correction(r, sigma, t_max, grid_size))
        .map_err(to_py)?;
    Ok((cal.c, cal.band_lo, cal.band_hi))
}

/// Brute-force geometric price; raises `NoSolutionError` without a crossing.
#[pyfunction]
#[pyo3(signature = (claim, r, grid_resolution = 1e-9))]
fn oracle_geometric_price(py: Python<'_>, claim: AnyClaim, r: f64, grid_resolution: f64) -> PyResult<f64> {
    let m = market(r)?;
    let claim = claim.discrete();
    py.detach(|| harness::oracle_geometric_price(&claim, m, grid_resolution))
        .map_err(to_py)
}

/// `(growth, std_error)` over `n_paths * n_periods` seeded draws.
#[pyfunction]
#[pyo3(signature = (claim, u, z, n_paths = 1000, n_periods = 1000, seed = 20_240_601))]
fn simulate_growth(
    py: Python<'_>,
    claim: AnyClaim,
    u: f64,
    z: f64,
    n_paths: usize,
    n_periods: usize,
    seed: u64,
) -> PyResult<(f64, f64)> {
    let config = SimulationConfig::new(n_paths, n_periods, seed, 1.0).map_err(to_py)?;
    let claim = claim.discrete();
    let est = py
        .detach(|| harness::simulate_growth(&claim, u, z, &config))
        .map_err(to_py)?;
    Ok((est.growth, est.std_error))
}

#[pymodule(name = "growthprice")]
fn growthprice_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("NoSolutionError", m.py().get_type::<NoSolutionError>())?;
    m.add("NumericalError", m.py().get_type::<NumericalError>())?;
    m.add_class::<PyTwoPointClaim>()?;
    m.add_class::<PyDiscreteClaim>()?;
    m.add_class::<PyBinomialAsset>()?;
    m.add_class::<PyGeometricQuote>()?;
    m.add_class::<PyLognormalSpec>()?;
    m.add_class::<PyLognormalQuote>()?;
    m.add_function(wrap_pyfunction!(rational_price, m)?)?;
    m.add_function(wrap_pyfunction!(martingale_price, m)?)?;
    m.add_function(wrap_pyfunction!(geometric_price, m)?)?;
    m.add_function(wrap_pyfunction!(optimal_fraction, m)?)?;
    m.add_function(wrap_pyfunction!(growth_rate, m)?)?;
    m.add_function(wrap_pyfunction!(geometric_price_lognormal, m)?)?;
    m.add_function(wrap_pyfunction!(martingale_price_lognormal, m)?)?;
    m.add_function(wrap_pyfunction!(calibrate_drift_correction, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_geometric_price, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_growth, m)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn module_prices_through_the_interpreter() {
        pyo3::append_to_inittab!(growthprice_module);
        Python::initialize();
        Python::attach(|py| {
            let m = py.import("growthprice").unwrap();
            let claim = m.getattr("TwoPointClaim").unwrap().call1((12.0, 1.1, 0.99)).unwrap();
            let quote = m.getattr("geometric_price").unwrap().call1((claim, 0.2)).unwrap();
            let u: f64 = quote.getattr("u").unwrap().extract().unwrap();
            assert!((u - 9.764).abs() < 1e-3);

            let gamble = m.getattr("TwoPointClaim").unwrap().call1((2.0, -1.0, 0.6)).unwrap();
            let err = m.getattr("geometric_price").unwrap().call1((gamble, 0.2)).unwrap_err();
            assert!(err.is_instance_of::<NoSolutionError>(py));
            let err = m.getattr("TwoPointClaim").unwrap().call1((2.0, 1.0, 1.5)).unwrap_err();
            assert!(err.is_instance_of::<PyValueError>(py));
        });
    }
}
