use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, OnceLock, RwLock};

use nalgebra::{DMatrix, SymmetricEigen};

use super::NumericsError;

/// Gauss-Hermite rule for integrals of the form `∫ f(s) e^{-s²} ds`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    /// Builds an `order`-point rule without touching the cache.
    ///
    /// Golub-Welsch gives the starting nodes (eigenvalues of the symmetric
    /// Jacobi matrix with off-diagonal `sqrt(k/2)`). Each node is then
    /// polished by Newton on the orthonormal Hermite recurrence, and weights
    /// come from the Christoffel function `1 / Σ_k p_k(x)²`, which keeps the
    /// tail weights accurate where squared eigenvector entries would not be.
    pub fn gauss_hermite(order: usize) -> Result<Self, NumericsError> {
        if order < 2 {
            return Err(NumericsError::InvalidOrder(order));
        }

        let mut jacobi = DMatrix::<f64>::zeros(order, order);
        for k in 1..order {
            let off = (k as f64 / 2.0).sqrt();
            jacobi[(k - 1, k)] = off;
            jacobi[(k, k - 1)] = off;
        }
        let mut nodes: Vec<f64> = SymmetricEigen::new(jacobi).eigenvalues.iter().copied().collect();
        nodes.sort_by(f64::total_cmp);

        for x in nodes.iter_mut() {
            for _ in 0..8 {
                let (p_n, p_nm1, _) = hermite_orthonormal(order, *x);
                let dp = (2.0 * order as f64).sqrt() * p_nm1;
                let step = p_n / dp;
                *x -= step;
                if step.abs() <= 1e-16 * x.abs().max(1.0) {
                    break;
                }
            }
        }

        // Exact symmetry about the origin.
        for i in 0..order / 2 {
            let j = order - 1 - i;
            let half = 0.5 * (nodes[j] - nodes[i]);
            nodes[i] = -half;
            nodes[j] = half;
        }
        if order % 2 == 1 {
            nodes[order / 2] = 0.0;
        }

        let weights = nodes.iter().map(|&x| 1.0 / hermite_orthonormal(order, x).2).collect();
        Ok(Self { nodes, weights })
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }

    /// `∫ f(s) e^{-s²} ds`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.iter().map(|(s, w)| w * f(s)).sum()
    }

    /// `E[f(X)]` for `X ~ N(0, variance)`, via `x = sqrt(2 variance) s`.
    pub fn normal_expectation<F: FnMut(f64) -> f64>(&self, variance: f64, mut f: F) -> f64 {
        let scale = (2.0 * variance).sqrt();
        self.integrate(|s| f(scale * s)) / PI.sqrt()
    }
}

/// Returns `(p_n(x), p_{n-1}(x), Σ_{k<n} p_k(x)²)` for the Hermite
/// polynomials orthonormal under `e^{-x²}`.
fn hermite_orthonormal(n: usize, x: f64) -> (f64, f64, f64) {
    let mut prev = 0.0;
    let mut cur = PI.powf(-0.25);
    let mut sum_sq = 0.0;
    for k in 0..n {
        sum_sq += cur * cur;
        let kf = k as f64;
        let next = x * (2.0 / (kf + 1.0)).sqrt() * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    (cur, prev, sum_sq)
}

type RuleCache = RwLock<HashMap<usize, Arc<QuadratureRule>>>;

fn cache() -> &'static RuleCache {
    static CACHE: OnceLock<RuleCache> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Memoized [`QuadratureRule::gauss_hermite`]. Concurrent first calls may
/// each build the rule; the results are identical so whichever lands wins.
pub fn gauss_hermite_rule(order: usize) -> Result<Arc<QuadratureRule>, NumericsError> {
    if let Some(rule) = cache().read().unwrap_or_else(|e| e.into_inner()).get(&order) {
        return Ok(Arc::clone(rule));
    }
    let rule = Arc::new(QuadratureRule::gauss_hermite(order)?);
    cache()
        .write()
        .unwrap_or_else(|e| e.into_inner())
        .insert(order, Arc::clone(&rule));
    Ok(rule)
}
