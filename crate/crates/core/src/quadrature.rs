//! Composite Gauss–Legendre quadrature on explicit panel edges.
//!
//! Divergence integrals here involve densities whose mass can sit anywhere
//! from a narrow Gaussian bump to a log-normal spanning many decades, so the
//! rule takes an explicit, possibly non-uniform panel partition and applies a
//! fixed-order Gauss–Legendre rule on each panel.

use crate::error::{Error, Result};

/// Gauss–Legendre nodes and weights on [-1, 1] for a given order.
///
/// Nodes are roots of the Legendre polynomial, found by Newton iteration from
/// the Chebyshev-based initial guess.
fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let n = order;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = (n + 1) / 2;
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut pp = 0.0;
        for _ in 0..100 {
            // evaluate P_n(x) and P'_n(x) by upward recurrence
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            pp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / pp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * pp * pp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// A composite quadrature rule: panel edges plus a per-panel Gauss order.
#[derive(Debug, Clone)]
pub struct Quadrature {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Quadrature {
    /// Rule over `[lo, hi]` with `panels` equal panels of `order` points each.
    pub fn uniform(lo: f64, hi: f64, panels: usize, order: usize) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidArgument(format!(
                "quadrature interval [{lo}, {hi}] is not a finite ordered pair"
            )));
        }
        let edges: Vec<f64> = (0..=panels)
            .map(|i| lo + (hi - lo) * i as f64 / panels as f64)
            .collect();
        Self::from_edges(&edges, order)
    }

    /// Rule over explicit panel edges (sorted, strictly increasing).
    pub fn from_edges(edges: &[f64], order: usize) -> Result<Self> {
        if edges.len() < 2 {
            return Err(Error::InvalidArgument(
                "quadrature needs at least two panel edges".into(),
            ));
        }
        if order < 2 {
            return Err(Error::InvalidArgument("quadrature order must be >= 2".into()));
        }
        let (gx, gw) = gauss_legendre(order);
        let mut nodes = Vec::with_capacity((edges.len() - 1) * order);
        let mut weights = Vec::with_capacity((edges.len() - 1) * order);
        for pair in edges.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            if !(a < b) {
                return Err(Error::InvalidArgument(
                    "quadrature panel edges must be strictly increasing".into(),
                ));
            }
            let half = 0.5 * (b - a);
            let mid = 0.5 * (a + b);
            for (x, w) in gx.iter().zip(&gw) {
                nodes.push(mid + half * x);
                weights.push(half * w);
            }
        }
        Ok(Self { nodes, weights })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Integrate a scalar function over the rule's support.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    /// Integrate given values already evaluated at `self.nodes()`.
    pub fn integrate_values(&self, values: &[f64]) -> f64 {
        values
            .iter()
            .zip(&self.weights)
            .map(|(v, w)| v * w)
            .sum()
    }
}
