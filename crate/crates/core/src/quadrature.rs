//! Gauss–Hermite quadrature for expectations under a normal law.
//!
//! Nodes are the eigenvalues of the Jacobi matrix, found by Sturm-sequence
//! bisection. Weights come from the Christoffel function of the orthonormal
//! recurrence. Weights that underflow (far tails of large rules) are dropped.

use std::f64::consts::PI;

/// Node count used for averages over the signal law.
pub const SIGNAL_NODES: usize = 128;

#[derive(Debug, Clone, PartialEq)]
pub struct GaussHermite {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussHermite {
    /// Rule with `n` nodes for the weight `exp(-x^2)` on the real line.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Hermite rule needs at least one node");
        let off: Vec<f64> = (1..n).map(|k| (k as f64 / 2.0).sqrt()).collect();
        let bound = (2.0 * n as f64 + 1.0).sqrt() + 1.0;
        let mut nodes: Vec<f64> = (0..n).rev().map(|k| jacobi_eigenvalue(&off, k, bound)).collect();
        // Symmetrise to remove bisection noise.
        for i in 0..n / 2 {
            let x = 0.5 * (nodes[i] - nodes[n - 1 - i]);
            nodes[i] = x;
            nodes[n - 1 - i] = -x;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        let (nodes, weights) = nodes
            .into_iter()
            .map(|x| (x, christoffel_weight(x, n)))
            .filter(|(_, w)| *w > 0.0 && w.is_finite())
            .unzip();
        GaussHermite { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `∫ exp(-x^2) f(x) dx`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    /// `E[f(X)]` for `X ~ Normal(mean, var)`.
    pub fn expect_normal<F: FnMut(f64) -> f64>(&self, mean: f64, var: f64, mut f: F) -> f64 {
        let scale = (2.0 * var).sqrt();
        self.integrate(|x| f(mean + scale * x)) / PI.sqrt()
    }

    /// Probability-weighted atoms of `Normal(mean, var)` under this rule.
    pub fn normal_atoms(&self, mean: f64, var: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let scale = (2.0 * var).sqrt();
        let norm = PI.sqrt();
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mean + scale * x, w / norm))
    }
}

/// Number of eigenvalues below `x` of the symmetric tridiagonal matrix with
/// zero diagonal and off-diagonal `off`.
fn sturm_count(off: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut d = -x;
    if d < 0.0 {
        count += 1;
    }
    for &b in off {
        let prev = if d == 0.0 { f64::EPSILON * b.max(1.0) } else { d };
        d = -x - b * b / prev;
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

/// `k`-th smallest eigenvalue of the Hermite Jacobi matrix by bisection.
fn jacobi_eigenvalue(off: &[f64], k: usize, bound: f64) -> f64 {
    let (mut lo, mut hi) = (-bound, bound);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(off, mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `1 / Σ ψ_j(x)^2` over the first `n` orthonormal Hermite functions,
/// rescaled as it goes so large nodes do not overflow.
fn christoffel_weight(x: f64, n: usize) -> f64 {
    let mut log_scale = 0.0_f64;
    let mut prev = 0.0_f64;
    let mut cur = PI.powf(-0.25);
    let mut sum = cur * cur;
    for j in 1..n {
        let jf = j as f64;
        let next = x * (2.0 / jf).sqrt() * cur - ((jf - 1.0) / jf).sqrt() * prev;
        prev = cur;
        cur = next;
        sum += cur * cur;
        if sum > 1e100 {
            let r = 1e-50;
            prev *= r;
            cur *= r;
            sum *= r * r;
            log_scale += 2.0 * (1e50_f64).ln();
        }
    }
    (-(sum.ln() + log_scale)).exp()
}
