//! Gauss–Legendre rules on `[0, 1]`.

use crate::error::{Error, Result};
use crate::scalar::Real;

pub const DEFAULT_NODES: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule<T: Real> {
    nodes: Vec<T>,
    weights: Vec<T>,
}

/// Legendre polynomial `P_n(x)` and its derivative.
fn legendre<T: Real>(n: usize, x: T) -> (T, T) {
    let mut p0 = T::one();
    let mut p1 = x;
    for k in 2..=n {
        let kf = T::from_usize_lossy(k);
        let p2 = ((kf + kf - T::one()) * x * p1 - (kf - T::one()) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = T::from_usize_lossy(n);
    let dp = nf * (x * p1 - p0) / (x * x - T::one());
    (p1, dp)
}

impl<T: Real> QuadratureRule<T> {
    /// `n`-point Gauss–Legendre rule mapped to `[0, 1]`; exact for
    /// polynomials of degree `2n − 1`.
    pub fn gauss_legendre(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("quadrature needs at least one node".into()));
        }
        if n == 1 {
            return Ok(QuadratureRule {
                nodes: vec![T::lit(0.5)],
                weights: vec![T::one()],
            });
        }
        let mut nodes = vec![T::zero(); n];
        let mut weights = vec![T::zero(); n];
        let half = T::lit(0.5);
        for i in 0..n.div_ceil(2) {
            let guess = std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5);
            let mut x = T::lit(guess.cos());
            for _ in 0..100 {
                let (p, dp) = legendre(n, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() <= T::default_epsilon() {
                    break;
                }
            }
            let (_, dp) = legendre(n, x);
            let w = T::lit(2.0) / ((T::one() - x * x) * dp * dp);
            // x is the i-th largest root; mirror it.
            nodes[n - 1 - i] = half * (T::one() + x);
            nodes[i] = half * (T::one() - x);
            weights[n - 1 - i] = half * w;
            weights[i] = half * w;
        }
        Ok(QuadratureRule { nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// Pairs `(node, weight)` on `[0, 1]`.
    pub fn iter(&self) -> impl Iterator<Item = (T, T)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }

    /// `∫_0^1 f` for scalar integrands.
    pub fn integrate<F: FnMut(T) -> T>(&self, mut f: F) -> T {
        self.iter().fold(T::zero(), |acc, (s, w)| acc + w * f(s))
    }
}

impl<T: Real> Default for QuadratureRule<T> {
    fn default() -> Self {
        Self::gauss_legendre(DEFAULT_NODES).expect("default rule")
    }
}
