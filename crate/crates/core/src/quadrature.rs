//! Product Gauss rules on the ball.
//!
//! Writing `x = (√(1-t²)·y, t)` with `y` in the ball of one dimension less
//! gives `1-|x|² = (1-t²)(1-|y|²)` and `dx = (1-t²)^{(d-1)/2} dy dt`, so
//!
//! ```text
//! ∫_{B^d} f W_μ dx = ∫_{-1}^{1} (1-t²)^{μ+d/2-1} ∫_{B^{d-1}} f(√(1-t²)y, t) W_μ(y) dy dt.
//! ```
//!
//! Recursing down to `[-1, 1]` with weight `(1-t²)^{μ-1/2}` yields a positive
//! rule that is exact on `Π_D^d` when every one-dimensional factor has
//! `⌈(D+1)/2⌉` nodes. Odd powers of `√(1-t²)` only appear next to odd
//! monomials in `y`, which every (symmetric) inner rule integrates to zero.

use crate::error::Result;
use crate::orthopoly::{gauss_jacobi, JacobiParams};

/// Positive rule for the normalized measure `b_d^μ W_μ(x) dx` on `B^d`.
#[derive(Debug, Clone)]
pub struct BallRule {
    pub d: usize,
    pub mu: f64,
    pub degree: usize,
    /// Row-major `len × d` node coordinates.
    pub nodes: Vec<f64>,
    /// Weights summing to one.
    pub weights: Vec<f64>,
}

impl BallRule {
    /// Rule exact for polynomials of total degree `<= degree`.
    pub fn new(mu: f64, d: usize, degree: usize) -> Result<Self> {
        let m = degree / 2 + 1;
        let base = gauss_jacobi(JacobiParams::new(mu - 0.5, mu - 0.5)?, m)?;
        let mut nodes: Vec<f64> = base.nodes.clone();
        let mut weights: Vec<f64> = base.weights.clone();
        for k in 2..=d {
            let e = mu + k as f64 / 2.0 - 1.0;
            let outer = gauss_jacobi(JacobiParams::new(e, e)?, m)?;
            let inner_len = weights.len();
            let mut next_nodes = Vec::with_capacity(inner_len * outer.len() * k);
            let mut next_weights = Vec::with_capacity(inner_len * outer.len());
            for (t, wt) in outer.iter() {
                let s = (1.0 - t * t).sqrt();
                for i in 0..inner_len {
                    next_nodes.extend(nodes[i * (k - 1)..(i + 1) * (k - 1)].iter().map(|y| s * y));
                    next_nodes.push(t);
                    next_weights.push(wt * weights[i]);
                }
            }
            nodes = next_nodes;
            weights = next_weights;
        }
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);
        Ok(Self {
            d,
            mu,
            degree,
            nodes,
            weights,
        })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn node(&self, i: usize) -> &[f64] {
        &self.nodes[i * self.d..(i + 1) * self.d]
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[f64], f64)> + '_ {
        self.nodes.chunks_exact(self.d).zip(self.weights.iter().copied())
    }

    /// `∫ f dm` for the normalized measure.
    pub fn integrate<F: FnMut(&[f64]) -> f64>(&self, mut f: F) -> f64 {
        crate::sum::pairwise(&self.iter().map(|(x, w)| w * f(x)).collect::<Vec<_>>())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::monomial_moment;
    use approx::assert_relative_eq;

    fn monomial(x: &[f64], a: &[usize]) -> f64 {
        x.iter().zip(a).map(|(v, &e)| v.powi(e as i32)).product()
    }

    #[test]
    fn exact_on_monomials_2d_and_3d() {
        for &mu in &[0.0, 0.5, 1.0, 2.5] {
            let r2 = BallRule::new(mu, 2, 10).unwrap();
            for a in 0..=10usize {
                for b in 0..=(10 - a) {
                    let q = r2.integrate(|x| monomial(x, &[a, b]));
                    let exact = monomial_moment(mu, &[a, b]);
                    assert!((q - exact).abs() < 1e-14, "mu={mu} ({a},{b}): {q} vs {exact}");
                }
            }
            let r3 = BallRule::new(mu, 3, 6).unwrap();
            for a in 0..=6usize {
                for b in 0..=(6 - a) {
                    for c in 0..=(6 - a - b) {
                        let q = r3.integrate(|x| monomial(x, &[a, b, c]));
                        let exact = monomial_moment(mu, &[a, b, c]);
                        assert!((q - exact).abs() < 1e-14);
                    }
                }
            }
        }
    }

    #[test]
    fn disk_second_moment() {
        let r = BallRule::new(0.5, 2, 4).unwrap();
        assert_relative_eq!(r.integrate(|x| x[0] * x[0]), 0.25, epsilon = 1e-15);
        assert!(r.iter().all(|(x, w)| w > 0.0 && x[0] * x[0] + x[1] * x[1] < 1.0));
    }
}
