//! Jacobi and Gegenbauer polynomials and Gauss–Jacobi quadrature.
//!
//! Everything here works with the classical (unnormalized) polynomials
//! `P_n^{(α,β)}` and `C_n^λ`. Scalar constants built from Gamma ratios are
//! always evaluated in log space so that degrees well beyond 170 do not
//! overflow.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[inline]
pub(crate) fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// Parameters `(α, β)` of the Jacobi weight `(1-t)^α (1+t)^β` on `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JacobiParams {
    pub alpha: f64,
    pub beta: f64,
}

impl JacobiParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > -1.0 && beta > -1.0) || !alpha.is_finite() || !beta.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "jacobi parameters must exceed -1, got alpha={alpha}, beta={beta}"
            )));
        }
        Ok(Self { alpha, beta })
    }

    /// `∫_{-1}^{1} (1-t)^α (1+t)^β dt`.
    pub fn weight_integral(&self) -> f64 {
        self.ln_weight_integral().exp()
    }

    pub(crate) fn ln_weight_integral(&self) -> f64 {
        let s = self.alpha + self.beta;
        (s + 1.0) * std::f64::consts::LN_2 + ln_gamma(self.alpha + 1.0) + ln_gamma(self.beta + 1.0)
            - ln_gamma(s + 2.0)
    }

    /// The weight `w_{α,β}(t)` itself.
    pub fn weight(&self, t: f64) -> f64 {
        (1.0 - t).powf(self.alpha) * (1.0 + t).powf(self.beta)
    }
}

/// Gegenbauer index `λ > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GegenbauerIndex {
    pub lambda: f64,
}

impl GegenbauerIndex {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "gegenbauer index must be positive, got {lambda}"
            )));
        }
        Ok(Self { lambda })
    }

    /// The Jacobi parameters `(λ-1/2, λ-1/2)` of the same family.
    pub fn jacobi(&self) -> JacobiParams {
        JacobiParams {
            alpha: self.lambda - 0.5,
            beta: self.lambda - 0.5,
        }
    }

    /// Factor `c_n` with `C_n^λ = c_n P_n^{(λ-1/2, λ-1/2)}`.
    pub fn jacobi_factor(&self, n: usize) -> f64 {
        let l = self.lambda;
        let n = n as f64;
        (ln_gamma(l + 0.5) - ln_gamma(2.0 * l) + ln_gamma(n + 2.0 * l) - ln_gamma(n + l + 0.5)).exp()
    }
}

/// Three-term recurrence coefficients: `P_{n+1} = (a x + b) P_n - c P_{n-1}`.
#[inline]
fn jacobi_step(alpha: f64, beta: f64, n: usize, x: f64, p: f64, p_prev: f64) -> f64 {
    let n = n as f64;
    let s = alpha + beta;
    let two_n_s = 2.0 * n + s;
    let denom = 2.0 * (n + 1.0) * (n + s + 1.0) * two_n_s;
    let a = (two_n_s + 1.0) * (two_n_s + 2.0) * two_n_s;
    let b = (two_n_s + 1.0) * (alpha * alpha - beta * beta);
    let c = 2.0 * (n + alpha) * (n + beta) * (two_n_s + 2.0);
    ((a * x + b) * p - c * p_prev) / denom
}

#[inline]
fn jacobi_p1(alpha: f64, beta: f64, x: f64) -> f64 {
    0.5 * ((alpha + beta + 2.0) * x + (alpha - beta))
}

/// `P_n^{(α,β)}(x)` by the three-term recurrence.
pub fn jacobi_eval(p: JacobiParams, n: usize, x: f64) -> f64 {
    match n {
        0 => 1.0,
        _ => {
            let (alpha, beta) = (p.alpha, p.beta);
            let mut prev = 1.0;
            let mut cur = jacobi_p1(alpha, beta, x);
            for k in 1..n {
                let next = jacobi_step(alpha, beta, k, x, cur, prev);
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

/// Fills `out[k] = P_k^{(α,β)}(x)` for `k < out.len()`.
pub fn jacobi_eval_all(p: JacobiParams, x: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = 1.0;
    if out.len() == 1 {
        return;
    }
    out[1] = jacobi_p1(p.alpha, p.beta, x);
    for k in 1..out.len() - 1 {
        out[k + 1] = jacobi_step(p.alpha, p.beta, k, x, out[k], out[k - 1]);
    }
}

/// `P_n^{(α,β)}(1) = binom(n+α, n)`, via log-Gamma.
pub fn jacobi_at_one(p: JacobiParams, n: usize) -> f64 {
    let n = n as f64;
    (ln_gamma(n + p.alpha + 1.0) - ln_gamma(p.alpha + 1.0) - ln_gamma(n + 1.0)).exp()
}

/// Squared norm `h_n` of `P_n^{(α,β)}` under the normalized weight `c_{α,β} w_{α,β}`.
pub fn jacobi_h(p: JacobiParams, n: usize) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let (a, b) = (p.alpha, p.beta);
    let nf = n as f64;
    let ln = ln_gamma(a + b + 2.0) - ln_gamma(a + 1.0) - ln_gamma(b + 1.0) + ln_gamma(nf + a + 1.0)
        + ln_gamma(nf + b + 1.0)
        - (2.0 * nf + a + b + 1.0).ln()
        - ln_gamma(nf + 1.0)
        - ln_gamma(nf + a + b + 1.0);
    ln.exp()
}

/// `C_n^λ(x)` through the Jacobi conversion.
pub fn gegenbauer_eval(g: GegenbauerIndex, n: usize, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    g.jacobi_factor(n) * jacobi_eval(g.jacobi(), n, x)
}

/// Gauss rule for the weight `w_{α,β}` on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule1D {
    #[serde(flatten)]
    pub param: JacobiParams,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule1D {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Highest polynomial degree integrated exactly.
    pub fn exact_degree(&self) -> usize {
        2 * self.nodes.len() - 1
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }
}

/// `m`-point Gauss–Jacobi rule (Golub–Welsch).
pub fn gauss_jacobi(p: JacobiParams, m: usize) -> Result<QuadratureRule1D> {
    if m == 0 {
        return Err(Error::InvalidParameter("gauss_jacobi needs at least one node".into()));
    }
    let (a, b) = (p.alpha, p.beta);
    let s = a + b;
    let mu0 = p.weight_integral();

    let mut jac = DMatrix::<f64>::zeros(m, m);
    for k in 0..m {
        let kf = k as f64;
        let diag = if k == 0 {
            (b - a) / (s + 2.0)
        } else {
            (b * b - a * a) / ((2.0 * kf + s) * (2.0 * kf + s + 2.0))
        };
        jac[(k, k)] = diag;
        if k + 1 < m {
            let n = kf + 1.0;
            let off2 = if k == 0 {
                4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + s).powi(2) * (3.0 + s))
            } else {
                4.0 * n * (n + a) * (n + b) * (n + s)
                    / ((2.0 * n + s).powi(2) * (2.0 * n + s + 1.0) * (2.0 * n + s - 1.0))
            };
            let off = off2.sqrt();
            jac[(k, k + 1)] = off;
            jac[(k + 1, k)] = off;
        }
    }

    let eig = SymmetricEigen::try_new(jac, 1e-15, 10_000).ok_or_else(|| Error::EigenSolve {
        nodes: m,
        alpha: a,
        beta: b,
        detail: "QR iteration limit reached".into(),
    })?;

    let mut pairs: Vec<(f64, f64)> = (0..m)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (eig.eigenvalues[i], mu0 * v0 * v0)
        })
        .collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));

    for (i, &(x, w)) in pairs.iter().enumerate() {
        let bad_node = !(x > -1.0 && x < 1.0) || (i > 0 && x <= pairs[i - 1].0);
        if bad_node || !(w > 0.0) {
            return Err(Error::EigenSolve {
                nodes: m,
                alpha: a,
                beta: b,
                detail: format!("node {i} = {x}, weight {w}"),
            });
        }
    }

    Ok(QuadratureRule1D {
        param: p,
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn legendre() -> JacobiParams {
        JacobiParams::new(0.0, 0.0).unwrap()
    }

    #[test]
    fn jacobi_small_cases() {
        assert_eq!(jacobi_eval(legendre(), 0, 0.3), 1.0);
        assert_relative_eq!(jacobi_eval(legendre(), 2, 1.0), 1.0, epsilon = 1e-15);
        // (3x^2 - 1)/2 at 0
        assert_relative_eq!(jacobi_eval(legendre(), 2, 0.0), -0.5, epsilon = 1e-15);
        for &x in &[-0.9, -0.2, 0.4, 0.77] {
            let closed = 0.5 * (3.0 * x * x - 1.0);
            assert_relative_eq!(jacobi_eval(legendre(), 2, x), closed, epsilon = 1e-15);
        }
    }

    #[test]
    fn eval_all_matches_single() {
        let p = JacobiParams::new(2.0, 0.5).unwrap();
        let mut buf = vec![0.0; 30];
        jacobi_eval_all(p, 0.37, &mut buf);
        for (n, v) in buf.iter().enumerate() {
            assert_relative_eq!(*v, jacobi_eval(p, n, 0.37), max_relative = 1e-14);
        }
    }

    #[test]
    fn h_values() {
        assert_relative_eq!(jacobi_h(legendre(), 0), 1.0);
        assert_relative_eq!(jacobi_h(legendre(), 2), 0.2, max_relative = 1e-14);
        assert_relative_eq!(jacobi_h(JacobiParams::new(1.0, 0.0).unwrap(), 0), 1.0);
        // Chebyshev: alpha + beta + 1 = 0 must not blow up at n = 0
        let cheb = JacobiParams::new(-0.5, -0.5).unwrap();
        assert_relative_eq!(jacobi_h(cheb, 0), 1.0);
        assert!(jacobi_h(cheb, 3).is_finite());
    }

    #[test]
    fn gegenbauer_small_cases() {
        let one = GegenbauerIndex::new(1.0).unwrap();
        assert_relative_eq!(gegenbauer_eval(one, 1, 0.5), 1.0, max_relative = 1e-14);
        assert_relative_eq!(gegenbauer_eval(one, 2, 0.0), -1.0, max_relative = 1e-14);
        let g = GegenbauerIndex::new(0.75).unwrap();
        assert_eq!(gegenbauer_eval(g, 0, -0.2), 1.0);
    }

    #[test]
    fn gauss_small_cases() {
        let r = gauss_jacobi(legendre(), 1).unwrap();
        assert_relative_eq!(r.nodes[0], 0.0, epsilon = 1e-15);
        assert_relative_eq!(r.weights[0], 2.0, max_relative = 1e-14);

        let r = gauss_jacobi(legendre(), 3).unwrap();
        assert_relative_eq!(r.integrate(|x| x.powi(4)), 0.4, max_relative = 1e-14);

        let r = gauss_jacobi(JacobiParams::new(0.5, 0.5).unwrap(), 2).unwrap();
        assert_relative_eq!(r.total_weight(), std::f64::consts::FRAC_PI_2, max_relative = 1e-14);
    }

    #[test]
    fn invalid_parameters() {
        assert!(JacobiParams::new(-1.0, 0.0).is_err());
        assert!(GegenbauerIndex::new(0.0).is_err());
        assert!(gauss_jacobi(legendre(), 0).is_err());
    }

    #[test]
    fn rule_serializes_flat() {
        let r = gauss_jacobi(legendre(), 2).unwrap();
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        assert!(v.get("alpha").is_some() && v.get("nodes").is_some());
    }
}
