//! Ball metric, weights, projector kernels and the localized kernels
//! `L_n^μ(x, y) = Σ_j â(j/n) P_j(W_μ; x, y)`.
//!
//! All kernels are reproducing kernels for the *normalized* measure
//! `dm_μ = b_d^μ W_μ(x) dx`, so `P_0 ≡ 1`.

use std::ops::Deref;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cutoff::Cutoff;
use crate::error::{Error, Result};
use crate::orthopoly::{
    gauss_jacobi, jacobi_at_one, jacobi_eval_all, jacobi_h, ln_gamma, GegenbauerIndex,
    JacobiParams,
};
use crate::quadrature::BallRule;
use crate::sum::pairwise;

/// A point of the closed unit ball `B^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BallPoint {
    pub coords: Vec<f64>,
}

impl BallPoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        let r2 = norm_sq(&coords);
        if coords.is_empty() || !(r2 <= 1.0 + 1e-12) {
            return Err(Error::InvalidParameter(format!(
                "point {coords:?} is not in the closed unit ball"
            )));
        }
        Ok(Self { coords })
    }

    pub fn origin(d: usize) -> Self {
        Self { coords: vec![0.0; d] }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn norm(&self) -> f64 {
        norm_sq(&self.coords).sqrt()
    }
}

impl Deref for BallPoint {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.coords
    }
}

impl From<BallPoint> for Vec<f64> {
    fn from(p: BallPoint) -> Self {
        p.coords
    }
}

#[inline]
pub fn norm_sq(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

#[inline]
pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// `√(1 - |x|²)`, clamped at zero.
#[inline]
pub fn boundary_gap(x: &[f64]) -> f64 {
    (1.0 - norm_sq(x)).max(0.0).sqrt()
}

/// Parameters of the weight `W_μ(x) = (1-|x|²)^{μ-1/2}` on `B^d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BallWeightParams {
    pub mu: f64,
    pub d: usize,
    /// `μ + (d-1)/2`
    pub lambda: f64,
    /// `1 / ∫_{B^d} W_μ(x) dx`
    pub b_d_mu: f64,
}

impl BallWeightParams {
    pub fn new(mu: f64, d: usize) -> Result<Self> {
        if !(mu >= 0.0) || !mu.is_finite() {
            return Err(Error::InvalidParameter(format!("mu must be >= 0, got {mu}")));
        }
        if d < 2 {
            return Err(Error::InvalidParameter(format!("dimension must be >= 2, got {d}")));
        }
        let df = d as f64;
        let ln_mass = 0.5 * df * std::f64::consts::PI.ln() + ln_gamma(mu + 0.5)
            - ln_gamma(mu + 0.5 + 0.5 * df);
        Ok(Self {
            mu,
            d,
            lambda: mu + 0.5 * (df - 1.0),
            b_d_mu: (-ln_mass).exp(),
        })
    }

    /// `∫_{B^d} W_μ(x) dx`.
    pub fn total_mass(&self) -> f64 {
        1.0 / self.b_d_mu
    }

    pub fn gegenbauer(&self) -> GegenbauerIndex {
        GegenbauerIndex { lambda: self.lambda }
    }
}

/// Geodesic distance between the lifts `(x, √(1-|x|²))` on the upper hemisphere.
///
/// Evaluated as `2·atan2(|x'-y'|, |x'+y'|)`, which equals the arccos form but
/// keeps full relative accuracy for nearby points.
pub fn ball_distance(x: &[f64], y: &[f64]) -> f64 {
    let (gx, gy) = (boundary_gap(x), boundary_gap(y));
    let mut diff = (gx - gy) * (gx - gy);
    let mut sum = (gx + gy) * (gx + gy);
    for (a, b) in x.iter().zip(y) {
        diff += (a - b) * (a - b);
        sum += (a + b) * (a + b);
    }
    2.0 * diff.sqrt().atan2(sum.sqrt())
}

/// `W_μ(x)`; `+∞` on the sphere when `μ < 1/2`.
pub fn weight_w(p: &BallWeightParams, x: &[f64]) -> f64 {
    (1.0 - norm_sq(x)).max(0.0).powf(p.mu - 0.5)
}

/// `𝒲_μ(n; x) = (√(1-|x|²) + 1/n)^{2μ}`.
pub fn weight_cal_w(p: &BallWeightParams, n: f64, x: &[f64]) -> f64 {
    (boundary_gap(x) + 1.0 / n).powf(2.0 * p.mu)
}

/// `∫ x^a dm_μ` for the normalized measure on `B^d`, `d = a.len()`.
pub fn monomial_moment(mu: f64, exps: &[usize]) -> f64 {
    if exps.iter().any(|e| e % 2 == 1) {
        return 0.0;
    }
    let half_pi = ln_gamma(0.5);
    let d = exps.len() as f64;
    let total: usize = exps.iter().sum();
    let ln = exps
        .iter()
        .map(|&e| ln_gamma((e as f64 + 1.0) / 2.0) - half_pi)
        .sum::<f64>()
        + ln_gamma(mu + (d + 1.0) / 2.0)
        - ln_gamma(total as f64 / 2.0 + mu + (d + 1.0) / 2.0);
    ln.exp()
}

/// The inner variable `t(x, y; u) = ⟨x,y⟩ + u√(1-|x|²)√(1-|y|²)` is affine in
/// `u`; this returns its intercept and slope.
#[inline]
fn t_affine(x: &[f64], y: &[f64]) -> (f64, f64) {
    (dot(x, y), boundary_gap(x) * boundary_gap(y))
}

/// Normalized rule for `(1-u²)^{μ-1}` on `[-1, 1]` (weights sum to one).
fn u_rule(mu: f64, nodes: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let rule = gauss_jacobi(JacobiParams::new(mu - 1.0, mu - 1.0)?, nodes)?;
    let total = rule.total_weight();
    let w = rule.weights.iter().map(|w| w / total).collect();
    Ok((rule.nodes, w))
}

/// Sums `Σ_j coeffs[j] P_j^{(λ-1/2,λ-1/2)}(t)` with one forward recurrence.
fn jacobi_series(p: JacobiParams, coeffs: &[f64], t: f64, buf: &mut Vec<f64>) -> f64 {
    buf.resize(coeffs.len(), 0.0);
    jacobi_eval_all(p, t.clamp(-1.0, 1.0), buf);
    coeffs.iter().zip(buf.iter()).map(|(c, v)| c * v).sum()
}

/// `L_n^μ` together with its univariate generator `L_n^λ`.
#[derive(Debug, Clone)]
pub struct LocalizedKernel {
    pub n: usize,
    pub params: BallWeightParams,
    pub cutoff: Cutoff,
    jacobi: JacobiParams,
    /// `â(j/n) (j+λ)/λ · c_j` with `C_j^λ = c_j P_j^{(λ-1/2,λ-1/2)}`; `j < 2n`.
    coeffs: Vec<f64>,
    /// `None` for `μ = 0` (two-point limit).
    u_nodes: Option<(Vec<f64>, Vec<f64>)>,
}

impl LocalizedKernel {
    pub fn new(params: BallWeightParams, n: usize, cutoff: Cutoff) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("kernel scale n must be >= 1".into()));
        }
        let g = params.gegenbauer();
        let lam = params.lambda;
        let mut coeffs: Vec<f64> = (0..2 * n)
            .map(|j| {
                let a = cutoff.eval(j as f64 / n as f64);
                if a == 0.0 {
                    0.0
                } else {
                    a * (j as f64 + lam) / lam * g.jacobi_factor(j)
                }
            })
            .collect();
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        let u_nodes = if params.mu > 0.0 {
            Some(u_rule(params.mu, 2 * n + 5)?)
        } else {
            None
        };
        Ok(Self {
            n,
            params,
            cutoff,
            jacobi: g.jacobi(),
            coeffs,
            u_nodes,
        })
    }

    /// Largest `j` with a non-zero series coefficient (`None` if all vanish).
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// `L_n^λ(t) = Σ_j â(j/n) (j+λ)/λ C_j^λ(t)`.
    pub fn lambda_series(&self, t: f64) -> f64 {
        let mut buf = Vec::with_capacity(self.coeffs.len());
        jacobi_series(self.jacobi, &self.coeffs, t, &mut buf)
    }

    /// `L_n^μ(x, y)` through the one-dimensional integral representation.
    pub fn eval(&self, x: &[f64], y: &[f64]) -> f64 {
        let mut buf = Vec::with_capacity(self.coeffs.len());
        self.eval_with(x, y, &mut buf)
    }

    pub(crate) fn eval_with(&self, x: &[f64], y: &[f64], buf: &mut Vec<f64>) -> f64 {
        if self.coeffs.is_empty() {
            return 0.0;
        }
        let (t0, s) = t_affine(x, y);
        match &self.u_nodes {
            Some((nodes, weights)) => nodes
                .iter()
                .zip(weights)
                .map(|(u, w)| w * jacobi_series(self.jacobi, &self.coeffs, t0 + u * s, buf))
                .sum(),
            None => {
                0.5 * (jacobi_series(self.jacobi, &self.coeffs, t0 + s, buf)
                    + jacobi_series(self.jacobi, &self.coeffs, t0 - s, buf))
            }
        }
    }
}

pub fn kernel_l_lambda(k: &LocalizedKernel, t: f64) -> f64 {
    k.lambda_series(t)
}

pub fn kernel_l_mu(k: &LocalizedKernel, x: &[f64], y: &[f64]) -> f64 {
    k.eval(x, y)
}

/// All projector kernels `P_ν(W_μ; x, y)`, `ν <= n`, from one pass per node.
#[derive(Debug, Clone)]
pub struct ProjectorSeries {
    pub n: usize,
    pub params: BallWeightParams,
    jacobi: JacobiParams,
    /// `(ν+λ)/λ · c_ν`
    factors: Vec<f64>,
    u_nodes: Option<(Vec<f64>, Vec<f64>)>,
}

impl ProjectorSeries {
    pub fn new(params: BallWeightParams, n: usize) -> Result<Self> {
        let g = params.gegenbauer();
        let lam = params.lambda;
        let factors = (0..=n)
            .map(|v| (v as f64 + lam) / lam * g.jacobi_factor(v))
            .collect();
        let u_nodes = if params.mu > 0.0 {
            Some(u_rule(params.mu, n / 2 + 1)?)
        } else {
            None
        };
        Ok(Self {
            n,
            params,
            jacobi: g.jacobi(),
            factors,
            u_nodes,
        })
    }

    /// Writes `P_ν(x, y)` into `out[ν]` for `ν <= n`.
    pub fn eval_all(&self, x: &[f64], y: &[f64], out: &mut [f64]) {
        let len = self.n + 1;
        let out = &mut out[..len];
        out.iter_mut().for_each(|v| *v = 0.0);
        let mut buf = vec![0.0; len];
        let (t0, s) = t_affine(x, y);
        let mut accumulate = |t: f64, w: f64, out: &mut [f64]| {
            jacobi_eval_all(self.jacobi, t.clamp(-1.0, 1.0), &mut buf);
            for ((o, f), p) in out.iter_mut().zip(&self.factors).zip(&buf) {
                *o += w * f * p;
            }
        };
        match &self.u_nodes {
            Some((nodes, weights)) => {
                for (u, w) in nodes.iter().zip(weights) {
                    accumulate(t0 + u * s, *w, out);
                }
            }
            None => {
                accumulate(t0 + s, 0.5, out);
                accumulate(t0 - s, 0.5, out);
            }
        }
    }

    /// `Σ_{ν<=n} P_ν(x, y)`, the partial-sum kernel.
    pub fn partial_sum(&self, x: &[f64], y: &[f64]) -> f64 {
        let mut out = vec![0.0; self.n + 1];
        self.eval_all(x, y, &mut out);
        out.iter().sum()
    }
}

/// `P_n(W_μ; x, y)`.
pub fn kernel_p_n(p: &BallWeightParams, n: usize, x: &[f64], y: &[f64]) -> Result<f64> {
    let series = ProjectorSeries::new(*p, n)?;
    let mut out = vec![0.0; n + 1];
    series.eval_all(x, y, &mut out);
    Ok(out[n])
}

/// `(ℒ_n^μ f)(x) = ∫ f(y) L_n^μ(x, y) dm_μ(y)`.
///
/// When `declared_degree` is given the rule must be exact for the integrand
/// degree `deg f + 2n`.
pub fn apply_operator<F>(
    k: &LocalizedKernel,
    f: F,
    declared_degree: Option<usize>,
    quad: &BallRule,
    x: &[f64],
) -> Result<f64>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    if let Some(deg) = declared_degree {
        let required = deg + 2 * k.n;
        if required > quad.degree {
            return Err(Error::InsufficientDegree {
                required,
                available: quad.degree,
            });
        }
    }
    let terms: Vec<f64> = (0..quad.len())
        .into_par_iter()
        .map_init(Vec::new, |buf, i| {
            let y = quad.node(i);
            quad.weights[i] * f(y) * k.eval_with(x, y, buf)
        })
        .collect();
    Ok(pairwise(&terms))
}

/// Univariate Jacobi kernel `L_n^{α,β}(x, y) = Σ â(j/n) h_j^{-1} P_j(x) P_j(y)`.
#[derive(Debug, Clone)]
pub struct JacobiKernel {
    pub params: JacobiParams,
    pub n: usize,
    pub cutoff: Cutoff,
    inv_h: Vec<f64>,
}

impl JacobiKernel {
    pub fn new(params: JacobiParams, n: usize, cutoff: Cutoff) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("kernel scale n must be >= 1".into()));
        }
        let mut inv_h: Vec<f64> = (0..2 * n)
            .map(|j| cutoff.eval(j as f64 / n as f64) / jacobi_h(params, j))
            .collect();
        while inv_h.last() == Some(&0.0) {
            inv_h.pop();
        }
        Ok(Self {
            params,
            n,
            cutoff,
            inv_h,
        })
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let m = self.inv_h.len();
        let mut px = vec![0.0; m];
        let mut py = vec![0.0; m];
        jacobi_eval_all(self.params, x, &mut px);
        jacobi_eval_all(self.params, y, &mut py);
        (0..m).map(|j| self.inv_h[j] * px[j] * py[j]).sum()
    }

    /// `L_n^{α,β}(x, 1)`.
    pub fn eval_at_one(&self, x: f64) -> f64 {
        let m = self.inv_h.len();
        let mut px = vec![0.0; m];
        jacobi_eval_all(self.params, x, &mut px);
        (0..m)
            .map(|j| self.inv_h[j] * jacobi_at_one(self.params, j) * px[j])
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cutoff::{make_type_a, make_type_b};
    use crate::orthopoly::gegenbauer_eval;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn disk(mu: f64) -> BallWeightParams {
        BallWeightParams::new(mu, 2).unwrap()
    }

    fn ball_point(d: usize) -> impl Strategy<Value = Vec<f64>> {
        (prop::collection::vec(-1.0f64..1.0, d), 0.0f64..1.0).prop_map(|(v, r)| {
            let n = norm_sq(&v).sqrt().max(1e-12);
            v.iter().map(|c| c / n * r.sqrt()).collect()
        })
    }

    #[test]
    fn distance_examples() {
        let o = [0.0, 0.0];
        let e1 = [1.0, 0.0];
        let m1 = [-1.0, 0.0];
        assert_eq!(ball_distance(&[0.3, -0.2], &[0.3, -0.2]), 0.0);
        assert_relative_eq!(ball_distance(&o, &e1), FRAC_PI_2, epsilon = 1e-15);
        assert_relative_eq!(ball_distance(&e1, &m1), PI, epsilon = 1e-15);
    }

    #[test]
    fn distance_matches_arccos_form() {
        let x = [0.3, -0.4];
        let y = [-0.1, 0.65];
        let arg = dot(&x, &y) + boundary_gap(&x) * boundary_gap(&y);
        assert_relative_eq!(ball_distance(&x, &y), arg.acos(), epsilon = 1e-14);
    }

    #[test]
    fn weights() {
        let half = disk(0.5);
        assert_eq!(weight_w(&half, &[0.9, 0.1]), 1.0);
        assert_relative_eq!(weight_w(&disk(1.5), &[0.0, 0.0]), 1.0);
        assert_relative_eq!(weight_w(&disk(0.0), &[0.8, 0.0]), 1.0 / 0.6, max_relative = 1e-14);
        assert!(weight_w(&disk(0.0), &[1.0, 0.0]).is_infinite());
        assert_eq!(weight_cal_w(&disk(0.0), 10.0, &[0.2, 0.3]), 1.0);
        assert_relative_eq!(weight_cal_w(&disk(1.0), 10.0, &[0.0, 0.0]), 1.21, max_relative = 1e-14);
        assert_relative_eq!(weight_cal_w(&disk(1.0), 10.0, &[1.0, 0.0]), 0.01, max_relative = 1e-12);
    }

    #[test]
    fn normalization_constant() {
        assert_relative_eq!(disk(0.5).total_mass(), PI, max_relative = 1e-14);
        // ∫_{B^3} (1-|x|²)^{1/2} = π²/4
        let p = BallWeightParams::new(1.0, 3).unwrap();
        assert_relative_eq!(p.total_mass(), PI * PI / 4.0, max_relative = 1e-14);
        assert!(BallWeightParams::new(-0.1, 2).is_err());
        assert!(BallWeightParams::new(1.0, 1).is_err());
    }

    #[test]
    fn lambda_series_small_cases() {
        let p = disk(0.5); // λ = 1
        let ka = LocalizedKernel::new(p, 1, make_type_a()).unwrap();
        let kb = LocalizedKernel::new(p, 1, make_type_b()).unwrap();
        for &t in &[-0.7, 0.0, 0.3, 1.0] {
            assert_relative_eq!(ka.lambda_series(t), 1.0 + 4.0 * t, epsilon = 1e-14);
            assert_relative_eq!(kb.lambda_series(t), 4.0 * t, epsilon = 1e-14);
        }
    }

    #[test]
    fn lambda_series_matches_naive_gegenbauer_sum() {
        for &mu in &[0.0, 0.5, 1.0, 2.0] {
            let p = disk(mu);
            let g = p.gegenbauer();
            for &n in &[3usize, 8] {
                let k = LocalizedKernel::new(p, n, make_type_a()).unwrap();
                for &t in &[-0.95, -0.3, 0.1, 0.8] {
                    let naive: f64 = (0..2 * n)
                        .map(|j| {
                            make_type_a().eval(j as f64 / n as f64) * (j as f64 + p.lambda)
                                / p.lambda
                                * gegenbauer_eval(g, j, t)
                        })
                        .sum();
                    assert_relative_eq!(k.lambda_series(t), naive, max_relative = 1e-12, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn projector_degree_zero_is_one() {
        for &mu in &[0.0, 0.3, 1.0] {
            let v = kernel_p_n(&disk(mu), 0, &[0.1, 0.5], &[-0.4, 0.2]).unwrap();
            assert_relative_eq!(v, 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn projector_mu_zero_diagonal_on_sphere() {
        let p = disk(0.0);
        let g = p.gegenbauer();
        let e1 = [1.0, 0.0];
        for n in 1..6 {
            let expect = (p.lambda + n as f64) / p.lambda * gegenbauer_eval(g, n, 1.0);
            assert_relative_eq!(kernel_p_n(&p, n, &e1, &e1).unwrap(), expect, max_relative = 1e-13);
        }
    }

    #[test]
    fn single_term_kernel_by_hand() {
        // μ = 1, d = 2, λ = 3/2, TypeB, n = 1: only j = 1 survives.
        // b_1^{1/2} ∫ (1+λ)/λ · 2λ t(u) du / 2 = (1+λ) · 2 ⟨x,y⟩.
        let p = disk(1.0);
        let k = LocalizedKernel::new(p, 1, make_type_b()).unwrap();
        let x = [0.3, -0.5];
        let y = [0.6, 0.2];
        let by_hand = (1.0 + p.lambda) * 2.0 * dot(&x, &y);
        assert_relative_eq!(k.eval(&x, &y), by_hand, max_relative = 1e-13);
    }

    #[test]
    fn kernel_symmetry() {
        let k = LocalizedKernel::new(disk(1.0), 6, make_type_a()).unwrap();
        let x = [0.1, 0.7];
        let y = [-0.5, 0.05];
        assert_eq!(k.eval(&x, &y), k.eval(&y, &x));
    }

    #[test]
    fn integral_form_matches_projector_sum() {
        for &mu in &[0.0, 0.5, 1.0, 2.0] {
            let p = disk(mu);
            for cutoff in [make_type_a(), make_type_b()] {
                let n = 5;
                let k = LocalizedKernel::new(p, n, cutoff).unwrap();
                let series = ProjectorSeries::new(p, 2 * n).unwrap();
                let mut proj = vec![0.0; 2 * n + 1];
                let x = [0.2, -0.6];
                let y = [0.45, 0.1];
                series.eval_all(&x, &y, &mut proj);
                let direct: f64 = (0..2 * n)
                    .map(|j| cutoff.eval(j as f64 / n as f64) * proj[j])
                    .sum();
                assert_relative_eq!(k.eval(&x, &y), direct, max_relative = 1e-11);
            }
        }
    }

    #[test]
    fn operator_on_constants() {
        let p = disk(1.0);
        let quad = BallRule::new(1.0, 2, 20).unwrap();
        let x = [0.3, 0.2];
        let ka = LocalizedKernel::new(p, 4, make_type_a()).unwrap();
        let kb = LocalizedKernel::new(p, 4, make_type_b()).unwrap();
        assert_relative_eq!(apply_operator(&ka, |_| 1.0, Some(0), &quad, &x).unwrap(), 1.0, epsilon = 1e-12);
        assert!(apply_operator(&kb, |_| 1.0, Some(0), &quad, &x).unwrap().abs() < 1e-12);
        assert!(matches!(
            apply_operator(&ka, |_| 1.0, Some(14), &quad, &x),
            Err(Error::InsufficientDegree { .. })
        ));
    }

    #[test]
    fn operator_reproduces_low_degree() {
        let p = disk(0.5);
        let n = 4;
        let quad = BallRule::new(0.5, 2, 2 * n + n).unwrap();
        let k = LocalizedKernel::new(p, n, make_type_a()).unwrap();
        let f = |y: &[f64]| 1.0 + 2.0 * y[0] - y[0] * y[1] * y[1] + 0.5 * y[1].powi(4);
        let x = [0.25, -0.4];
        let v = apply_operator(&k, f, Some(4), &quad, &x).unwrap();
        assert_relative_eq!(v, f(&x), max_relative = 1e-12);
    }

    #[test]
    fn jacobi_kernel_two_forms_agree() {
        // Closed form with c⋄ = Γ(β+1)/Γ(α+β+2).
        let p = JacobiParams::new(0.5, 0.5).unwrap();
        let k = JacobiKernel::new(p, 6, make_type_a()).unwrap();
        let (a, b) = (p.alpha, p.beta);
        for &x in &[-0.8, 0.0, 0.5, 0.99] {
            let closed: f64 = (0..12)
                .map(|j| {
                    let jf = j as f64;
                    let coef = (ln_gamma(b + 1.0) - ln_gamma(a + b + 2.0) + ln_gamma(jf + a + b + 1.0)
                        - ln_gamma(jf + b + 1.0))
                    .exp()
                        * (2.0 * jf + a + b + 1.0);
                    make_type_a().eval(jf / 6.0) * coef * crate::orthopoly::jacobi_eval(p, j, x)
                })
                .sum();
            assert_relative_eq!(k.eval_at_one(x), closed, max_relative = 1e-12);
            assert_relative_eq!(k.eval(x, 1.0), k.eval_at_one(x), max_relative = 1e-12);
        }
    }

    proptest! {
        #[test]
        fn metric_axioms(x in ball_point(3), y in ball_point(3), z in ball_point(3)) {
            let dxy = ball_distance(&x, &y);
            prop_assert_eq!(dxy, ball_distance(&y, &x));
            prop_assert!(ball_distance(&x, &x) < 1e-12);
            prop_assert!(dxy <= ball_distance(&x, &z) + ball_distance(&z, &y) + 1e-12);
            prop_assert!((0.0..=PI).contains(&dxy));
        }

        #[test]
        fn norm_distance_inequalities(x in ball_point(2), y in ball_point(2)) {
            let d = ball_distance(&x, &y);
            let (nx, ny) = (norm_sq(&x).sqrt(), norm_sq(&y).sqrt());
            let (gx, gy) = (boundary_gap(&x), boundary_gap(&y));
            prop_assert!((nx - ny).abs() <= d * (gx + gy) / 2f64.sqrt() + 1e-12);
            prop_assert!((gx - gy).abs() <= 2f64.sqrt() * d + 1e-12);
        }
    }
}
