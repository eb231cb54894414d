//! Partial-sum kernels, the Christoffel function and localized test polynomials.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernels::{dot, weight_cal_w, BallWeightParams, ProjectorSeries};

/// `K_n(x, y) = Σ_{ν≤n} P_ν(x, y)` and `Λ_n(x) = 1 / K_n(x, x)`.
#[derive(Debug, Clone)]
pub struct ChristoffelEvaluator {
    pub n: usize,
    pub params: BallWeightParams,
    series: ProjectorSeries,
}

impl ChristoffelEvaluator {
    pub fn new(params: BallWeightParams, n: usize) -> Result<Self> {
        Ok(Self {
            n,
            params,
            series: ProjectorSeries::new(params, n)?,
        })
    }

    /// `Λ_n(x)` at many points, in parallel.
    pub fn lambda_many(&self, xs: &[&[f64]]) -> Vec<f64> {
        xs.par_iter().map(|x| christoffel_lambda(self, x)).collect()
    }
}

pub fn kernel_k(e: &ChristoffelEvaluator, x: &[f64], y: &[f64]) -> f64 {
    e.series.partial_sum(x, y)
}

pub fn christoffel_lambda(e: &ChristoffelEvaluator, x: &[f64]) -> f64 {
    1.0 / kernel_k(e, x, x)
}

/// `Λ_n(x) / (n^{-d} 𝒲_μ(n; x))`.
pub fn christoffel_ratio(e: &ChristoffelEvaluator, x: &[f64]) -> f64 {
    let nf = e.n.max(1) as f64;
    christoffel_lambda(e, x) / (nf.powi(-(e.params.d as i32)) * weight_cal_w(&e.params, nf, x))
}

/// `(sin(mθ/2) / (m sin(θ/2)))^{2k}`, with the limit `1` at `θ = 0`.
pub fn fejer_power(k: usize, m: usize, theta: f64) -> f64 {
    let mf = m as f64;
    let base = if theta.abs() < 1e-6 {
        1.0 - (mf * mf - 1.0) * theta * theta / 24.0
    } else {
        (mf * theta / 2.0).sin() / (mf * (theta / 2.0).sin())
    };
    base.powi(2 * k as i32)
}

/// `Q_α(t)` with `Q_α(cos θ) = (q(θ-α) + q(θ+α)) / (1 + q(2α))`.
pub fn bump_q(k: usize, m: usize, alpha: f64, t: f64) -> f64 {
    let theta = t.clamp(-1.0, 1.0).acos();
    (fejer_power(k, m, theta - alpha) + fejer_power(k, m, theta + alpha)) / (1.0 + fejer_power(k, m, 2.0 * alpha))
}

/// Householder reflection taking `ξ/|ξ|` to `e_1`, applied to `x`.
fn reflect_to_first_axis(xi: &[f64], x: &[f64]) -> Vec<f64> {
    let r = dot(xi, xi).sqrt();
    if r == 0.0 {
        return x.to_vec();
    }
    let mut v: Vec<f64> = xi.iter().map(|c| c / r).collect();
    v[0] -= 1.0;
    let vv = dot(&v, &v);
    if vv < 1e-30 {
        return x.to_vec();
    }
    let f = 2.0 * dot(&v, x) / vv;
    x.iter().zip(&v).map(|(a, b)| a - f * b).collect()
}

/// Polynomial of degree `< 2km` with `P_ξ(ξ) = 1`, `P_ξ ≥ 0` and
/// `P_ξ(x) ≲ (1 + m d(ξ, x))^{-2k}`.
///
/// After rotating `ξ` to `(|ξ|, 0, …, 0)` and writing `|ξ| = cos α`,
/// `P_ξ(x) = Q_α(x_1) Q_{π/2}(|(x_2, …, x_d)|)`.
pub fn localized_poly(k: usize, m: usize, xi: &[f64], x: &[f64]) -> Result<f64> {
    if k == 0 || m == 0 {
        return Err(Error::InvalidParameter("localized polynomial needs k, m >= 1".into()));
    }
    let y = reflect_to_first_axis(xi, x);
    let alpha = dot(xi, xi).sqrt().min(1.0).acos();
    let rest = dot(&y[1..], &y[1..]).sqrt();
    Ok(bump_q(k, m, alpha, y[0]) * bump_q(k, m, std::f64::consts::FRAC_PI_2, rest))
}

/// Parameters `k = ⌊max(d/2, μ)⌋ + 1`, `m = ⌊n/2k⌋` of the competitor polynomial for `Λ_n`.
pub fn competitor_parameters(params: &BallWeightParams, n: usize) -> (usize, usize) {
    let k = (params.d as f64 / 2.0).max(params.mu).floor() as usize + 1;
    (k, (n / (2 * k)).max(1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cutoff::Cutoff;
    use crate::kernels::{ball_distance, kernel_l_mu, LocalizedKernel};
    use crate::quadrature::BallRule;
    use rand::{Rng, SeedableRng};
    use rand_xoshiro::SplitMix64;

    fn random_point(rng: &mut SplitMix64, d: usize) -> Vec<f64> {
        loop {
            let x: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
            if dot(&x, &x) < 1.0 {
                return x;
            }
        }
    }

    #[test]
    fn degree_zero_is_one() {
        let e = ChristoffelEvaluator::new(BallWeightParams::new(1.0, 2).unwrap(), 0).unwrap();
        assert!((kernel_k(&e, &[0.3, 0.1], &[-0.5, 0.2]) - 1.0).abs() < 1e-15);
        assert!((christoffel_lambda(&e, &[0.9, 0.0]) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn partial_sum_matches_step_cutoff_kernel() {
        for &mu in &[0.0, 0.5, 1.5] {
            let p = BallWeightParams::new(mu, 2).unwrap();
            let n = 9;
            let e = ChristoffelEvaluator::new(p, n).unwrap();
            let step = LocalizedKernel::new(p, n, Cutoff::Step).unwrap();
            let mut rng = SplitMix64::seed_from_u64(11);
            for _ in 0..20 {
                let x = random_point(&mut rng, 2);
                let y = random_point(&mut rng, 2);
                let a = kernel_k(&e, &x, &y);
                let b = kernel_l_mu(&step, &x, &y);
                assert!((a - b).abs() < 1e-10 * (1.0 + a.abs()), "{a} vs {b}");
                assert!(kernel_k(&e, &x, &x) > 0.0);
            }
        }
    }

    #[test]
    fn diagonal_is_rotation_invariant() {
        let p = BallWeightParams::new(1.0, 3).unwrap();
        let e = ChristoffelEvaluator::new(p, 12).unwrap();
        let mut rng = SplitMix64::seed_from_u64(5);
        for _ in 0..20 {
            let x = random_point(&mut rng, 3);
            let th: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let rx = [th.cos() * x[0] - th.sin() * x[1], th.sin() * x[0] + th.cos() * x[1], x[2]];
            let (a, b) = (kernel_k(&e, &x, &x), kernel_k(&e, &rx, &rx));
            assert!((a - b).abs() < 1e-9 * a);
        }
    }

    #[test]
    fn fejer_power_near_zero() {
        for &m in &[1usize, 3, 10] {
            let exact = fejer_power(2, m, 1e-3);
            let series = fejer_power(2, m, 1e-7);
            assert!((series - 1.0).abs() < 1e-9);
            assert!(exact <= 1.0);
        }
        assert_eq!(fejer_power(3, 5, 0.0), 1.0);
    }

    #[test]
    fn localized_poly_properties() {
        let mut rng = SplitMix64::seed_from_u64(9);
        for d in [2usize, 3] {
            for _ in 0..20 {
                let xi = random_point(&mut rng, d);
                let (k, m) = (2, 5);
                assert!((localized_poly(k, m, &xi, &xi).unwrap() - 1.0).abs() < 1e-12);
                let mut worst = 0.0f64;
                for _ in 0..200 {
                    let x = random_point(&mut rng, d);
                    let v = localized_poly(k, m, &xi, &x).unwrap();
                    assert!(v >= 0.0);
                    worst = worst.max(v * (1.0 + m as f64 * ball_distance(&xi, &x)).powi(2 * k as i32));
                }
                assert!(worst < 1e4, "decay constant {worst}");
            }
        }
        assert!(localized_poly(0, 3, &[0.1, 0.2], &[0.0, 0.0]).is_err());
    }

    #[test]
    fn localized_poly_has_claimed_degree() {
        // deg P < 2km, so P² is integrated exactly by both rules
        let (k, m) = (2, 3);
        let xi = [0.4, -0.3];
        let lo = BallRule::new(1.0, 2, 2 * 2 * k * m).unwrap();
        let hi = BallRule::new(1.0, 2, 2 * 2 * k * m + 20).unwrap();
        let a = lo.integrate(|x| localized_poly(k, m, &xi, x).unwrap().powi(2));
        let b = hi.integrate(|x| localized_poly(k, m, &xi, x).unwrap().powi(2));
        assert!((a - b).abs() < 1e-13 * b);
    }

    #[test]
    fn christoffel_is_minimal() {
        let mut rng = SplitMix64::seed_from_u64(21);
        for &mu in &[0.0, 1.0] {
            let p = BallWeightParams::new(mu, 2).unwrap();
            let n = 16;
            let e = ChristoffelEvaluator::new(p, n).unwrap();
            let (k, m) = competitor_parameters(&p, n);
            let rule = BallRule::new(mu, 2, 2 * n).unwrap();
            for _ in 0..20 {
                let x = random_point(&mut rng, 2);
                let energy = rule.integrate(|y| localized_poly(k, m, &x, y).unwrap().powi(2));
                assert!(christoffel_lambda(&e, &x) <= energy * (1.0 + 1e-12));
            }
        }
    }
}
