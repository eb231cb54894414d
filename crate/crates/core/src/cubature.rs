//! Positive cubature rules on almost uniformly distributed points.
//!
//! Given a point set with floor masses `s_ξ` and an orthonormal basis of
//! `Π_n^d`, the weights are `λ_ξ = a_ξ + γ s_ξ` where `a ≥ 0` solves
//!
//! ```text
//! Σ_ξ a_ξ φ_k(ξ) = δ_{k0} - γ Σ_ξ s_ξ φ_k(ξ)      (k < dim Π_n^d).
//! ```
//!
//! The default floor is the measure of the partition cell. The closed-form
//! surrogate `ε^d (√(1-|ξ|²) + ε)^{2μ}` is only comparable to it up to
//! constants that grow with `μ` near the boundary (ratios above 100 for
//! `μ = 1`), which makes the system infeasible at any usable `δ`.
//!
//! All masses are for the normalized measure, so an exact rule has `Σλ = 1`;
//! [`CubatureRule::raw_weights`] rescales to `∫ W_μ dx`.
//!
//! For `d = 2` the point sets are invariant under the symmetry group of the
//! square. Any feasible `a` can be averaged over that group, so it suffices to
//! impose the invariant constraints on one unknown per orbit; this cuts the
//! system by roughly a factor 8 in both directions.

use std::collections::BTreeSet;
use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::{DiskBasis, GramSchmidtBasis, OrthonormalBasis};
use crate::error::{Error, Result};
use crate::geometry::{build_point_set, PointSet};
use crate::kernels::{weight_cal_w, BallPoint, BallWeightParams};
use crate::lp::{max_entropy, phase_one_simplex, MaxEntropyOptions, SimplexOutcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverKind {
    /// Phase-1 simplex with Bland's rule; a vertex solution.
    Simplex,
    /// Entropy-closest strictly positive solution (Newton on the dual).
    MaxEntropy,
}

/// Masses `s_ξ` in the positivity floor `λ_ξ ≥ γ s_ξ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FloorKind {
    /// `m_μ(R_ξ)`, the measure of the partition cell.
    CellMeasure,
    /// `ε^d (√(1-|ξ|²) + ε)^{2μ}`, normalized.
    Surrogate,
}

#[derive(Debug, Clone, Copy)]
pub struct CubatureOptions {
    pub gamma: f64,
    pub floor: FloorKind,
    pub solver: SolverKind,
    /// Number of δ halvings before giving up.
    pub max_retries: usize,
    /// Use the square symmetry for `d = 2`.
    pub symmetric: bool,
    pub tol: f64,
}

impl Default for CubatureOptions {
    fn default() -> Self {
        Self {
            gamma: 1.0 / 3.0,
            floor: FloorKind::CellMeasure,
            solver: SolverKind::MaxEntropy,
            max_retries: 6,
            symmetric: true,
            tol: 1e-12,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CubatureRule {
    pub mu: f64,
    pub d: usize,
    /// Exactness degree `n`.
    pub n: usize,
    /// `δ = n ε` of the successful attempt (`0` when built from a given point set).
    pub delta: f64,
    pub epsilon: f64,
    pub gamma: f64,
    pub points: Vec<BallPoint>,
    /// Weights for the normalized measure, summing to one.
    pub weights: Vec<f64>,
    /// Floor masses `s_ξ`; every weight satisfies `λ_ξ ≥ γ s_ξ`.
    pub floor: Vec<f64>,
    pub floor_kind: FloorKind,
    /// `Σ λ φ_k - δ_{k0}` over the constraint basis.
    #[serde(skip)]
    pub residuals: Vec<f64>,
    pub residual_max: f64,
    /// min/max of `λ_ξ / (n^{-d} 𝒲_μ(n; ξ))`.
    pub weight_ratio_bounds: (f64, f64),
    pub solver: SolverKind,
    pub attempts: usize,
}

impl CubatureRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BallPoint, f64)> + '_ {
        self.points.iter().zip(self.weights.iter().copied())
    }

    /// `Σ λ_ξ f(ξ)` (normalized measure), summed pairwise.
    pub fn integrate<F: Fn(&[f64]) -> f64 + Sync>(&self, f: F) -> f64 {
        let terms: Vec<f64> = self
            .points
            .par_iter()
            .zip(self.weights.par_iter())
            .map(|(x, w)| w * f(x))
            .collect();
        crate::sum::pairwise(&terms)
    }

    /// Weights for `∫ f W_μ dx` instead of the normalized measure.
    pub fn raw_weights(&self) -> Result<Vec<f64>> {
        let p = BallWeightParams::new(self.mu, self.d)?;
        Ok(self.weights.iter().map(|w| w / p.b_d_mu).collect())
    }

    pub fn min_weight(&self) -> f64 {
        self.weights.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_weight(&self) -> f64 {
        self.weights.iter().copied().fold(0.0, f64::max)
    }
}

/// Basis used for the constraints: closed form for `d = 2`, Gram–Schmidt otherwise.
pub fn constraint_basis(params: BallWeightParams, n: usize, symmetric: bool) -> Result<Box<dyn OrthonormalBasis>> {
    if params.d == 2 {
        Ok(Box::new(DiskBasis::new(params, n, symmetric)?))
    } else {
        Ok(Box::new(GramSchmidtBasis::new(params, n)?))
    }
}

/// Orbits of the point set under the eight symmetries of the square.
///
/// `None` when the set is not closed under them (up to `1e-12`).
pub fn square_orbits(set: &PointSet) -> Option<Vec<Vec<usize>>> {
    if set.d != 2 {
        return None;
    }
    let maps: [fn(f64, f64) -> (f64, f64); 8] = [
        |x, y| (x, y),
        |x, y| (-x, y),
        |x, y| (x, -y),
        |x, y| (-x, -y),
        |x, y| (y, x),
        |x, y| (-y, x),
        |x, y| (y, -x),
        |x, y| (-y, -x),
    ];
    let mut owner = vec![usize::MAX; set.len()];
    let mut orbits = Vec::new();
    for i in 0..set.len() {
        if owner[i] != usize::MAX {
            continue;
        }
        let p = &set.points[i];
        let mut members = BTreeSet::new();
        for f in maps {
            let (u, v) = f(p[0], p[1]);
            let j = set.locate(&[u, v])?;
            let q = &set.points[j];
            if (q[0] - u).abs() > 1e-12 || (q[1] - v).abs() > 1e-12 {
                return None;
            }
            members.insert(j);
        }
        let id = orbits.len();
        for &j in &members {
            if owner[j] != usize::MAX && owner[j] != id {
                return None;
            }
            owner[j] = id;
        }
        orbits.push(members.into_iter().collect());
    }
    Some(orbits)
}

/// Columns `φ(x_j)` for the given points, in parallel.
fn basis_matrix(basis: &dyn OrthonormalBasis, points: &[&[f64]]) -> DMatrix<f64> {
    let n = basis.dim();
    let mut a = DMatrix::<f64>::zeros(n, points.len());
    a.as_mut_slice()
        .par_chunks_mut(n)
        .zip(points.par_iter())
        .for_each(|(col, x)| basis.eval_into(x, col));
    a
}

fn ratio_bounds(params: &BallWeightParams, n: usize, points: &[BallPoint], weights: &[f64]) -> (f64, f64) {
    let nf = n.max(1) as f64;
    let scale = nf.powi(-(params.d as i32));
    points.iter().zip(weights).fold((f64::INFINITY, 0.0f64), |(lo, hi), (x, w)| {
        let r = w / (scale * weight_cal_w(params, nf, x));
        (lo.min(r), hi.max(r))
    })
}

/// Positive weights on `set` exact on the span of `basis`.
///
/// With a square-invariant basis the set must be square-symmetric; one
/// unknown per orbit is used.
pub fn solve_weights(set: &PointSet, basis: &dyn OrthonormalBasis, opts: &CubatureOptions) -> Result<CubatureRule> {
    let params = BallWeightParams::new(set.mu, set.d)?;
    let n = basis.max_degree();
    let gamma = opts.gamma;
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::InvalidParameter(format!("gamma must lie in (0, 1), got {gamma}")));
    }
    if (basis.mu() - set.mu).abs() > 0.0 || basis.ambient_dim() != set.d {
        return Err(Error::InvalidParameter("basis and point set disagree on μ or d".into()));
    }
    let orbits: Vec<Vec<usize>> = if basis.square_invariant() {
        square_orbits(set).ok_or_else(|| Error::InvalidParameter("point set is not square-symmetric".into()))?
    } else {
        (0..set.len()).map(|i| vec![i]).collect()
    };
    let dim = basis.dim();
    let infeasible = |detail: String| Error::Infeasible {
        n,
        delta: set.epsilon * n as f64,
        detail,
    };
    if orbits.len() < dim {
        return Err(infeasible(format!("{} unknowns for {dim} constraints", orbits.len())));
    }
    let reps: Vec<&[f64]> = orbits.iter().map(|o| &set.points[o[0]].coords[..]).collect();
    let a = basis_matrix(basis, &reps);
    let floor = match opts.floor {
        FloorKind::CellMeasure => set.cell_measures(5)?,
        FloorKind::Surrogate => set.surrogates(),
    };
    let s: Vec<f64> = orbits.iter().map(|o| o.iter().map(|&i| floor[i]).sum()).collect();
    let sv = DVector::from_column_slice(&s);
    let mut b = -gamma * (&a * &sv);
    b[0] += 1.0;

    let alpha: DVector<f64> = match opts.solver {
        SolverKind::MaxEntropy => {
            let prior: Vec<f64> = s.iter().map(|v| (1.0 - gamma) * v).collect();
            let out = max_entropy(
                &a,
                &b,
                &prior,
                MaxEntropyOptions {
                    tol: opts.tol,
                    ..Default::default()
                },
            );
            if !out.converged {
                return Err(infeasible(format!(
                    "dual Newton did not converge (residual {:.3e}, exponent {:.1})",
                    out.residual, out.max_exponent
                )));
            }
            out.x
        }
        SolverKind::Simplex => match phase_one_simplex(&a, &b, 50 * (dim + orbits.len())) {
            SimplexOutcome::Feasible { x, .. } => x,
            SimplexOutcome::Infeasible { infeasibility, .. } => {
                return Err(infeasible(format!("phase-1 optimum {infeasibility:.3e} > 0")))
            }
            SimplexOutcome::PivotLimit { pivots } => return Err(infeasible(format!("no result after {pivots} pivots"))),
        },
    };

    let total = &alpha + gamma * &sv;
    let mut residuals: Vec<f64> = (&a * &total).iter().copied().collect();
    residuals[0] -= 1.0;
    let residual_max = residuals.iter().fold(0.0f64, |m, r| m.max(r.abs()));

    let mut weights = vec![0.0; set.len()];
    for (o, members) in orbits.iter().enumerate() {
        for &i in members {
            weights[i] = alpha[o] / members.len() as f64 + gamma * floor[i];
        }
    }
    let bounds = ratio_bounds(&params, n, &set.points, &weights);
    Ok(CubatureRule {
        mu: set.mu,
        d: set.d,
        n,
        delta: set.epsilon * n as f64,
        epsilon: set.epsilon,
        gamma,
        points: set.points.clone(),
        weights,
        floor,
        floor_kind: opts.floor,
        residuals,
        residual_max,
        weight_ratio_bounds: bounds,
        solver: opts.solver,
        attempts: 1,
    })
}

/// Rule exact on `Π_n^d` with default options.
pub fn build_cubature(mu: f64, d: usize, n: usize, delta_hint: Option<f64>) -> Result<CubatureRule> {
    build_cubature_with(mu, d, n, delta_hint, &CubatureOptions::default())
}

/// Rule exact on `Π_n^d`: `ε = δ/n`, halving `δ` after each infeasible attempt.
pub fn build_cubature_with(
    mu: f64,
    d: usize,
    n: usize,
    delta_hint: Option<f64>,
    opts: &CubatureOptions,
) -> Result<CubatureRule> {
    if n == 0 {
        return Err(Error::InvalidParameter("cubature degree must be >= 1".into()));
    }
    let params = BallWeightParams::new(mu, d)?;
    let mut delta = delta_hint.unwrap_or(1.0);
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidParameter(format!("delta must be positive, got {delta}")));
    }
    let basis = constraint_basis(params, n, opts.symmetric && d == 2)?;
    let mut last = String::new();
    for attempt in 1..=opts.max_retries + 1 {
        let eps = (delta / n as f64).min(PI);
        let set = build_point_set(eps, d, mu)?;
        match solve_weights(&set, basis.as_ref(), opts) {
            Ok(mut rule) => {
                if rule.residual_max > 1e-8 {
                    last = format!("residual {:.3e} after solve", rule.residual_max);
                } else {
                    rule.attempts = attempt;
                    rule.delta = delta;
                    return Ok(rule);
                }
            }
            Err(Error::Infeasible { detail, .. }) => last = detail,
            Err(e) => return Err(e),
        }
        delta /= 2.0;
    }
    Err(Error::RetriesExhausted {
        n,
        attempts: opts.max_retries + 1,
        last_delta: delta * 2.0,
        residual: f64::NAN,
        detail: last,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RuleReport {
    pub n: usize,
    pub points: usize,
    /// `(degree, max |Σλφ - δ_{k0}|)` for every degree `0..=n+extra`.
    pub residual_by_degree: Vec<(usize, f64)>,
    pub residual_max_exact: f64,
    pub residual_max_beyond: f64,
    pub min_weight: f64,
    pub max_weight: f64,
    pub weight_sum: f64,
    pub weight_ratio_bounds: (f64, f64),
}

/// Residuals against a full orthonormal basis up to degree `n + extra_degree`,
/// evaluated at every point.
pub fn verify_rule(rule: &CubatureRule, extra_degree: usize) -> Result<RuleReport> {
    let params = BallWeightParams::new(rule.mu, rule.d)?;
    let top = rule.n + extra_degree;
    let basis = constraint_basis(params, top, false)?;
    let dim = basis.dim();
    const CHUNK: usize = 512;
    let partials: Vec<Vec<f64>> = rule
        .points
        .par_chunks(CHUNK)
        .zip(rule.weights.par_chunks(CHUNK))
        .map(|(pts, ws)| {
            let mut acc = vec![0.0; dim];
            let mut buf = vec![0.0; dim];
            for (x, w) in pts.iter().zip(ws) {
                basis.eval_into(x, &mut buf);
                acc.iter_mut().zip(&buf).for_each(|(a, v)| *a += w * v);
            }
            acc
        })
        .collect();
    let mut sums = vec![0.0; dim];
    for p in &partials {
        sums.iter_mut().zip(p).for_each(|(s, v)| *s += v);
    }
    sums[0] -= 1.0;
    let mut by_degree = vec![(0usize, 0.0f64); top + 1];
    for (deg, slot) in by_degree.iter_mut().enumerate() {
        slot.0 = deg;
    }
    for (k, &deg) in basis.degrees().iter().enumerate() {
        by_degree[deg].1 = by_degree[deg].1.max(sums[k].abs());
    }
    let exact = by_degree[..=rule.n].iter().fold(0.0f64, |m, v| m.max(v.1));
    let beyond = by_degree[rule.n + 1..].iter().fold(0.0f64, |m, v| m.max(v.1));
    Ok(RuleReport {
        n: rule.n,
        points: rule.len(),
        residual_by_degree: by_degree,
        residual_max_exact: exact,
        residual_max_beyond: beyond,
        min_weight: rule.min_weight(),
        max_weight: rule.max_weight(),
        weight_sum: crate::sum::pairwise(&rule.weights),
        weight_ratio_bounds: ratio_bounds(&params, rule.n, &rule.points, &rule.weights),
    })
}
