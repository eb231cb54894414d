//! Tight polynomial frames (needlets) on the ball.
//!
//! Level `0` has `L_0 ≡ 1`; level `j ≥ 1` has
//! `L_j = Σ_ν â(ν/2^{j-1}) P_ν` with a band-pass cutoff, so `L_j` has degree
//! `< 2^j`. Each level carries a positive cubature rule `X_j` exact to degree
//! `2^{j+2}` and the frame elements are `ψ_ξ = √λ_ξ L_j(·, ξ)`.
//!
//! Inner products and sums over knots go through an orthonormal basis:
//! with `f̂_k = ⟨f, φ_k⟩`,
//!
//! ```text
//! ⟨f, ψ_ξ⟩ = √λ_ξ Σ_k â_j(deg φ_k) f̂_k φ_k(ξ),
//! Σ_ξ c_ξ ψ_ξ(x) = Σ_k â_j(deg φ_k) φ_k(x) Σ_ξ c_ξ √λ_ξ φ_k(ξ),
//! ```
//!
//! which is the addition formula `P_ν(x, y) = Σ_{deg φ_k = ν} φ_k(x) φ_k(y)`
//! and avoids evaluating the kernel at all pairs of knots. Pointwise kernel
//! evaluation ([`needlet_eval`]) uses the integral representation instead.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::OrthonormalBasis;
use crate::cubature::{build_cubature_with, constraint_basis, CubatureOptions, CubatureRule};
use crate::cutoff::Cutoff;
use crate::error::{Error, Result};
use crate::kernels::{ball_distance, weight_cal_w, BallWeightParams, LocalizedKernel, ProjectorSeries};
use crate::quadrature::BallRule;

#[derive(Debug, Clone, Copy)]
pub struct FrameOptions {
    /// Starting `δ` for every level's cubature search.
    pub delta_hint: f64,
    pub cubature: CubatureOptions,
}

impl Default for FrameOptions {
    fn default() -> Self {
        Self {
            delta_hint: 5.0,
            cubature: CubatureOptions::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct FrameLevel {
    pub j: usize,
    /// `None` for level 0 (`L_0 ≡ 1`).
    pub kernel: Option<LocalizedKernel>,
    pub rule: CubatureRule,
    sqrt_weights: Vec<f64>,
}

impl FrameLevel {
    /// Exactness degree of the level rule, `2^{j+2}`.
    pub fn degree(&self) -> usize {
        self.rule.n
    }

    /// Largest degree present in `L_j`.
    pub fn kernel_degree(&self) -> usize {
        if self.j == 0 {
            0
        } else {
            (1 << self.j) - 1
        }
    }

    pub fn len(&self) -> usize {
        self.rule.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rule.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct NeedletFrame {
    pub params: BallWeightParams,
    pub cutoff: Cutoff,
    pub levels: Vec<FrameLevel>,
}

/// `â(ν / 2^{j-1})` for `j ≥ 1`, and `[ν = 0]` for `j = 0`.
pub fn level_multiplier(cutoff: Cutoff, j: usize, nu: usize) -> f64 {
    if j == 0 {
        if nu == 0 {
            1.0
        } else {
            0.0
        }
    } else {
        cutoff.eval(nu as f64 / (1u64 << (j - 1)) as f64)
    }
}

/// Frame with levels `0..=j_max`.
pub fn build_frame(params: BallWeightParams, j_max: usize) -> Result<NeedletFrame> {
    build_frame_with(params, j_max, &FrameOptions::default())
}

pub fn build_frame_with(params: BallWeightParams, j_max: usize, opts: &FrameOptions) -> Result<NeedletFrame> {
    if j_max > 12 {
        return Err(Error::InvalidParameter(format!("frame level {j_max} is beyond any usable size")));
    }
    let cutoff = Cutoff::TypeB;
    let mut levels = Vec::with_capacity(j_max + 1);
    for j in 0..=j_max {
        let kernel = if j == 0 {
            None
        } else {
            Some(LocalizedKernel::new(params, 1 << (j - 1), cutoff)?)
        };
        let rule = build_cubature_with(params.mu, params.d, 1 << (j + 2), Some(opts.delta_hint), &opts.cubature)?;
        let sqrt_weights = rule.weights.iter().map(|w| w.sqrt()).collect();
        levels.push(FrameLevel {
            j,
            kernel,
            rule,
            sqrt_weights,
        });
    }
    Ok(NeedletFrame {
        params,
        cutoff,
        levels,
    })
}

impl NeedletFrame {
    pub fn j_max(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn total_elements(&self) -> usize {
        self.levels.iter().map(|l| l.len()).sum()
    }

    fn shape(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.len()).collect()
    }

    fn level(&self, j: usize) -> Result<&FrameLevel> {
        self.levels
            .get(j)
            .ok_or_else(|| Error::InvalidParameter(format!("level {j} not in frame (J = {})", self.j_max())))
    }

    /// Serializable description `{mu, d, J, levels: [{j, degree, points, weights}]}`.
    pub fn summary(&self) -> FrameSummary {
        FrameSummary {
            mu: self.params.mu,
            d: self.params.d,
            j_max: self.j_max(),
            levels: self
                .levels
                .iter()
                .map(|l| LevelSummary {
                    j: l.j,
                    degree: l.degree(),
                    delta: l.rule.delta,
                    points: l.rule.points.iter().map(|p| p.coords.clone()).collect(),
                    weights: l.rule.weights.clone(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LevelSummary {
    pub j: usize,
    pub degree: usize,
    pub delta: f64,
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FrameSummary {
    pub mu: f64,
    pub d: usize,
    #[serde(rename = "J")]
    pub j_max: usize,
    pub levels: Vec<LevelSummary>,
}

/// `ψ_ξ(x) = √λ_ξ L_j(x, ξ)` for knot `index` of level `j`.
pub fn needlet_eval(frame: &NeedletFrame, j: usize, index: usize, x: &[f64]) -> Result<f64> {
    let level = frame.levels.get(j).ok_or(Error::UnknownKnot { level: j, index })?;
    let xi = level.rule.points.get(index).ok_or(Error::UnknownKnot { level: j, index })?;
    let s = level.sqrt_weights[index];
    Ok(match &level.kernel {
        None => s,
        Some(k) => s * k.eval(x, xi),
    })
}

/// `‖ψ_ξ‖` in `L²_μ`, from `‖ψ_ξ‖² = λ_ξ Σ_ν â_j(ν)² P_ν(ξ, ξ)`.
pub fn needlet_norm(frame: &NeedletFrame, j: usize, index: usize) -> Result<f64> {
    let level = frame.levels.get(j).ok_or(Error::UnknownKnot { level: j, index })?;
    if index >= level.len() {
        return Err(Error::UnknownKnot { level: j, index });
    }
    let series = ProjectorSeries::new(frame.params, level.kernel_degree())?;
    Ok(norm_with(frame, level, &series, index))
}

/// [`needlet_norm`] for every knot of level `j`.
pub fn needlet_norms(frame: &NeedletFrame, j: usize) -> Result<Vec<f64>> {
    let level = frame.level(j)?;
    let series = ProjectorSeries::new(frame.params, level.kernel_degree())?;
    Ok((0..level.len())
        .into_par_iter()
        .map(|i| norm_with(frame, level, &series, i))
        .collect())
}

fn norm_with(frame: &NeedletFrame, level: &FrameLevel, series: &ProjectorSeries, index: usize) -> f64 {
    let xi = &level.rule.points[index];
    let mut diag = vec![0.0; level.kernel_degree() + 1];
    series.eval_all(xi, xi, &mut diag);
    let terms: Vec<f64> = diag
        .iter()
        .enumerate()
        .map(|(nu, p)| level_multiplier(frame.cutoff, level.j, nu).powi(2) * p)
        .collect();
    (level.rule.weights[index] * crate::sum::pairwise(&terms)).sqrt()
}

/// `|ψ_ξ(x)| √𝒲_μ(2^j; x) (1 + 2^j d(x, ξ))^k / 2^{jd/2}`.
pub fn decay_ratio(frame: &NeedletFrame, j: usize, index: usize, x: &[f64], k: i32) -> Result<f64> {
    let v = needlet_eval(frame, j, index, x)?;
    let xi = &frame.levels[j].rule.points[index];
    let nj = (1u64 << j) as f64;
    let d = frame.params.d as f64;
    Ok(v.abs() * weight_cal_w(&frame.params, nj, x).sqrt() * (1.0 + nj * ball_distance(x, xi)).powi(k)
        / nj.powf(d / 2.0))
}

/// Input to [`analyze`].
pub enum Integrand<'a> {
    /// Polynomial of the declared total degree.
    Polynomial {
        f: &'a (dyn Fn(&[f64]) -> f64 + Sync),
        degree: usize,
    },
    /// Arbitrary function; inner products by dense product Gauss rules.
    BlackBox(&'a (dyn Fn(&[f64]) -> f64 + Sync)),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoefficientSet {
    /// `c_{j,ξ} = ⟨f, ψ_ξ⟩`, one vector per level.
    pub levels: Vec<Vec<f64>>,
    pub degree: Option<usize>,
    pub method: String,
    /// Estimated error of the black-box inner products (`0` for polynomials).
    pub error_estimate: f64,
    shape: Vec<usize>,
}

impl CoefficientSet {
    pub fn zeros_like(frame: &NeedletFrame) -> Self {
        let shape = frame.shape();
        Self {
            levels: shape.iter().map(|&n| vec![0.0; n]).collect(),
            degree: None,
            method: "zero".into(),
            error_estimate: 0.0,
            shape,
        }
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: f64, other: &CoefficientSet, b: f64) -> Result<CoefficientSet> {
        if self.shape != other.shape {
            return Err(Error::FrameMismatch("coefficient sets have different shapes".into()));
        }
        Ok(CoefficientSet {
            levels: self
                .levels
                .iter()
                .zip(&other.levels)
                .map(|(u, v)| u.iter().zip(v).map(|(p, q)| a * p + b * q).collect())
                .collect(),
            degree: self.degree.max(other.degree),
            method: "combination".into(),
            error_estimate: a.abs() * self.error_estimate + b.abs() * other.error_estimate,
            shape: self.shape.clone(),
        })
    }

    /// `(Σ c²)^{1/2}`, summed pairwise.
    pub fn l2_norm(&self) -> f64 {
        let sq: Vec<f64> = self.levels.iter().flatten().map(|c| c * c).collect();
        crate::sum::pairwise(&sq).sqrt()
    }

    /// Coefficients from CSV rows `(j, knot_index, value)`.
    pub fn from_triples(frame: &NeedletFrame, rows: &[(usize, usize, f64)]) -> Result<Self> {
        let mut out = Self::zeros_like(frame);
        for &(j, i, v) in rows {
            let slot = out
                .levels
                .get_mut(j)
                .and_then(|l| l.get_mut(i))
                .ok_or(Error::UnknownKnot { level: j, index: i })?;
            *slot = v;
        }
        out.method = "imported".into();
        Ok(out)
    }

    pub fn triples(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.levels
            .iter()
            .enumerate()
            .flat_map(|(j, l)| l.iter().enumerate().map(move |(i, &v)| (j, i, v)))
    }
}

/// `f̂_k = ∫ f φ_k dm` for every basis function, with a product rule.
fn basis_coefficients(basis: &dyn OrthonormalBasis, rule: &BallRule, f: &(dyn Fn(&[f64]) -> f64 + Sync)) -> Vec<f64> {
    let dim = basis.dim();
    const CHUNK: usize = 256;
    let nodes: Vec<&[f64]> = rule.iter().map(|(x, _)| x).collect();
    let partials: Vec<Vec<f64>> = nodes
        .par_chunks(CHUNK)
        .zip(rule.weights.par_chunks(CHUNK))
        .map(|(xs, ws)| {
            let mut acc = vec![0.0; dim];
            let mut buf = vec![0.0; dim];
            for (x, w) in xs.iter().zip(ws) {
                basis.eval_into(x, &mut buf);
                let fw = w * f(x);
                acc.iter_mut().zip(&buf).for_each(|(a, b)| *a += fw * b);
            }
            acc
        })
        .collect();
    let mut out = vec![0.0; dim];
    for p in &partials {
        out.iter_mut().zip(p).for_each(|(o, v)| *o += v);
    }
    out
}

/// Coefficients `⟨f, ψ_ξ⟩` for levels `0..=j_used`.
///
/// Levels above `j_used` are left at zero.
pub fn analyze(frame: &NeedletFrame, f: Integrand<'_>, j_used: usize) -> Result<CoefficientSet> {
    let j_used = j_used.min(frame.j_max());
    let params = frame.params;
    let top = frame.levels[j_used].kernel_degree();
    let (fhat, fhat_degree, degree, method, error_estimate) = match f {
        Integrand::Polynomial { f, degree } => {
            let deg = degree.min(top);
            let basis = constraint_basis(params, deg, false)?;
            let rule = BallRule::new(params.mu, params.d, degree + deg)?;
            let fhat = basis_coefficients(basis.as_ref(), &rule, f);
            (fhat, deg, Some(degree), "exact".to_string(), 0.0)
        }
        Integrand::BlackBox(f) => {
            let basis = constraint_basis(params, top, false)?;
            let q = 2 * (1usize << j_used) + 16;
            let coarse = basis_coefficients(basis.as_ref(), &BallRule::new(params.mu, params.d, q)?, f);
            let fine = basis_coefficients(basis.as_ref(), &BallRule::new(params.mu, params.d, 2 * q)?, f);
            let err = coarse.iter().zip(&fine).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            (fine, top, None, format!("product-gauss-{}", 2 * q), err)
        }
    };
    let basis_all = constraint_basis(params, fhat_degree, false)?;
    let degrees = basis_all.degrees().to_vec();

    let mut out = CoefficientSet::zeros_like(frame);
    out.degree = degree;
    out.method = method;
    out.error_estimate = error_estimate;
    for (j, level) in frame.levels.iter().enumerate().take(j_used + 1) {
        let kdeg = level.kernel_degree();
        let used = basis_all.count_up_to(kdeg);
        let spectral: Vec<f64> = (0..used)
            .map(|k| level_multiplier(frame.cutoff, j, degrees[k]) * fhat[k])
            .collect();
        if spectral.iter().all(|v| *v == 0.0) {
            continue;
        }
        let level_basis = constraint_basis(params, degrees[used - 1], false)?;
        let coeffs: Vec<f64> = level
            .rule
            .points
            .par_iter()
            .zip(level.sqrt_weights.par_iter())
            .map_init(
                || vec![0.0; level_basis.dim()],
                |buf, (xi, s)| {
                    level_basis.eval_into(xi, buf);
                    s * crate::sum::pairwise(&spectral.iter().zip(buf.iter()).map(|(a, b)| a * b).collect::<Vec<_>>())
                },
            )
            .collect();
        out.levels[j] = coeffs;
    }
    Ok(out)
}

/// `Σ_ξ c_ξ ψ_ξ(x)` at every point of `xs`.
pub fn synthesize_many(frame: &NeedletFrame, coeffs: &CoefficientSet, xs: &[&[f64]]) -> Result<Vec<f64>> {
    if coeffs.shape != frame.shape() {
        return Err(Error::FrameMismatch(format!(
            "coefficients for levels {:?}, frame has {:?}",
            coeffs.shape,
            frame.shape()
        )));
    }
    let params = frame.params;
    // expansion Σ_k G_k φ_k(x) collected from every active level
    let mut top = 0;
    let mut pieces: Vec<(usize, Vec<f64>)> = Vec::new();
    for (j, level) in frame.levels.iter().enumerate() {
        let c = &coeffs.levels[j];
        if c.iter().all(|v| *v == 0.0) {
            continue;
        }
        let kdeg = level.kernel_degree();
        let basis = constraint_basis(params, kdeg, false)?;
        let dim = basis.dim();
        const CHUNK: usize = 256;
        let partials: Vec<Vec<f64>> = level
            .rule
            .points
            .par_chunks(CHUNK)
            .zip(c.par_chunks(CHUNK))
            .zip(level.sqrt_weights.par_chunks(CHUNK))
            .map(|((pts, cs), ss)| {
                let mut acc = vec![0.0; dim];
                let mut buf = vec![0.0; dim];
                for ((xi, cv), s) in pts.iter().zip(cs).zip(ss) {
                    if *cv == 0.0 {
                        continue;
                    }
                    basis.eval_into(xi, &mut buf);
                    let f = cv * s;
                    acc.iter_mut().zip(&buf).for_each(|(a, b)| *a += f * b);
                }
                acc
            })
            .collect();
        let mut g = vec![0.0; dim];
        for p in &partials {
            g.iter_mut().zip(p).for_each(|(o, v)| *o += v);
        }
        for (k, gk) in g.iter_mut().enumerate() {
            *gk *= level_multiplier(frame.cutoff, j, basis.degrees()[k]);
        }
        top = top.max(kdeg);
        pieces.push((j, g));
    }
    if pieces.is_empty() {
        return Ok(vec![0.0; xs.len()]);
    }
    let basis = constraint_basis(params, top, false)?;
    let mut total = vec![0.0; basis.dim()];
    for (_, g) in &pieces {
        total.iter_mut().zip(g).for_each(|(t, v)| *t += v);
    }
    Ok(xs
        .par_iter()
        .map_init(
            || vec![0.0; basis.dim()],
            |buf, x| {
                basis.eval_into(x, buf);
                crate::sum::pairwise(&total.iter().zip(buf.iter()).map(|(a, b)| a * b).collect::<Vec<_>>())
            },
        )
        .collect())
}

pub fn synthesize(frame: &NeedletFrame, coeffs: &CoefficientSet, x: &[f64]) -> Result<f64> {
    Ok(synthesize_many(frame, coeffs, &[x])?[0])
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ParsevalReport {
    pub norm_f: f64,
    pub norm_coeffs: f64,
    pub rel_gap: f64,
}

/// `‖f‖` by an exact product rule against the `ℓ²` norm of the coefficients.
pub fn parseval_check(
    frame: &NeedletFrame,
    f: &(dyn Fn(&[f64]) -> f64 + Sync),
    degree: usize,
    j_used: usize,
) -> Result<(ParsevalReport, CoefficientSet)> {
    let j_used = j_used.min(frame.j_max());
    if j_used < 2 || (1usize << (j_used - 2)) <= degree {
        return Err(Error::Truncation {
            cap: j_used,
            degree,
        });
    }
    let coeffs = analyze(frame, Integrand::Polynomial { f, degree }, j_used)?;
    let rule = BallRule::new(frame.params.mu, frame.params.d, 2 * degree)?;
    let norm_f = rule.integrate(|x| f(x).powi(2)).sqrt();
    let norm_coeffs = coeffs.l2_norm();
    let rel_gap = if norm_f > 0.0 {
        (norm_coeffs - norm_f).abs() / norm_f
    } else {
        norm_coeffs
    };
    Ok((
        ParsevalReport {
            norm_f,
            norm_coeffs,
            rel_gap,
        },
        coeffs,
    ))
}

/// `(L_j * g)(x) = ∫ L_j(x, y) g(y) dm(y)` with a rule exact for the integrand.
pub fn convolve(
    frame: &NeedletFrame,
    j: usize,
    g: &(dyn Fn(&[f64]) -> f64 + Sync),
    g_degree: usize,
    x: &[f64],
) -> Result<f64> {
    let level = frame.level(j)?;
    let rule = BallRule::new(frame.params.mu, frame.params.d, g_degree + level.kernel_degree())?;
    Ok(match &level.kernel {
        None => rule.integrate(g),
        Some(k) => rule.integrate(|y| k.eval(x, y) * g(y)),
    })
}
