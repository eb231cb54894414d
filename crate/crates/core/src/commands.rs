//! Payloads and tables behind the command-line subcommands.

use rayon::prelude::*;
use serde::Serialize;

use crate::artifacts::Polynomial;
use crate::christoffel::{christoffel_lambda, ChristoffelEvaluator};
use crate::cutoff::Cutoff;
use crate::error::{Error, Result};
use crate::geometry::build_point_set;
use crate::kernels::{ball_distance, norm_sq, weight_cal_w, BallWeightParams, LocalizedKernel};
use crate::needlets::{analyze, parseval_check, synthesize_many, CoefficientSet, Integrand, NeedletFrame, ParsevalReport};

#[derive(Debug, Serialize)]
pub struct PointsPayload {
    pub epsilon: f64,
    pub d: usize,
    pub mu: f64,
    /// Subdivisions per cube edge.
    pub m: usize,
    pub points: Vec<Vec<f64>>,
    pub surrogates: Vec<f64>,
    /// Cell masses `m_μ(R_ξ)` under the normalized measure.
    pub measures: Vec<f64>,
}

pub fn points(epsilon: f64, d: usize, mu: f64) -> Result<PointsPayload> {
    let set = build_point_set(epsilon, d, mu)?;
    Ok(PointsPayload {
        epsilon,
        d,
        mu,
        m: set.m,
        points: set.points.iter().map(|p| p.coords.clone()).collect(),
        surrogates: set.surrogates(),
        measures: set.cell_measures(5)?,
    })
}

fn in_ball(x: &[f64], d: usize) -> Result<()> {
    if x.len() != d || norm_sq(x) > 1.0 + 1e-12 {
        return Err(Error::InvalidParameter(format!("{x:?} is not a point of the closed {d}-ball")));
    }
    Ok(())
}

/// Points of a `grid × grid` lattice on `[-1, 1]²` inside the disk, padded with zeros to `d` coordinates.
pub fn square_grid(grid: usize, d: usize) -> Vec<Vec<f64>> {
    let step = 2.0 / grid.max(2).saturating_sub(1) as f64;
    let mut out = Vec::new();
    for i in 0..grid.max(2) {
        for j in 0..grid.max(2) {
            let mut x = vec![0.0; d];
            x[0] = -1.0 + i as f64 * step;
            x[1] = -1.0 + j as f64 * step;
            if norm_sq(&x) <= 1.0 {
                out.push(x);
            }
        }
    }
    out
}

pub fn kernel_header(d: usize) -> Vec<String> {
    let mut h: Vec<String> = (1..=d).map(|i| format!("x{i}")).collect();
    h.extend((1..=d).map(|i| format!("y{i}")));
    h.push("distance".into());
    h.push("value".into());
    h
}

/// Rows `(x, y, d(x, y), L_n(x, y))` for every `x` in `xs`.
pub fn kernel_rows(params: BallWeightParams, n: usize, cutoff: Cutoff, xs: &[Vec<f64>], y: &[f64]) -> Result<Vec<Vec<f64>>> {
    in_ball(y, params.d)?;
    for x in xs {
        in_ball(x, params.d)?;
    }
    let k = LocalizedKernel::new(params, n, cutoff)?;
    Ok(xs
        .par_iter()
        .map(|x| {
            let mut row = x.clone();
            row.extend_from_slice(y);
            row.push(ball_distance(x, y));
            row.push(k.eval(x, y));
            row
        })
        .collect())
}

pub const CHRISTOFFEL_HEADER: [&str; 4] = ["radius", "lambda", "scale", "ratio"];

/// Rows `(|x|, Λ_n(x), n^{-d} 𝒲_μ(n; x), ratio)` along the first axis at `grid + 1` radii.
pub fn christoffel_rows(params: BallWeightParams, n: usize, grid: usize) -> Result<Vec<Vec<f64>>> {
    let e = ChristoffelEvaluator::new(params, n)?;
    let nf = n.max(1) as f64;
    let grid = grid.max(1);
    Ok((0..=grid)
        .into_par_iter()
        .map(|i| {
            let r = i as f64 / grid as f64;
            let mut x = vec![0.0; params.d];
            x[0] = r;
            let lam = christoffel_lambda(&e, &x);
            let scale = nf.powi(-(params.d as i32)) * weight_cal_w(&params, nf, &x);
            vec![r, lam, scale, lam / scale]
        })
        .collect())
}

pub fn analyze_polynomial(frame: &NeedletFrame, f: &Polynomial, j_used: usize) -> Result<CoefficientSet> {
    check_dim(frame, f)?;
    let g = |x: &[f64]| f.eval(x);
    analyze(
        frame,
        Integrand::Polynomial {
            f: &g,
            degree: f.degree(),
        },
        j_used,
    )
}

pub fn parseval_polynomial(frame: &NeedletFrame, f: &Polynomial, j_used: usize) -> Result<ParsevalReport> {
    check_dim(frame, f)?;
    let g = |x: &[f64]| f.eval(x);
    Ok(parseval_check(frame, &g, f.degree(), j_used)?.0)
}

/// Rows `(x, Σ c_ξ ψ_ξ(x))`.
pub fn synthesis_rows(frame: &NeedletFrame, coeffs: &CoefficientSet, xs: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    for x in xs {
        in_ball(x, frame.params.d)?;
    }
    let refs: Vec<&[f64]> = xs.iter().map(|x| &x[..]).collect();
    let values = synthesize_many(frame, coeffs, &refs)?;
    Ok(xs
        .iter()
        .zip(values)
        .map(|(x, v)| {
            let mut row = x.clone();
            row.push(v);
            row
        })
        .collect())
}

fn check_dim(frame: &NeedletFrame, f: &Polynomial) -> Result<()> {
    if f.d != frame.params.d {
        return Err(Error::InvalidParameter(format!(
            "polynomial has {} variables, frame lives in dimension {}",
            f.d, frame.params.d
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points_payload_is_consistent() {
        let p = points(0.5, 2, 1.0).unwrap();
        assert_eq!(p.points.len(), 4 * p.m * p.m);
        assert_eq!(p.surrogates.len(), p.points.len());
        assert!((p.measures.iter().sum::<f64>() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn kernel_rows_shape_and_symmetry() {
        let params = BallWeightParams::new(0.5, 2).unwrap();
        let xs = square_grid(5, 2);
        let rows = kernel_rows(params, 4, Cutoff::TypeA, &xs, &[0.1, 0.2]).unwrap();
        assert_eq!(rows.len(), xs.len());
        assert_eq!(rows[0].len(), kernel_header(2).len());
        let back = kernel_rows(params, 4, Cutoff::TypeA, &[vec![0.1, 0.2]], &xs[3]).unwrap();
        assert!((back[0][5] - rows[3][5]).abs() < 1e-12 * (1.0 + rows[3][5].abs()));
        assert!(kernel_rows(params, 4, Cutoff::TypeA, &xs, &[0.9, 0.9]).is_err());
    }

    #[test]
    fn christoffel_rows_at_center() {
        let params = BallWeightParams::new(0.5, 2).unwrap();
        let rows = christoffel_rows(params, 0, 4).unwrap();
        assert_eq!(rows.len(), 5);
        assert!(rows.iter().all(|r| (r[1] - 1.0).abs() < 1e-14));
    }
}
