//! Almost uniformly ε-distributed points on `B^d`.
//!
//! The ball is lifted to the upper hemisphere `S^d_+` by
//! `x ↦ (x, √(1-|x|²))`, which turns the ball metric into geodesic distance.
//! `S^d_+` is split into `2^d` orthant simplices; each is mapped onto the flat
//! simplex `{t ≥ 0, Σt = 1}` by `ξ ↦ ξ/⟨ξ, v⟩` with `v = (1, …, 1)` and
//! subdivided into `M^d` congruent pieces with `M = ⌈2√d/ε⌉` using the
//! Freudenthal (Kuhn) subdivision. For `d = 2` this is the usual subdivision
//! into congruent equilateral triangles.
//!
//! Flat points are handled in "Kuhn coordinates" `0 ≤ z_1 ≤ … ≤ z_d ≤ 1`, with
//! `z_k = t_{d-k+1} + … + t_d`; a sub-simplex is a lattice cube `c` plus an
//! ordering `π` of the fractional parts.

use std::collections::HashMap;
use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{ball_distance, boundary_gap, dot, BallPoint, BallWeightParams};
use crate::orthopoly::{gauss_jacobi, JacobiParams};

/// `(x, √(1-|x|²))`.
pub fn lift(x: &[f64]) -> Vec<f64> {
    let mut v = x.to_vec();
    v.push(boundary_gap(x));
    v
}

/// `ξ ↦ ξ / ⟨ξ, (1,…,1)⟩` from the closed positive orthant simplex onto the flat simplex.
pub fn simplex_map(xi: &[f64]) -> Vec<f64> {
    let s: f64 = xi.iter().sum();
    xi.iter().map(|v| v / s).collect()
}

/// Inverse of [`simplex_map`]: normalization to unit length.
pub fn simplex_map_inverse(t: &[f64]) -> Vec<f64> {
    let n = dot(t, t).sqrt();
    t.iter().map(|v| v / n).collect()
}

/// Side count `M = ⌈2√d / ε⌉`.
pub fn subdivision_count(epsilon: f64, d: usize) -> usize {
    (2.0 * (d as f64).sqrt() / epsilon - 1e-12).ceil().max(1.0) as usize
}

/// One cell of the partition.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PartitionCell {
    pub center: BallPoint,
    /// Lifted vertices on `S^d_+`, each of length `d + 1`.
    pub vertices: Vec<Vec<f64>>,
    pub epsilon: f64,
    /// `ε^d (√(1-|ξ|²) + ε)^{2μ}`, normalized over the set to total mass one.
    pub measure_surrogate: f64,
    /// Sign bitmask of the orthant (bit `i` set ⇔ coordinate `i` negative).
    pub orthant: u32,
    pub cube: Vec<u32>,
    pub order: Vec<u8>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PointSet {
    pub epsilon: f64,
    pub d: usize,
    pub mu: f64,
    /// Subdivision count per orthant simplex edge.
    pub m: usize,
    pub points: Vec<BallPoint>,
    pub cells: Vec<PartitionCell>,
    #[serde(skip)]
    lookup: HashMap<Vec<u32>, usize>,
}

/// Kuhn coordinates to flat simplex coordinates `t` (length `d + 1`).
fn kuhn_to_flat(z: &[f64]) -> Vec<f64> {
    let d = z.len();
    let mut t = vec![0.0; d + 1];
    t[0] = 1.0 - z[d - 1];
    for i in 1..d {
        t[i] = z[d - i] - z[d - i - 1];
    }
    t[d] = z[0];
    t
}

fn flat_to_kuhn(t: &[f64]) -> Vec<f64> {
    let d = t.len() - 1;
    let mut z = vec![0.0; d];
    let mut acc = 0.0;
    for k in 1..=d {
        acc += t[d - k + 1];
        z[k - 1] = acc;
    }
    z
}

fn apply_signs(v: &mut [f64], orthant: u32) {
    let n = v.len() - 1;
    for (i, c) in v.iter_mut().enumerate().take(n) {
        if orthant & (1 << i) != 0 {
            *c = -*c;
        }
    }
}

/// All orderings `π` compatible with cube `c` (ties in `c` fix the order).
fn compatible_orders(c: &[u32]) -> Vec<Vec<u8>> {
    fn permute(rest: &mut Vec<u8>, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if rest.is_empty() {
            out.push(cur.clone());
            return;
        }
        for i in 0..rest.len() {
            let v = rest.remove(i);
            cur.push(v);
            permute(rest, cur, out);
            cur.pop();
            rest.insert(i, v);
        }
    }
    let d = c.len();
    let mut all = Vec::new();
    permute(&mut (0..d as u8).collect(), &mut Vec::new(), &mut all);
    all.retain(|pi| {
        let mut pos = vec![0usize; d];
        for (rank, &axis) in pi.iter().enumerate() {
            pos[axis as usize] = rank;
        }
        (0..d - 1).all(|i| c[i] != c[i + 1] || pos[i + 1] < pos[i])
    });
    all
}

/// Non-decreasing cubes `0 ≤ c_1 ≤ … ≤ c_d ≤ M-1`.
fn monotone_cubes(d: usize, m: u32) -> Vec<Vec<u32>> {
    fn rec(d: usize, lo: u32, m: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == d {
            out.push(cur.clone());
            return;
        }
        for v in lo..m {
            cur.push(v);
            rec(d, v, m, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(d, 0, m, &mut Vec::new(), &mut out);
    out
}

/// Kuhn-space vertices (scaled by `M`) of the sub-simplex `(c, π)`.
fn sub_simplex_vertices(c: &[u32], pi: &[u8]) -> Vec<Vec<f64>> {
    let mut w: Vec<f64> = c.iter().map(|&v| v as f64).collect();
    let mut out = vec![w.clone()];
    for &axis in pi {
        w[axis as usize] += 1.0;
        out.push(w.clone());
    }
    out
}

fn key(orthant: u32, c: &[u32], pi: &[u8]) -> Vec<u32> {
    let mut k = Vec::with_capacity(1 + c.len() + pi.len());
    k.push(orthant);
    k.extend_from_slice(c);
    k.extend(pi.iter().map(|&v| v as u32));
    k
}

impl PointSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Cell containing `x` (ties on shared boundaries resolved arbitrarily).
    pub fn locate(&self, x: &[f64]) -> Option<usize> {
        let d = self.d;
        if x.len() != d || dot(x, x) > 1.0 + 1e-12 {
            return None;
        }
        let mut a: Vec<f64> = x.iter().map(|v| v.abs()).collect();
        a.push(boundary_gap(x));
        let orthant = x
            .iter()
            .enumerate()
            .fold(0u32, |acc, (i, &v)| if v < 0.0 { acc | (1 << i) } else { acc });
        let t = simplex_map(&a);
        let z = flat_to_kuhn(&t);
        let m = self.m as f64;
        let mut c = Vec::with_capacity(d);
        let mut frac = Vec::with_capacity(d);
        for &zk in &z {
            let scaled = (zk * m).clamp(0.0, m);
            let ck = scaled.floor().min(m - 1.0);
            c.push(ck as u32);
            frac.push(scaled - ck);
        }
        let mut pi: Vec<u8> = (0..d as u8).collect();
        // descending fractional part; among ties the larger axis goes first
        pi.sort_by(|&i, &j| {
            frac[j as usize]
                .total_cmp(&frac[i as usize])
                .then(j.cmp(&i))
        });
        self.lookup.get(&key(orthant, &c, &pi)).copied()
    }

    /// `m_μ(R_ξ)` for every cell (normalized measure), see [`PointSet::cell_measure`].
    pub fn cell_measures(&self, order: usize) -> Result<Vec<f64>> {
        let params = BallWeightParams::new(self.mu, self.d)?;
        (0..self.len())
            .into_par_iter()
            .map(|i| self.cell_measure(i, &params, order))
            .collect()
    }

    pub fn surrogates(&self) -> Vec<f64> {
        self.cells.iter().map(|c| c.measure_surrogate).collect()
    }

    /// Flat row-major point coordinates.
    pub fn flat_points(&self) -> Vec<f64> {
        self.points.iter().flat_map(|p| p.coords.iter().copied()).collect()
    }

    /// Exact `b_d^μ ∫_{R_ξ} W_μ(x) dx` of one cell, by a collapsed Gauss rule
    /// with `order` points per direction on the flat sub-simplex.
    ///
    /// On the hemisphere `W_μ(x) dx = y_{d+1}^{2μ} dσ(y)`, and central
    /// projection from the plane `Σt = 1` has density `h / |t|^{d+1}` with
    /// `h = 1/√(d+1)`.
    pub fn cell_measure(&self, cell: usize, params: &BallWeightParams, order: usize) -> Result<f64> {
        let d = self.d;
        let cellv = &self.cells[cell];
        let m = self.m as f64;
        let verts: Vec<Vec<f64>> = sub_simplex_vertices(&cellv.cube, &cellv.order)
            .into_iter()
            .map(|w| kuhn_to_flat(&w.iter().map(|v| v / m).collect::<Vec<_>>()))
            .collect();
        // t = verts[0] + Σ u_k (verts[k] - verts[0]) on the reference simplex
        let edges = DMatrix::from_fn(d + 1, d, |r, k| verts[k + 1][r] - verts[0][r]);
        let area_factor = (edges.transpose() * &edges).determinant().sqrt();
        let h = 1.0 / ((d + 1) as f64).sqrt();
        let rule = collapsed_simplex_rule(d, order)?;
        let mut total = 0.0;
        let mut t = vec![0.0; d + 1];
        for (u, w) in rule.iter() {
            for r in 0..=d {
                t[r] = verts[0][r] + (0..d).map(|k| u[k] * edges[(r, k)]).sum::<f64>();
            }
            let norm = dot(&t, &t).sqrt();
            let height = t[d] / norm;
            total += w * height.powf(2.0 * params.mu) * h / norm.powi(d as i32 + 1);
        }
        Ok(total * area_factor * params.b_d_mu)
    }
}

/// Points and weights on the reference simplex `{u ≥ 0, Σu ≤ 1}` (Stroud conical product).
fn collapsed_simplex_rule(d: usize, order: usize) -> Result<Vec<(Vec<f64>, f64)>> {
    let factors: Vec<_> = (0..d)
        .map(|i| gauss_jacobi(JacobiParams::new((d - 1 - i) as f64, 0.0)?, order))
        .collect::<Result<_>>()?;
    let mut out = vec![(Vec::new(), 1.0)];
    for (i, f) in factors.iter().enumerate() {
        let alpha = (d - 1 - i) as f64;
        let scale = 0.5f64.powf(alpha + 1.0);
        let mut next = Vec::with_capacity(out.len() * f.len());
        for (prefix, w) in &out {
            for (x, wx) in f.iter() {
                let mut p: Vec<f64> = prefix.clone();
                p.push((1.0 + x) / 2.0);
                next.push((p, w * wx * scale));
            }
        }
        out = next;
    }
    // collapsed coordinates: u_i = s_i Π_{k<i} (1 - s_k), Jacobian Π (1 - s_i)^{d-1-i}
    Ok(out
        .into_iter()
        .map(|(s, w)| {
            let mut u = vec![0.0; d];
            let mut rest = 1.0;
            for i in 0..d {
                let si = s[i];
                u[i] = rest * si;
                rest *= 1.0 - si;
            }
            (u, w)
        })
        .collect())
}

/// Partition of `B^d` into projected spherical simplices with centers.
pub fn build_point_set(epsilon: f64, d: usize, mu: f64) -> Result<PointSet> {
    if !(epsilon > 0.0 && epsilon <= PI) {
        return Err(Error::InvalidParameter(format!(
            "epsilon must lie in (0, π], got {epsilon}"
        )));
    }
    if d < 2 {
        return Err(Error::InvalidParameter(format!("dimension must be >= 2, got {d}")));
    }
    let params = BallWeightParams::new(mu, d)?;
    let m = subdivision_count(epsilon, d);
    let mf = m as f64;
    let mut templates = Vec::with_capacity(m.pow(d as u32));
    for c in monotone_cubes(d, m as u32) {
        for pi in compatible_orders(&c) {
            templates.push((c.clone(), pi));
        }
    }

    let mut cells = Vec::with_capacity(templates.len() << d);
    let mut points = Vec::with_capacity(templates.len() << d);
    let mut lookup = HashMap::with_capacity(templates.len() << d);
    for orthant in 0..(1u32 << d) {
        for (c, pi) in &templates {
            let kverts = sub_simplex_vertices(c, pi);
            let mut bary = vec![0.0; d];
            for w in &kverts {
                for k in 0..d {
                    bary[k] += w[k] / ((d + 1) as f64 * mf);
                }
            }
            let mut center = simplex_map_inverse(&kuhn_to_flat(&bary));
            apply_signs(&mut center, orthant);
            center.pop();
            let vertices = kverts
                .iter()
                .map(|w| {
                    let z: Vec<f64> = w.iter().map(|v| v / mf).collect();
                    let mut v = simplex_map_inverse(&kuhn_to_flat(&z));
                    apply_signs(&mut v, orthant);
                    v
                })
                .collect();
            let center = BallPoint { coords: center };
            let s = epsilon.powi(d as i32) * (boundary_gap(&center) + epsilon).powf(2.0 * params.mu);
            lookup.insert(key(orthant, c, pi), cells.len());
            points.push(center.clone());
            cells.push(PartitionCell {
                center,
                vertices,
                epsilon,
                measure_surrogate: s,
                orthant,
                cube: c.clone(),
                order: pi.clone(),
            });
        }
    }
    let total: f64 = cells.iter().map(|c| c.measure_surrogate).sum();
    cells.iter_mut().for_each(|c| c.measure_surrogate /= total);
    Ok(PointSet {
        epsilon,
        d,
        mu,
        m,
        points,
        cells,
        lookup,
    })
}

/// Unit normal of the hyperplane through the origin spanned by `d` vectors in `R^{d+1}`.
fn hyperplane_normal(vs: &[&Vec<f64>]) -> Vec<f64> {
    let dim = vs[0].len();
    let mut n = vec![0.0; dim];
    for (col, nc) in n.iter_mut().enumerate() {
        let minor = DMatrix::from_fn(dim - 1, dim - 1, |r, c| {
            let cc = if c < col { c } else { c + 1 };
            vs[r][cc]
        });
        let sign = if col % 2 == 0 { 1.0 } else { -1.0 };
        *nc = sign * minor.determinant();
    }
    let len = dot(&n, &n).sqrt();
    n.iter().map(|v| v / len).collect()
}

fn geodesic(a: &[f64], b: &[f64]) -> f64 {
    let mut diff = 0.0;
    let mut sum = 0.0;
    for (x, y) in a.iter().zip(b) {
        diff += (x - y) * (x - y);
        sum += (x + y) * (x + y);
    }
    2.0 * diff.sqrt().atan2(sum.sqrt())
}

/// Inner and outer radius of a cell around its center, in the ball metric.
///
/// The inner radius is the exact distance from the lifted center to the
/// nearest facet great-sphere (all facets, including equatorial ones); the
/// outer radius is the largest distance to the vertices and to `samples`
/// points along every edge.
pub fn cell_inclusion_check(cell: &PartitionCell, samples: usize) -> (f64, f64) {
    let center = lift(&cell.center);
    let k = cell.vertices.len();
    let mut r_inner = f64::INFINITY;
    for skip in 0..k {
        let facet: Vec<&Vec<f64>> = (0..k).filter(|&i| i != skip).map(|i| &cell.vertices[i]).collect();
        let mut n = hyperplane_normal(&facet);
        if dot(&n, &cell.vertices[skip]) < 0.0 {
            n.iter_mut().for_each(|v| *v = -*v);
        }
        r_inner = r_inner.min(dot(&n, &center).clamp(-1.0, 1.0).asin());
    }
    let mut r_outer = 0.0f64;
    for i in 0..k {
        r_outer = r_outer.max(geodesic(&center, &cell.vertices[i]));
        for j in i + 1..k {
            for s in 1..samples {
                let a = s as f64 / samples as f64;
                let p: Vec<f64> = cell.vertices[i]
                    .iter()
                    .zip(&cell.vertices[j])
                    .map(|(u, v)| (1.0 - a) * u + a * v)
                    .collect();
                r_outer = r_outer.max(geodesic(&center, &simplex_map_inverse(&p)));
            }
        }
    }
    (r_inner, r_outer)
}

/// Brute-force membership index: candidate cells by a uniform bucket grid on
/// the centers, containment by conic barycentric coordinates of the lift.
pub struct MembershipIndex<'a> {
    set: &'a PointSet,
    bucket: f64,
    grid: HashMap<Vec<i64>, Vec<usize>>,
    inverses: Vec<DMatrix<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Membership {
    /// Cells containing the point with every barycentric coordinate `> tol`.
    pub interior: usize,
    /// Cells containing it within `tol` but touching a face.
    pub boundary: usize,
}

impl<'a> MembershipIndex<'a> {
    pub fn new(set: &'a PointSet) -> Self {
        let bucket = set.epsilon;
        let mut grid: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
        for (i, p) in set.points.iter().enumerate() {
            grid.entry(Self::cell_of(p, bucket)).or_default().push(i);
        }
        let inverses = set
            .cells
            .iter()
            .map(|c| {
                let dim = c.vertices.len();
                let v = DMatrix::from_fn(dim, dim, |r, k| c.vertices[k][r]);
                v.try_inverse().expect("degenerate cell")
            })
            .collect();
        Self {
            set,
            bucket,
            grid,
            inverses,
        }
    }

    fn cell_of(x: &[f64], bucket: f64) -> Vec<i64> {
        x.iter().map(|v| (v / bucket).floor() as i64).collect()
    }

    pub fn membership(&self, x: &[f64], tol: f64) -> Membership {
        let d = self.set.d;
        let lifted = DVector::from_vec(lift(x));
        let base = Self::cell_of(x, self.bucket);
        let mut out = Membership::default();
        let mut offset = vec![-1i64; d];
        loop {
            let key: Vec<i64> = base.iter().zip(&offset).map(|(b, o)| b + o).collect();
            if let Some(list) = self.grid.get(&key) {
                for &ci in list {
                    // centers are within ε (Euclidean ≤ geodesic) of any point of their cell
                    if ball_distance(x, &self.set.points[ci]) > self.set.epsilon * 1.000001 {
                        continue;
                    }
                    let beta = &self.inverses[ci] * &lifted;
                    let scale: f64 = beta.iter().sum();
                    let min = beta.iter().map(|b| b / scale).fold(f64::INFINITY, f64::min);
                    if min > tol {
                        out.interior += 1;
                    } else if min >= -tol {
                        out.boundary += 1;
                    }
                }
            }
            let mut i = 0;
            while i < d {
                offset[i] += 1;
                if offset[i] <= 1 {
                    break;
                }
                offset[i] = -1;
                i += 1;
            }
            if i == d {
                break;
            }
        }
        out
    }
}
