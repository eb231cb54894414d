//! Orthonormal polynomial bases of `Π_n^d` in `L²(B^d, dm_μ)`.
//!
//! Two constructions share the [`OrthonormalBasis`] trait:
//!
//! * [`GramSchmidtBasis`] works in any dimension. Functions are generated in
//!   graded order; the function with leading monomial `x^α` starts from
//!   `x_i φ_parent`, where `x^{α-e_i}` is the leading monomial of the parent,
//!   and is orthogonalized (two passes, compensated dot products) under an
//!   exact product Gauss rule. Since `⟨x_i φ_p, q⟩ = ⟨φ_p, x_i q⟩`, only the
//!   blocks of degree `m-2, m-1, m` can receive non-zero coefficients, so
//!   evaluation follows a banded recurrence.
//! * [`DiskBasis`] is the closed form for `d = 2`:
//!   `r^k P_j^{(μ-1/2, k)}(2r²-1) {cos kθ, sin kθ}` of degree `k + 2j`. Its
//!   `invariant` variant keeps the functions fixed by the symmetry group of the
//!   square (cosines with `k ≡ 0 mod 4`).

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::kernels::BallWeightParams;
use crate::orthopoly::{jacobi_eval_all, ln_gamma, JacobiParams};
use crate::quadrature::BallRule;

pub trait OrthonormalBasis: Sync + Send {
    fn dim(&self) -> usize;

    fn ambient_dim(&self) -> usize;

    /// `μ` of the measure the functions are orthonormal for.
    fn mu(&self) -> f64;

    fn max_degree(&self) -> usize;

    /// Degree of every basis function, non-decreasing.
    fn degrees(&self) -> &[usize];

    /// `out[k] = φ_k(x)` for `k < dim()`.
    fn eval_into(&self, x: &[f64], out: &mut [f64]);

    fn eval(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.eval_into(x, &mut out);
        out
    }

    /// Whether every function is invariant under the symmetries of the square
    /// (`d = 2`: coordinate sign changes and the swap `x_1 ↔ x_2`).
    fn square_invariant(&self) -> bool {
        false
    }

    /// Number of functions of degree `<= m`.
    fn count_up_to(&self, m: usize) -> usize {
        self.degrees().partition_point(|&deg| deg <= m)
    }
}

/// `binom(n + d, d)`, the dimension of `Π_n^d`.
pub fn dim_polys(n: usize, d: usize) -> usize {
    let mut v: u128 = 1;
    for i in 1..=d as u128 {
        v = v * (n as u128 + i) / i;
    }
    v as usize
}

/// All multi-indices of total degree `<= n` in graded lexicographic order.
pub fn graded_exponents(n: usize, d: usize) -> Vec<Vec<usize>> {
    fn fill(rest: usize, d: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == d - 1 {
            prefix.push(rest);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for e in (0..=rest).rev() {
            prefix.push(e);
            fill(rest - e, d, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::with_capacity(dim_polys(n, d));
    for m in 0..=n {
        fill(m, d, &mut Vec::with_capacity(d), &mut out);
    }
    out
}

/// Weighted dot product `Σ a_i b_i w_i` with compensated (TwoSum) accumulation.
fn dot_compensated(a: &[f64], b: &[f64], w: &[f64]) -> f64 {
    let mut s = 0.0f64;
    let mut c = 0.0f64;
    for i in 0..a.len() {
        let p = a[i] * b[i] * w[i];
        let t = s + p;
        c += if s.abs() >= p.abs() { (s - t) + p } else { (p - t) + s };
        s = t;
    }
    s + c
}

#[derive(Debug, Clone)]
struct Recipe {
    /// Coordinate multiplied onto the parent.
    axis: usize,
    parent: usize,
    /// Coefficients against functions `band_start..k`.
    band_start: usize,
    coeffs: Vec<f64>,
    norm: f64,
}

/// Graded orthonormal basis built by two-pass Gram–Schmidt under an exact rule.
#[derive(Debug, Clone)]
pub struct GramSchmidtBasis {
    pub params: BallWeightParams,
    pub n: usize,
    exponents: Vec<Vec<usize>>,
    degrees: Vec<usize>,
    recipes: Vec<Recipe>,
    /// `max |⟨φ_i, φ_j⟩ - δ_ij|` under an independent rule of degree `2n + 10`.
    pub gram_residual: f64,
}

impl GramSchmidtBasis {
    pub fn new(params: BallWeightParams, n: usize) -> Result<Self> {
        let d = params.d;
        let rule = BallRule::new(params.mu, d, 2 * n.max(1))?;
        let q = rule.len();
        let exponents = graded_exponents(n, d);
        let big_n = exponents.len();
        let degrees: Vec<usize> = exponents.iter().map(|e| e.iter().sum()).collect();
        let block_start: Vec<usize> = (0..=n + 1)
            .map(|m| degrees.partition_point(|&deg| deg < m))
            .collect();

        let index_of = |e: &[usize]| exponents.iter().position(|x| x == e).unwrap();
        let mut values: Vec<Vec<f64>> = Vec::with_capacity(big_n);
        let mut recipes = Vec::with_capacity(big_n);
        values.push(vec![1.0; q]);
        recipes.push(Recipe {
            axis: 0,
            parent: 0,
            band_start: 0,
            coeffs: Vec::new(),
            norm: 1.0,
        });

        for k in 1..big_n {
            let e = &exponents[k];
            let axis = e.iter().position(|&v| v > 0).unwrap();
            let mut pe = e.clone();
            pe[axis] -= 1;
            let parent = index_of(&pe);
            let m = degrees[k];
            let band_start = block_start[m.saturating_sub(2)];

            let mut v: Vec<f64> = (0..q)
                .map(|i| rule.nodes[i * d + axis] * values[parent][i])
                .collect();
            let start_norm = dot_compensated(&v, &v, &rule.weights).sqrt();
            let mut coeffs = vec![0.0; k - band_start];
            for _pass in 0..2 {
                for l in band_start..k {
                    let c = dot_compensated(&v, &values[l], &rule.weights);
                    coeffs[l - band_start] += c;
                    for (vi, pl) in v.iter_mut().zip(&values[l]) {
                        *vi -= c * pl;
                    }
                }
            }
            let norm = dot_compensated(&v, &v, &rule.weights).sqrt();
            if !(norm > 1e-10 * start_norm) {
                return Err(Error::SingularGram {
                    index: k,
                    degree: m,
                    norm: norm / start_norm,
                });
            }
            v.iter_mut().for_each(|x| *x /= norm);
            values.push(v);
            recipes.push(Recipe {
                axis,
                parent,
                band_start,
                coeffs,
                norm,
            });
        }

        let mut basis = Self {
            params,
            n,
            exponents,
            degrees,
            recipes,
            gram_residual: f64::NAN,
        };
        basis.gram_residual = gram_residual(&basis, 2 * n + 10)?;
        Ok(basis)
    }

    /// Leading monomial exponent of every function.
    pub fn exponents(&self) -> &[Vec<usize>] {
        &self.exponents
    }
}

impl OrthonormalBasis for GramSchmidtBasis {
    fn dim(&self) -> usize {
        self.recipes.len()
    }

    fn ambient_dim(&self) -> usize {
        self.params.d
    }

    fn mu(&self) -> f64 {
        self.params.mu
    }

    fn max_degree(&self) -> usize {
        self.n
    }

    fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    fn eval_into(&self, x: &[f64], out: &mut [f64]) {
        out[0] = 1.0;
        for k in 1..self.recipes.len() {
            let r = &self.recipes[k];
            let mut v = x[r.axis] * out[r.parent];
            for (c, o) in r.coeffs.iter().zip(&out[r.band_start..k]) {
                v -= c * o;
            }
            out[k] = v / r.norm;
        }
    }
}

/// `max |⟨φ_i, φ_j⟩ - δ_ij|` under a product rule exact to `degree`.
pub fn gram_residual(basis: &dyn OrthonormalBasis, degree: usize) -> Result<f64> {
    let n = basis.dim();
    let d = basis.ambient_dim();
    let rule = BallRule::new(basis.mu(), d, degree)?;
    let q = rule.len();
    let mut vals = DMatrix::<f64>::zeros(n, q);
    let mut buf = vec![0.0; n];
    for i in 0..q {
        basis.eval_into(rule.node(i), &mut buf);
        let sw = rule.weights[i].sqrt();
        for k in 0..n {
            vals[(k, i)] = buf[k] * sw;
        }
    }
    let gram = &vals * vals.transpose();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((gram[(i, j)] - target).abs());
        }
    }
    Ok(worst)
}

/// `d = 2` closed-form basis in polar coordinates.
#[derive(Debug, Clone)]
pub struct DiskBasis {
    pub params: BallWeightParams,
    pub n: usize,
    /// Only the cosine terms with `k ≡ 0 mod 4` (the square-symmetric subspace).
    pub invariant: bool,
    /// `(k, j, is_sine)` per function, graded by `k + 2j`.
    index: Vec<(usize, usize, bool)>,
    degrees: Vec<usize>,
    /// `1/√norm²` per function.
    scale: Vec<f64>,
    /// For each `k`: positions of `(k, j, cos)` and `(k, j, sin)` in `index`.
    slots: Vec<Vec<(usize, Option<usize>)>>,
}

impl DiskBasis {
    pub fn new(params: BallWeightParams, n: usize, invariant: bool) -> Result<Self> {
        if params.d != 2 {
            return Err(Error::InvalidParameter(format!(
                "DiskBasis needs d = 2, got d = {}",
                params.d
            )));
        }
        let mu = params.mu;
        let mut index = Vec::new();
        for m in 0..=n {
            // k runs m, m-2, ..., so that the ordering is graded.
            let mut k = m as isize;
            let mut row = Vec::new();
            while k >= 0 {
                let ku = k as usize;
                let j = (m - ku) / 2;
                if !invariant || ku.is_multiple_of(4) {
                    row.push((ku, j, false));
                    if ku > 0 && !invariant {
                        row.push((ku, j, true));
                    }
                }
                k -= 2;
            }
            row.reverse();
            index.extend(row);
        }
        let degrees = index.iter().map(|&(k, j, _)| k + 2 * j).collect();
        let ln_b = ((mu + 0.5) / std::f64::consts::PI).ln();
        let scale = index
            .iter()
            .map(|&(k, j, _)| {
                let (a, b) = (mu - 0.5, k as f64);
                let jf = j as f64;
                let ln_h = (a + b + 1.0) * std::f64::consts::LN_2 - (2.0 * jf + a + b + 1.0).ln()
                    + ln_gamma(jf + a + 1.0)
                    + ln_gamma(jf + b + 1.0)
                    - ln_gamma(jf + a + b + 1.0)
                    - ln_gamma(jf + 1.0);
                let theta = if k == 0 { 2.0 * std::f64::consts::PI } else { std::f64::consts::PI };
                let ln_norm2 = ln_b + theta.ln() - (b + mu + 1.5) * std::f64::consts::LN_2 + ln_h;
                (-0.5 * ln_norm2).exp()
            })
            .collect();
        let mut slots: Vec<Vec<(usize, Option<usize>)>> = vec![Vec::new(); n + 1];
        for (pos, &(k, j, sine)) in index.iter().enumerate() {
            let row = &mut slots[k];
            if row.len() <= j {
                row.resize(j + 1, (usize::MAX, None));
            }
            if sine {
                row[j].1 = Some(pos);
            } else {
                row[j].0 = pos;
            }
        }
        Ok(Self {
            params,
            n,
            invariant,
            index,
            degrees,
            scale,
            slots,
        })
    }

    /// `(k, j, is_sine)` labels of every function.
    pub fn labels(&self) -> &[(usize, usize, bool)] {
        &self.index
    }
}

impl OrthonormalBasis for DiskBasis {
    fn dim(&self) -> usize {
        self.index.len()
    }

    fn ambient_dim(&self) -> usize {
        2
    }

    fn mu(&self) -> f64 {
        self.params.mu
    }

    fn max_degree(&self) -> usize {
        self.n
    }

    fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    fn square_invariant(&self) -> bool {
        self.invariant
    }

    fn eval_into(&self, x: &[f64], out: &mut [f64]) {
        let (x1, x2) = (x[0], x[1]);
        let s = (2.0 * (x1 * x1 + x2 * x2) - 1.0).clamp(-1.0, 1.0);
        let mut radial = vec![0.0; self.n / 2 + 1];
        // z^k = (x1 + i x2)^k = r^k (cos kθ + i sin kθ)
        let (mut zr, mut zi) = (1.0f64, 0.0f64);
        for (k, row) in self.slots.iter().enumerate() {
            if k > 0 {
                let t = zr * x1 - zi * x2;
                zi = zr * x2 + zi * x1;
                zr = t;
            }
            if row.is_empty() {
                continue;
            }
            let p = JacobiParams {
                alpha: self.params.mu - 0.5,
                beta: k as f64,
            };
            let len = row.len();
            jacobi_eval_all(p, s, &mut radial[..len]);
            for (j, &(cpos, spos)) in row.iter().enumerate() {
                if cpos != usize::MAX {
                    out[cpos] = self.scale[cpos] * radial[j] * zr;
                }
                if let Some(sp) = spos {
                    out[sp] = self.scale[sp] * radial[j] * zi;
                }
            }
        }
    }
}

/// Orthonormal basis of `Π_n^d` by graded Gram–Schmidt.
pub fn build_basis(mu: f64, d: usize, n: usize) -> Result<GramSchmidtBasis> {
    GramSchmidtBasis::new(BallWeightParams::new(mu, d)?, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{monomial_moment, ProjectorSeries};
    use approx::assert_relative_eq;

    #[test]
    fn counting() {
        assert_eq!(dim_polys(4, 2), 15);
        assert_eq!(dim_polys(16, 3), 969);
        assert_eq!(graded_exponents(5, 3).len(), dim_polys(5, 3));
        assert_eq!(graded_exponents(2, 2)[..3], [vec![0, 0], vec![1, 0], vec![0, 1]]);
    }

    #[test]
    fn gram_schmidt_orthonormal() {
        for &(mu, d, n) in &[(0.5, 2, 8), (0.0, 2, 12), (1.0, 3, 6), (2.0, 2, 20)] {
            let b = build_basis(mu, d, n).unwrap();
            assert_eq!(b.dim(), dim_polys(n, d));
            assert!(b.gram_residual < 1e-9, "mu={mu} d={d} n={n}: {}", b.gram_residual);
            let x = vec![0.3; d];
            assert_eq!(b.eval(&x)[0], 1.0);
        }
    }

    #[test]
    fn moments_of_disk_lebesgue() {
        // ∫ x_1² dm = 1/4 for the normalized Lebesgue measure on the disk
        assert_relative_eq!(monomial_moment(0.5, &[2, 0]), 0.25, max_relative = 1e-14);
        // x_1² = ⟨x_1², 1⟩ + (x_1² - 1/4): the constant coefficient is the moment
        let b = build_basis(0.5, 2, 4).unwrap();
        let rule = BallRule::new(0.5, 2, 12).unwrap();
        let c0 = rule.integrate(|x| x[0] * x[0] * b.eval(x)[0]);
        assert_relative_eq!(c0, 0.25, max_relative = 1e-13);
    }

    fn kernel_from_basis(b: &dyn OrthonormalBasis, x: &[f64], y: &[f64]) -> Vec<f64> {
        let (bx, by) = (b.eval(x), b.eval(y));
        let mut out = vec![0.0; b.max_degree() + 1];
        for k in 0..b.dim() {
            out[b.degrees()[k]] += bx[k] * by[k];
        }
        out
    }

    #[test]
    fn both_bases_reproduce_projector_kernels() {
        let pts = [[0.1, -0.2], [0.7, 0.6], [-0.95, 0.05], [0.0, 0.0]];
        for &mu in &[0.0, 0.5, 1.0, 2.5] {
            let p = BallWeightParams::new(mu, 2).unwrap();
            let n = 10;
            let gs = GramSchmidtBasis::new(p, n).unwrap();
            let disk = DiskBasis::new(p, n, false).unwrap();
            let series = ProjectorSeries::new(p, n).unwrap();
            for x in &pts {
                for y in &pts {
                    let mut want = vec![0.0; n + 1];
                    series.eval_all(x, y, &mut want);
                    for got in [kernel_from_basis(&gs, x, y), kernel_from_basis(&disk, x, y)] {
                        for m in 0..=n {
                            assert!(
                                (got[m] - want[m]).abs() < 1e-9 * (1.0 + want[m].abs()),
                                "mu={mu} m={m}: {} vs {}",
                                got[m],
                                want[m]
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn projector_kernels_in_three_dimensions() {
        let p = BallWeightParams::new(1.0, 3).unwrap();
        let gs = GramSchmidtBasis::new(p, 6).unwrap();
        let series = ProjectorSeries::new(p, 6).unwrap();
        let x = [0.2, -0.3, 0.5];
        let y = [-0.6, 0.1, 0.4];
        let got = kernel_from_basis(&gs, &x, &y);
        let mut want = vec![0.0; 7];
        series.eval_all(&x, &y, &mut want);
        for m in 0..=6 {
            assert!((got[m] - want[m]).abs() < 1e-9 * (1.0 + want[m].abs()));
        }
    }

    #[test]
    fn disk_basis_orthonormal_at_high_degree() {
        let p = BallWeightParams::new(1.0, 2).unwrap();
        let b = DiskBasis::new(p, 40, false).unwrap();
        assert_eq!(b.dim(), dim_polys(40, 2));
        assert!(gram_residual(&b, 80).unwrap() < 1e-10);
    }

    #[test]
    fn invariant_subspace_is_symmetric() {
        let p = BallWeightParams::new(0.0, 2).unwrap();
        let b = DiskBasis::new(p, 24, true).unwrap();
        let x = [0.31, -0.72];
        let images = [[-0.31, -0.72], [0.31, 0.72], [-0.72, 0.31], [0.72, -0.31]];
        let base = b.eval(&x);
        for img in &images {
            for (a, c) in base.iter().zip(b.eval(img)) {
                assert!((a - c).abs() < 1e-11 * (1.0 + a.abs()));
            }
        }
        assert!(gram_residual(&b, 48).unwrap() < 1e-10);
        assert!(DiskBasis::new(BallWeightParams::new(0.0, 3).unwrap(), 4, false).is_err());
    }
}
