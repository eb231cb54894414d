//! Nonnegative solutions of underdetermined linear systems `A x = b, x ≥ 0`.
//!
//! Two solvers are provided. [`phase_one_simplex`] is the textbook phase-1
//! tableau simplex with Bland's pivot rule; it certifies feasibility and
//! returns a vertex of the feasible polytope. [`max_entropy`] minimizes the
//! convex dual `F(z) = Σ p_i exp((Aᵀz)_i) - bᵀz`; its minimizer gives the
//! strictly positive solution `x = p ∘ exp(Aᵀz)` closest to the prior `p` in
//! relative entropy. It scales to systems far beyond the reach of a dense
//! tableau, and diverges exactly when no strictly positive solution exists.

use nalgebra::{DMatrix, DVector};

/// Outcome of the simplex phase 1.
#[derive(Debug, Clone)]
pub enum SimplexOutcome {
    Feasible { x: DVector<f64>, pivots: usize },
    Infeasible { infeasibility: f64, pivots: usize },
    PivotLimit { pivots: usize },
}

/// Phase-1 simplex with Bland's rule on `A x = b, x ≥ 0`.
///
/// Basic values are recomputed from the final basis by a least-squares solve
/// so that the returned `x` satisfies the equations to working precision.
pub fn phase_one_simplex(a: &DMatrix<f64>, b: &DVector<f64>, max_pivots: usize) -> SimplexOutcome {
    let (m, n) = a.shape();
    let width = n + m + 1;
    let rhs = n + m;
    let mut t = DMatrix::<f64>::zeros(m + 1, width);
    for i in 0..m {
        let sign = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            t[(i, j)] = sign * a[(i, j)];
        }
        t[(i, n + i)] = 1.0;
        t[(i, rhs)] = sign * b[i];
    }
    for j in 0..n {
        t[(m, j)] = -(0..m).map(|i| t[(i, j)]).sum::<f64>();
    }
    t[(m, rhs)] = -(0..m).map(|i| t[(i, rhs)]).sum::<f64>();
    let mut basis: Vec<usize> = (n..n + m).collect();
    let scale = 1.0 + a.amax();
    let tol = 1e-11 * scale;

    let mut pivots = 0;
    loop {
        let entering = (0..n + m).find(|&j| t[(m, j)] < -tol);
        let Some(q) = entering else { break };
        let mut leave: Option<usize> = None;
        let mut best = f64::INFINITY;
        for i in 0..m {
            let piv = t[(i, q)];
            if piv > tol {
                let ratio = t[(i, rhs)] / piv;
                let better = match leave {
                    None => true,
                    Some(l) => ratio < best - 1e-14 || (ratio <= best + 1e-14 && basis[i] < basis[l]),
                };
                if better {
                    best = ratio;
                    leave = Some(i);
                }
            }
        }
        // the phase-1 objective is bounded below, so some row always qualifies
        let Some(r) = leave else { break };
        let piv = t[(r, q)];
        for j in 0..width {
            t[(r, j)] /= piv;
        }
        for i in 0..=m {
            if i != r {
                let f = t[(i, q)];
                if f != 0.0 {
                    for j in 0..width {
                        t[(i, j)] -= f * t[(r, j)];
                    }
                }
            }
        }
        basis[r] = q;
        pivots += 1;
        if pivots >= max_pivots {
            return SimplexOutcome::PivotLimit { pivots };
        }
    }
    let infeasibility = -t[(m, rhs)];
    if infeasibility > 1e-9 * (1.0 + b.amax()) {
        return SimplexOutcome::Infeasible { infeasibility, pivots };
    }
    let cols: Vec<usize> = basis.iter().copied().filter(|&j| j < n).collect();
    let mut x = DVector::zeros(n);
    if !cols.is_empty() {
        let sub = DMatrix::from_fn(m, cols.len(), |i, k| a[(i, cols[k])]);
        let sol = sub
            .svd(true, true)
            .solve(b, 1e-14)
            .unwrap_or_else(|_| DVector::from_iterator(cols.len(), cols.iter().map(|_| 0.0)));
        for (k, &j) in cols.iter().enumerate() {
            x[j] = sol[k].max(0.0);
        }
    }
    SimplexOutcome::Feasible { x, pivots }
}

#[derive(Debug, Clone, Copy)]
pub struct MaxEntropyOptions {
    /// Stop when `max |A x - b| <= tol`.
    pub tol: f64,
    pub max_newton: usize,
    /// Systems with more rows than this use preconditioned CG for the Newton step.
    pub dense_limit: usize,
    pub max_cg: usize,
    /// Give up once some `(Aᵀz)_i` exceeds this: the solution would need a
    /// weight `e^cap` times its prior, which only happens near infeasibility.
    pub exponent_cap: f64,
}

impl Default for MaxEntropyOptions {
    fn default() -> Self {
        Self {
            tol: 1e-13,
            max_newton: 80,
            dense_limit: 1600,
            max_cg: 400,
            exponent_cap: 40.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct MaxEntropyOutcome {
    pub x: DVector<f64>,
    pub residual: f64,
    pub newton_steps: usize,
    pub converged: bool,
    /// Largest exponent reached; very large values signal (near) infeasibility.
    pub max_exponent: f64,
}

fn objective(prior: &[f64], g: &DVector<f64>, b: &DVector<f64>, z: &DVector<f64>) -> f64 {
    let s: Vec<f64> = prior.iter().zip(g.iter()).map(|(p, e)| p * e.exp()).collect();
    crate::sum::pairwise(&s) - b.dot(z)
}

/// Strictly positive solution of `A x = b` closest to `prior` in relative entropy.
///
/// `a` is `m × n` (constraints × unknowns). The result is not converged when
/// no strictly positive solution exists (the dual is then unbounded).
pub fn max_entropy(a: &DMatrix<f64>, b: &DVector<f64>, prior: &[f64], opts: MaxEntropyOptions) -> MaxEntropyOutcome {
    let (m, n) = a.shape();
    let mut z = DVector::<f64>::zeros(m);
    let mut g = DVector::<f64>::zeros(n);
    let mut x = DVector::from_column_slice(prior);
    let mut steps = 0;
    let mut max_exponent = 0.0f64;
    let mut residual;
    let mut stalled = 0;
    let mut history: Vec<f64> = Vec::new();
    loop {
        let grad = a * &x - b;
        residual = grad.amax();
        if residual <= opts.tol || steps >= opts.max_newton || stalled >= 4 {
            break;
        }
        let dir = if m <= opts.dense_limit {
            let mut scaled = a.clone();
            for (j, mut col) in scaled.column_iter_mut().enumerate() {
                col *= x[j].sqrt();
            }
            let h = &scaled * scaled.transpose();
            match h.cholesky() {
                Some(ch) => -ch.solve(&grad),
                None => break,
            }
        } else {
            newton_cg(a, &x, &grad, opts.max_cg, (0.1 * residual.sqrt()).min(1e-3))
        };
        let adir = a.tr_mul(&dir);
        let f0 = objective(prior, &g, b, &z);
        let slope = grad.dot(&dir);
        if !(slope < 0.0) {
            break;
        }
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..50 {
            let gt = &g + t * &adir;
            if gt.max() < 700.0 {
                let zt = &z + t * &dir;
                let ft = objective(prior, &gt, b, &zt);
                if ft <= f0 + 1e-4 * t * slope {
                    z = zt;
                    g = gt;
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !accepted {
            stalled += 1;
            if stalled >= 4 {
                break;
            }
            continue;
        }
        for j in 0..n {
            x[j] = prior[j] * g[j].exp();
        }
        max_exponent = max_exponent.max(g.max());
        steps += 1;
        if max_exponent > opts.exponent_cap {
            break;
        }
        let new_res = (a * &x - b).amax();
        stalled = if new_res >= residual * 0.999 { stalled + 1 } else { 0 };
        history.push(new_res);
        // Newton converges quadratically once it is close; a slow creep means divergence
        if history.len() > 12 && new_res > 0.5 * history[history.len() - 11] {
            residual = new_res;
            break;
        }
    }
    MaxEntropyOutcome {
        converged: residual <= opts.tol.max(1e-10),
        x,
        residual,
        newton_steps: steps,
        max_exponent,
    }
}

/// Solve `A diag(x) Aᵀ d = -grad` by Jacobi-preconditioned conjugate gradients.
fn newton_cg(a: &DMatrix<f64>, x: &DVector<f64>, grad: &DVector<f64>, max_iter: usize, rel_tol: f64) -> DVector<f64> {
    let m = a.nrows();
    let diag = DVector::from_iterator(
        m,
        (0..m).map(|i| {
            let row = a.row(i);
            row.iter().zip(x.iter()).map(|(v, w)| v * v * w).sum::<f64>().max(1e-300)
        }),
    );
    let hv = |v: &DVector<f64>| -> DVector<f64> {
        let mut t = a.tr_mul(v);
        t.component_mul_assign(x);
        a * t
    };
    let mut d = DVector::zeros(m);
    let mut r = -grad.clone();
    let mut zp = r.component_div(&diag);
    let mut p = zp.clone();
    let mut rz = r.dot(&zp);
    let target = rel_tol * r.norm();
    for _ in 0..max_iter {
        let hp = hv(&p);
        let alpha = rz / p.dot(&hp);
        d.axpy(alpha, &p, 1.0);
        r.axpy(-alpha, &hp, 1.0);
        if r.norm() <= target {
            break;
        }
        zp = r.component_div(&diag);
        let rz_new = r.dot(&zp);
        p = &zp + (rz_new / rz) * &p;
        rz = rz_new;
    }
    d
}
