//! Fixed-order pairwise summation, so reductions do not depend on thread count.

const BLOCK: usize = 32;

pub fn pairwise(values: &[f64]) -> f64 {
    if values.len() <= BLOCK {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise(&values[..mid]) + pairwise(&values[mid..])
}

/// Pairwise sum of `f(i)` for `i < n` without materializing the terms twice.
pub fn pairwise_by<F: Fn(usize) -> f64>(n: usize, f: F) -> f64 {
    fn rec<F: Fn(usize) -> f64>(lo: usize, hi: usize, f: &F) -> f64 {
        if hi - lo <= BLOCK {
            return (lo..hi).map(f).sum();
        }
        let mid = lo + (hi - lo) / 2;
        rec(lo, mid, f) + rec(mid, hi, f)
    }
    rec(0, n, &f)
}
