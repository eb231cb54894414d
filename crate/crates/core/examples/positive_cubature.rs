//! A positive cubature rule exact to degree n, checked against closed-form moments.

use ballneedlets::cubature::{build_cubature, verify_rule};
use ballneedlets::kernels::monomial_moment;

fn main() -> ballneedlets::Result<()> {
    let (mu, n) = (1.0, 12);
    let rule = build_cubature(mu, 2, n, None)?;
    let report = verify_rule(&rule, 2)?;
    println!("{} knots at delta = {}, weights in [{:.3e}, {:.3e}]", rule.len(), rule.delta, report.min_weight, report.max_weight);
    println!("residual on degree <= {n}: {:.2e}", report.residual_max_exact);
    println!("residual beyond degree {n}: {:.2e}", report.residual_max_beyond);

    for (a, b) in [(0, 0), (2, 0), (4, 6), (3, 3), (12, 0)] {
        let q = rule.integrate(|x| x[0].powi(a) * x[1].powi(b));
        println!("x^{a} y^{b}: rule {q:+.15e}  exact {:+.15e}", monomial_moment(mu, &[a as usize, b as usize]));
    }
    Ok(())
}
