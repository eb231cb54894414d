//! Gauss–Jacobi rules and the orthogonality of Jacobi polynomials.

use ballneedlets::orthopoly::{gauss_jacobi, gegenbauer_eval, jacobi_eval, jacobi_h, GegenbauerIndex, JacobiParams};

fn main() -> ballneedlets::Result<()> {
    let p = JacobiParams::new(0.5, -0.25)?;
    let rule = gauss_jacobi(p, 12)?;
    println!("{}-point rule, exact to degree {}", rule.len(), rule.exact_degree());
    println!("total weight {:.15} vs {:.15}", rule.total_weight(), p.weight_integral());

    let c = 1.0 / rule.total_weight();
    for (n, m) in [(3, 3), (3, 5), (7, 7), (2, 9)] {
        let g = c * rule.integrate(|t| jacobi_eval(p, n, t) * jacobi_eval(p, m, t));
        let expected = if n == m { jacobi_h(p, n) } else { 0.0 };
        println!("<P_{n}, P_{m}> = {g:+.3e}   expected {expected:+.3e}");
    }

    let g = GegenbauerIndex::new(1.5)?;
    println!("C_4^1.5(0.3) = {:.12}", gegenbauer_eval(g, 4, 0.3));
    Ok(())
}
