//! The Christoffel function against its natural scale n^{-d} W(n; x).

use ballneedlets::christoffel::{christoffel_lambda, christoffel_ratio, localized_poly, competitor_parameters, ChristoffelEvaluator};
use ballneedlets::kernels::BallWeightParams;
use ballneedlets::quadrature::BallRule;

fn main() -> ballneedlets::Result<()> {
    let params = BallWeightParams::new(0.5, 2)?;
    for n in [8, 16, 32] {
        let e = ChristoffelEvaluator::new(params, n)?;
        let ratios: Vec<String> = [0.0, 0.5, 0.9, 0.99, 1.0]
            .iter()
            .map(|&r| format!("{:.3}", christoffel_ratio(&e, &[r, 0.0])))
            .collect();
        println!("n = {n}: ratio at |x| = 0, .5, .9, .99, 1: {}", ratios.join("  "));
    }

    // Λ_n(ξ) is the least energy of a degree-n polynomial equal to one at ξ
    let n = 16;
    let e = ChristoffelEvaluator::new(params, n)?;
    let (k, m) = competitor_parameters(&params, n);
    let rule = BallRule::new(0.5, 2, 2 * n)?;
    let xi = [0.7, -0.2];
    let energy = rule.integrate(|x| localized_poly(k, m, &xi, x).unwrap().powi(2));
    println!("Lambda_{n}(xi) = {:.4e} <= {energy:.4e}", christoffel_lambda(&e, &xi));
    Ok(())
}
