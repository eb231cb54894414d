//! A tight needlet frame: analysis, synthesis and the Parseval identity.

use ballneedlets::kernels::BallWeightParams;
use ballneedlets::needlets::{analyze, build_frame, needlet_eval, parseval_check, synthesize, Integrand};

fn main() -> ballneedlets::Result<()> {
    let frame = build_frame(BallWeightParams::new(0.5, 2)?, 5)?;
    for level in &frame.levels {
        println!("level {}: {} knots, rule exact to degree {}", level.j, level.len(), level.degree());
    }

    let f = |x: &[f64]| 1.0 - 2.0 * x[0] * x[1] + x[0].powi(5) - 0.5 * x[1].powi(6);
    let (report, _) = parseval_check(&frame, &f, 6, 5)?;
    println!("||f|| = {:.15}, coefficient norm = {:.15}, gap {:.1e}", report.norm_f, report.norm_coeffs, report.rel_gap);

    let coeffs = analyze(&frame, Integrand::Polynomial { f: &f, degree: 6 }, 5)?;
    for x in [[0.0, 0.0], [0.5, -0.3], [-0.1, 0.95]] {
        println!("f{x:?} = {:+.15}  synthesized {:+.15}", f(&x), synthesize(&frame, &coeffs, &x)?);
    }

    let psi = needlet_eval(&frame, 3, 0, &[0.0, 0.0])?;
    println!("psi at level 3, knot 0, evaluated at the origin: {psi:.3e}");
    Ok(())
}
