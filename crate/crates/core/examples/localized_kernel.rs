//! The localized kernel L_n(x, y) on the disk and its decay away from the diagonal.

use ballneedlets::cutoff::Cutoff;
use ballneedlets::kernels::{ball_distance, BallWeightParams, LocalizedKernel};

fn main() -> ballneedlets::Result<()> {
    let params = BallWeightParams::new(1.0, 2)?;
    let y = [0.6, 0.2];
    for n in [8, 16, 32] {
        let k = LocalizedKernel::new(params, n, Cutoff::TypeA)?;
        let peak = k.eval(&y, &y);
        println!("n = {n}: L_n(y, y) = {peak:.3}");
        for r in [0.0, 0.3, 0.6, 0.9] {
            let x = [y[0] - r, y[1]];
            let v = k.eval(&x, &y);
            println!("   d = {:.3}  |L_n| / L_n(y,y) = {:.2e}", ball_distance(&x, &y), v.abs() / peak);
        }
    }
    Ok(())
}
