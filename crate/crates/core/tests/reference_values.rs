//! Worked values checked against closed forms computed independently of the library.

use std::f64::consts::PI;

use ballneedlets::artifacts::Polynomial;
use ballneedlets::cubature::build_cubature;
use ballneedlets::cutoff::{make_type_a, make_type_b};
use ballneedlets::kernels::{ball_distance, monomial_moment, BallWeightParams};
use ballneedlets::needlets::{analyze, build_frame, Integrand};
use ballneedlets::orthopoly::{gauss_jacobi, gegenbauer_eval, jacobi_eval, jacobi_h, GegenbauerIndex, JacobiParams};
use rand::SeedableRng;
use rand_xoshiro::SplitMix64;

#[test]
fn classical_polynomials() {
    let legendre = JacobiParams::new(0.0, 0.0).unwrap();
    assert_eq!(jacobi_eval(legendre, 0, 0.3), 1.0);
    assert!((jacobi_eval(legendre, 2, 1.0) - 1.0).abs() < 1e-15);
    assert!((jacobi_eval(legendre, 2, 0.0) + 0.5).abs() < 1e-15);
    assert!((jacobi_h(legendre, 0) - 1.0).abs() < 1e-14);
    assert!((jacobi_h(legendre, 2) - 0.2).abs() < 1e-14);
    assert!((jacobi_h(JacobiParams::new(1.0, 0.0).unwrap(), 0) - 1.0).abs() < 1e-14);

    let g = GegenbauerIndex::new(1.0).unwrap();
    assert!((gegenbauer_eval(g, 1, 0.5) - 1.0).abs() < 1e-14);
    assert!((gegenbauer_eval(g, 2, 0.0) + 1.0).abs() < 1e-14);
    assert_eq!(gegenbauer_eval(GegenbauerIndex::new(0.75).unwrap(), 0, -0.2), 1.0);
}

#[test]
fn gauss_rules() {
    let legendre = JacobiParams::new(0.0, 0.0).unwrap();
    let one = gauss_jacobi(legendre, 1).unwrap();
    assert!(one.nodes[0].abs() < 1e-15 && (one.weights[0] - 2.0).abs() < 1e-14);
    let three = gauss_jacobi(legendre, 3).unwrap();
    assert!((three.integrate(|t| t.powi(4)) - 0.4).abs() < 1e-14);
    let half = gauss_jacobi(JacobiParams::new(0.5, 0.5).unwrap(), 2).unwrap();
    assert!((half.total_weight() - PI / 2.0).abs() < 1e-14);
}

#[test]
fn cutoff_values() {
    let a = make_type_a();
    assert_eq!(a.eval(0.5), 1.0);
    assert_eq!(a.eval(2.0), 0.0);
    assert!((a.eval(1.5) - 0.5).abs() < 1e-15);
    let b = make_type_b();
    assert!((b.eval(1.0) - 1.0).abs() < 1e-15);
    assert_eq!(b.eval(0.5), 0.0);
    assert_eq!(b.eval(2.0), 0.0);
    assert!((b.eval(0.75).powi(2) + b.eval(1.5).powi(2) - 1.0).abs() < 1e-15);
}

#[test]
fn metric_values() {
    assert_eq!(ball_distance(&[0.3, -0.2], &[0.3, -0.2]), 0.0);
    // antipodal boundary points sit at distance π on the hemisphere
    assert!((ball_distance(&[1.0, 0.0], &[-1.0, 0.0]) - PI).abs() < 1e-15);
    // the center and a boundary point are a quarter circle apart
    assert!((ball_distance(&[0.0, 0.0], &[0.0, 1.0]) - PI / 2.0).abs() < 1e-15);
}

#[test]
fn disk_moments() {
    // ∫ x² dx dy / π over the unit disk, in polar coordinates
    assert!((monomial_moment(0.5, &[2, 0]) - 0.25).abs() < 1e-15);
    // ∫ x² y² / π = (1/π) ∫ r⁵ dr ∫ cos²θ sin²θ dθ = (1/π)(1/6)(π/4)
    assert!((monomial_moment(0.5, &[2, 2]) - 1.0 / 24.0).abs() < 1e-15);
    assert_eq!(monomial_moment(1.0, &[3, 0]), 0.0);
}

#[test]
fn lebesgue_rule_of_degree_four() {
    let rule = build_cubature(0.5, 2, 4, None).unwrap();
    assert!(rule.weights.iter().all(|w| *w > 0.0));
    assert!((rule.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    for a in 0..=4i32 {
        for b in 0..=(4 - a) {
            let q = rule.integrate(|x| x[0].powi(a) * x[1].powi(b));
            let exact = monomial_moment(0.5, &[a as usize, b as usize]);
            assert!((q - exact).abs() < 1e-8, "x^{a} y^{b}: {q} vs {exact}");
        }
    }
}

#[test]
fn frame_products_and_constants() {
    let frame = build_frame(BallWeightParams::new(1.0, 2).unwrap(), 3).unwrap();
    let sizes: Vec<usize> = frame.levels.iter().map(|l| l.len()).collect();
    for w in sizes.windows(2).skip(1) {
        let growth = w[1] as f64 / w[0] as f64;
        assert!((3.0..=5.0).contains(&growth), "level growth {growth}");
    }

    // level rules integrate products g h with deg g + deg h ≤ 2^{j+2}
    let mut rng = SplitMix64::seed_from_u64(17);
    for level in &frame.levels {
        let half = level.degree() / 2;
        let g = Polynomial::random(&mut rng, 2, half);
        let h = Polynomial::random(&mut rng, 2, level.degree() - half);
        let q = level.rule.integrate(|x| g.eval(x) * h.eval(x));
        let exact: f64 = g
            .terms
            .iter()
            .flat_map(|(c, e)| {
                h.terms.iter().map(move |(c2, e2)| {
                    c * c2 * monomial_moment(1.0, &[(e[0] + e2[0]) as usize, (e[1] + e2[1]) as usize])
                })
            })
            .sum();
        assert!((q - exact).abs() < 1e-8 * (1.0 + exact.abs()), "level {}: {q} vs {exact}", level.j);
    }

    // a constant lives on level 0 only: c_ξ = c₀ √λ_ξ
    let f = |_: &[f64]| 2.5;
    let c = analyze(&frame, Integrand::Polynomial { f: &f, degree: 0 }, 3).unwrap();
    for (i, v) in c.levels[0].iter().enumerate() {
        assert!((v - 2.5 * frame.levels[0].rule.weights[i].sqrt()).abs() < 1e-13);
    }
    assert!(c.levels[1..].iter().flatten().all(|v| v.abs() < 1e-13));
}
