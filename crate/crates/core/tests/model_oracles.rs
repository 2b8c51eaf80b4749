use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::{Matrix2, SymmetricEigen};
use num_complex::Complex64;
use proptest::prelude::*;
use qse_core::model::{cfim_z, evolve, outcome_probs, prob_jacobian, qfim};
use qse_core::ParamPoint;

/// `exp(-iγ n̂·σ)|0⟩` through the eigendecomposition of the Hermitian
/// generator `n̂·σ`.
fn expm_oracle(p: ParamPoint) -> (Complex64, Complex64) {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let (nx, nz) = (p.theta.cos(), p.theta.sin());
    let gen = Matrix2::new(c(nz, 0.0), c(nx, 0.0), c(nx, 0.0), c(-nz, 0.0));
    let eig = SymmetricEigen::new(gen);
    let mut u = Matrix2::<Complex64>::zeros();
    for k in 0..2 {
        let v = eig.eigenvectors.column(k);
        let phase = c(0.0, -p.gamma * eig.eigenvalues[k]).exp();
        u += v * v.adjoint() * phase;
    }
    (u[(0, 0)], u[(1, 0)])
}

fn grid(n: usize) -> impl Iterator<Item = ParamPoint> {
    (0..n).flat_map(move |i| {
        (0..n).map(move |j| {
            ParamPoint::new(PI * i as f64 / (n - 1) as f64, -FRAC_PI_2 + PI * j as f64 / (n - 1) as f64)
        })
    })
}

#[test]
fn evolve_matches_matrix_exponential() {
    for p in grid(41) {
        let s = evolve(p);
        let (a0, a1) = expm_oracle(p);
        assert!((s.amp0 - a0).norm() < 1e-10 && (s.amp1 - a1).norm() < 1e-10, "{p:?}");
    }
    let (_, a1) = expm_oracle(ParamPoint::new(0.0, PI / 4.0));
    assert!((a1.norm_sqr() - 0.5).abs() < 1e-10);
}

#[test]
fn closed_form_p1() {
    for p in grid(101) {
        let (_, p1) = outcome_probs(p);
        let closed = p.gamma.sin().powi(2) * p.theta.cos().powi(2);
        assert!((p1 - closed).abs() < 1e-15);
    }
}

#[test]
fn jacobian_matches_finite_differences() {
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    for p in grid(41).chain([ParamPoint::new(PI / 6.0, PI / 5.0)]) {
        let j = prob_jacobian(p);
        for (col, dir) in [(0, ParamPoint::new(h, 0.0)), (1, ParamPoint::new(0.0, h))] {
            let plus = outcome_probs(ParamPoint::new(p.theta + dir.theta, p.gamma + dir.gamma));
            let minus = outcome_probs(ParamPoint::new(p.theta - dir.theta, p.gamma - dir.gamma));
            worst = worst.max((j[0][col] - (plus.0 - minus.0) / (2.0 * h)).abs());
            worst = worst.max((j[1][col] - (plus.1 - minus.1) / (2.0 * h)).abs());
            assert!((j[0][col] + j[1][col]).abs() < 1e-12);
        }
    }
    assert!(worst < 1e-6, "max fd error {worst}");
}

#[test]
fn qfim_gamma_gamma_by_fidelity() {
    // Q_γγ = 8(1 - |⟨ψ(γ)|ψ(γ+δ)⟩|)/δ² to O(δ²)
    let d = 1e-4;
    for theta in [0.0, 0.4, 1.1] {
        for gamma in [0.2, 0.7] {
            let a = evolve(ParamPoint::new(theta, gamma));
            let b = evolve(ParamPoint::new(theta, gamma + d));
            let fd = 8.0 * (1.0 - a.inner(&b).norm()) / (d * d);
            let q = qfim(ParamPoint::new(theta, gamma)).m22;
            assert!((fd - q).abs() < 1e-5, "{theta} {gamma}: {fd} vs {q}");
            assert!((q - 4.0 * theta.cos().powi(2)).abs() < 1e-12);
        }
    }
}

#[test]
fn qfim_determinant_closed_form() {
    // the determinant of this model is 16 cos²θ sin⁴γ
    let worst = grid(101)
        .map(|p| (qfim(p).det() - 16.0 * p.theta.cos().powi(2) * p.gamma.sin().powi(4)).abs())
        .fold(0.0, f64::max);
    assert!(worst < 1e-9, "{worst}");
}

#[test]
fn quantum_dominates_classical() {
    for p in grid(101) {
        let diff = qfim(p).add(&cfim_z(p).scale(-1.0));
        let (vals, _) = diff.eigen();
        assert!(vals[0] >= -1e-9, "{p:?}: {vals:?}");
        assert!(cfim_z(p).det().abs() <= 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn state_normalized(theta in -10.0f64..10.0, gamma in -10.0f64..10.0) {
        let s = evolve(ParamPoint::new(theta, gamma));
        prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn probabilities_close_exactly(theta in -10.0f64..10.0, gamma in -10.0f64..10.0) {
        let (p0, p1) = outcome_probs(ParamPoint::new(theta, gamma));
        prop_assert_eq!(p0 + p1, 1.0);
        prop_assert!((0.0..=1.0).contains(&p0) && (0.0..=1.0).contains(&p1));
    }

    #[test]
    fn canonical_is_idempotent(theta in -20.0f64..20.0, gamma in -20.0f64..20.0) {
        let c = ParamPoint::new(theta, gamma).canonical();
        let cc = c.canonical();
        prop_assert!((c.theta - cc.theta).abs() < 1e-12 && (c.gamma - cc.gamma).abs() < 1e-12);
    }
}

#[test]
fn normalization_on_many_points() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
    for _ in 0..100_000 {
        let p = ParamPoint::new(rng.random_range(0.0..PI), rng.random_range(-FRAC_PI_2..FRAC_PI_2));
        assert!((evolve(p).norm_sqr() - 1.0).abs() < 1e-12);
    }
}
