use std::f64::consts::{FRAC_PI_2, PI};

use qse_core::bayes::{GaussianPrior, PriorPair};
use qse_core::bounds::{
    expected_information, holevo_bound, pinv_crb, ratio_with_holevo, stepwise_trace, van_trees_classical_stepwise,
    ResourceSplit,
};
use qse_core::model::{cfim_z, evolve, qfim};
use qse_core::{InfoMatrix, Ordering, ParamPoint, Param};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type V3 = [f64; 3];

fn dot(a: V3, b: V3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: V3, b: V3) -> V3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn lin(a: V3, s: f64, b: V3) -> V3 {
    [a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2]]
}

/// Bloch vector and its finite-difference derivatives.
fn bloch_frame(p: ParamPoint) -> (V3, V3, V3) {
    let h = 1e-6;
    let r = |t: f64, g: f64| evolve(ParamPoint::new(t, g)).bloch();
    let d = |a: V3, b: V3| [(a[0] - b[0]) / (2.0 * h), (a[1] - b[1]) / (2.0 * h), (a[2] - b[2]) / (2.0 * h)];
    (
        r(p.theta, p.gamma),
        d(r(p.theta + h, p.gamma), r(p.theta - h, p.gamma)),
        d(r(p.theta, p.gamma + h), r(p.theta, p.gamma - h)),
    )
}

/// Holevo objective in Bloch form for `X_ν = a0_ν I + a_ν·σ`:
/// `Re Z_νν = (a0_ν + a_ν·r)² + |a_ν|² - (a_ν·r)²`, `Im Z₁₂ = r·(a₁×a₂)`.
fn bloch_objective(r: V3, a0: [f64; 2], a: [V3; 2]) -> f64 {
    let re: f64 = (0..2)
        .map(|k| (a0[k] + dot(a[k], r)).powi(2) + dot(a[k], a[k]) - dot(a[k], r).powi(2))
        .sum();
    re + 2.0 * dot(r, cross(a[0], a[1])).abs()
}

/// Random search over the constraint-satisfying observables.
fn random_search_holevo(p: ParamPoint, samples: usize, seed: u64) -> f64 {
    let (r, d1, d2) = bloch_frame(p);
    let normal = cross(d1, d2);
    let nn = dot(normal, normal).sqrt();
    let k = [normal[0] / nn, normal[1] / nn, normal[2] / nn];
    // dual basis in span(d1, d2): dual_i · d_j = δ_ij
    let c2 = cross(d2, k);
    let c1 = cross(k, d1);
    let dual = [lin([0.0; 3], 1.0 / dot(d1, c2), c2), lin([0.0; 3], 1.0 / dot(d2, c1), c1)];
    let scale = 2.0 * dot(dual[0], dual[0]).sqrt().max(dot(dual[1], dual[1]).sqrt());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = f64::INFINITY;
    for _ in 0..samples {
        let mut u = || rng.random_range(-scale..scale);
        let a = [lin(dual[0], u(), k), lin(dual[1], u(), k)];
        let a0 = [u(), u()];
        for nu in 0..2 {
            debug_assert!((dot(a[nu], d1) - if nu == 0 { 1.0 } else { 0.0 }).abs() < 1e-9);
        }
        best = best.min(bloch_objective(r, a0, a));
    }
    best
}

#[test]
fn holevo_matches_random_search_oracle() {
    let p = ParamPoint::new(PI / 3.0, PI / 9.0);
    let h = holevo_bound(p).unwrap();
    let oracle = random_search_holevo(p, 1_000_000, 17);
    assert!(oracle >= h.value * (1.0 - 1e-9), "sampling beat the optimizer: {oracle} < {}", h.value);
    assert!((oracle - h.value) / h.value < 1e-3, "{oracle} vs {}", h.value);
}

#[test]
fn holevo_matches_pure_state_closed_form() {
    // pure two-parameter qubit models: C_H = Tr Q⁻¹ + 2/√det Q
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut checked = 0;
    while checked < 200 {
        let p = ParamPoint::new(rng.random_range(0.0..PI), rng.random_range(-FRAC_PI_2..FRAC_PI_2));
        let q = qfim(p);
        if q.det() < 1e-6 {
            continue;
        }
        let closed = q.inverse_unchecked().trace() + 2.0 / q.det().sqrt();
        let h = holevo_bound(p).unwrap();
        assert!((h.value - closed).abs() < 1e-6 * closed, "{p:?}: {} vs {closed}", h.value);
        checked += 1;
    }
}

#[test]
fn beta_star_matches_grid_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..50 {
        let q = InfoMatrix::new(rng.random_range(0.5..5.0), rng.random_range(-0.4..0.4), rng.random_range(0.5..5.0));
        for ordering in Ordering::BOTH {
            let r = ratio_with_holevo(&q, 1.0, 0.5, ordering).unwrap();
            let (beta_grid, min_grid) = (1..1000)
                .map(|k| k as f64 * 1e-3)
                .map(|b| (b, stepwise_trace(&q, b, ordering).unwrap()))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap();
            assert!((r.beta_star - beta_grid).abs() < 2e-3);
            assert!(r.r_opt <= min_grid && (min_grid - r.r_opt) / r.r_opt < 1e-5);
        }
    }
}

#[test]
fn stepwise_trace_convex_in_beta() {
    let q = qfim(ParamPoint::new(1.0, 0.4));
    for ordering in Ordering::BOTH {
        let f = |b: f64| stepwise_trace(&q, b, ordering).unwrap();
        let h = 1e-3;
        for k in 2..998 {
            let b = k as f64 * 1e-3;
            assert!(f(b - h) + f(b + h) - 2.0 * f(b) > 0.0, "{b}");
        }
    }
}

#[test]
fn ordering_asymmetry() {
    let p = ParamPoint::new(PI / 3.0, PI / 9.0);
    let q = qfim(p);
    let c_h = holevo_bound(p).unwrap().value;
    let tf = ratio_with_holevo(&q, c_h, 0.5, Ordering::ThetaFirst).unwrap();
    let gf = ratio_with_holevo(&q, c_h, 0.5, Ordering::GammaFirst).unwrap();
    assert!((tf.r_beta - gf.r_beta).abs() > 1e-3);
    // index swap only: the θ-first ratio on Q equals the γ-first ratio on the relabelled matrix
    let swapped = InfoMatrix::new(q.m22, q.m12, q.m11);
    let tf_swapped = ratio_with_holevo(&swapped, c_h, 0.5, Ordering::GammaFirst).unwrap();
    assert!((tf.r_beta - tf_swapped.r_beta).abs() < 1e-12 * tf.r_beta);
}

#[test]
fn small_gamma_advantage() {
    let p = ParamPoint::new(PI / 4.0, 0.05);
    let best = Ordering::BOTH
        .iter()
        .map(|&o| qse_core::bounds::ratio_r(p, 0.5, o).unwrap().r_opt)
        .fold(f64::INFINITY, f64::min);
    assert!(best < 1.0, "{best}");
}

#[test]
fn penrose_conditions_on_cfim() {
    let mul = |x: [[f64; 2]; 2], y: [[f64; 2]; 2]| -> [[f64; 2]; 2] {
        std::array::from_fn(|i| std::array::from_fn(|j| x[i][0] * y[0][j] + x[i][1] * y[1][j]))
    };
    let close = |x: [[f64; 2]; 2], y: [[f64; 2]; 2], scale: f64| {
        (0..2).all(|i| (0..2).all(|j| (x[i][j] - y[i][j]).abs() <= 1e-10 * scale.max(1.0)))
    };
    let t = |x: [[f64; 2]; 2]| [[x[0][0], x[1][0]], [x[0][1], x[1][1]]];
    for i in 0..=40 {
        for j in 0..=40 {
            let p = ParamPoint::new(PI * i as f64 / 40.0, -FRAC_PI_2 + PI * j as f64 / 40.0);
            let f = cfim_z(p);
            let fp = pinv_crb(&f, 1);
            let (a, b) = (f.as_array(), fp.as_array());
            let (na, nb) = (f.frobenius(), fp.frobenius());
            assert!(close(mul(mul(a, b), a), a, na), "{p:?}");
            assert!(close(mul(mul(b, a), b), b, nb), "{p:?}");
            assert!(close(t(mul(a, b)), mul(a, b), 1.0));
            assert!(close(t(mul(b, a)), mul(b, a), 1.0));
        }
    }
}

fn priors(theta: f64, gamma: f64, tau: f64) -> PriorPair {
    PriorPair::new(GaussianPrior::new(theta, tau).unwrap(), GaussianPrior::new(gamma, tau).unwrap())
}

#[test]
fn van_trees_first_term_tends_to_qfim() {
    let center = ParamPoint::new(1.1, 0.5);
    let e = expected_information(&priors(center.theta, center.gamma, 1e-3), 1, qfim);
    let q = qfim(center);
    assert!(e.max_abs_diff(&q) / q.frobenius() < 1e-3);
}

#[test]
fn gamma_bound_saturates_at_prior_width_on_sigma_z_axis() {
    let split = ResourceSplit::new(0.5, 20_000).unwrap();
    let tau = 1e-3;
    let vt = van_trees_classical_stepwise(&priors(FRAC_PI_2, PI / 9.0, tau), &split, Ordering::GammaFirst).unwrap();
    assert!(vt.first_std <= tau && vt.first_std > 0.999 * tau, "{}", vt.first_std);

    // growth towards θ = π/2 at τ = 5°
    let tau = 5f64.to_radians();
    let stds: Vec<f64> = [45.0f64, 60.0, 75.0, 85.0, 90.0]
        .iter()
        .map(|d| {
            van_trees_classical_stepwise(&priors(d.to_radians(), PI / 9.0, tau), &split, Ordering::GammaFirst)
                .unwrap()
                .std_of(Param::Gamma)
        })
        .collect();
    assert!(stds.windows(2).all(|w| w[1] > w[0]), "{stds:?}");
    assert!(stds.iter().all(|s| *s <= tau));
}

#[test]
fn van_trees_std_scales_as_inverse_sqrt_n() {
    let pr = priors(PI / 3.0, PI / 9.0, 5f64.to_radians());
    for ordering in Ordering::BOTH {
        let pts: Vec<(f64, f64, f64)> = (0..9)
            .map(|k| {
                let n = 10f64.powf(6.0 + 0.25 * k as f64) as u64;
                let vt = van_trees_classical_stepwise(&pr, &ResourceSplit::new(0.5, n).unwrap(), ordering).unwrap();
                ((n as f64).ln(), vt.first_std.ln(), vt.second_std.ln())
            })
            .collect();
        let slope = |ys: Vec<f64>| {
            let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
            let mx = xs.iter().sum::<f64>() / xs.len() as f64;
            let my = ys.iter().sum::<f64>() / ys.len() as f64;
            xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
                / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>()
        };
        let s1 = slope(pts.iter().map(|p| p.1).collect());
        let s2 = slope(pts.iter().map(|p| p.2).collect());
        assert!((s1 + 0.5).abs() < 0.02, "{ordering}: first slope {s1}");
        assert!((s2 + 0.5).abs() < 0.02, "{ordering}: second slope {s2}");
    }
}
