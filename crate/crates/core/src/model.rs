//! The rotation model: `|ψ(θ, γ)⟩ = U(θ, γ)|0⟩` with
//! `U = exp[-iγ(cos θ σx + sin θ σz)] = cos γ I - i sin γ (n̂·σ)`.
//!
//! Writing `n̂ = (cos θ, 0, sin θ)` the evolved amplitudes are
//! `⟨0|ψ⟩ = cos γ - i sin γ sin θ` and `⟨1|ψ⟩ = -i sin γ cos θ`, so the Z-basis
//! probabilities are `p₁ = sin²γ cos²θ`, `p₀ = 1 - p₁`.
//!
//! With this axis convention the QFIM determinant is `16 cos²θ sin⁴γ`: the
//! model loses all information about γ along `θ = π/2`, where the generator is
//! `σz` and `|0⟩` is stationary.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::info::{InfoMatrix, Param};

/// Probabilities below this are treated as exactly zero by [`cfim_z`].
pub const PROB_FLOOR: f64 = 1e-12;

/// A point `(θ, γ)` in parameter space, radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamPoint {
    pub theta: f64,
    pub gamma: f64,
}

impl ParamPoint {
    pub fn new(theta: f64, gamma: f64) -> Self {
        ParamPoint { theta, gamma }
    }

    pub fn from_degrees(theta_deg: f64, gamma_deg: f64) -> Self {
        ParamPoint { theta: theta_deg.to_radians(), gamma: gamma_deg.to_radians() }
    }

    pub fn get(&self, p: Param) -> f64 {
        match p {
            Param::Theta => self.theta,
            Param::Gamma => self.gamma,
        }
    }

    pub fn with(&self, p: Param, value: f64) -> Self {
        match p {
            Param::Theta => ParamPoint { theta: value, ..*self },
            Param::Gamma => ParamPoint { gamma: value, ..*self },
        }
    }

    /// Maps any point to the canonical chart `θ ∈ [0, π)`, `γ ∈ [-π/2, π/2)`
    /// describing the same physical state.
    ///
    /// Uses `U(θ + π, γ) = U(θ, -γ)` and `U(θ, γ + π) = -U(θ, γ)` (a global
    /// phase). Branch cuts: `θ = π` maps to `θ = 0` with `γ → -γ`; `γ = π/2`
    /// maps to `-π/2`.
    pub fn canonical(&self) -> Self {
        let mut theta = self.theta.rem_euclid(2.0 * PI);
        let mut gamma = self.gamma;
        if theta >= PI {
            theta -= PI;
            gamma = -gamma;
        }
        let gamma = (gamma + FRAC_PI_2).rem_euclid(PI) - FRAC_PI_2;
        ParamPoint { theta, gamma }
    }
}

/// Pure qubit state `amp0 |0⟩ + amp1 |1⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitState {
    pub amp0: Complex64,
    pub amp1: Complex64,
}

impl QubitState {
    pub fn norm_sqr(&self) -> f64 {
        self.amp0.norm_sqr() + self.amp1.norm_sqr()
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &QubitState) -> Complex64 {
        self.amp0.conj() * other.amp0 + self.amp1.conj() * other.amp1
    }

    /// Bloch vector `(⟨σx⟩, ⟨σy⟩, ⟨σz⟩)`.
    pub fn bloch(&self) -> [f64; 3] {
        let c = self.amp0.conj() * self.amp1;
        [2.0 * c.re, 2.0 * c.im, self.amp0.norm_sqr() - self.amp1.norm_sqr()]
    }
}

/// `U(θ, γ)|0⟩`, from the closed form of the exponential.
pub fn evolve(p: ParamPoint) -> QubitState {
    let (sg, cg) = p.gamma.sin_cos();
    let (st, ct) = p.theta.sin_cos();
    QubitState {
        amp0: Complex64::new(cg, -sg * st),
        amp1: Complex64::new(0.0, -sg * ct),
    }
}

/// Analytic `(∂θ|ψ⟩, ∂γ|ψ⟩)`.
pub fn state_derivatives(p: ParamPoint) -> (QubitState, QubitState) {
    let (sg, cg) = p.gamma.sin_cos();
    let (st, ct) = p.theta.sin_cos();
    let d_theta = QubitState {
        amp0: Complex64::new(0.0, -sg * ct),
        amp1: Complex64::new(0.0, sg * st),
    };
    let d_gamma = QubitState {
        amp0: Complex64::new(-sg, -cg * st),
        amp1: Complex64::new(0.0, -cg * ct),
    };
    (d_theta, d_gamma)
}

/// Z-basis outcome probabilities `(p₀, p₁)`.
///
/// `p₁ = |⟨1|ψ⟩|²` is computed directly (it is the small one near `γ = 0` and
/// `θ = π/2`) and clamped to `[0, 1]`; `p₀ = 1 - p₁`, which makes
/// `p₀ + p₁ == 1.0` hold exactly in floating point.
pub fn outcome_probs(p: ParamPoint) -> (f64, f64) {
    let amp1 = p.gamma.sin() * p.theta.cos();
    let p1 = (amp1 * amp1).clamp(0.0, 1.0);
    (1.0 - p1, p1)
}

/// Jacobian `[[∂p₀/∂θ, ∂p₀/∂γ], [∂p₁/∂θ, ∂p₁/∂γ]]`.
pub fn prob_jacobian(p: ParamPoint) -> [[f64; 2]; 2] {
    let (sg, cg) = p.gamma.sin_cos();
    let (st, ct) = p.theta.sin_cos();
    let dp1_dtheta = -2.0 * sg * sg * st * ct;
    let dp1_dgamma = 2.0 * sg * cg * ct * ct;
    [[-dp1_dtheta, -dp1_dgamma], [dp1_dtheta, dp1_dgamma]]
}

/// Pure-state quantum Fisher information matrix,
/// `Q_ij = 4 Re(⟨∂iψ|∂jψ⟩ - ⟨∂iψ|ψ⟩⟨ψ|∂jψ⟩)`.
///
/// Singular matrices (e.g. along `γ = 0`) are returned as-is.
pub fn qfim(p: ParamPoint) -> InfoMatrix {
    let psi = evolve(p);
    let d = {
        let (a, b) = state_derivatives(p);
        [a, b]
    };
    let entry = |i: usize, j: usize| {
        4.0 * (d[i].inner(&d[j]) - d[i].inner(&psi) * psi.inner(&d[j])).re
    };
    InfoMatrix::new(entry(0, 0), entry(0, 1), entry(1, 1))
}

/// Classical Fisher information of the two-outcome Z measurement,
/// `F_ij = Σ_k ∂i p_k ∂j p_k / p_k`.
///
/// Outcomes with `p_k <` [`PROB_FLOOR`] contribute nothing (the `0/0 → 0`
/// limit convention). The result has rank at most one.
pub fn cfim_z(p: ParamPoint) -> InfoMatrix {
    let (p0, p1) = outcome_probs(p);
    let jac = prob_jacobian(p);
    let mut f = InfoMatrix::zero();
    for (row, pk) in jac.iter().zip([p0, p1]) {
        if pk < PROB_FLOOR {
            continue;
        }
        f.m11 += row[0] * row[0] / pk;
        f.m12 += row[0] * row[1] / pk;
        f.m22 += row[1] * row[1] / pk;
    }
    f
}
