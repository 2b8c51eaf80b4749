//! Holevo bound by direct minimization over locally unbiased observables.
//!
//! Each observable is `X_ν = Σ_k c_νk B_k` in the Pauli basis
//! `B = (I, σx, σy, σz)` with real coefficients. The constraints
//! `Tr[∂_μρ X_ν] = δ_μν` are linear in `c`; writing `c_ν = c_ν^part + N z_ν`
//! with `N` an orthonormal basis of the constraint null space leaves four free
//! coordinates `z`, over which
//! `Tr Re Z(X) + ‖Im Z(X)‖₁`, `Z_μν = Tr[ρ X_μ X_ν]`,
//! is minimized by multi-start Nelder–Mead.

use nalgebra::Matrix2;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{evolve, qfim, state_derivatives, ParamPoint, QubitState};
use crate::optim::NelderMead;

use super::check_invertible;

type CMat = Matrix2<Complex64>;

#[derive(Debug, Clone, Copy)]
pub struct HolevoConfig {
    /// Independent local searches; must be at least 8.
    pub restarts: usize,
    pub seed: u64,
    /// Largest tolerated relative spread between restart minima.
    pub agreement: f64,
    pub optimizer: NelderMead,
}

impl Default for HolevoConfig {
    fn default() -> Self {
        HolevoConfig {
            restarts: 8,
            seed: 0x4f1e_5eed,
            agreement: 1e-6,
            optimizer: NelderMead { ftol: 1e-14, xtol: f64::INFINITY, max_evals: 4000, polish_rounds: 3 },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HolevoBound {
    /// `C_H`, per unit shot.
    pub value: f64,
    /// `Tr Q⁻¹` at the same point, the lower end of `[Tr Q⁻¹, 2 Tr Q⁻¹]`.
    pub trace_inv_qfim: f64,
    /// `‖Im Z‖₁` at the optimum; zero for a quasi-classical model.
    pub im_part: f64,
    /// Relative spread of the restart minima.
    pub spread: f64,
    /// Optimal free coordinates.
    pub argmin: [f64; 4],
}

/// Holevo bound with the default configuration.
pub fn holevo_bound(p: ParamPoint) -> Result<HolevoBound> {
    holevo_bound_with(p, &HolevoConfig::default())
}

pub fn holevo_bound_with(p: ParamPoint, cfg: &HolevoConfig) -> Result<HolevoBound> {
    if cfg.restarts < 8 {
        return Err(Error::InvalidArgument(format!("holevo needs >= 8 restarts, got {}", cfg.restarts)));
    }
    let q = qfim(p);
    check_invertible(&q)?;
    let problem = Problem::new(p);

    let scale = problem
        .particular
        .iter()
        .flat_map(|c| c.iter())
        .fold(0.0f64, |m, v| m.max(v.abs()))
        .max(1e-3);

    let mut minima = Vec::with_capacity(cfg.restarts);
    for restart in 0..cfg.restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(restart as u64);
        let start: Vec<f64> = (0..4).map(|_| rng.random_range(-scale..scale)).collect();
        minima.push(cfg.optimizer.minimize(|z| problem.objective(z), &start, scale));
    }
    let best = minima
        .iter()
        .min_by(|a, b| a.value.total_cmp(&b.value))
        .expect("at least one restart");
    let worst = minima.iter().map(|m| m.value).fold(f64::NEG_INFINITY, f64::max);
    let spread = (worst - best.value) / best.value.abs();
    if !(spread <= cfg.agreement) {
        return Err(Error::OptimizerNotConverged { best: best.value, spread });
    }
    let argmin = [best.x[0], best.x[1], best.x[2], best.x[3]];
    let z = problem.z_matrix(&argmin);
    Ok(HolevoBound {
        value: best.value,
        trace_inv_qfim: q.inverse_unchecked().trace(),
        im_part: trace_norm_2x2(z.map(|c| c.im)),
        spread,
        argmin,
    })
}

fn pauli() -> [CMat; 4] {
    let o = Complex64::new(0.0, 0.0);
    let l = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    [
        CMat::new(l, o, o, l),
        CMat::new(o, l, l, o),
        CMat::new(o, -i, i, o),
        CMat::new(l, o, o, -l),
    ]
}

fn ket_bra(a: &QubitState, b: &QubitState) -> CMat {
    let ka = [a.amp0, a.amp1];
    let kb = [b.amp0, b.amp1];
    CMat::from_fn(|r, c| ka[r] * kb[c].conj())
}

/// `σ₁ + σ₂` for a real 2×2 matrix: `(σ₁ + σ₂)² = ‖M‖_F² + 2|det M|`.
fn trace_norm_2x2(m: Matrix2<f64>) -> f64 {
    let fro2 = m.iter().map(|v| v * v).sum::<f64>();
    let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    (fro2 + 2.0 * det.abs()).sqrt()
}

struct Problem {
    rho: CMat,
    basis: [CMat; 4],
    particular: [[f64; 4]; 2],
    null: [[f64; 4]; 2],
}

impl Problem {
    fn new(p: ParamPoint) -> Self {
        let psi = evolve(p);
        let (dt, dg) = state_derivatives(p);
        let rho = ket_bra(&psi, &psi);
        let drho = [ket_bra(&dt, &psi) + ket_bra(&psi, &dt), ket_bra(&dg, &psi) + ket_bra(&psi, &dg)];
        let basis = pauli();

        // constraint rows t_μ,k = Tr[∂_μρ B_k] (real since both are Hermitian)
        let t: [[f64; 4]; 2] = std::array::from_fn(|mu| std::array::from_fn(|k| (drho[mu] * basis[k]).trace().re));

        // minimum-norm particular solutions c_ν = tᵀ (t tᵀ)⁻¹ e_ν
        let dot = |a: &[f64; 4], b: &[f64; 4]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        let g = [[dot(&t[0], &t[0]), dot(&t[0], &t[1])], [dot(&t[1], &t[0]), dot(&t[1], &t[1])]];
        let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
        let g_inv = [[g[1][1] / det, -g[0][1] / det], [-g[1][0] / det, g[0][0] / det]];
        let particular: [[f64; 4]; 2] =
            std::array::from_fn(|nu| std::array::from_fn(|k| t[0][k] * g_inv[0][nu] + t[1][k] * g_inv[1][nu]));

        // orthonormal basis of the row space, completed to R⁴ by Gram–Schmidt
        let residual = |v: [f64; 4], frame: &[[f64; 4]]| {
            let mut r = v;
            for _ in 0..2 {
                for e in frame {
                    let c = dot(&r, e);
                    for k in 0..4 {
                        r[k] -= c * e[k];
                    }
                }
            }
            r
        };
        let mut frame: Vec<[f64; 4]> = Vec::with_capacity(4);
        for row in t {
            let r = residual(row, &frame);
            let n = dot(&r, &r).sqrt();
            frame.push(r.map(|x| x / n));
        }
        while frame.len() < 4 {
            // standard vector with the largest residual, for stability
            let r = (0..4)
                .map(|k| residual(std::array::from_fn(|i| if i == k { 1.0 } else { 0.0 }), &frame))
                .max_by(|a, b| dot(a, a).total_cmp(&dot(b, b)))
                .expect("four candidates");
            let n = dot(&r, &r).sqrt();
            frame.push(r.map(|x| x / n));
        }
        let null = [frame[2], frame[3]];
        Problem { rho, basis, particular, null }
    }

    fn observable(&self, nu: usize, z: &[f64]) -> CMat {
        let mut x = CMat::zeros();
        for k in 0..4 {
            let c = self.particular[nu][k] + self.null[0][k] * z[2 * nu] + self.null[1][k] * z[2 * nu + 1];
            x += self.basis[k] * Complex64::new(c, 0.0);
        }
        x
    }

    fn z_matrix(&self, z: &[f64]) -> Matrix2<Complex64> {
        let x = [self.observable(0, z), self.observable(1, z)];
        Matrix2::from_fn(|mu, nu| (self.rho * x[mu] * x[nu]).trace())
    }

    fn objective(&self, z: &[f64]) -> f64 {
        let zm = self.z_matrix(z);
        zm[(0, 0)].re + zm[(1, 1)].re + trace_norm_2x2(zm.map(|c| c.im))
    }
}
