//! Bayesian (Van Trees) information matrices under independent Gaussian priors.
//!
//! `V = E_A[I(θ, γ)] + (1/N) E_A[∇log A ∇log Aᵀ]`, with `I` either the QFIM or
//! the classical Z-measurement FIM. The expectation is a tensor Gauss–Hermite
//! rule whose node count is doubled until `V` stops moving. The bound on the
//! total error of `N` shots is `Tr[(N·V)⁻¹]`.

use crate::bayes::PriorPair;
use crate::error::{Error, Result};
use crate::info::{InfoMatrix, Ordering, Param};
use crate::model::{cfim_z, qfim, ParamPoint};
use crate::quadrature::GaussHermite;

use super::ResourceSplit;

/// Largest relative change of `V` (max entry / Frobenius norm) accepted
/// between two node doublings.
pub const QUADRATURE_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VanTreesMatrix {
    /// `V`, with the prior term already divided by `N`.
    pub matrix: InfoMatrix,
    /// Nodes per axis of the accepted rule.
    pub nodes: usize,
    /// Relative change at acceptance.
    pub change: f64,
}

fn tensor_rule<F>(priors: &PriorPair, rule: &GaussHermite, mut f: F)
where
    F: FnMut(f64, ParamPoint, [f64; 2]),
{
    for (xt, wt) in rule.nodes.iter().zip(&rule.weights) {
        for (xg, wg) in rule.nodes.iter().zip(&rule.weights) {
            let p = ParamPoint::new(priors.theta.center + priors.theta.width * xt, priors.gamma.center + priors.gamma.width * xg);
            // ∂ log A = -(λ - λ₀)/τ² = -x/τ
            let score = [-xt / priors.theta.width, -xg / priors.gamma.width];
            f(wt * wg, p, score);
        }
    }
}

/// `E_A[I]` on the Gauss–Hermite rule at `level` (`16·2^level` nodes per axis).
pub fn expected_information<I>(priors: &PriorPair, level: usize, info: I) -> InfoMatrix
where
    I: Fn(ParamPoint) -> InfoMatrix,
{
    let mut acc = InfoMatrix::zero();
    tensor_rule(priors, GaussHermite::cached(level), |w, p, _| {
        let m = info(p);
        acc.m11 += w * m.m11;
        acc.m12 += w * m.m12;
        acc.m22 += w * m.m22;
    });
    acc
}

/// Prior Fisher information `E_A[∇log A ∇log Aᵀ]` evaluated by quadrature.
/// For independent Gaussians it equals `diag(1/τ_θ², 1/τ_γ²)`.
pub fn prior_information(priors: &PriorPair, level: usize) -> InfoMatrix {
    let mut acc = InfoMatrix::zero();
    tensor_rule(priors, GaussHermite::cached(level), |w, _, s| {
        acc.m11 += w * s[0] * s[0];
        acc.m12 += w * s[0] * s[1];
        acc.m22 += w * s[1] * s[1];
    });
    acc
}

/// Van Trees matrix for an arbitrary pointwise information function.
pub fn van_trees_matrix<I>(priors: &PriorPair, n: u64, info: I) -> Result<VanTreesMatrix>
where
    I: Fn(ParamPoint) -> InfoMatrix + Copy,
{
    if n == 0 {
        return Err(Error::InvalidArgument("van trees bound needs at least one shot".into()));
    }
    let at = |level| {
        expected_information(priors, level, info).add(&prior_information(priors, level).scale(1.0 / n as f64))
    };
    let mut prev = at(0);
    let mut change = f64::INFINITY;
    for level in 1..GaussHermite::LEVELS {
        let next = at(level);
        change = next.max_abs_diff(&prev) / next.frobenius();
        if change <= QUADRATURE_TOL {
            return Ok(VanTreesMatrix { matrix: next, nodes: GaussHermite::cached(level).len(), change });
        }
        prev = next;
    }
    Err(Error::QuadratureNotConverged { change, nodes: GaussHermite::cached(GaussHermite::LEVELS - 1).len() })
}

/// Quantum Van Trees matrix (QFIM averaged over the prior).
pub fn van_trees_quantum(priors: &PriorPair, n: u64) -> Result<VanTreesMatrix> {
    van_trees_matrix(priors, n, qfim)
}

/// Joint-estimation bound on `Δ²θ + Δ²γ` after `n` shots: `Tr[(N·V)⁻¹]`.
pub fn je_total_error_bound(priors: &PriorPair, n: u64) -> Result<f64> {
    let v = van_trees_quantum(priors, n)?.matrix;
    Ok(v.scale(n as f64).inverse_unchecked().trace())
}

/// Classical Van Trees standard-deviation bounds for the two stages of a
/// stepwise protocol with the Z measurement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepwiseVanTrees {
    pub ordering: Ordering,
    pub first_std: f64,
    pub second_std: f64,
}

impl StepwiseVanTrees {
    pub fn std_of(&self, p: Param) -> f64 {
        if p == self.ordering.first() {
            self.first_std
        } else {
            self.second_std
        }
    }
}

/// Stage one: two-parameter classical Van Trees matrix with `βN` shots; the
/// first parameter's bound is the matching diagonal entry of `(βN·V)⁻¹`.
///
/// Stage two: the first parameter's prior is replaced by a Gaussian of the
/// stage-one bound's width (same center); the second parameter's bound is the
/// diagonal entry of `((1-β)N·V')⁻¹`, so the first parameter is integrated out
/// as a nuisance rather than assumed known.
pub fn van_trees_classical_stepwise(
    priors: &PriorPair,
    split: &ResourceSplit,
    ordering: Ordering,
) -> Result<StepwiseVanTrees> {
    van_trees_stepwise(priors, split, ordering, cfim_z)
}

/// The stepwise construction of [`van_trees_classical_stepwise`] for any
/// pointwise information function (e.g. [`qfim`] for its quantum counterpart).
pub fn van_trees_stepwise<I>(
    priors: &PriorPair,
    split: &ResourceSplit,
    ordering: Ordering,
    info: I,
) -> Result<StepwiseVanTrees>
where
    I: Fn(ParamPoint) -> InfoMatrix + Copy,
{
    let (n1, n2) = split.counts();
    let first = ordering.first();
    let second = ordering.second();

    let v1 = van_trees_matrix(priors, n1, info)?.matrix;
    let first_std = v1.scale(n1 as f64).inverse_unchecked().get(first, first).sqrt();

    let handed_off = priors.with_width(first, first_std)?;
    let v2 = van_trees_matrix(&handed_off, n2, info)?.matrix;
    let second_std = v2.scale(n2 as f64).inverse_unchecked().get(second, second).sqrt();

    Ok(StepwiseVanTrees { ordering, first_std, second_std })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bayes::GaussianPrior;
    use std::f64::consts::PI;

    fn priors(theta: f64, gamma: f64, tau: f64) -> PriorPair {
        PriorPair::new(GaussianPrior::new(theta, tau).unwrap(), GaussianPrior::new(gamma, tau).unwrap())
    }

    #[test]
    fn prior_term_is_inverse_variance() {
        for tau_deg in [2.5f64, 5.0, 10.0] {
            let tau = tau_deg.to_radians();
            let j = prior_information(&priors(1.0, 0.3, tau), 2);
            let expect = 1.0 / (tau * tau);
            assert!((j.m11 - expect).abs() < 1e-8 * expect);
            assert!((j.m22 - expect).abs() < 1e-8 * expect);
            assert!(j.m12.abs() < 1e-8 * expect);
        }
        // 5° → 131.31 rad⁻²
        let tau = 5f64.to_radians();
        assert!((prior_information(&priors(0.0, 0.0, tau), 0).m11 - 131.31).abs() < 0.01);
    }

    #[test]
    fn narrow_prior_concentrates_on_center() {
        let center = ParamPoint::new(PI / 3.0, PI / 9.0);
        let e = expected_information(&priors(center.theta, center.gamma, 1e-3), 1, qfim);
        let q = qfim(center);
        assert!(e.max_abs_diff(&q) / q.frobenius() < 1e-3);
    }

    #[test]
    fn self_convergent_under_doubling() {
        let p = priors(PI / 3.0, PI / 9.0, 5f64.to_radians());
        let v = van_trees_quantum(&p, 10_000).unwrap();
        assert!(v.change <= QUADRATURE_TOL);
        let finer = expected_information(&p, GaussHermite::LEVELS - 1, qfim)
            .add(&prior_information(&p, GaussHermite::LEVELS - 1).scale(1e-4));
        assert!(finer.max_abs_diff(&v.matrix) / finer.frobenius() < 1e-7);
    }

    #[test]
    fn classical_not_below_quantum() {
        let p = priors(0.8, 0.4, 5f64.to_radians());
        let split = ResourceSplit::new(0.5, 20_000).unwrap();
        for ordering in Ordering::BOTH {
            let c = van_trees_classical_stepwise(&p, &split, ordering).unwrap();
            let q = van_trees_stepwise(&p, &split, ordering, qfim).unwrap();
            assert!(c.first_std >= q.first_std && c.second_std >= q.second_std);
        }
    }
}
