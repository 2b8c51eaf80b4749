//! Asymptotic and Bayesian precision bounds.
//!
//! Covariance bounds are returned "per unit shot" unless a shot count is
//! passed explicitly: [`crb_matrix`] divides by `N`, [`stepwise_trace`] and
//! the ratio do not (`N` cancels in `r_β`).

mod holevo;
mod van_trees;

pub use holevo::{holevo_bound, holevo_bound_with, HolevoBound, HolevoConfig};
pub use van_trees::{
    expected_information, je_total_error_bound, prior_information, van_trees_classical_stepwise,
    van_trees_matrix, van_trees_quantum, van_trees_stepwise, StepwiseVanTrees, VanTreesMatrix, QUADRATURE_TOL,
};

use crate::error::{Error, Result};
use crate::info::{InfoMatrix, Ordering};
use crate::model::{qfim, ParamPoint};

/// Relative invertibility threshold: `det(Q) > SINGULAR_RTOL · ‖Q‖_F²`.
pub const SINGULAR_RTOL: f64 = 1e-12;

/// Eigenvalues below this fraction of the largest are dropped by [`pinv_crb`].
pub const PINV_RTOL: f64 = 1e-10;

/// Fraction `β` of an `N`-shot budget spent on the first stage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResourceSplit {
    beta: f64,
    n_total: u64,
}

impl ResourceSplit {
    pub fn new(beta: f64, n_total: u64) -> Result<Self> {
        if !(beta > 0.0 && beta < 1.0) {
            return Err(Error::DegenerateSplit { beta });
        }
        let split = ResourceSplit { beta, n_total };
        let (a, b) = split.counts();
        if a == 0 || b == 0 {
            return Err(Error::InvalidArgument(format!(
                "split of {n_total} shots at beta = {beta} leaves an empty stage"
            )));
        }
        Ok(split)
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn n_total(&self) -> u64 {
        self.n_total
    }

    /// `(round(βN), N - round(βN))`.
    pub fn counts(&self) -> (u64, u64) {
        let first = ((self.beta * self.n_total as f64).round() as u64).min(self.n_total);
        (first, self.n_total - first)
    }
}

fn check_invertible(q: &InfoMatrix) -> Result<()> {
    let det = q.det();
    let threshold = SINGULAR_RTOL * q.frobenius().powi(2);
    if det > threshold && det.is_finite() {
        Ok(())
    } else {
        Err(Error::SingularInformation { det, threshold })
    }
}

/// `Q⁻¹ / N`; the diagonal holds the individual parameter bounds.
pub fn crb_matrix(q: &InfoMatrix, n: u64) -> Result<InfoMatrix> {
    check_invertible(q)?;
    Ok(q.inverse_unchecked().scale(1.0 / n as f64))
}

/// Moore–Penrose pseudoinverse of `F`, scaled by `1/N`.
pub fn pinv_crb(f: &InfoMatrix, n: u64) -> InfoMatrix {
    let (vals, vecs) = f.eigen();
    let top = vals[0].abs().max(vals[1].abs());
    let mut out = InfoMatrix { m11: 0.0, m12: 0.0, m22: 0.0, first: f.first };
    if top == 0.0 {
        return out;
    }
    for (val, v) in vals.iter().zip(vecs) {
        if val.abs() <= PINV_RTOL * top {
            continue;
        }
        let inv = 1.0 / (val * n as f64);
        out.m11 += inv * v[0] * v[0];
        out.m12 += inv * v[0] * v[1];
        out.m22 += inv * v[1] * v[1];
    }
    out
}

/// Stepwise total variance per unit `N`:
/// `(1/β)(Q⁻¹)₁₁ + 1/((1-β) Q₂₂)` with index 1 the first-estimated parameter.
pub fn stepwise_trace(q: &InfoMatrix, beta: f64, ordering: Ordering) -> Result<f64> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::DegenerateSplit { beta });
    }
    let (a, b) = stepwise_terms(q, ordering)?;
    Ok(a / beta + b / (1.0 - beta))
}

/// `((Q⁻¹)₁₁, 1/Q₂₂)` in the order of `ordering`.
fn stepwise_terms(q: &InfoMatrix, ordering: Ordering) -> Result<(f64, f64)> {
    check_invertible(q)?;
    let q = q.ordered(ordering);
    Ok((q.inverse_unchecked().m11, 1.0 / q.m22))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ratio {
    pub ordering: Ordering,
    pub stepwise_trace: f64,
    pub r_beta: f64,
    pub r_opt: f64,
    pub beta_star: f64,
}

/// `r_β`, its minimum over `β` and the minimizer, given the Holevo value.
///
/// With `a = (Q⁻¹)₁₁` and `b = 1/Q₂₂`, `a/β + b/(1-β)` is minimized at
/// `β* = √a / (√a + √b)` with value `(√a + √b)²`.
pub fn ratio_with_holevo(q: &InfoMatrix, c_holevo: f64, beta: f64, ordering: Ordering) -> Result<Ratio> {
    let stepwise = stepwise_trace(q, beta, ordering)?;
    let (a, b) = stepwise_terms(q, ordering)?;
    let (sa, sb) = (a.sqrt(), b.sqrt());
    Ok(Ratio {
        ordering,
        stepwise_trace: stepwise,
        r_beta: stepwise / c_holevo,
        r_opt: (sa + sb).powi(2) / c_holevo,
        beta_star: sa / (sa + sb),
    })
}

/// [`ratio_with_holevo`] with the Holevo bound computed at `p`.
pub fn ratio_r(p: ParamPoint, beta: f64, ordering: Ordering) -> Result<Ratio> {
    let q = qfim(p);
    check_invertible(&q)?;
    let c_h = holevo_bound(p)?.value;
    ratio_with_holevo(&q, c_h, beta, ordering)
}

#[derive(Debug, Clone, PartialEq)]
pub enum BoundStatus {
    Ok,
    /// `det Q` under the invertibility threshold: Holevo is `+∞`, ratios `NaN`.
    Singular,
    Failed(String),
}

impl BoundStatus {
    pub fn label(&self) -> String {
        match self {
            BoundStatus::Ok => "ok".into(),
            BoundStatus::Singular => "singular".into(),
            BoundStatus::Failed(msg) => format!("failed: {msg}"),
        }
    }
}

/// Every asymptotic bound at one point, per unit `N`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub point: ParamPoint,
    pub qfim: InfoMatrix,
    pub det_q: f64,
    pub crb_trace: f64,
    pub holevo: f64,
    pub beta: f64,
    /// Gamma-first then theta-first.
    pub ratios: [Ratio; 2],
    pub status: BoundStatus,
}

impl BoundReport {
    pub fn ratio(&self, ordering: Ordering) -> &Ratio {
        self.ratios.iter().find(|r| r.ordering == ordering).expect("both orderings present")
    }
}

/// Builds a [`BoundReport`]; singular points are masked rather than erroring.
pub fn bound_report(p: ParamPoint, beta: f64, cfg: &HolevoConfig) -> Result<BoundReport> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::DegenerateSplit { beta });
    }
    let q = qfim(p);
    let masked = |status: BoundStatus, holevo: f64, crb_trace: f64| BoundReport {
        point: p,
        qfim: q,
        det_q: q.det(),
        crb_trace,
        holevo,
        beta,
        ratios: Ordering::BOTH.map(|ordering| Ratio {
            ordering,
            stepwise_trace: f64::NAN,
            r_beta: f64::NAN,
            r_opt: f64::NAN,
            beta_star: f64::NAN,
        }),
        status,
    };
    if check_invertible(&q).is_err() {
        return Ok(masked(BoundStatus::Singular, f64::INFINITY, f64::INFINITY));
    }
    let crb_trace = q.inverse_unchecked().trace();
    let holevo = match holevo_bound_with(p, cfg) {
        Ok(h) => h.value,
        Err(e) => return Ok(masked(BoundStatus::Failed(e.to_string()), f64::NAN, crb_trace)),
    };
    let ratios = [
        ratio_with_holevo(&q, holevo, beta, Ordering::GammaFirst)?,
        ratio_with_holevo(&q, holevo, beta, Ordering::ThetaFirst)?,
    ];
    Ok(BoundReport { point: p, qfim: q, det_q: q.det(), crb_trace, holevo, beta, ratios, status: BoundStatus::Ok })
}
