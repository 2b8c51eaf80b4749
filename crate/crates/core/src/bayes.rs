//! Grid Bayesian inference for `(θ, γ)` and the two-stage stepwise protocol.
//!
//! Posteriors live on a uniform tensor grid spanning `±half_width` standard
//! deviations of each operative prior and are integrated with the trapezoid
//! rule. Log-weights are shifted by their maximum before exponentiation.
//! Moments are normalized by the evidence.

use std::f64::consts::PI;
use std::str::FromStr;

use rand::Rng;

use crate::bounds::ResourceSplit;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::info::{Ordering, Param};
use crate::model::{outcome_probs, ParamPoint};
use crate::sim::{sample_batch, task_rng};

/// Normal prior `N(center, width²)` on one parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPrior {
    pub center: f64,
    pub width: f64,
}

impl GaussianPrior {
    pub fn new(center: f64, width: f64) -> Result<Self> {
        if !(width > 0.0 && width.is_finite()) || !center.is_finite() {
            return Err(Error::InvalidPrior(width));
        }
        Ok(GaussianPrior { center, width })
    }

    /// Log density up to its normalizing constant.
    pub fn log_kernel(&self, x: f64) -> f64 {
        let z = (x - self.center) / self.width;
        -0.5 * z * z
    }
}

/// Independent priors on θ and γ, `A(θ, γ) = P(θ) P(γ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriorPair {
    pub theta: GaussianPrior,
    pub gamma: GaussianPrior,
}

impl PriorPair {
    pub fn new(theta: GaussianPrior, gamma: GaussianPrior) -> Self {
        PriorPair { theta, gamma }
    }

    /// Both priors centered on `center` with common width `tau`.
    pub fn centered(center: ParamPoint, tau: f64) -> Result<Self> {
        Ok(PriorPair { theta: GaussianPrior::new(center.theta, tau)?, gamma: GaussianPrior::new(center.gamma, tau)? })
    }

    pub fn get(&self, p: Param) -> GaussianPrior {
        match p {
            Param::Theta => self.theta,
            Param::Gamma => self.gamma,
        }
    }

    pub fn with(&self, p: Param, prior: GaussianPrior) -> Self {
        match p {
            Param::Theta => PriorPair { theta: prior, ..*self },
            Param::Gamma => PriorPair { gamma: prior, ..*self },
        }
    }

    pub fn with_width(&self, p: Param, width: f64) -> Result<Self> {
        Ok(self.with(p, GaussianPrior::new(self.get(p).center, width)?))
    }

    pub fn center(&self) -> ParamPoint {
        ParamPoint::new(self.theta.center, self.gamma.center)
    }
}

/// Outcome counts of one measurement batch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct BatchRecord {
    pub n0: u64,
    pub n1: u64,
}

impl BatchRecord {
    pub fn new(n0: u64, n1: u64) -> Self {
        BatchRecord { n0, n1 }
    }

    pub fn total(&self) -> u64 {
        self.n0 + self.n1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum LikelihoodMode {
    /// `p₀^{n₀} p₁^{n₁}` (binomial coefficient dropped).
    ExactBinomial,
    /// Normal approximation of the binomial: mean `N p₀`, variance `N p₀ p₁`.
    #[default]
    GaussianApprox,
}

impl LikelihoodMode {
    pub fn label(self) -> &'static str {
        match self {
            LikelihoodMode::ExactBinomial => "exact",
            LikelihoodMode::GaussianApprox => "gaussian",
        }
    }
}

impl FromStr for LikelihoodMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "exact" => Ok(LikelihoodMode::ExactBinomial),
            "gaussian" => Ok(LikelihoodMode::GaussianApprox),
            other => Err(format!("unknown likelihood `{other}` (expected exact or gaussian)")),
        }
    }
}

/// Below this `p₀ p₁` the Gaussian variance degenerates and the exact
/// binomial log-weight is used instead.
pub const GAUSSIAN_VARIANCE_FLOOR: f64 = 1e-12;

/// Log-likelihood of `batch` at `p`.
pub fn log_likelihood(batch: &BatchRecord, p: ParamPoint, mode: LikelihoodMode) -> f64 {
    let (p0, p1) = outcome_probs(p);
    log_likelihood_probs(batch, p0, p1, mode)
}

fn xlogy(x: u64, y: f64) -> f64 {
    if x == 0 {
        0.0
    } else {
        x as f64 * y.ln()
    }
}

#[inline]
fn log_likelihood_probs(batch: &BatchRecord, p0: f64, p1: f64, mode: LikelihoodMode) -> f64 {
    let n = batch.total();
    if n == 0 {
        return 0.0;
    }
    let exact = || xlogy(batch.n0, p0) + xlogy(batch.n1, p1);
    match mode {
        LikelihoodMode::ExactBinomial => exact(),
        LikelihoodMode::GaussianApprox => {
            let pq = p0 * p1;
            if pq < GAUSSIAN_VARIANCE_FLOOR {
                return exact();
            }
            let nf = n as f64;
            let var = nf * pq;
            let dev = batch.n0 as f64 - nf * p0;
            -dev * dev / (2.0 * var) - 0.5 * (2.0 * PI * var).ln()
        }
    }
}

/// Uniform tensor grid layout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    /// Points per axis (odd values put a node on the prior center).
    pub resolution: usize,
    /// Half-width of each axis in prior standard deviations.
    pub half_width: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { resolution: 201, half_width: 6.0 }
    }
}

/// How the first stage's result becomes the second stage's prior.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum HandOff {
    /// `P(λ₁ | λ̂₁, Δλ₁)`: Gaussian refit of the stage-one posterior.
    #[default]
    GaussianRefit,
    /// Reuse the full two-dimensional stage-one posterior as the prior.
    FullPosterior,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BayesConfig {
    pub grid: GridSpec,
    pub likelihood: LikelihoodMode,
    pub handoff: HandOff,
    pub execution: Execution,
}

/// Discretized posterior density over `(θ, γ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorGrid {
    pub theta_axis: Vec<f64>,
    pub gamma_axis: Vec<f64>,
    /// Row-major, θ index outer.
    pub weights: Vec<f64>,
    /// `ln(unnormalized weight) = ln(weights[k]) + log_scale_offset`.
    pub log_scale_offset: f64,
}

fn axis(prior: &GaussianPrior, spec: &GridSpec) -> Vec<f64> {
    let n = spec.resolution;
    let lo = prior.center - spec.half_width * prior.width;
    let step = 2.0 * spec.half_width * prior.width / (n - 1) as f64;
    (0..n).map(|i| lo + step * i as f64).collect()
}

/// Trapezoid weights of a uniform axis.
fn trapezoid(axis: &[f64]) -> Vec<f64> {
    let n = axis.len();
    let h = (axis[n - 1] - axis[0]) / (n - 1) as f64;
    (0..n).map(|i| if i == 0 || i == n - 1 { 0.5 * h } else { h }).collect()
}

impl PosteriorGrid {
    fn from_log_weights(theta_axis: Vec<f64>, gamma_axis: Vec<f64>, mut weights: Vec<f64>) -> Result<Self> {
        let max = weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !max.is_finite() {
            return Err(Error::DegeneratePosterior(format!("max log-weight {max}")));
        }
        for w in weights.iter_mut() {
            *w = (*w - max).exp();
        }
        let mut grid = PosteriorGrid { theta_axis, gamma_axis, weights, log_scale_offset: max };
        grid.normalize()?;
        Ok(grid)
    }

    fn quadrature(&self) -> (Vec<f64>, Vec<f64>) {
        (trapezoid(&self.theta_axis), trapezoid(&self.gamma_axis))
    }

    /// `Σ q_ij w_ij` under the trapezoid rule.
    pub fn total(&self) -> f64 {
        let (qt, qg) = self.quadrature();
        let ng = self.gamma_axis.len();
        let mut sum = 0.0;
        for (i, a) in qt.iter().enumerate() {
            let row = &self.weights[i * ng..(i + 1) * ng];
            sum += a * row.iter().zip(&qg).map(|(w, b)| w * b).sum::<f64>();
        }
        sum
    }

    /// Rescales the weights to integrate to one.
    pub fn normalize(&mut self) -> Result<()> {
        let total = self.total();
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::DegeneratePosterior(format!("evidence {total}")));
        }
        for w in self.weights.iter_mut() {
            *w /= total;
        }
        self.log_scale_offset += total.ln();
        Ok(())
    }

    pub fn axis(&self, p: Param) -> &[f64] {
        match p {
            Param::Theta => &self.theta_axis,
            Param::Gamma => &self.gamma_axis,
        }
    }

    /// Marginal density of `p` on its axis.
    pub fn marginal(&self, p: Param) -> Vec<f64> {
        let (qt, qg) = self.quadrature();
        let ng = self.gamma_axis.len();
        match p {
            Param::Theta => (0..self.theta_axis.len())
                .map(|i| self.weights[i * ng..(i + 1) * ng].iter().zip(&qg).map(|(w, b)| w * b).sum())
                .collect(),
            Param::Gamma => (0..ng)
                .map(|j| (0..self.theta_axis.len()).map(|i| qt[i] * self.weights[i * ng + j]).sum())
                .collect(),
        }
    }

    /// Posterior mean and standard deviation of `p`.
    pub fn moments(&self, p: Param) -> (f64, f64) {
        let marginal = self.marginal(p);
        let x = self.axis(p);
        let q = trapezoid(x);
        let mass: f64 = marginal.iter().zip(&q).map(|(m, w)| m * w).sum();
        let mean = marginal.iter().zip(&q).zip(x).map(|((m, w), x)| m * w * x).sum::<f64>() / mass;
        let var = marginal.iter().zip(&q).zip(x).map(|((m, w), x)| m * w * (x - mean).powi(2)).sum::<f64>() / mass;
        (mean, var.sqrt())
    }
}

/// Posterior summary for one parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateResult {
    pub param: Param,
    pub mean: f64,
    pub std: f64,
    pub posterior: PosteriorGrid,
}

impl EstimateResult {
    fn from_grid(param: Param, posterior: PosteriorGrid) -> Result<Self> {
        let (mean, std) = posterior.moments(param);
        if !(std > 0.0 && std.is_finite() && mean.is_finite()) {
            return Err(Error::DegeneratePosterior(format!("{} moments ({mean}, {std})", param.name())));
        }
        Ok(EstimateResult { param, mean, std, posterior })
    }

    /// `P(λ | λ̂, Δλ)`.
    pub fn refit(&self) -> GaussianPrior {
        GaussianPrior { center: self.mean, width: self.std }
    }
}

/// Prior × likelihood on the grid spanned by `priors`.
pub fn posterior_grid(batch: &BatchRecord, priors: &PriorPair, cfg: &BayesConfig) -> Result<PosteriorGrid> {
    if cfg.grid.resolution < 3 || !(cfg.grid.half_width > 0.0) {
        return Err(Error::InvalidArgument(format!("bad grid {:?}", cfg.grid)));
    }
    let theta_axis = axis(&priors.theta, &cfg.grid);
    let gamma_axis = axis(&priors.gamma, &cfg.grid);
    let log_prior_t: Vec<f64> = theta_axis.iter().map(|&t| priors.theta.log_kernel(t)).collect();
    let log_prior_g: Vec<f64> = gamma_axis.iter().map(|&g| priors.gamma.log_kernel(g)).collect();
    // p₁ = sin²γ cos²θ factorizes over the axes
    let cos2_t: Vec<f64> = theta_axis.iter().map(|t| t.cos().powi(2)).collect();
    let sin2_g: Vec<f64> = gamma_axis.iter().map(|g| g.sin().powi(2)).collect();

    let ng = gamma_axis.len();
    let mut logw = vec![0.0; theta_axis.len() * ng];
    cfg.execution.fill_chunks(&mut logw, ng, |i, row| {
        for (j, out) in row.iter_mut().enumerate() {
            let p1 = (sin2_g[j] * cos2_t[i]).clamp(0.0, 1.0);
            *out = log_prior_t[i] + log_prior_g[j] + log_likelihood_probs(batch, 1.0 - p1, p1, cfg.likelihood);
        }
    });
    PosteriorGrid::from_log_weights(theta_axis, gamma_axis, logw)
}

/// Posterior mean and standard deviation of `target` after one batch.
pub fn estimate(batch: &BatchRecord, priors: &PriorPair, target: Param, cfg: &BayesConfig) -> Result<EstimateResult> {
    EstimateResult::from_grid(target, posterior_grid(batch, priors, cfg)?)
}

/// `γ̂` and `Δγ` from the first batch, θ marginalized over its prior.
pub fn posterior_moments_gamma(
    batch: &BatchRecord,
    prior_theta: GaussianPrior,
    prior_gamma: GaussianPrior,
    cfg: &BayesConfig,
) -> Result<EstimateResult> {
    estimate(batch, &PriorPair::new(prior_theta, prior_gamma), Param::Gamma, cfg)
}

/// `θ̂` and `Δθ` from the second batch with γ's prior replaced by the
/// stage-one hand-off.
pub fn posterior_moments_theta(
    batch2: &BatchRecord,
    prior_theta: GaussianPrior,
    handed_off_gamma: &EstimateResult,
    cfg: &BayesConfig,
) -> Result<EstimateResult> {
    let original = PriorPair::new(prior_theta, handed_off_gamma.refit());
    second_stage(batch2, &original, handed_off_gamma, cfg)
}

/// Stage two for either ordering: estimates the parameter not estimated by
/// `first`, using `priors` for it and the configured hand-off for the other.
pub fn second_stage(
    batch2: &BatchRecord,
    priors: &PriorPair,
    first: &EstimateResult,
    cfg: &BayesConfig,
) -> Result<EstimateResult> {
    let target = first.param.other();
    match cfg.handoff {
        HandOff::GaussianRefit => {
            let handed = priors.with(first.param, first.refit());
            estimate(batch2, &handed, target, cfg)
        }
        HandOff::FullPosterior => {
            let prior = &first.posterior;
            let ng = prior.gamma_axis.len();
            let mut logw = vec![0.0; prior.weights.len()];
            cfg.execution.fill_chunks(&mut logw, ng, |i, row| {
                let theta = prior.theta_axis[i];
                for (j, out) in row.iter_mut().enumerate() {
                    let p = ParamPoint::new(theta, prior.gamma_axis[j]);
                    *out = prior.weights[i * ng + j].ln() + log_likelihood(batch2, p, cfg.likelihood);
                }
            });
            let grid = PosteriorGrid::from_log_weights(prior.theta_axis.clone(), prior.gamma_axis.clone(), logw)?;
            EstimateResult::from_grid(target, grid)
        }
    }
}

/// Both stages of one stepwise run.
#[derive(Debug, Clone, PartialEq)]
pub struct StepwiseOutcome {
    pub ordering: Ordering,
    pub truth: ParamPoint,
    pub batches: [BatchRecord; 2],
    pub first: EstimateResult,
    pub second: EstimateResult,
    /// `Δ²θ + Δ²γ`.
    pub sigma_total: f64,
}

impl StepwiseOutcome {
    pub fn estimate_of(&self, p: Param) -> &EstimateResult {
        if self.first.param == p {
            &self.first
        } else {
            &self.second
        }
    }
}

/// Simulates both batches at `truth` and runs the two posterior stages.
/// Deterministic in `seed`.
pub fn stepwise_protocol(
    truth: ParamPoint,
    split: &ResourceSplit,
    priors: &PriorPair,
    ordering: Ordering,
    cfg: &BayesConfig,
    seed: u64,
) -> Result<StepwiseOutcome> {
    stepwise_protocol_with_rng(truth, split, priors, ordering, cfg, &mut task_rng(seed, 0))
}

pub fn stepwise_protocol_with_rng<R: Rng>(
    truth: ParamPoint,
    split: &ResourceSplit,
    priors: &PriorPair,
    ordering: Ordering,
    cfg: &BayesConfig,
    rng: &mut R,
) -> Result<StepwiseOutcome> {
    let (n1, n2) = split.counts();
    let batch1 = sample_batch(truth, n1, rng);
    let batch2 = sample_batch(truth, n2, rng);
    run_stages(truth, [batch1, batch2], priors, ordering, cfg)
}

/// The two posterior stages on given counts.
pub fn run_stages(
    truth: ParamPoint,
    batches: [BatchRecord; 2],
    priors: &PriorPair,
    ordering: Ordering,
    cfg: &BayesConfig,
) -> Result<StepwiseOutcome> {
    let first = estimate(&batches[0], priors, ordering.first(), cfg)?;
    let second = second_stage(&batches[1], priors, &first, cfg)?;
    let sigma_total = first.std * first.std + second.std * second.std;
    Ok(StepwiseOutcome { ordering, truth, batches, first, second, sigma_total })
}
