//! Seeded synthetic experiments and campaign sweeps.
//!
//! Every repetition draws from its own ChaCha8 stream, selected by
//! `(seed, row << 32 | repetition)`, so results do not depend on scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, StandardNormal};

use crate::bayes::{run_stages, BatchRecord, BayesConfig, PriorPair, StepwiseOutcome};
use crate::bounds::{je_total_error_bound, van_trees_classical_stepwise, ResourceSplit};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::info::{Ordering, Param};
use crate::model::{outcome_probs, ParamPoint};

/// Independent random stream `stream` of `seed`.
pub fn task_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// `n` Z-basis shots at `truth`: `n₀ ~ Binomial(n, p₀)`.
pub fn sample_batch<R: Rng + ?Sized>(truth: ParamPoint, n: u64, rng: &mut R) -> BatchRecord {
    let (p0, _) = outcome_probs(truth);
    let n0 = Binomial::new(n, p0).expect("p0 is clamped to [0, 1]").sample(rng);
    BatchRecord::new(n0, n - n0)
}

/// Where the priors sit relative to the simulated truth.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Centering {
    /// Priors centered on the truth.
    #[default]
    AtTruth,
    /// Priors centered on `truth + (theta, gamma)` (mount miscalibration).
    Offset { theta: f64, gamma: f64 },
    /// Priors centered on the sweep point; each repetition draws its truth
    /// from them.
    PriorDrawn,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignConfig {
    /// Nominal sweep points.
    pub sweep: Vec<ParamPoint>,
    /// Total shots over both batches.
    pub n_total: u64,
    pub beta: f64,
    /// Prior widths, radians.
    pub taus: Vec<f64>,
    pub centering: Centering,
    pub orderings: Vec<Ordering>,
    pub bayes: BayesConfig,
    pub repetitions: usize,
    pub seed: u64,
}

impl CampaignConfig {
    /// θ sweep at fixed γ.
    pub fn theta_sweep(thetas: &[f64], gamma: f64) -> Vec<ParamPoint> {
        thetas.iter().map(|&t| ParamPoint::new(t, gamma)).collect()
    }

    /// Every violated constraint, not just the first.
    pub fn validate(&self) -> std::result::Result<(), Vec<String>> {
        let mut errs = Vec::new();
        if self.sweep.is_empty() {
            errs.push("sweep: must contain at least one point".to_string());
        }
        if self.sweep.iter().any(|p| !p.theta.is_finite() || !p.gamma.is_finite()) {
            errs.push("sweep: points must be finite".to_string());
        }
        if self.taus.is_empty() {
            errs.push("tau: at least one prior width is required".to_string());
        }
        if self.taus.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
            errs.push("tau: prior widths must be positive".to_string());
        }
        if self.orderings.is_empty() {
            errs.push("order: at least one ordering is required".to_string());
        }
        if self.repetitions == 0 {
            errs.push("reps: must be at least 1".to_string());
        }
        if self.n_total == 0 {
            errs.push("n: shot budget must be positive".to_string());
        }
        if let Err(e) = ResourceSplit::new(self.beta, self.n_total) {
            errs.push(format!("beta: {e}"));
        }
        if self.bayes.grid.resolution < 3 {
            errs.push("grid-res: must be at least 3".to_string());
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(errs)
        }
    }

    /// FNV-1a over a canonical rendering of every result-affecting field
    /// (execution mode excluded).
    pub fn hash(&self) -> u64 {
        let b = &self.bayes;
        let canon = format!(
            "{:?}|{}|{:?}|{:?}|{:?}|{:?}|{:?}|{:?}|{:?}|{:?}|{}|{}",
            self.sweep.iter().map(|p| (p.theta.to_bits(), p.gamma.to_bits())).collect::<Vec<_>>(),
            self.n_total,
            self.beta.to_bits(),
            self.taus.iter().map(|t| t.to_bits()).collect::<Vec<_>>(),
            self.centering,
            self.orderings,
            (b.grid.resolution, b.grid.half_width.to_bits()),
            b.likelihood,
            b.handoff,
            (),
            self.repetitions,
            self.seed,
        );
        canon.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, byte| (h ^ byte as u64).wrapping_mul(0x0100_0000_01b3))
    }

    fn rows(&self) -> Vec<(f64, Ordering, ParamPoint)> {
        let mut rows = Vec::new();
        for &tau in &self.taus {
            for &ordering in &self.orderings {
                for &point in &self.sweep {
                    rows.push((tau, ordering, point));
                }
            }
        }
        rows
    }
}

/// Summary over repetitions: mean and (population) standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Stat {
    pub mean: f64,
    pub std: f64,
}

impl Stat {
    pub fn of(xs: impl Iterator<Item = f64> + Clone) -> Stat {
        let (n, sum) = xs.clone().fold((0usize, 0.0), |(n, s), x| (n + 1, s + x));
        if n == 0 {
            return Stat { mean: f64::NAN, std: f64::NAN };
        }
        let mean = sum / n as f64;
        let var = xs.map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
        Stat { mean, std: var.sqrt() }
    }
}

/// Per-parameter aggregates of one campaign row.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ParamSummary {
    /// Posterior means across repetitions.
    pub estimate: Stat,
    /// Posterior standard deviations across repetitions.
    pub posterior_std: Stat,
    /// Root-mean-square error against the (possibly drawn) truth.
    pub rmse: f64,
    /// Fraction of repetitions with `|estimate - truth| < 3·std`.
    pub coverage_3sigma: f64,
    /// Stepwise classical Van Trees standard-deviation bound.
    pub vt_classical_std: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignRow {
    pub index: usize,
    pub truth: ParamPoint,
    pub ordering: Ordering,
    pub tau: f64,
    pub theta: ParamSummary,
    pub gamma: ParamSummary,
    pub sigma_total: Stat,
    /// `Tr[(N·V)⁻¹]` for joint estimation with all `N` shots.
    pub vt_quantum_je_trace: f64,
    /// Successful repetitions.
    pub reps: usize,
    pub seed: u64,
    pub config_hash: u64,
    /// `"ok"` or a description of what failed.
    pub status: String,
}

impl CampaignRow {
    pub fn summary(&self, p: Param) -> &ParamSummary {
        match p {
            Param::Theta => &self.theta,
            Param::Gamma => &self.gamma,
        }
    }

    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignResult {
    pub rows: Vec<CampaignRow>,
    pub seed: u64,
    pub config_hash: u64,
}

fn row_priors(cfg: &CampaignConfig, point: ParamPoint, tau: f64) -> Result<PriorPair> {
    let center = match cfg.centering {
        Centering::AtTruth | Centering::PriorDrawn => point,
        Centering::Offset { theta, gamma } => ParamPoint::new(point.theta + theta, point.gamma + gamma),
    };
    PriorPair::centered(center, tau)
}

/// One repetition of one row; `stream` selects the random substream.
pub fn run_repetition(
    cfg: &CampaignConfig,
    point: ParamPoint,
    tau: f64,
    ordering: Ordering,
    stream: u64,
) -> Result<StepwiseOutcome> {
    let priors = row_priors(cfg, point, tau)?;
    let split = ResourceSplit::new(cfg.beta, cfg.n_total)?;
    let mut rng = task_rng(cfg.seed, stream);
    let truth = match cfg.centering {
        Centering::PriorDrawn => {
            let zt: f64 = rng.sample(StandardNormal);
            let zg: f64 = rng.sample(StandardNormal);
            ParamPoint::new(point.theta + tau * zt, point.gamma + tau * zg)
        }
        _ => point,
    };
    let (n1, n2) = split.counts();
    let b1 = sample_batch(truth, n1, &mut rng);
    let b2 = sample_batch(truth, n2, &mut rng);
    run_stages(truth, [b1, b2], &priors, ordering, &cfg.bayes)
}

/// What a campaign keeps of one repetition; the posterior grids are dropped.
#[derive(Debug, Clone, Copy)]
struct RepSummary {
    truth: ParamPoint,
    /// `(mean, std)` indexed by θ then γ.
    moments: [(f64, f64); 2],
    sigma_total: f64,
}

impl RepSummary {
    fn of(o: &StepwiseOutcome) -> Self {
        let m = |p| {
            let e = o.estimate_of(p);
            (e.mean, e.std)
        };
        RepSummary { truth: o.truth, moments: [m(Param::Theta), m(Param::Gamma)], sigma_total: o.sigma_total }
    }

    fn get(&self, p: Param) -> (f64, f64) {
        self.moments[(p == Param::Gamma) as usize]
    }
}

fn summarize(outcomes: &[RepSummary], p: Param) -> ParamSummary {
    let n = outcomes.len() as f64;
    let sq_err: f64 = outcomes.iter().map(|o| (o.get(p).0 - o.truth.get(p)).powi(2)).sum();
    let covered = outcomes
        .iter()
        .filter(|o| {
            let (mean, std) = o.get(p);
            (mean - o.truth.get(p)).abs() < 3.0 * std
        })
        .count();
    ParamSummary {
        estimate: Stat::of(outcomes.iter().map(|o| o.get(p).0)),
        posterior_std: Stat::of(outcomes.iter().map(|o| o.get(p).1)),
        rmse: (sq_err / n).sqrt(),
        coverage_3sigma: covered as f64 / n,
        vt_classical_std: f64::NAN,
    }
}

/// Runs every `(τ, ordering, point)` row for `repetitions` stepwise protocols.
///
/// Rows are ordered τ-major, then ordering, then sweep point. Failures are
/// recorded in the row's status; only an invalid configuration is an error.
pub fn run_campaign(cfg: &CampaignConfig) -> Result<CampaignResult> {
    cfg.validate().map_err(|errs| Error::InvalidArgument(errs.join("; ")))?;
    let rows = cfg.rows();
    let reps = cfg.repetitions;
    let config_hash = cfg.hash();
    let execution: Execution = cfg.bayes.execution;

    let outcomes: Vec<Result<RepSummary>> = execution.map_range(rows.len() * reps, |task| {
        let (row, rep) = (task / reps, task % reps);
        let (tau, ordering, point) = rows[row];
        run_repetition(cfg, point, tau, ordering, ((row as u64) << 32) | rep as u64).map(|o| RepSummary::of(&o))
    });
    let bounds: Vec<(Result<crate::bounds::StepwiseVanTrees>, Result<f64>)> =
        execution.map_range(rows.len(), |row| {
            let (tau, ordering, point) = rows[row];
            let priors = row_priors(cfg, point, tau);
            let split = ResourceSplit::new(cfg.beta, cfg.n_total);
            match (priors, split) {
                (Ok(pr), Ok(sp)) => {
                    (van_trees_classical_stepwise(&pr, &sp, ordering), je_total_error_bound(&pr, cfg.n_total))
                }
                (Err(e), _) | (_, Err(e)) => (Err(e.clone()), Err(e)),
            }
        });

    let mut out = Vec::with_capacity(rows.len());
    for (index, ((tau, ordering, point), chunk)) in rows.iter().zip(outcomes.chunks(reps)).enumerate() {
        let mut ok = Vec::with_capacity(reps);
        let mut failures = Vec::new();
        for o in chunk {
            match o {
                Ok(o) => ok.push(*o),
                Err(e) => failures.push(e.to_string()),
            }
        }
        let (vt_classical, vt_quantum) = &bounds[index];
        let mut status = Vec::new();
        if !failures.is_empty() {
            status.push(format!("{} of {} reps failed: {}", failures.len(), reps, failures[0]));
        }
        if let Err(e) = vt_classical {
            status.push(format!("classical van trees: {e}"));
        }
        if let Err(e) = vt_quantum {
            status.push(format!("quantum van trees: {e}"));
        }
        let mut theta = summarize(&ok, Param::Theta);
        let mut gamma = summarize(&ok, Param::Gamma);
        if let Ok(vt) = vt_classical {
            theta.vt_classical_std = vt.std_of(Param::Theta);
            gamma.vt_classical_std = vt.std_of(Param::Gamma);
        }
        out.push(CampaignRow {
            index,
            truth: *point,
            ordering: *ordering,
            tau: *tau,
            theta,
            gamma,
            sigma_total: Stat::of(ok.iter().map(|o| o.sigma_total)),
            vt_quantum_je_trace: vt_quantum.as_ref().copied().unwrap_or(f64::NAN),
            reps: ok.len(),
            seed: cfg.seed,
            config_hash,
            status: if status.is_empty() { "ok".to_string() } else { status.join("; ") },
        });
    }
    Ok(CampaignResult { rows: out, seed: cfg.seed, config_hash })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bayes::stepwise_protocol;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn small_config() -> CampaignConfig {
        CampaignConfig {
            sweep: CampaignConfig::theta_sweep(&[0.6, 1.0], PI / 9.0),
            n_total: 2000,
            beta: 0.5,
            taus: vec![5f64.to_radians()],
            centering: Centering::AtTruth,
            orderings: vec![Ordering::GammaFirst],
            bayes: BayesConfig { grid: crate::bayes::GridSpec { resolution: 61, half_width: 6.0 }, ..Default::default() },
            repetitions: 3,
            seed: 9,
        }
    }

    #[test]
    fn certain_outcome() {
        let mut rng = task_rng(1, 0);
        for _ in 0..10 {
            assert_eq!(sample_batch(ParamPoint::new(FRAC_PI_2, 0.4), 500, &mut rng), BatchRecord::new(500, 0));
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let p = ParamPoint::new(PI / 3.0, PI / 9.0);
        let a = sample_batch(p, 100_000, &mut task_rng(5, 2));
        let b = sample_batch(p, 100_000, &mut task_rng(5, 2));
        let c = sample_batch(p, 100_000, &mut task_rng(5, 3));
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn validation_lists_every_problem() {
        let cfg = CampaignConfig { sweep: vec![], taus: vec![-1.0], repetitions: 0, beta: 1.5, ..small_config() };
        let errs = cfg.validate().unwrap_err();
        assert_eq!(errs.len(), 4, "{errs:?}");
    }

    #[test]
    fn single_rep_matches_protocol() {
        let cfg = CampaignConfig { sweep: vec![ParamPoint::new(0.8, PI / 9.0)], repetitions: 1, ..small_config() };
        let res = run_campaign(&cfg).unwrap();
        let priors = PriorPair::centered(cfg.sweep[0], cfg.taus[0]).unwrap();
        let split = ResourceSplit::new(cfg.beta, cfg.n_total).unwrap();
        let direct = stepwise_protocol(cfg.sweep[0], &split, &priors, Ordering::GammaFirst, &cfg.bayes, cfg.seed).unwrap();
        let row = &res.rows[0];
        assert_eq!(row.sigma_total.mean.to_bits(), direct.sigma_total.to_bits());
        assert_eq!(row.gamma.estimate.mean.to_bits(), direct.first.mean.to_bits());
        assert_eq!(row.theta.estimate.mean.to_bits(), direct.second.mean.to_bits());
    }

    #[test]
    fn hash_ignores_execution() {
        let a = small_config();
        let mut b = small_config();
        b.bayes.execution = Execution::Sequential;
        assert_eq!(a.hash(), b.hash());
        let c = CampaignConfig { seed: 10, ..small_config() };
        assert_ne!(a.hash(), c.hash());
    }

    #[test]
    fn rows_are_tau_major() {
        let cfg = CampaignConfig {
            taus: vec![0.05, 0.1],
            orderings: Ordering::BOTH.to_vec(),
            repetitions: 1,
            ..small_config()
        };
        let res = run_campaign(&cfg).unwrap();
        assert_eq!(res.rows.len(), 8);
        assert!(res.rows[..4].iter().all(|r| r.tau == 0.05));
        assert_eq!(res.rows[2].ordering, Ordering::ThetaFirst);
        assert!(res.rows.iter().all(|r| r.is_ok() && r.config_hash == res.config_hash));
    }
}
