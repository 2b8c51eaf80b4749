use std::f64::consts::PI;

use qse_core::sim::{run_campaign, CampaignConfig, CampaignResult};
use qse_core::Param;

use super::*;
use crate::table::{Cell, OutputTable};

const STEPWISE_FLAGS: &[FlagSpec] = &[
    flag("theta", "ANGLES", ANGLES, Some("10:80:15")),
    flag("gamma", "ANGLE", "True gamma; degrees unless suffixed with `rad` or written as pi/9", Some("pi/9")),
    flag("tau", "DEGREES", "Prior width (same unit rules as angles)", Some("5")),
    flag("order", "gamma-first|theta-first", "Which parameter the first batch estimates", Some("gamma-first")),
    flag("centering", "POLICY", "Prior center: at-truth, prior-drawn or offset:<dθ>,<dγ>", Some("at-truth")),
    HANDOFF,
    SEED,
    GRID_RES,
    LIKELIHOOD,
    BETA,
    N_PER_BATCH,
    REPS,
    OUT,
    FORMAT,
    THREADS,
    STRICT,
    CONFIG,
];

const COMPARE_FLAGS: &[FlagSpec] = &[
    flag("theta", "ANGLES", ANGLES, Some("10:80:15")),
    flag("gamma", "ANGLE", "Prior-center gamma; degrees unless suffixed with `rad` or written as pi/9", Some("pi/9")),
    flag("tau", "DEGREES", "Prior widths, one output group each (same unit rules as angles)", Some("2.5,5,10")),
    flag("order", "both|gamma-first|theta-first", "Orderings to run", Some("both")),
    flag("centering", "POLICY", "Truth and prior center: prior-drawn, at-truth or offset:<dθ>,<dγ>", Some("prior-drawn")),
    HANDOFF,
    SEED,
    GRID_RES,
    LIKELIHOOD,
    BETA,
    N_PER_BATCH,
    REPS,
    OUT,
    FORMAT,
    THREADS,
    STRICT,
    CONFIG,
];

pub const STEPWISE: Subcommand = Subcommand {
    name: "stepwise",
    about: "Monte Carlo stepwise estimation over a theta sweep against the classical Van Trees bound \
            (theta_true in degrees, everything else in radians)",
    flags: STEPWISE_FLAGS,
    run: run_stepwise,
};

pub const COMPARE: Subcommand = Subcommand {
    name: "compare",
    about: "Total error Sigma against the joint-estimation quantum Van Trees bound for several prior widths",
    flags: COMPARE_FLAGS,
    run: run_compare,
};

fn campaign(f: &mut Fields) -> Option<(CampaignConfig, Format)> {
    let thetas = angles(f, "theta");
    let gamma = angle(f, "gamma");
    let taus = angles(f, "tau");
    let orderings = orderings(f);
    let centering = centering(f);
    let bayes = bayes(f);
    let seed = f.get("seed", parse_num::<u64>);
    let beta = beta(f);
    let n_total = n_total(f);
    let reps = positive::<usize>(f, "reps");
    let format = format(f);
    let cfg = CampaignConfig {
        sweep: CampaignConfig::theta_sweep(&thetas?, gamma?),
        n_total: n_total?,
        beta: beta?,
        taus: taus?,
        centering: centering?,
        orderings: orderings?,
        bayes: bayes?,
        repetitions: reps?,
        seed: seed?,
    };
    if let Err(errs) = cfg.validate() {
        for e in errs {
            f.error(e);
        }
        return None;
    }
    Some((cfg, format?))
}

fn execute(f: &mut Fields, cfg: &CampaignConfig) -> Option<CampaignResult> {
    match run_campaign(cfg) {
        Ok(r) => Some(r),
        Err(e) => {
            f.error(e.to_string());
            None
        }
    }
}

fn run_stepwise(f: &mut Fields) -> Option<Report> {
    let (cfg, format) = campaign(f)?;
    if cfg.taus.len() != 1 {
        f.error(format!("--tau: stepwise takes a single prior width, got {}", cfg.taus.len()));
    }
    if cfg.orderings.len() != 1 {
        f.error("--order: stepwise takes a single ordering".into());
        return None;
    }
    let result = execute(f, &cfg)?;
    let mut table = OutputTable::new(&[
        "theta_true_deg",
        "gamma_true_rad",
        "gamma_hat",
        "d_gamma",
        "theta_hat",
        "d_theta",
        "vt_classical_gamma",
        "vt_classical_theta",
        "sigma_total",
        "reps",
        "seed",
        "status",
    ]);
    let mut failures = 0;
    for row in &result.rows {
        failures += !row.is_ok() as usize;
        let (g, t) = (row.summary(Param::Gamma), row.summary(Param::Theta));
        table
            .push(vec![
                Cell::num(row.truth.theta.to_degrees()),
                Cell::num(row.truth.gamma),
                Cell::num(g.estimate.mean),
                Cell::num(g.posterior_std.mean),
                Cell::num(t.estimate.mean),
                Cell::num(t.posterior_std.mean),
                Cell::num(g.vt_classical_std),
                Cell::num(t.vt_classical_std),
                Cell::num(row.sigma_total.mean),
                Cell::Int(row.reps as u64),
                Cell::Int(row.seed),
                Cell::text(&row.status),
            ])
            .expect("fixed width");
    }
    Some(Report { bytes: table.to_bytes(format), failures })
}

fn run_compare(f: &mut Fields) -> Option<Report> {
    let (cfg, format) = campaign(f)?;
    let result = execute(f, &cfg)?;
    let mut table = OutputTable::new(&[
        "tau_deg",
        "ordering",
        "theta_true_deg",
        "sigma_total_mean",
        "sigma_total_std",
        "vt_quantum_je_trace",
        "ratio",
        "status",
    ]);
    let mut failures = 0;
    for row in &result.rows {
        failures += !row.is_ok() as usize;
        table
            .push(vec![
                Cell::num(row.tau * 180.0 / PI),
                Cell::text(row.ordering.label()),
                Cell::num(row.truth.theta.to_degrees()),
                Cell::num(row.sigma_total.mean),
                Cell::num(row.sigma_total.std),
                Cell::num(row.vt_quantum_je_trace),
                Cell::num(row.sigma_total.mean / row.vt_quantum_je_trace),
                Cell::text(&row.status),
            ])
            .expect("fixed width");
    }
    Some(Report { bytes: table.to_bytes(format), failures })
}
