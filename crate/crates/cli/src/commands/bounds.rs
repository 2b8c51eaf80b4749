use qse_core::bayes::PriorPair;
use qse_core::bounds::{
    bound_report, je_total_error_bound, van_trees_classical_stepwise, BoundStatus, HolevoConfig, ResourceSplit,
};
use qse_core::{Ordering, ParamPoint};
use serde_json::{json, Value};

use super::*;
use crate::table::quantize;

pub const COMMAND: Subcommand = Subcommand {
    name: "bounds",
    about: "Every bound at one (theta, gamma) as a JSON object; angles in the output are radians",
    flags: &[
        flag("theta", "ANGLE", "Degrees unless suffixed with `rad` or written as a multiple of pi", Some("60")),
        flag("gamma", "ANGLE", "Degrees unless suffixed with `rad` or written as a multiple of pi", Some("pi/9")),
        flag("tau", "DEGREES", "Prior width; adds the Van Trees bounds when given", None),
        BETA,
        N_PER_BATCH,
        flag("seed", "U64", "Seed of the Holevo multi-start optimizer", Some("1")),
        OUT,
        THREADS,
        STRICT,
        CONFIG,
    ],
    run,
};

fn num(x: f64) -> Value {
    json!(quantize(x))
}

fn run(f: &mut Fields) -> Option<Report> {
    let theta = angle(f, "theta");
    let gamma = angle(f, "gamma");
    let tau = f.opt("tau", crate::units::parse_angle);
    let beta = beta(f);
    let n_total = n_total(f);
    let seed = f.get("seed", parse_num::<u64>);
    let (p, beta, n_total, seed) = (ParamPoint::new(theta?, gamma?), beta?, n_total?, seed?);
    if let Some(t) = tau.filter(|t| *t <= 0.0) {
        f.error(format!("--tau: {t} must be positive"));
        return None;
    }

    let mut failures = 0;
    let report = match bound_report(p, beta, &HolevoConfig { seed, ..HolevoConfig::default() }) {
        Ok(r) => {
            failures += (r.status != BoundStatus::Ok) as usize;
            let q = r.qfim;
            json!({
                "theta": num(p.theta),
                "gamma": num(p.gamma),
                "beta": num(beta),
                "qfim": [[num(q.m11), num(q.m12)], [num(q.m12), num(q.m22)]],
                "det_q": num(r.det_q),
                "crb_trace": num(r.crb_trace),
                "c_holevo": num(r.holevo),
                "ratios": Ordering::BOTH.iter().map(|&o| {
                    let x = r.ratio(o);
                    json!({
                        "ordering": o.label(),
                        "stepwise_trace": num(x.stepwise_trace),
                        "r_beta": num(x.r_beta),
                        "r_opt": num(x.r_opt),
                        "beta_star": num(x.beta_star),
                    })
                }).collect::<Vec<_>>(),
                "status": r.status.label(),
            })
        }
        Err(e) => {
            failures += 1;
            json!({ "theta": num(p.theta), "gamma": num(p.gamma), "status": format!("failed: {e}") })
        }
    };
    let mut out = json!({ "bounds": report });
    if let Some(tau) = tau {
        let priors = PriorPair::centered(p, tau).expect("validated width");
        let split = ResourceSplit::new(beta, n_total).expect("validated split");
        let mut vt = json!({ "tau": num(tau), "n_total": n_total });
        match je_total_error_bound(&priors, n_total) {
            Ok(x) => vt["quantum_je_trace"] = num(x),
            Err(e) => {
                failures += 1;
                vt["quantum_je_trace"] = json!(format!("failed: {e}"));
            }
        }
        let classical: Vec<Value> = Ordering::BOTH
            .iter()
            .map(|&o| match van_trees_classical_stepwise(&priors, &split, o) {
                Ok(s) => json!({ "ordering": o.label(), "first_std": num(s.first_std), "second_std": num(s.second_std) }),
                Err(e) => {
                    failures += 1;
                    json!({ "ordering": o.label(), "status": format!("failed: {e}") })
                }
            })
            .collect();
        vt["classical_stepwise"] = json!(classical);
        out["van_trees"] = vt;
    }
    let mut bytes = serde_json::to_vec_pretty(&out).expect("json");
    bytes.push(b'\n');
    Some(Report { bytes, failures })
}
