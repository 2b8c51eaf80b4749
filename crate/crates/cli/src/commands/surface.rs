use qse_core::bounds::{bound_report, BoundStatus, HolevoConfig};
use qse_core::exec::Execution;
use qse_core::{Ordering, ParamPoint};

use super::*;
use crate::table::{Cell, OutputTable};

pub const COMMAND: Subcommand = Subcommand {
    name: "surface",
    about: "Stepwise-to-Holevo ratios r_beta and r_opt over a (theta, gamma) grid; angles are written in degrees",
    flags: &[
        flag("theta", "ANGLES", ANGLES, Some("5:85:41")),
        flag("gamma", "ANGLES", ANGLES, Some("2:40:39")),
        BETA,
        flag("seed", "U64", "Seed of the Holevo multi-start optimizer", Some("1")),
        OUT,
        FORMAT,
        THREADS,
        STRICT,
        CONFIG,
    ],
    run,
};

const COLUMNS: &[&str] = &[
    "theta",
    "gamma",
    "r_beta_theta_first",
    "r_beta_gamma_first",
    "r_opt_theta_first",
    "r_opt_gamma_first",
    "beta_star_theta_first",
    "beta_star_gamma_first",
    "c_holevo",
    "det_q",
    "status",
];

fn run(f: &mut Fields) -> Option<Report> {
    let thetas = angles(f, "theta");
    let gammas = angles(f, "gamma");
    let beta = beta(f);
    let seed = f.get("seed", parse_num::<u64>);
    let format = format(f);
    let (thetas, gammas, beta, seed, format) = (thetas?, gammas?, beta?, seed?, format?);

    let holevo = HolevoConfig { seed, ..HolevoConfig::default() };
    let ng = gammas.len();
    let rows = Execution::Parallel.map_range(thetas.len() * ng, |k| {
        let p = ParamPoint::new(thetas[k / ng], gammas[k % ng]);
        let mut row = vec![Cell::num(p.theta.to_degrees()), Cell::num(p.gamma.to_degrees())];
        match bound_report(p, beta, &holevo) {
            Ok(r) => {
                let (tf, gf) = (r.ratio(Ordering::ThetaFirst), r.ratio(Ordering::GammaFirst));
                for x in [tf.r_beta, gf.r_beta, tf.r_opt, gf.r_opt, tf.beta_star, gf.beta_star, r.holevo, r.det_q] {
                    row.push(Cell::num(x));
                }
                row.push(Cell::text(r.status.label()));
                (row, r.status != BoundStatus::Ok)
            }
            Err(e) => {
                row.extend((0..8).map(|_| Cell::num(f64::NAN)));
                row.push(Cell::text(format!("failed: {e}")));
                (row, true)
            }
        }
    });
    let mut table = OutputTable::new(COLUMNS);
    let mut failures = 0;
    for (row, bad) in rows {
        failures += bad as usize;
        table.push(row).expect("fixed width");
    }
    Some(Report { bytes: table.to_bytes(format), failures })
}
