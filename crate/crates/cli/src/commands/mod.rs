//! Subcommand definitions: accepted flags, defaults and table builders.

mod bounds;
mod campaign;
mod surface;

use std::path::PathBuf;

use qse_core::bayes::{BayesConfig, GridSpec, HandOff, LikelihoodMode};
use qse_core::sim::Centering;
use qse_core::Ordering;

use crate::config::{parse_num, Fields};
use crate::table::Format;
use crate::units::{parse_angle, parse_angle_list};

/// One long flag. An empty `value` marks a switch.
#[derive(Debug, Clone, Copy)]
pub struct FlagSpec {
    pub name: &'static str,
    pub value: &'static str,
    pub help: &'static str,
    pub default: Option<&'static str>,
}

const fn flag(name: &'static str, value: &'static str, help: &'static str, default: Option<&'static str>) -> FlagSpec {
    FlagSpec { name, value, help, default }
}

const ANGLES: &str = "Degrees unless suffixed with `rad` or written as a multiple of pi (pi/9, 2pi/9); \
                      start:stop:count, a comma list or one value";

pub const SEED: FlagSpec = flag("seed", "U64", "Random seed", Some("1"));
pub const OUT: FlagSpec = flag("out", "PATH", "Output file (default: stdout)", None);
pub const FORMAT: FlagSpec = flag("format", "csv|jsonl", "Output format", Some("csv"));
pub const GRID_RES: FlagSpec = flag("grid-res", "INT", "Posterior grid points per axis", Some("201"));
pub const LIKELIHOOD: FlagSpec = flag("likelihood", "exact|gaussian", "Likelihood used for the posterior", Some("gaussian"));
pub const BETA: FlagSpec = flag("beta", "0..1", "Fraction of the shots spent on the first stage", Some("0.5"));
pub const N_PER_BATCH: FlagSpec = flag(
    "n-per-batch",
    "INT",
    "Shots per batch; the total 2*n-per-batch is divided between the stages by --beta",
    Some("10000"),
);
pub const REPS: FlagSpec = flag("reps", "INT", "Monte Carlo repetitions per row", Some("200"));
pub const THREADS: FlagSpec = flag("threads", "INT", "Worker threads (0: one per core)", Some("0"));
pub const STRICT: FlagSpec = flag("strict", "", "Exit with status 3 if any row failed", None);
pub const CONFIG: FlagSpec = flag("config", "PATH", "Flat key = value file; flags override its entries", None);
pub const HANDOFF: FlagSpec = flag(
    "handoff",
    "refit|full",
    "Stage-two prior: Gaussian refit of the stage-one posterior, or the full grid",
    Some("refit"),
);

pub struct Subcommand {
    pub name: &'static str,
    pub about: &'static str,
    pub flags: &'static [FlagSpec],
    pub run: fn(&mut Fields) -> Option<Report>,
}

/// A finished subcommand: serialized output plus the number of failed rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub bytes: Vec<u8>,
    pub failures: usize,
}

pub const SUBCOMMANDS: &[Subcommand] = &[surface::COMMAND, campaign::STEPWISE, campaign::COMPARE, bounds::COMMAND];

pub fn find(name: &str) -> Option<&'static Subcommand> {
    SUBCOMMANDS.iter().find(|s| s.name == name)
}

impl Subcommand {
    pub fn defaults(&self) -> Vec<(&'static str, &'static str)> {
        self.flags.iter().filter_map(|f| f.default.map(|d| (f.name, d))).collect()
    }

    /// Config-file keys: every flag except `config` itself.
    pub fn keys(&self) -> Vec<&'static str> {
        self.flags.iter().map(|f| f.name).filter(|n| *n != "config").collect()
    }
}

pub fn angle(f: &mut Fields, key: &str) -> Option<f64> {
    f.get(key, parse_angle)
}

pub fn angles(f: &mut Fields, key: &str) -> Option<Vec<f64>> {
    f.get(key, parse_angle_list)
}

pub fn beta(f: &mut Fields) -> Option<f64> {
    f.get("beta", |v| {
        let b: f64 = parse_num(v)?;
        if b > 0.0 && b < 1.0 {
            Ok(b)
        } else {
            Err(format!("{b} is outside (0, 1)"))
        }
    })
}

pub fn positive<T: std::str::FromStr + PartialOrd + Default + std::fmt::Display>(
    f: &mut Fields,
    key: &str,
) -> Option<T> {
    f.get(key, |v| {
        let n: T = parse_num(v)?;
        if n > T::default() {
            Ok(n)
        } else {
            Err(format!("{n} must be positive"))
        }
    })
}

pub fn n_total(f: &mut Fields) -> Option<u64> {
    positive::<u64>(f, "n-per-batch").map(|n| 2 * n)
}

pub fn format(f: &mut Fields) -> Option<Format> {
    f.get("format", |v| v.parse())
}

pub fn orderings(f: &mut Fields) -> Option<Vec<Ordering>> {
    f.get("order", |v| match v {
        "both" => Ok(Ordering::BOTH.to_vec()),
        o => o.parse::<Ordering>().map(|o| vec![o]).map_err(|e| e.to_string()),
    })
}

pub fn centering(f: &mut Fields) -> Option<Centering> {
    f.get("centering", |v| match v {
        "at-truth" => Ok(Centering::AtTruth),
        "prior-drawn" => Ok(Centering::PriorDrawn),
        o => match o.strip_prefix("offset:").and_then(|r| r.split_once(',')) {
            Some((t, g)) => Ok(Centering::Offset { theta: parse_angle(t)?, gamma: parse_angle(g)? }),
            None => Err(format!("unknown centering `{o}` (at-truth|prior-drawn|offset:<dθ>,<dγ>)")),
        },
    })
}

pub fn bayes(f: &mut Fields) -> Option<BayesConfig> {
    let resolution = f.get("grid-res", |v| {
        let n: usize = parse_num(v)?;
        if n >= 3 {
            Ok(n)
        } else {
            Err(format!("{n} is below the minimum of 3"))
        }
    });
    let likelihood = f.get("likelihood", |v| v.parse::<LikelihoodMode>().map_err(|e| e.to_string()));
    let handoff = f.get("handoff", |v| match v {
        "refit" => Ok(HandOff::GaussianRefit),
        "full" => Ok(HandOff::FullPosterior),
        o => Err(format!("unknown hand-off `{o}` (refit|full)")),
    });
    Some(BayesConfig {
        grid: GridSpec { resolution: resolution?, ..GridSpec::default() },
        likelihood: likelihood?,
        handoff: handoff?,
        ..BayesConfig::default()
    })
}

pub fn out_path(f: &Fields) -> Option<PathBuf> {
    f.raw("out").map(PathBuf::from)
}

pub fn threads(f: &mut Fields) -> usize {
    f.get("threads", parse_num::<usize>).unwrap_or(0)
}
