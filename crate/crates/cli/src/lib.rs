//! Command-line front end for the figure-replication runs.

pub mod commands;
pub mod config;
pub mod table;
pub mod units;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Arg, ArgAction, Command};
use thiserror::Error;

use crate::commands::{Subcommand, SUBCOMMANDS};
use crate::config::Fields;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Clap(#[from] clap::Error),
    #[error("{}", .0.join("\n"))]
    Usage(Vec<String>),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Clap(e) if !e.use_stderr() => 0,
            CliError::Clap(_) | CliError::Usage(_) => 2,
            CliError::Io(_) => 1,
        }
    }
}

/// Result of a successful invocation, not yet written anywhere.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub bytes: Vec<u8>,
    pub out: Option<PathBuf>,
    pub failures: usize,
    pub strict: bool,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.strict && self.failures > 0 {
            3
        } else {
            0
        }
    }
}

fn subcommand(s: &Subcommand) -> Command {
    let args = s.flags.iter().map(|f| {
        let help = match f.default {
            Some(d) => format!("{} [default: {d}]", f.help),
            None => f.help.to_string(),
        };
        let arg = Arg::new(f.name).long(f.name).help(help);
        if f.value.is_empty() {
            arg.action(ArgAction::SetTrue)
        } else {
            arg.value_name(f.value).allow_hyphen_values(true)
        }
    });
    Command::new(s.name).about(s.about).args(args)
}

pub fn cli() -> Command {
    Command::new("qse")
        .about("Bayesian stepwise estimation of a qubit rotation: bounds, simulations and figure tables")
        .long_about(
            "Bayesian stepwise estimation of a qubit rotation: bounds, simulations and figure tables.\n\n\
             Angles on the command line are degrees unless written with a `rad` suffix or as a multiple \
             of pi; all computation is in radians.",
        )
        .version(env!("CARGO_PKG_VERSION"))
        .subcommand_required(true)
        .arg_required_else_help(true)
        .subcommands(SUBCOMMANDS.iter().map(subcommand))
}

/// Parses arguments and runs the selected subcommand in memory.
pub fn execute<I, T>(args: I) -> Result<Outcome, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let matches = cli().try_get_matches_from(args)?;
    let (name, sub) = matches.subcommand().expect("subcommand required");
    let spec = commands::find(name).expect("registered subcommand");

    let mut explicit = Vec::new();
    for f in spec.flags {
        if f.value.is_empty() {
            if sub.get_flag(f.name) {
                explicit.push((f.name.to_string(), "true".to_string()));
            }
        } else if let Some(v) = sub.get_one::<String>(f.name) {
            explicit.push((f.name.to_string(), v.clone()));
        }
    }
    let config = sub.get_one::<String>("config").map(PathBuf::from);
    let mut fields = Fields::layered(&spec.keys(), &spec.defaults(), config.as_deref(), &explicit);
    let threads = commands::threads(&mut fields);
    let strict = fields.flag("strict");
    let out = commands::out_path(&fields);

    let report = if threads > 0 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| CliError::Io(format!("thread pool: {e}")))?;
        pool.install(|| (spec.run)(&mut fields))
    } else {
        (spec.run)(&mut fields)
    };
    fields.finish().map_err(CliError::Usage)?;
    let report = report.expect("a command without errors produces a report");
    Ok(Outcome { bytes: report.bytes, out, failures: report.failures, strict })
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let outcome = match execute(args) {
        Ok(o) => o,
        Err(CliError::Clap(e)) => {
            let _ = e.print();
            return CliError::Clap(e).exit_code();
        }
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    let written = match &outcome.out {
        Some(path) => std::fs::write(path, &outcome.bytes).map_err(|e| format!("{}: {e}", path.display())),
        None => std::io::stdout().write_all(&outcome.bytes).map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return 1;
    }
    if outcome.failures > 0 {
        eprintln!("warning: {} row(s) with status other than ok", outcome.failures);
    }
    outcome.exit_code()
}
