//! Command-line front end for `lagtrans-core`.
//!
//! Reads a JSON problem file, runs one command and prints a JSON report.
//! Exit status is 0 on success, 1 on any error and 2 when the two
//! transversality criteria disagree on a triple.

pub mod commands;
pub mod error;
pub mod json;
pub mod problem;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::Parser;
use lagtrans_core::forms::Tolerance;
use serde::Serialize;

pub use commands::{Command, Options, Outcome};
pub use error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "lagtrans",
    version,
    about = "Transversality and index computations for lagrangian subspaces"
)]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,

    /// Problem file (JSON).
    #[arg(long)]
    pub input: PathBuf,

    /// Write the report here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,

    /// Override the problem tolerance: REL[,ABS].
    #[arg(long, value_parser = commands::parse_tolerance_flag)]
    pub tol: Option<Tolerance>,

    /// Samples per deformation path, endpoints included.
    #[arg(long, default_value_t = 17)]
    pub steps: usize,

    /// Pair of lagrangian names, `A,B`. Repeatable.
    #[arg(long = "pair", value_name = "A,B")]
    pub pairs: Vec<String>,

    /// Triple of lagrangian names, `A,B,C`. Repeatable.
    #[arg(long = "triple", value_name = "A,B,C")]
    pub triples: Vec<String>,

    /// Deformation family `A,B,C,...`: the first two are normalized to the
    /// standard factors, the rest are deformed.
    #[arg(long, value_name = "A,B,C,...")]
    pub family: Option<String>,

    /// Loop name. Repeatable.
    #[arg(long = "loop", value_name = "NAME")]
    pub loops: Vec<String>,

    /// Worker threads for batches of pairs, triples or loops.
    #[arg(long)]
    pub jobs: Option<usize>,
}

fn split_names<const N: usize>(flag: &str, raw: &str) -> Result<[String; N], CliError> {
    let names: Vec<String> = raw.split(',').map(|s| s.trim().to_string()).collect();
    if names.iter().any(|s| s.is_empty()) {
        return Err(CliError::Usage(format!(
            "--{flag} `{raw}` has an empty name"
        )));
    }
    names.try_into().map_err(|_| {
        CliError::Usage(format!(
            "--{flag} expects {N} comma-separated names, got `{raw}`"
        ))
    })
}

impl Cli {
    pub fn options(&self) -> Result<Options, CliError> {
        let family = match &self.family {
            None => None,
            Some(raw) => {
                let names: Vec<String> = raw.split(',').map(|s| s.trim().to_string()).collect();
                if names.len() < 3 || names.iter().any(|s| s.is_empty()) {
                    return Err(CliError::Usage(format!(
                        "--family expects at least 3 comma-separated names, got `{raw}`"
                    )));
                }
                Some(names)
            }
        };
        if self.jobs == Some(0) {
            return Err(CliError::Usage("--jobs must be at least 1".into()));
        }
        Ok(Options {
            steps: self.steps,
            pairs: self
                .pairs
                .iter()
                .map(|p| split_names::<2>("pair", p))
                .collect::<Result<_, _>>()?,
            triples: self
                .triples
                .iter()
                .map(|t| split_names::<3>("triple", t))
                .collect::<Result<_, _>>()?,
            family,
            loops: self.loops.clone(),
            jobs: self.jobs,
        })
    }
}

#[derive(Serialize)]
struct ErrorReport<'a> {
    schema_version: u64,
    error: ErrorBody<'a>,
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    kind: &'a str,
    name: &'a str,
    field: Option<&'a str>,
    message: String,
}

/// Renders an error as the JSON document printed on stderr.
pub fn error_report(err: &CliError) -> String {
    json::to_report_string(&ErrorReport {
        schema_version: problem::SCHEMA_VERSION,
        error: ErrorBody {
            kind: err.kind(),
            name: err.name(),
            field: err.field(),
            message: err.to_string(),
        },
    })
}

fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    let options = cli.options()?;
    let problem = problem::parse_problem(&cli.input, cli.tol)?;
    let outcome = commands::run(cli.command, &problem, &options)?;
    if let Some(path) = &cli.output {
        std::fs::write(path, &outcome.report).map_err(|e| CliError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
    }
    Ok(outcome)
}

/// Runs the CLI on `args` (program name first) and returns the exit status.
pub fn run_cli<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{}", e.render());
                return 0;
            }
            let err = CliError::Usage(e.render().to_string().trim().to_string());
            let _ = stderr.write_all(error_report(&err).as_bytes());
            return 1;
        }
    };
    match execute(&cli) {
        Ok(outcome) => {
            if cli.output.is_none() {
                let _ = stdout.write_all(outcome.report.as_bytes());
            }
            if outcome.contract_violation {
                let _ = writeln!(
                    stderr,
                    "pairwise transversality and nondegeneracy of the Kashiwara form disagree"
                );
                2
            } else {
                0
            }
        }
        Err(err) => {
            let _ = stderr.write_all(error_report(&err).as_bytes());
            1
        }
    }
}
