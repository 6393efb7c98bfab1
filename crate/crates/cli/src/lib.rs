//! Library side of the `berry` command-line tool.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error, 3 I/O
//! error.

use std::ffi::OsString;
use std::io::Write;

pub mod args;
pub mod commands;
pub mod format;

pub use args::{parse_args, Command, GridSpec, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Clap(#[from] clap::Error),
    #[error("{0}")]
    Usage(String),
    /// The request was well-formed but cannot be carried out on the given
    /// grid or data, e.g. a truncating box or a boundary leak.
    #[error(transparent)]
    Compute(#[from] berry_core::Error),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Clap(e) => e.exit_code(),
            CliError::Usage(_) | CliError::Compute(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

/// What a command produced.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub csv: String,
    /// Text for standard error, e.g. the verification table.
    pub report: Option<String>,
    pub passed: bool,
}

pub fn run(config: &RunConfig) -> Result<Outcome, CliError> {
    let plain = |csv| Outcome {
        csv,
        report: None,
        passed: true,
    };
    Ok(match config.command {
        Command::Params => plain(commands::params_csv(config)?),
        Command::Wavefunction => plain(commands::wavefunction_csv(config)?),
        Command::Phase => plain(commands::phase_csv(config)?),
        Command::Figure1 => plain(commands::figure1_csv(config)),
        Command::Propagate => plain(commands::propagate_csv(config)?),
        Command::Verify => {
            let rows = commands::verify_rows(config)?;
            Outcome {
                csv: commands::verify_csv(&rows),
                report: Some(commands::verify_table(&rows)),
                passed: rows.iter().all(|r| r.passed()),
            }
        }
    })
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("BERRY_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&k| k > 0)
        .ok_or_else(|| CliError::Usage(format!("BERRY_THREADS must be a positive integer, got '{raw}'")))?;
    // Fails only if a pool already exists, in which case that pool is used.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    Ok(())
}

fn write_output(config: &RunConfig, csv: &str) -> Result<(), CliError> {
    match &config.output_path {
        Some(path) => std::fs::write(path, csv)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(csv.as_bytes())
                .and_then(|()| stdout.flush())
                .map_err(|e| CliError::Io(format!("cannot write to standard output: {e}")))
        }
    }
}

fn execute_inner(argv: Vec<OsString>) -> Result<i32, CliError> {
    let config = parse_args(argv)?;
    configure_threads()?;
    let outcome = run(&config)?;
    write_output(&config, &outcome.csv)?;
    if let Some(report) = &outcome.report {
        eprint!("{report}");
    }
    Ok(if outcome.passed { 0 } else { 1 })
}

/// Parses, runs and writes; returns the process exit code.
pub fn execute(argv: impl IntoIterator<Item = OsString>) -> i32 {
    match execute_inner(argv.into_iter().collect()) {
        Ok(code) => code,
        Err(CliError::Clap(e)) => {
            let _ = e.print();
            e.exit_code()
        }
        Err(e) => {
            eprintln!("berry: {e}");
            e.exit_code()
        }
    }
}
