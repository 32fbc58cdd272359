//! Command-line front end for `fixlab-core`.
//!
//! Exit codes: 0 success, 1 usage, 2 input outside the model's domain
//! (w above w_max, irregular graph, ...), 3 internal consistency failure
//! (two routes to the same quantity disagree).

use std::ffi::OsString;
use std::io::Write;

use clap::error::ErrorKind;
use clap::Parser;

pub mod args;
pub mod commands;
pub mod record;
pub mod specs;

use args::{Cli, Command};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Domain(String),
    Core(fixlab_core::Error),
    Io(String),
}

impl From<fixlab_core::Error> for CliError {
    fn from(e: fixlab_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Domain(_) => 2,
            CliError::Core(e) if e.is_domain() => 2,
            CliError::Core(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Domain(m) => write!(f, "{m}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(m) => write!(f, "output error: {m}"),
        }
    }
}

fn dispatch(cli: &Cli, out: &mut (dyn Write + Send), err: &mut (dyn Write + Send)) -> Result<(), CliError> {
    match &cli.command {
        Command::Exact(a) => commands::exact(a, out),
        Command::Mc(a) => commands::mc(a, out, err),
        Command::Theorem1(a) => commands::theorem1(a, out),
        Command::BcRule(a) => commands::bc_rule(a, out),
        Command::Sweep(a) => commands::sweep(a, out),
        Command::Tables(a) => commands::tables(a, out),
    }
}

/// Parses `argv` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(argv: I, out: &mut (dyn Write + Send), err: &mut (dyn Write + Send)) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    0
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    1
                }
            };
        }
    };
    let result = match cli.threads {
        Some(0) => Err(CliError::Usage("--threads must be at least 1".into())),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| dispatch(&cli, out, err)),
            Err(e) => Err(CliError::Usage(format!("cannot start {n} threads: {e}"))),
        },
        None => dispatch(&cli, out, err),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "fixlab: {e}");
            e.exit_code()
        }
    }
}
