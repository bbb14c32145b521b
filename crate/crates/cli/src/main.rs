//! Command-line front-end: each subcommand writes machine-readable output
//! (to `--out` files or stdout) and a short human summary on stderr.
//!
//! Exit codes: 0 success, 1 domain or solver error, 2 failed verification,
//! 64 usage error.

mod args;
mod commands;

use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use clap::Parser;

use args::Cli;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Domain(thermopress::Error),
    Verification(String),
    Io(std::io::Error),
}

impl From<thermopress::Error> for CliError {
    fn from(e: thermopress::Error) -> Self {
        CliError::Domain(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

/// Machine-readable output of one run, written as `<out>.<ext>` or to stdout.
pub struct Artifact {
    pub ext: &'static str,
    pub body: String,
}

fn write_atomic(path: &Path, body: &str) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(body.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("THERMOPRESS_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("THERMOPRESS_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(e.to_string()))
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    let name = cli.command.name();
    let opts = cli.command.opts().clone().resolve(name)?;
    let (artifacts, summary, verdict) = commands::dispatch(name, &opts)?;
    match &opts.out {
        Some(prefix) => {
            for a in &artifacts {
                let mut path = prefix.clone().into_os_string();
                path.push(".");
                path.push(a.ext);
                write_atomic(Path::new(&path), &a.body)?;
            }
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            for a in &artifacts {
                stdout.write_all(a.body.as_bytes())?;
                if !a.body.ends_with('\n') {
                    stdout.write_all(b"\n")?;
                }
            }
        }
    }
    eprintln!("{summary}");
    verdict.map_err(CliError::Verification)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 64 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(m)) => {
            eprintln!("usage error: {m}");
            ExitCode::from(64)
        }
        Err(CliError::Domain(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(CliError::Io(e)) => {
            eprintln!("i/o error: {e}");
            ExitCode::from(1)
        }
        Err(CliError::Verification(m)) => {
            eprintln!("verification failed: {m}");
            ExitCode::from(2)
        }
    }
}
