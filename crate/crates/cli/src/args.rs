use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "thermopress", version, about = "Pressure of non-compact sets: experiments and checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classical pressure and equilibrium measure of a potential.
    Pressure(Opts),
    /// Pressure of a measure family (`--family`) for the potential `--psi`.
    Star(Opts),
    /// Level-set spectrum of `--phi`, or the Lyapunov spectrum of `--system mp:<s>`.
    Spectrum(Opts),
    /// Root of `t -> P(t phi)` for a negative potential.
    BowenRoot(Opts),
    /// Cover-based pressure of a finite set of periodic points (`--point`).
    Pp(Opts),
    /// Irregular point for `--phi` with its certificate.
    Synthesize(Opts),
    /// North-South map closed forms and orbit averages.
    Ns(Opts),
    /// Word counts and entropy of a beta-shift.
    Betashift(Opts),
    /// Pressure of finite truncations of a countable-state shift.
    Truncate(Opts),
    /// Full property suite.
    Verify(Opts),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Pressure(_) => "pressure",
            Command::Star(_) => "star",
            Command::Spectrum(_) => "spectrum",
            Command::BowenRoot(_) => "bowen-root",
            Command::Pp(_) => "pp",
            Command::Synthesize(_) => "synthesize",
            Command::Ns(_) => "ns",
            Command::Betashift(_) => "betashift",
            Command::Truncate(_) => "truncate",
            Command::Verify(_) => "verify",
        }
    }

    pub fn opts(&self) -> &Opts {
        match self {
            Command::Pressure(o)
            | Command::Star(o)
            | Command::Spectrum(o)
            | Command::BowenRoot(o)
            | Command::Pp(o)
            | Command::Synthesize(o)
            | Command::Ns(o)
            | Command::Betashift(o)
            | Command::Truncate(o)
            | Command::Verify(o) => o,
        }
    }
}

/// Options shared by every subcommand. A job file supplies the same fields
/// in JSON (kebab-case keys, list values as strings); flags win.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct Opts {
    /// full<N>, golden, a JSON file with alphabet and transition, or mp:<s>.
    #[arg(long)]
    pub system: Option<String>,
    /// Observable or potential: one value per symbol, one per pair
    /// (row-major), or a JSON potential file.
    #[arg(long)]
    pub phi: Option<String>,
    /// Second potential, same formats as `--phi`; zero when omitted.
    #[arg(long)]
    pub psi: Option<String>,
    /// Comma-separated levels or `lo:hi:count`.
    #[arg(long)]
    pub alpha: Option<String>,
    /// Comma-separated tilts or `lo:hi:count`.
    #[arg(long = "q-grid")]
    pub q_grid: Option<String>,
    /// Word length, cover depth or tree depth, depending on the command.
    #[arg(long)]
    pub depth: Option<usize>,
    /// Seed for every random choice.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output path prefix; machine-readable output goes to stdout without it.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON job file; flags given on the command line win.
    #[arg(long)]
    #[serde(skip)]
    pub job: Option<PathBuf>,
    /// all, empty, level, irregular, periodic:<word> or bernoulli:<p,..>.
    #[arg(long)]
    pub family: Option<String>,
    /// Comma-separated periodic words.
    #[arg(long)]
    pub point: Option<String>,
    /// Base of the beta-shift (default: golden ratio).
    #[arg(long)]
    pub beta: Option<f64>,
    /// circle-minus-s, north or circle-minus-ns.
    #[arg(long)]
    pub set: Option<String>,
    /// Comma-separated truncation sizes.
    #[arg(long)]
    pub sizes: Option<String>,
    /// Name of the subcommand the job file was written for.
    #[arg(skip)]
    pub experiment: Option<String>,
}

macro_rules! merge_fields {
    ($flags:ident, $job:ident; $($f:ident),*) => {
        Opts { $($f: $flags.$f.or($job.$f),)* job: None }
    };
}

impl Opts {
    /// Fill unset flags from the job file, if one was given.
    pub fn resolve(self, command: &str) -> Result<Opts, CliError> {
        let Some(path) = self.job.clone() else {
            return Ok(self);
        };
        let job = read_job(&path)?;
        if let Some(e) = &job.experiment {
            if e != command {
                return Err(CliError::Usage(format!("job file is for `{e}`, not `{command}`")));
            }
        }
        let flags = self;
        Ok(merge_fields!(flags, job; system, phi, psi, alpha, q_grid, depth, seed, out, family, point, beta, set, sizes, experiment))
    }
}

fn read_job(path: &Path) -> Result<Opts, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

pub fn parse_list(s: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() == 3 {
        let lo = parse_f64(parts[0])?;
        let hi = parse_f64(parts[1])?;
        let count: usize = parts[2]
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("bad count in {s:?}")))?;
        if count < 2 {
            return Err(CliError::Usage(format!("range {s:?} needs at least two points")));
        }
        return Ok((0..count).map(|k| lo + (hi - lo) * k as f64 / (count - 1) as f64).collect());
    }
    s.split(',').map(parse_f64).collect()
}

fn parse_f64(s: &str) -> Result<f64, CliError> {
    s.trim().parse().map_err(|_| CliError::Usage(format!("not a number: {s:?}")))
}
