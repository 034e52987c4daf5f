//! Command-line front end: argument parsing, thread pool setup and exit codes.

mod commands;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nonfloquet_core::diagnostics::config::{parse_grid, parse_value, OutputFormat, RunConfig};
use nonfloquet_core::diagnostics::output::write_atomic;
use nonfloquet_core::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "NONFLOQUET_THREADS";

#[derive(Parser, Debug)]
#[command(name = "nonfloquet", version, about = "Spectra, windings and frequency-space diagnostics of driven non-Hermitian chains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Quasienergies and localization factors of one model
    Spectrum(Common),
    /// Open-chain spectra and edge-mode flags over a mu0 grid
    Sweep(Common),
    /// Spectra and localization factors over starting points of the period
    PhaseStudy(Common),
    /// Winding numbers of a two-band momentum-space chain
    Winding(Common),
    /// Sambe spectrum at one momentum, or the zero gap over a mu0 grid
    Freqspace(Common),
    /// Eigenstates of the static asymmetric Stark chain
    Stark(Common),
    /// Pseudo-Hermiticity and generalized-shift checks for the catalog deformation
    DeformCheck(Common),
    /// Two-band step-quench spectra over the zone
    Quench(QuenchArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Model file (JSON)
    #[arg(long, value_name = "PATH")]
    model: Option<PathBuf>,
    /// Output file; standard output when absent
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Midpoint slices per period
    #[arg(long, value_name = "N")]
    slices: Option<usize>,
    /// Momentum points
    #[arg(long, value_name = "N")]
    nk: Option<usize>,
    /// Sambe cutoff M
    #[arg(long, value_name = "M")]
    cutoff: Option<usize>,
    /// Single mu0 override
    #[arg(long, value_name = "X", allow_hyphen_values = true, conflicts_with = "mu0_grid")]
    mu0: Option<String>,
    /// mu0 grid as A:B:N or a comma list
    #[arg(long, value_name = "A:B:N", allow_hyphen_values = true)]
    mu0_grid: Option<String>,
    /// Starting points as A:B:N or a comma list; values accept a `pi` suffix
    #[arg(long, value_name = "A:B:N", allow_hyphen_values = true)]
    phi_grid: Option<String>,
    /// Drive frequency override
    #[arg(long, value_name = "X")]
    omega: Option<String>,
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
}

#[derive(Args, Debug, Clone)]
struct QuenchArgs {
    #[command(flatten)]
    common: Common,
    /// Hopping asymmetry added to the first step (J1 + r, J2 − r)
    #[arg(long, value_name = "X", allow_hyphen_values = true)]
    r: Option<String>,
}

/// Which output a subcommand produces when `--format` is absent.
#[derive(Clone, Copy)]
enum Kind {
    Table,
    Report,
}

impl Common {
    fn to_config(&self, default: Kind) -> Result<RunConfig, Error> {
        let base = RunConfig::default();
        let mu0 = match (&self.mu0, &self.mu0_grid) {
            (Some(x), _) => vec![parse_value(x)?],
            (None, Some(g)) => parse_grid(g)?,
            (None, None) => Vec::new(),
        };
        let format = match (self.format, default) {
            (Some(FormatArg::Csv), _) | (None, Kind::Table) => OutputFormat::Csv,
            (Some(FormatArg::Json), _) | (None, Kind::Report) => OutputFormat::Json,
        };
        let config = RunConfig {
            model_path: self.model.clone(),
            out: self.out.clone(),
            format,
            slices: self.slices.unwrap_or(base.slices),
            nk: self.nk.unwrap_or(base.nk),
            cutoff: self.cutoff.unwrap_or(base.cutoff),
            mu0,
            phis: match &self.phi_grid {
                Some(g) => parse_grid(g)?,
                None => Vec::new(),
            },
            omega: self.omega.as_deref().map(parse_value).transpose()?,
            seed: self.seed.unwrap_or(base.seed),
        };
        config.validate()?;
        Ok(config)
    }

}

fn thread_pool() -> Result<rayon::ThreadPool, Error> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| Error::Config(format!("{THREADS_ENV} must be a positive integer, got {v:?}")))?;
        builder = builder.num_threads(n);
    }
    builder
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))
}

fn execute(command: Command) -> Result<(), Error> {
    use commands as c;
    let (config, text) = match command {
        Command::Spectrum(a) => {
            let cfg = a.to_config(Kind::Table)?;
            let t = c::spectrum(&cfg)?;
            (cfg, t)
        }
        Command::Sweep(a) => {
            let cfg = a.to_config(Kind::Table)?;
            let t = c::sweep(&cfg)?;
            (cfg, t)
        }
        Command::PhaseStudy(a) => {
            let cfg = a.to_config(Kind::Table)?;
            let t = c::phase_study(&cfg)?;
            (cfg, t)
        }
        Command::Winding(a) => {
            let cfg = a.to_config(Kind::Report)?;
            let t = c::winding(&cfg)?;
            (cfg, t)
        }
        Command::Freqspace(a) => {
            let cfg = a.to_config(Kind::Table)?;
            let t = c::freqspace(&cfg, a.mu0_grid.is_some())?;
            (cfg, t)
        }
        Command::Stark(a) => {
            let cfg = a.to_config(Kind::Table)?;
            let t = c::stark(&cfg)?;
            (cfg, t)
        }
        Command::DeformCheck(a) => {
            let cfg = a.to_config(Kind::Report)?;
            let t = c::deform_check(&cfg)?;
            (cfg, t)
        }
        Command::Quench(a) => {
            let cfg = a.common.to_config(Kind::Report)?;
            let r = a.r.as_deref().map(parse_value).transpose()?;
            let nk = a.common.nk.unwrap_or(c::QUENCH_DEFAULT_NK);
            let t = c::quench(&cfg, r, nk)?;
            (cfg, t)
        }
    };
    match &config.out {
        Some(path) => write_atomic(path, text.as_bytes()),
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

/// Parses `argv` (program name first), runs the command and returns the exit code.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let result = thread_pool().and_then(|pool| pool.install(|| execute(cli.command)));
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_config() {
                EXIT_CONFIG
            } else {
                EXIT_NUMERICAL
            }
        }
    }
}
