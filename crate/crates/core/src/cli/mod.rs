//! The experiment driver behind the `circlespec` binary.
//!
//! Every command reads a [`RunConfig`] (from `--config`, overridden by flags),
//! writes tab-separated series into the output directory and finishes with a
//! `summary.toml` ([`RunSummary`]).
//!
//! Exit codes: 0 success, 1 I/O or other failure, 2 invalid configuration or
//! input, 3 completeness failure of the root finder, 4 failed self-check.

mod commands;
pub mod config;
pub mod report;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use commands::interior_minimum;
pub use config::{AlphaSpec, PositionsSpec, RunConfig};
pub use report::{read_roots, read_tsv, write_roots, RunSummary};

use crate::error::{Error, Result};
use crate::model::Topology;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_COMPLETENESS: i32 = 3;
pub const EXIT_SELF_CHECK: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "circlespec", version, about = "Spectra and spacing statistics of rings with scale-free point interactions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute the first N roots and write roots.tsv.
    Spectrum(Common),
    /// Spacing statistics of computed or loaded roots.
    Analyze(Common),
    /// Distances to the Wigner and GOE laws over a range of couplings.
    Sweep(Common),
    /// Compare exact doublets with the weak-coupling prediction.
    PerturbCheck(Common),
    /// Regenerate the exact GOE spacing table.
    RmtTable(Common),
    /// Quick internal consistency checks.
    Selftest(Common),
}

#[derive(Debug, Args)]
struct Common {
    /// Configuration file (TOML, keys as in the summary's [config] table).
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    output: Option<PathBuf>,
    /// Number of roots, counted with multiplicity.
    #[arg(long)]
    roots: Option<usize>,
    /// A value, a comma-separated list, or start:stop:step.
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    topology: Option<Topology>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Read roots from a roots.tsv instead of solving.
    #[arg(long)]
    roots_file: Option<PathBuf>,
    /// Levels dropped from the bottom before statistics.
    #[arg(long)]
    drop: Option<usize>,
    #[arg(long)]
    bin_width: Option<f64>,
    /// Doublets compared by perturb-check.
    #[arg(long)]
    doublets: Option<usize>,
    /// Convergence target of the GOE table generator.
    #[arg(long)]
    accuracy: Option<f64>,
}

impl Common {
    fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::read(path)?,
            None => RunConfig::default(),
        };
        if let Some(v) = &self.output {
            cfg.output = v.clone();
        }
        if let Some(v) = self.roots {
            cfg.roots = v;
        }
        if let Some(v) = &self.alpha {
            cfg.alpha = AlphaSpec::parse(v)?;
        }
        if let Some(v) = self.n {
            cfg.n = v;
        }
        if let Some(v) = self.topology {
            cfg.topology = v;
        }
        if let Some(v) = self.threads {
            cfg.threads = Some(v);
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = &self.roots_file {
            cfg.roots_file = Some(v.clone());
        }
        if let Some(v) = self.drop {
            cfg.drop = v;
        }
        if let Some(v) = self.bin_width {
            cfg.bin_width = Some(v);
        }
        if let Some(v) = self.doublets {
            cfg.doublets = v;
        }
        if let Some(v) = self.accuracy {
            cfg.accuracy = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Exit code for an error.
pub fn exit_code(error: &Error) -> i32 {
    match error {
        Error::Config(_) | Error::Domain(_) | Error::Usage(_) | Error::Parse { .. } | Error::InsufficientData(_) => {
            EXIT_CONFIG
        }
        Error::Completeness { .. } => EXIT_COMPLETENESS,
        Error::SelfCheck(_) => EXIT_SELF_CHECK,
        Error::Io { .. } => EXIT_FAILURE,
    }
}

/// Parses the command line and runs the command; returns the configuration and summary.
pub fn execute<I, T>(args: I) -> Result<RunSummary>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| Error::Usage(e.to_string()))?;
    let (common, command): (&Common, fn(&RunConfig) -> Result<RunSummary>) = match &cli.command {
        Command::Spectrum(c) => (c, commands::spectrum),
        Command::Analyze(c) => (c, commands::analyze),
        Command::Sweep(c) => (c, commands::sweep),
        Command::PerturbCheck(c) => (c, commands::perturb_check),
        Command::RmtTable(c) => (c, commands::rmt_table),
        Command::Selftest(c) => (c, commands::selftest),
    };
    let cfg = common.resolve()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cfg.threads {
        builder = builder.num_threads(t);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Config(format!("cannot start {:?} worker threads: {e}", cfg.threads)))?;
    let summary = pool.install(|| command(&cfg))?;
    let path = cfg.output.join("summary.toml");
    summary.write(&path)?;

    let failed: Vec<&str> = summary.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
    if !failed.is_empty() {
        return Err(Error::SelfCheck(failed.join("; ")));
    }
    if let Some(t) = summary.table.as_ref().filter(|t| !t.self_check_passed) {
        return Err(Error::SelfCheck(format!(
            "table distance to Wigner {:.6e} is not within the reference tolerance of {:.4e}",
            t.delta_wigner, t.reference
        )));
    }
    Ok(summary)
}

/// Runs the command line and maps the outcome to an exit code, reporting errors on stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    if let Err(e) = Cli::try_parse_from(&args) {
        // help and version are reported as errors by clap but exit cleanly
        let _ = e.print();
        return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
    }
    match execute(args) {
        Ok(_) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
