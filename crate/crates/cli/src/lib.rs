//! Command-line front end: runs experiments, writes CSV/JSON/SVG artifacts,
//! compares the modes and drives the oracle cross-checks.

pub mod artifacts;
pub mod commands;
pub mod config;
pub mod error;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use toyworld_core::experiment::ExperimentMode;
use toyworld_core::par::Execution;

use crate::config::{ExperimentConfig, Format, Overrides};
use crate::error::{CliError, CliResult, EXIT_BAD_ARGS, EXIT_OK};

#[derive(Debug, Parser)]
#[command(name = "toyworld", version, about = "Life expectancy of a being in a lattice scalar-field toy universe")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the selected modes and cutoffs and write their artifacts.
    Run(ExperimentArgs),
    /// Run all three modes and report whether the ordering claims hold.
    ReproducePaper(ExperimentArgs),
    /// Run every oracle cross-check.
    Verify(VerifyArgs),
    /// Print the spectrum of M and the half-line vector as JSON.
    Spectrum(ExperimentArgs),
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// quantum1, realquantum1 or quantum1-sp (repeatable; default all).
    #[arg(long, value_parser = parse_mode)]
    pub mode: Vec<ExperimentMode>,
    /// Cutoff N, the number of particle-number levels (repeatable).
    #[arg(long = "N", short = 'N')]
    pub cutoff: Vec<usize>,
    #[arg(long = "a2m2-half", allow_hyphen_values = true)]
    pub a2m2_half: Option<f64>,
    #[arg(long)]
    pub dim: Option<u32>,
    /// Maximum number of steps in each survival curve.
    #[arg(long)]
    pub horizon: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_parser = parse_format)]
    pub format: Option<Format>,
    /// Also write an SVG heatmap of each transition matrix.
    #[arg(long)]
    pub plot: bool,
    /// Death level for the basis modes, 1-based (level 1 is the vacuum).
    #[arg(long = "death-state")]
    pub death_state: Option<usize>,
    /// Plain `key = value` file; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Disable the worker pool.
    #[arg(long)]
    pub sequential: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Shift η on the closed-form side of the vertex check (negative control).
    #[arg(long = "perturb-eta", default_value_t = 0.0, allow_hyphen_values = true)]
    pub perturb_eta: f64,
    /// Directory for verify.json.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub sequential: bool,
}

fn parse_mode(s: &str) -> Result<ExperimentMode, String> {
    s.parse()
}

fn parse_format(s: &str) -> Result<Format, String> {
    s.parse()
}

fn execution(sequential: bool) -> Execution {
    if sequential {
        Execution::Sequential
    } else {
        Execution::default()
    }
}

impl ExperimentArgs {
    pub fn config(&self) -> CliResult<ExperimentConfig> {
        let flags = Overrides {
            modes: (!self.mode.is_empty()).then(|| self.mode.clone()),
            cutoffs: (!self.cutoff.is_empty()).then(|| self.cutoff.clone()),
            half_bare_mass_sq: self.a2m2_half,
            dimension: self.dim,
            horizon: self.horizon,
            death_level: self.death_state,
            out: self.out.clone(),
            format: self.format,
            plot: self.plot.then_some(true),
        };
        ExperimentConfig::layered(self.config.as_deref(), flags)
    }
}

/// Executes a parsed command, writing human output to `stdout`.
pub fn execute(cli: Cli, stdout: &mut dyn Write) -> CliResult<()> {
    let io = |e| CliError::io("<stdout>", e);
    match cli.command {
        Command::Run(args) => {
            let cfg = args.config()?;
            let summaries = commands::run(&cfg, execution(args.sequential))?;
            for s in summaries {
                writeln!(
                    stdout,
                    "{} N={}: mean <s> = {:.6} over {} initial states",
                    s.mode,
                    s.cutoff,
                    s.mean_expectancy,
                    s.life_expectancy.len()
                )
                .map_err(io)?;
            }
            writeln!(stdout, "wrote {}", cfg.out.display()).map_err(io)?;
        }
        Command::ReproducePaper(args) => {
            let mut cfg = args.config()?;
            // the full sweep always includes heatmaps
            cfg.plot = true;
            let result = commands::reproduce_paper(&cfg, execution(args.sequential));
            if let Ok(text) = std::fs::read_to_string(cfg.out.join("report.txt")) {
                write!(stdout, "{text}").map_err(io)?;
            }
            result?;
        }
        Command::Verify(args) => {
            let (outcomes, text) = commands::verify(args.perturb_eta, execution(args.sequential), args.out.as_deref())?;
            write!(stdout, "{text}").map_err(io)?;
            let failed = outcomes.iter().filter(|o| !o.passed).count();
            if failed > 0 {
                return Err(CliError::Assertion(format!("{failed} oracle checks failed")));
            }
        }
        Command::Spectrum(args) => {
            let cfg = args.config()?;
            let spectra = commands::spectra(&cfg)?;
            let text = serde_json::to_string_pretty(&spectra)?;
            writeln!(stdout, "{text}").map_err(io)?;
        }
    }
    Ok(())
}

/// Parses `args`, runs, reports errors as JSON on stderr and returns the
/// process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_BAD_ARGS } else { EXIT_OK };
            let _ = e.print();
            if code != EXIT_OK {
                let err = CliError::BadArgs(e.kind().to_string());
                eprintln!("{}", err.to_json());
            }
            return code;
        }
    };
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match execute(cli, &mut lock) {
        Ok(()) => EXIT_OK,
        // e.g. piped into `head`
        Err(CliError::Io { source, .. }) if source.kind() == std::io::ErrorKind::BrokenPipe => EXIT_OK,
        Err(e) => {
            let _ = lock.flush();
            eprintln!("{}", e.to_json());
            e.exit_code()
        }
    }
}
