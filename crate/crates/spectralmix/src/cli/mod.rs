//! The `spectralmix` command-line tool.
//!
//! ```text
//! spectralmix <sft-bench|learn-mixture|robust-mean|moments> CONFIG.toml
//!     [--seed-base N] [--trials N] [--out PATH] [--format csv|json] [--jobs N]
//! ```
//!
//! Exit codes: 0 on completion, 1 on i/o failures, 2 on invalid
//! configurations, 3 on schedule or feasibility errors.

pub mod config;
pub mod report;
pub mod run;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;

use config::{Format, IoConfig};
pub use run::{CliError, Outcome, RunOptions};

#[derive(Debug, Parser)]
#[command(name = "spectralmix", version, about = "Sparse Fourier transform experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Recovery error and query counts of the sparse Fourier transforms.
    SftBench(CommonArgs),
    /// Learn mixtures of translated slow-Fourier-decay distributions.
    LearnMixture(CommonArgs),
    /// Mean estimation under noise-oblivious contamination.
    RobustMean(CommonArgs),
    /// Moment-tensor closeness search and closed-form checks.
    Moments(CommonArgs),
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// Experiment configuration (TOML).
    config: PathBuf,
    /// First seed; with --trials, runs seeds seed-base..seed-base+trials.
    #[arg(long)]
    seed_base: Option<u64>,
    /// Number of seeds.
    #[arg(long)]
    trials: Option<usize>,
    /// Report path (rows are appended); stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Worker threads.
    #[arg(long, env = "SPECTRALMIX_JOBS")]
    jobs: Option<usize>,
}

fn load<T: DeserializeOwned>(path: &PathBuf) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)?;
    config::parse(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// Command-line values take precedence over the configuration's `[io]` table.
fn resolve_io(io: &mut IoConfig, args: &CommonArgs) -> (Option<PathBuf>, Format) {
    if args.out.is_some() {
        io.out = args.out.clone();
    }
    if args.format.is_some() {
        io.format = args.format;
    }
    (io.out.clone(), io.format.unwrap_or_default())
}

fn execute(command: Command) -> Result<(), CliError> {
    let (outcome, out, format) = match command {
        Command::SftBench(a) => {
            let mut c: config::SftBenchConfig = load(&a.config)?;
            let (out, format) = resolve_io(&mut c.io, &a);
            (run::sft_bench(&c, &options(&a))?, out, format)
        }
        Command::LearnMixture(a) => {
            let mut c: config::LearnMixtureConfig = load(&a.config)?;
            let (out, format) = resolve_io(&mut c.io, &a);
            (run::learn_mixture(&c, &options(&a))?, out, format)
        }
        Command::RobustMean(a) => {
            let mut c: config::RobustMeanCliConfig = load(&a.config)?;
            let (out, format) = resolve_io(&mut c.io, &a);
            (run::robust_mean(&c, &options(&a))?, out, format)
        }
        Command::Moments(a) => {
            let mut c: config::MomentsConfig = load(&a.config)?;
            let (out, format) = resolve_io(&mut c.io, &a);
            (run::moments(&c, &options(&a))?, out, format)
        }
    };
    report::write_report(&outcome.table, &outcome.meta, out.as_deref(), format)?;
    Ok(())
}

fn options(a: &CommonArgs) -> RunOptions {
    RunOptions { seed_base: a.seed_base, trials: a.trials, jobs: a.jobs }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
