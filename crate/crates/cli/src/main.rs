use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use cannonball::config::{OutputFormat, RunConfig};
use cannonball::exact::{DEFAULT_MEMORY_BUDGET, DEFAULT_SCALE_BITS};
use cannonball::Error;

mod commands;

/// Distance from square pyramidal numbers to the nearest square: exact
/// terms, averages, twisted sums, equidistribution and Dirichlet series.
#[derive(Debug, Parser)]
#[command(name = "cannonball", version)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// Table encoding on stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Binary sequence cache; `seq` writes it, other commands read it when it
    /// covers the range they need.
    #[arg(long, global = true, env = "CANNONBALL_CACHE")]
    cache: Option<PathBuf>,

    /// Worker threads (defaults to the available parallelism).
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Fixed-point bits for fractional parts of square roots.
    #[arg(long = "precision-bits", global = true, default_value_t = DEFAULT_SCALE_BITS)]
    precision_bits: u32,

    /// Byte budget for the large tables.
    #[arg(long = "memory-budget", global = true, default_value_t = DEFAULT_MEMORY_BUDGET)]
    memory_budget: u64,

    /// Emit gnuplot two-column data instead of a table.
    #[arg(long, global = true)]
    plot: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Terms a_n (or a_n with b_n) for n in [start, x].
    Seq(commands::SeqArgs),
    /// A(x) or A(b, q, x) against the main term.
    Avg(commands::AvgArgs),
    /// Character-twisted sums of a_n.
    Twist(commands::TwistArgs),
    /// Discrepancy of {sqrt(P_n)} with Erdős–Turán or second-derivative bounds.
    Equi(commands::EquiArgs),
    /// Zeta values, truncated series, residue probes and the Cesàro sum.
    Series(commands::SeriesArgs),
    /// Log-log least squares on two columns of an emitted table.
    Fit(commands::FitArgs),
    /// Run the acceptance suite.
    Verify(commands::VerifyArgs),
}

const EXIT_CRITERION: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_RESOURCE: u8 = 3;
const EXIT_FORMAT: u8 = 4;

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::Resource { .. }) => EXIT_RESOURCE,
        Some(Error::Format { .. } | Error::Csv(_) | Error::Json(_)) => EXIT_FORMAT,
        _ => EXIT_USAGE,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = RunConfig {
        cache_path: cli.global.cache.clone(),
        memory_budget_bytes: cli.global.memory_budget,
        worker_count: cli.global.workers.unwrap_or(RunConfig::default().worker_count),
        output_format: cli.global.format.into(),
        precision_bits: cli.global.precision_bits,
    };
    match commands::run(&cli.command, &config, cli.global.plot) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_CRITERION),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
