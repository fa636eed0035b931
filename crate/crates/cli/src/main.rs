//! `mixhist` command-line tool.

mod commands;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mixhist::{FitConfig, LogBase};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
    Internal(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Data(m) => write!(f, "data error: {m}"),
            CliError::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

impl From<mixhist::Error> for CliError {
    fn from(e: mixhist::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

#[derive(Parser, Debug)]
#[command(name = "mixhist", version, about = "Histogram-based (conditional) mutual information on mixed data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct FitArgs {
    /// Multiplicity at which a repeated value becomes a discrete point.
    #[arg(long, default_value_t = 5)]
    pub t: usize,
    /// Maximum number of greedy refinement iterations.
    #[arg(long, default_value_t = 5)]
    pub imax: usize,
    #[arg(long = "kinit-factor", default_value_t = 20.0)]
    pub kinit_factor: f64,
    #[arg(long = "kmax-factor", default_value_t = 5.0)]
    pub kmax_factor: f64,
    /// Log base of the bin budgets: e, 2 or 10.
    #[arg(long = "log-base-k", default_value = "e")]
    pub log_base_k: String,
}

impl FitArgs {
    pub fn config(&self) -> Result<FitConfig, CliError> {
        let log_base: LogBase = self
            .log_base_k
            .parse()
            .map_err(|e: mixhist::Error| CliError::Usage(e.to_string()))?;
        let cfg = FitConfig {
            i_max: self.imax,
            t: self.t,
            k_init_factor: self.kinit_factor,
            k_max_factor: self.kmax_factor,
            log_base,
        };
        cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TestKind {
    Chi2,
    Sc,
}

#[derive(Args, Debug, Clone)]
pub struct Groups {
    /// Columns of X (comma-separated or repeated).
    #[arg(long, value_delimiter = ',', required = true)]
    pub x: Vec<String>,
    #[arg(long, value_delimiter = ',', required = true)]
    pub y: Vec<String>,
    /// Conditioning columns; empty for mutual information.
    #[arg(long, value_delimiter = ',')]
    pub z: Vec<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Estimate I(X;Y|Z) in nats from a CSV file.
    Estimate {
        input: PathBuf,
        #[command(flatten)]
        groups: Groups,
        #[command(flatten)]
        fit: FitArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Test X ⊥ Y | Z.
    Citest {
        input: PathBuf,
        #[command(flatten)]
        groups: Groups,
        #[arg(long, value_enum, default_value_t = TestKind::Chi2)]
        test: TestKind,
        #[arg(long, default_value_t = 0.01)]
        alpha: f64,
        #[command(flatten)]
        fit: FitArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Learn a PC-stable skeleton from a CSV file or a generated scenario.
    Discover {
        /// CSV path, or a scenario name such as `network`.
        input: String,
        /// Rows to generate when `input` is a scenario.
        #[arg(long, default_value_t = 10_000)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = TestKind::Chi2)]
        test: TestKind,
        #[arg(long, default_value_t = 0.01)]
        alpha: f64,
        /// Largest conditioning-set size.
        #[arg(long)]
        max_level: Option<usize>,
        #[command(flatten)]
        fit: FitArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Write a synthetic scenario as CSV.
    Datagen {
        scenario: String,
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of conditioning variables (exp6).
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Mean and MSE of the estimator against ground truth over replicates.
    Benchmark {
        scenario: String,
        /// Sample sizes: `100..1000` (step = start), `100..1000:50`, or `200,500,1000`.
        #[arg(long, default_value = "100..1000")]
        n: String,
        #[arg(long, default_value_t = 100)]
        reps: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[command(flatten)]
        fit: FitArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
}

fn run(cli: Cli, argv: Vec<String>) -> Result<(), CliError> {
    match cli.command {
        Command::Estimate { input, groups, fit, output } => {
            commands::estimate(&argv, &input, &groups, &fit, &output)
        }
        Command::Citest { input, groups, test, alpha, fit, output } => {
            commands::citest(&argv, &input, &groups, test, alpha, &fit, &output)
        }
        Command::Discover { input, n, seed, test, alpha, max_level, fit, output } => {
            commands::discover(&argv, &input, n, seed, test, alpha, max_level, &fit, &output)
        }
        Command::Datagen { scenario, n, seed, k, output } => {
            commands::datagen(&scenario, n, seed, k, &output)
        }
        Command::Benchmark { scenario, n, reps, seed, k, fit, output } => {
            commands::benchmark(&argv, &scenario, &n, reps, seed, k, &fit, &output)
        }
    }
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match std::panic::catch_unwind(|| run(cli, argv)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("mixhist: {e}");
            ExitCode::from(e.exit_code())
        }
        Err(_) => ExitCode::from(3),
    }
}
