//! `rho-cusum`: fluctuation tests for constant rank correlation on CSV data,
//! Monte Carlo power studies and Kolmogorov critical values.
//!
//! Exit codes: 0 when the command ran (whatever the test decided), 1 for
//! usage errors, 2 for data errors, 3 when the statistic is degenerate.

mod commands;
mod input;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rho_cusum::{Bandwidth, KernelKind};

use crate::input::ColumnRef;

#[derive(Parser, Debug)]
#[command(name = "rho-cusum", version, about = "Fluctuation tests for constant Spearman's rho")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Test a CSV time series for a constant rank correlation.
    Test(TestArgs),
    /// Run a Monte Carlo size/power study.
    Simulate(SimulateArgs),
    /// Print asymptotic critical values for the given levels.
    CriticalValues(CriticalValuesArgs),
}

fn parse_bandwidth(s: &str) -> Result<Bandwidth, String> {
    if s.eq_ignore_ascii_case("auto") {
        return Ok(Bandwidth::Auto);
    }
    match s.parse::<f64>() {
        Ok(b) if b.is_finite() && b >= 0.0 => Ok(Bandwidth::Fixed(b)),
        _ => Err(format!("expected 'auto' or a non-negative number, got '{s}'")),
    }
}

#[derive(Args, Debug, Clone)]
pub struct TestOptions {
    /// Kernel of the long-run variance estimator: bartlett, parzen or qs.
    #[arg(long, default_value = "bartlett")]
    pub kernel: KernelKind,
    /// Kernel bandwidth, or `auto` for floor(ln n).
    #[arg(long, default_value = "auto", value_parser = parse_bandwidth)]
    pub bandwidth: Bandwidth,
    /// Significance level.
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Args, Debug)]
pub struct TestArgs {
    /// CSV file: header row, then one observation per row in time order.
    pub input: PathBuf,
    #[command(flatten)]
    pub options: TestOptions,
    /// Data columns by 1-based position or header name, e.g. `1,3`.
    #[arg(long, value_delimiter = ',')]
    pub columns: Option<Vec<ColumnRef>>,
    /// Column holding row labels such as dates; excluded from the data.
    #[arg(long)]
    pub label_column: Option<ColumnRef>,
    /// Smallest prefix length entering the maximum.
    #[arg(long, default_value_t = 1)]
    pub min_k: usize,
    /// Also run the Pearson-correlation (BPC) test; bivariate data only.
    #[arg(long)]
    pub bpc: bool,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    /// Write k, rho_k, psi_k (and r_k, b_k with --bpc) to this CSV file.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Render the trace(s) as an SVG line chart.
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum BreakArg {
    None,
    Abrupt,
    Drift,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum QFormulaArg {
    Exact,
    Printed,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    /// Named scenario grid: table1, table2, table3 or outlier-sweep.
    #[arg(long)]
    pub preset: Option<String>,
    /// Sample size of a custom scenario.
    #[arg(long, default_value_t = 500, conflicts_with = "preset")]
    pub n: usize,
    /// Dimension of a custom scenario.
    #[arg(long, default_value_t = 2, conflicts_with = "preset")]
    pub d: usize,
    /// Degrees of freedom of the t innovations; `inf` for Gaussian.
    #[arg(long, default_value_t = 5.0, conflicts_with = "preset")]
    pub nu: f64,
    /// MA(1) coefficients, one per component (default all zero).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, conflicts_with = "preset")]
    pub theta: Option<Vec<f64>>,
    #[arg(long, default_value_t = 0.4, allow_hyphen_values = true, conflicts_with = "preset")]
    pub rho0: f64,
    /// Correlation after the break (default: rho0, i.e. the null).
    #[arg(long, allow_hyphen_values = true, conflicts_with = "preset")]
    pub rho1: Option<f64>,
    #[arg(long = "break", value_enum, default_value = "abrupt", conflicts_with = "preset")]
    pub break_profile: BreakArg,
    /// Break fraction for `--break abrupt`.
    #[arg(long, default_value_t = 0.5, conflicts_with = "preset")]
    pub tau: f64,
    /// Fixed outlier `position:v1,v2,...` (1-based position); repeatable.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "preset")]
    pub outlier: Vec<String>,
    /// Number of random (y, -y) outliers in the second half of each path.
    #[arg(long, default_value_t = 0, conflicts_with = "preset")]
    pub strong_outliers: usize,
    /// Mapping from target correlation to the innovation shape parameter.
    #[arg(long, value_enum, default_value = "exact")]
    pub q_formula: QFormulaArg,
    /// Replications per scenario.
    #[arg(long, default_value_t = 2000, value_parser = clap::value_parser!(u64).range(1..))]
    pub reps: u64,
    /// Master seed.
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Worker threads (default: all available cores).
    #[arg(long)]
    pub jobs: Option<usize>,
    #[command(flatten)]
    pub options: TestOptions,
    /// Output prefix; writes `<prefix>.csv` and `<prefix>.txt`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CriticalValuesArgs {
    /// Significance levels in (0, 1).
    #[arg(default_values_t = [0.10, 0.05, 0.01])]
    pub alpha: Vec<f64>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(commands::EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Test(args) => commands::test(&args),
        Command::Simulate(args) => commands::simulate(&args),
        Command::CriticalValues(args) => commands::critical_values(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
