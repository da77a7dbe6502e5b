//! `prophet`: reproducible runs of the single-sample prophet experiments.
//!
//! Exit codes: 0 success, 1 lemma violation found, 2 bad configuration or
//! input, 3 numeric failure.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "prophet", version, about = "Single-sample k-unit prophet inequality experiments")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Base seed; trial i uses stream i of this seed.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Monte Carlo trials per estimate.
    #[arg(long, global = true, default_value_t = 100_000)]
    pub trials: u64,
    /// Worker threads (0 = all cores). Never changes the output.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    /// Output file, written atomically. Standard output if omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Output format. Defaults to csv, except json for verify-lemmas.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Per-trial welfare scoring.
    #[arg(long, global = true, value_enum, default_value_t = EstimatorArg::Plain)]
    pub estimator: EstimatorArg,
    /// Two-sided confidence level of ci_lo / ci_hi.
    #[arg(long, global = true, default_value_t = 0.99)]
    pub ci_level: f64,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimatorArg {
    /// Realised welfare.
    Plain,
    /// Integrate out the last buyer's value in closed form.
    ConditionLast,
}

#[derive(Args, Debug, Clone)]
pub struct InstanceArgs {
    /// Preset (iid-uniform, iid-exponential, exp-heterogeneous, half-tight),
    /// a path to an instance JSON file, or inline instance JSON.
    #[arg(long, default_value = "iid-uniform")]
    pub instance: String,
    /// Number of buyers for presets.
    #[arg(long)]
    pub n: Option<usize>,
    /// Capacity; overrides the k of a JSON instance.
    #[arg(long)]
    pub k: Option<usize>,
    /// Base interval width of half-tight.
    #[arg(long, default_value_t = 1e-3)]
    pub delta: f64,
    /// Spike scale N of half-tight (spike N^2 with probability 1/N); defaults to n.
    #[arg(long)]
    pub spike_scale: Option<f64>,
}

#[derive(Args, Debug, Clone)]
#[group(multiple = false)]
pub struct PolicyArgs {
    /// Post the r-th largest sample (default r = k).
    #[arg(long)]
    pub r: Option<usize>,
    /// Post a fixed price.
    #[arg(long)]
    pub price: Option<f64>,
    /// Post the price with expected demand equal to this target.
    #[arg(long)]
    pub demand: Option<f64>,
    /// Policy JSON, e.g. '{"rule": "sample_order_statistic", "r": 3}'.
    #[arg(long)]
    pub policy: Option<String>,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Estimate the competitive ratio of one policy.
    Simulate {
        #[command(flatten)]
        instance: InstanceArgs,
        #[command(flatten)]
        policy: PolicyArgs,
    },
    /// Estimate the ratio of every order statistic r = 1..=r-max.
    SweepR {
        #[command(flatten)]
        instance: InstanceArgs,
        /// Largest r (default n).
        #[arg(long)]
        r_max: Option<usize>,
    },
    /// Closed-form bounds for each capacity.
    BoundTable {
        /// Comma-separated capacities.
        #[arg(long, value_delimiter = ',', required = true)]
        k: Vec<u64>,
    },
    /// Exhaustively check the rank lemmas on every scenario up to n-max pairs.
    VerifyLemmas {
        #[arg(long, default_value_t = 5)]
        n_max: usize,
    },
    /// Sample-price experiment on the spike family with threshold s.
    HardInstance {
        #[arg(long, default_value_t = 100)]
        k: usize,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        #[arg(long, default_value_t = 10_000)]
        n: usize,
        /// Spike scale N (spike N^2 with probability 1/N).
        #[arg(long, default_value_t = 1000.0)]
        spike_scale: f64,
        /// Comma-separated order statistics (default k). All share one seed.
        #[arg(long, value_delimiter = ',')]
        r: Vec<usize>,
    },
    /// Full-information Poisson fixed point for each capacity.
    PoissonOpt {
        /// Comma-separated capacities.
        #[arg(long, value_delimiter = ',', required = true)]
        k: Vec<u64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli.common, &cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("prophet: {e}");
            e.exit_code()
        }
    }
}
