use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(
    name = "feedback",
    version,
    about = "Asymptotic limits and simulations for finite-rate feedback codebooks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Limits x_r^-, x_r^+ and the matching c_min, c_max for one (beta, r).
    Asymptotic(AsymptoticArgs),
    /// Limits over a list of feedback rates.
    Sweep(SweepArgs),
    /// Monte Carlo estimate of c_min,n or c_max,n.
    Simulate(SimulateArgs),
    /// Max-min chordal distance codebook design.
    Design(DesignArgs),
    /// Empirical large-deviation rates of the conditional CDF.
    Ldp(LdpArgs),
}

impl Command {
    pub fn common(&self) -> &Common {
        match self {
            Command::Asymptotic(a) => &a.common,
            Command::Sweep(a) => &a.common,
            Command::Simulate(a) => &a.common,
            Command::Design(a) => &a.common,
            Command::Ldp(a) => &a.common,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Command::Asymptotic(_) => "asymptotic",
            Command::Sweep(_) => "sweep",
            Command::Simulate(_) => "simulate",
            Command::Design(_) => "design",
            Command::Ldp(_) => "ldp",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Defaults to csv for sweep and ldp, json otherwise.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write the record here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct AsymptoticArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub beta: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub r: f64,
    /// Noise variance for the throughput columns.
    #[arg(long)]
    pub sigma2: Option<f64>,
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepMode {
    Min,
    Max,
    Both,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SweepArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub beta: f64,
    /// Comma-separated rates.
    #[arg(
        long,
        value_delimiter = ',',
        allow_negative_numbers = true,
        conflicts_with = "r_grid"
    )]
    pub r: Vec<f64>,
    /// `START,STOP,COUNT`: COUNT evenly spaced rates.
    #[arg(long, value_delimiter = ',', num_args = 1)]
    pub r_grid: Vec<String>,
    #[arg(long, value_enum, default_value_t = SweepMode::Both)]
    pub mode: SweepMode,
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Min,
    Max,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Direct,
    Spectral,
    Cdf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CodebookArg {
    Random,
    Designed,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SimulateArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub m: usize,
    #[arg(long = "R-fb", visible_alias = "r-fb")]
    pub r_fb: u32,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Min)]
    pub mode: ModeArg,
    #[arg(long, value_enum, default_value_t = Method::Direct)]
    pub method: Method,
    /// `designed` uses one codebook from the design command for every trial.
    #[arg(long, value_enum, default_value_t = CodebookArg::Random)]
    pub codebook: CodebookArg,
    /// Design iterations for `--codebook designed`.
    #[arg(long, default_value_t = 300)]
    pub iterations: usize,
    /// Tilted samples per grid node for `--method cdf`.
    #[arg(long, default_value_t = 2000)]
    pub samples: usize,
    /// Cap on 2^R_fb * n * trials for the enumerating methods.
    #[arg(long, default_value_t = feedback_core::montecarlo::simulate::DEFAULT_BUDGET)]
    pub budget: f64,
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DesignArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long = "K", visible_alias = "k")]
    pub k: usize,
    #[arg(long, default_value_t = 500)]
    pub iterations: usize,
    /// Codebook file to write.
    #[arg(long)]
    pub codebook_out: PathBuf,
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct LdpArgs {
    #[arg(long)]
    pub beta: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub x: f64,
    /// Comma-separated system sizes.
    #[arg(long, value_delimiter = ',', required = true)]
    pub n_list: Vec<usize>,
    #[arg(long, default_value_t = 4000)]
    pub samples: usize,
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
}
