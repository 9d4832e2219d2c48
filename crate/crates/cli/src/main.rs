//! `polymer`: experiments on polymer models and the bipartite hard-core model.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use polymer_core::{GrowthFn, SamplerBackend, DEFAULT_ENUMERATION_CAP};
use thiserror::Error;

use crate::output::Format;

/// Seed used when `--seed` is not given.
pub const DEFAULT_SEED: u64 = 20_241_016;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] polymer_core::Error),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("{0}")]
    Usage(String),
}

impl CliError {
    /// 0 ok, 2 precondition failure, 3 parse or I/O error (including
    /// malformed model and graph files), 1 anything else.
    pub fn exit_code(&self) -> u8 {
        use polymer_core::Error as E;
        match self {
            CliError::Core(E::Precondition { .. }) => 2,
            CliError::Core(E::Parse { .. } | E::InvalidModel(_) | E::Graph(_))
            | CliError::Io { .. }
            | CliError::Json(_)
            | CliError::Csv(_) => 3,
            _ => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "polymer",
    version,
    about = "Clique dynamics, partition function estimates and hard-core experiments"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Root seed; every random stream is derived from it.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,

    /// Worker threads. Results do not depend on this.
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,

    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Largest polymer count handed to exact enumeration.
    #[arg(long, global = true, default_value_t = DEFAULT_ENUMERATION_CAP)]
    pub cap: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the weight conditions for a model.
    /// CSV columns: condition,holds,worst,min_slack,steps
    CheckConditions(CheckConditionsArgs),
    /// Draw approximate Gibbs samples with the clique dynamics.
    /// CSV columns: sample,steps,family (or step,family with --trajectory)
    Sample(SampleArgs),
    /// Approximate the partition function.
    /// CSV columns: log_z_hat,z_hat,epsilon,s,epsilon_s,z_max,m,runs,seed
    /// (or i,r_hat,hits,steps with --ratios)
    EstimateZ(EstimateArgs),
    /// Exact partition function by enumeration.
    /// CSV columns: log_z,z,polymers
    ExactZ(ExactArgs),
    /// Drop polymers above a size threshold and report the quality.
    /// CSV columns: k,polymers_before,polymers_after,max_tail,premise_holds,log_ratio,tv
    Truncate(TruncateArgs),
    /// Evaluate a parameter range for the hard-core, Potts or matching model.
    /// CSV columns: row,quantity,value
    Thresholds(ThresholdArgs),
    /// Estimate the hard-core partition function of a bipartite graph.
    /// CSV columns: log_z_hat,z_hat,log_z_exact,relative_error,within_epsilon,warnings
    Hardcore(HardcoreArgs),
    /// Total variation distance to the Gibbs distribution against step count.
    /// CSV columns: steps,empirical_tv,exact_tv
    TvCurve(TvCurveArgs),
}

/// Model file plus the function `f` used by the conditions.
#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Model JSON: {polymers, incompat, cliques}.
    #[arg(long)]
    pub model: PathBuf,

    /// Condition function: one, size, or exp:<a> for e^{a·size}.
    #[arg(long = "f", default_value = "one")]
    pub f: commands::FSpec,
}

#[derive(Debug, Args)]
pub struct CheckConditionsArgs {
    #[command(flatten)]
    pub model: ModelArgs,

    /// Also report the mixing-time bound at this accuracy.
    #[arg(long)]
    pub epsilon: Option<f64>,

    /// Growth function for the clique truncation condition (exp:a, power:a, linear:a,b).
    #[arg(long)]
    pub growth: Option<GrowthFn>,

    /// Bound B for the clique truncation condition.
    #[arg(long, default_value_t = 1.0)]
    pub b: f64,

    /// Exit with status 2 unless the clique dynamics condition holds.
    #[arg(long)]
    pub require: bool,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub model: ModelArgs,

    /// Target total variation distance; sets the number of steps.
    #[arg(long, default_value_t = 0.05)]
    pub epsilon: f64,

    /// Number of independent samples.
    #[arg(long, default_value_t = 1)]
    pub count: u64,

    /// Fixed step count; skips the condition check and the mixing bound.
    #[arg(long)]
    pub steps: Option<u64>,

    /// Print every state of a single chain instead of the final samples.
    #[arg(long)]
    pub trajectory: bool,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub model: ModelArgs,

    #[arg(long)]
    pub epsilon: f64,

    /// Failure probability; takes the median of enough runs to reach it.
    #[arg(long)]
    pub delta: Option<f64>,

    /// simulate or exact-transient.
    #[arg(long, default_value = "simulate")]
    pub sampler: SamplerBackend,

    /// Override the scheduled sample count (voids the accuracy guarantee).
    #[arg(long)]
    pub samples: Option<u64>,

    /// Print the per-clique ratio estimates instead of the summary.
    #[arg(long)]
    pub ratios: bool,
}

#[derive(Debug, Args)]
pub struct ExactArgs {
    #[arg(long)]
    pub model: PathBuf,
}

#[derive(Debug, Args)]
pub struct TruncateArgs {
    #[arg(long)]
    pub model: PathBuf,

    /// Keep polymers with size at most k.
    #[arg(long, conflicts_with = "growth")]
    pub k: Option<f64>,

    /// Derive k from a growth function, B and epsilon instead.
    #[arg(long, requires = "epsilon")]
    pub growth: Option<GrowthFn>,

    #[arg(long, default_value_t = 1.0)]
    pub b: f64,

    #[arg(long)]
    pub epsilon: Option<f64>,

    /// Use 2Bm/ε instead of Bm/ε.
    #[arg(long)]
    pub doubled: bool,

    /// Compare Z and the Gibbs distribution before and after exactly.
    #[arg(long)]
    pub verify: bool,

    /// Write the truncated model JSON here.
    #[arg(long)]
    pub model_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ThresholdArgs {
    /// hardcore_expander, potts_expander, hardcore_unbalanced or matching.
    #[arg(long)]
    pub row: polymer_core::hardcore::Table1Row,

    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub delta_l: Option<f64>,
    #[arg(long)]
    pub delta_r: Option<f64>,
    #[arg(long)]
    pub lambda_l: Option<f64>,
    #[arg(long)]
    pub lambda_r: Option<f64>,
    #[arg(long)]
    pub min_delta_r: Option<f64>,
    #[arg(long)]
    pub z: Option<f64>,
}

#[derive(Debug, Args)]
pub struct HardcoreArgs {
    /// Graph file: "n_left n_right" header, then one "u v" edge per line.
    #[arg(long)]
    pub graph: PathBuf,

    #[arg(long)]
    pub lambda: f64,

    /// Expansion of the graph, used for the fugacity range warning.
    #[arg(long)]
    pub alpha: f64,

    #[arg(long)]
    pub epsilon: f64,

    #[arg(long, default_value = "simulate")]
    pub sampler: SamplerBackend,

    /// Skip the exact comparison even on small graphs.
    #[arg(long)]
    pub no_exact: bool,
}

#[derive(Debug, Args)]
pub struct TvCurveArgs {
    #[arg(long)]
    pub model: PathBuf,

    /// Comma-separated step counts.
    #[arg(long, value_delimiter = ',', required = true)]
    pub steps: Vec<u64>,

    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,

    /// Starting family as comma-separated polymer ids (empty family by default).
    #[arg(long, value_delimiter = ',')]
    pub initial: Vec<usize>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    ExitCode::SUCCESS
                }
                _ => ExitCode::from(3),
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    if cli.common.threads == 0 {
        return Err(CliError::Usage("--threads must be at least 1".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.common.threads)
        .build()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    let report = pool.install(|| commands::dispatch(&cli.command, &cli.common))?;
    let bytes = output::render(&report, cli.common.format)?;
    output::emit(&bytes, cli.common.out.as_deref())?;
    match report.failure {
        Some(e) => Err(e.into()),
        None => Ok(()),
    }
}
