use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "ctxcent", version, about = "Contextual centrality and cascade simulation")]
pub struct Cli {
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a random network (and optionally contributions) from a JSON model spec.
    Generate(GenerateArgs),
    /// Score every node.
    Centrality(CentralityArgs),
    /// Independent-cascade simulation.
    Simulate(SimulateArgs),
    /// Run a simulation study from a JSON config.
    Sweep(SweepArgs),
    /// Bounds, correlations, regressions and threshold scans.
    Analyze {
        #[command(subcommand)]
        sub: AnalyzeCommand,
    },
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Edge list destination (stdout if absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Contribution CSV destination; needs `contributions` or `vote_probs` in the config.
    #[arg(long = "y-out")]
    pub y_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum KindArg {
    Degree,
    Eigenvector,
    Katz,
    Diffusion,
    Contextual,
    CcApprox,
    DegreeAdjusted,
    EigenvectorAdjusted,
    KatzAdjusted,
    DiffusionAdjusted,
}

#[derive(Debug, Args)]
pub struct CentralityArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, value_enum)]
    pub kind: KindArg,
    /// Diffusion probability per edge.
    #[arg(long = "p")]
    pub p: Option<f64>,
    /// Communication horizon.
    #[arg(long = "T", default_value_t = ctxcent::centrality::DEFAULT_HORIZON)]
    pub horizon: usize,
    /// Katz attenuation (default 0.9/λ1).
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Contribution CSV with header `node,y`.
    #[arg(long)]
    pub y: Option<PathBuf>,
    /// Start diffusion centrality at t = 1.
    #[arg(long)]
    pub exclude_t0: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub y: PathBuf,
    #[arg(long = "p")]
    pub p: f64,
    /// Seed node; without it every node is estimated at once.
    #[arg(long)]
    pub node: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 1)]
    pub runs: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    /// CSV destination; the JSON summary goes next to it with a `.json` extension.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CorrelationArg {
    Pearson,
    Spearman,
}

#[derive(Debug, Subcommand)]
pub enum AnalyzeCommand {
    /// Norm bound on contextual centrality.
    Bound {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        y: PathBuf,
        #[arg(long = "p")]
        p: f64,
        #[arg(long = "T", default_value_t = ctxcent::centrality::DEFAULT_HORIZON)]
        horizon: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sensitivity of contextual centrality to a contribution perturbation.
    Perturb {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        y: PathBuf,
        /// Perturbation CSV with header `node,y`.
        #[arg(long)]
        delta: PathBuf,
        #[arg(long = "p")]
        p: f64,
        #[arg(long = "T", default_value_t = ctxcent::centrality::DEFAULT_HORIZON)]
        horizon: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Correlation between two node-indexed vectors.
    Correlation {
        /// Two-column CSV `node,value` (any header).
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        y: PathBuf,
        #[arg(long, value_enum, default_value = "spearman")]
        kind: CorrelationArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// OLS with an intercept and a bootstrap interval for R².
    Regression {
        /// CSV with a header row; every non-dependent column is a regressor.
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        dependent: String,
        /// Bootstrap resamples.
        #[arg(long, default_value_t = ctxcent::regression::DEFAULT_BOOTSTRAP_RUNS)]
        runs: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Mean |CC| across the viral threshold on Erdős-Rényi graphs.
    Threshold {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}
