//! Command-line front end: referral trust computation, method comparison,
//! evidence rendering and convergence reports.

use std::fmt;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod input;
pub mod settings;

pub use commands::run;
use settings::{Settings, ThetaArg, WeightChoice};

/// Process exit code when an iteration stopped before converging.
pub const EXIT_NOT_CONVERGED: i32 = 2;
/// Process exit code on any error.
pub const EXIT_ERROR: i32 = 1;

#[derive(Debug)]
pub struct CliError(String);

impl CliError {
    pub fn new(message: impl Into<String>) -> Self {
        CliError(message.into())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for CliError {}

impl From<ebsl::Error> for CliError {
    fn from(e: ebsl::Error) -> Self {
        CliError(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "ebsl", version, about = "Evidence-based trust propagation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve for the referral trust matrix and write it with a convergence report.
    Compute(ComputeArgs),
    /// Compare propagation methods on one node's trust in a proposition.
    Compare(CompareArgs),
    /// Render an evidence matrix as a grayscale PGM image.
    Render(RenderArgs),
    /// Print the residual of every iteration for one or more methods.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Args)]
pub struct EngineArgs {
    /// Evidence constant c.
    #[arg(long)]
    pub c: Option<f64>,
    /// Discount weight: xb, sqrt-xb or odot.
    #[arg(long, value_enum)]
    pub g: Option<WeightChoice>,
    /// Threshold for odot, or `auto` for the smallest admissible value.
    #[arg(long)]
    pub theta: Option<ThetaArg>,
    /// Convergence tolerance on the summed distance between iterates.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long = "max-iter")]
    pub max_iter: Option<usize>,
    /// Config file with key=value lines (c, g, theta, tol, max_iter, clusters, scale).
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum OrientationArg {
    /// Evidence recorded in the row of the node that logged the interaction.
    #[default]
    ObserverRow,
    Transposed,
}

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// Interaction log (`source,target,amount`).
    #[arg(
        long,
        conflicts_with = "evidence",
        required_unless_present = "evidence"
    )]
    pub log: Option<PathBuf>,
    /// Evidence matrix CSV (`i,j,p,n`).
    #[arg(long)]
    pub evidence: Option<PathBuf>,
    /// Number of node clusters for log input.
    #[arg(long)]
    pub clusters: Option<usize>,
    /// Divisor applied to logged amounts.
    #[arg(long)]
    pub scale: Option<f64>,
    #[arg(long, value_enum, default_value_t)]
    pub orientation: OrientationArg,
}

#[derive(Debug, Clone, Args)]
pub struct ComputeArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub engine: EngineArgs,
    /// Direct evidence about a proposition (`i,p,n`); adds functional trust output.
    #[arg(long)]
    pub trust: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CaseArg {
    Mixed,
    HeavyNegative,
    Saturated,
}

impl CaseArg {
    pub fn case(self) -> ebsl::scenario::Case {
        use ebsl::scenario::Case;
        match self {
            CaseArg::Mixed => Case::Mixed,
            CaseArg::HeavyNegative => Case::HeavyNegative,
            CaseArg::Saturated => Case::Saturated,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    /// Built-in seven-node benchmark case.
    #[arg(long, value_enum, conflicts_with_all = ["evidence", "trust"])]
    pub case: Option<CaseArg>,
    /// Referral evidence matrix CSV (`i,j,p,n`).
    #[arg(long, requires = "trust", required_unless_present = "case")]
    pub evidence: Option<PathBuf>,
    /// Direct evidence about the proposition (`i,p,n`).
    #[arg(long, requires = "evidence")]
    pub trust: Option<PathBuf>,
    /// Node whose trust in the proposition is reported.
    #[arg(long, default_value_t = 0)]
    pub source: usize,
    /// Comma-separated subset of flow-sl, sl-canonical, ebsl-xb, ebsl-sqrt-xb, ebsl-odot, flow-baseline.
    #[arg(long, value_delimiter = ',')]
    pub methods: Option<Vec<String>>,
    /// Damping factor of the flow baseline.
    #[arg(long, requires = "start")]
    pub alpha: Option<f64>,
    /// Start vector of the flow baseline (`i,s`; the proposition is the last index).
    #[arg(long, requires = "alpha")]
    pub start: Option<PathBuf>,
    /// Also print the flow-baseline value of the proposition for a range of damping factors.
    #[arg(long)]
    pub alpha_sweep: bool,
    /// Write the report as JSON to this file.
    #[arg(long)]
    pub json: Option<PathBuf>,
    #[command(flatten)]
    pub engine: EngineArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum RenderModeArg {
    #[default]
    Positive,
    Total,
}

#[derive(Debug, Clone, Args)]
pub struct RenderArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_enum, default_value_t)]
    pub mode: RenderModeArg,
    /// Evidence shown as black; defaults to the largest entry.
    #[arg(long)]
    pub max_reference: Option<f64>,
    /// Config file with key=value lines (clusters, scale are used here).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output PGM file.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportMethod {
    #[value(name = "xb")]
    Belief,
    #[value(name = "sqrt-xb")]
    SqrtBelief,
    Odot,
    /// Multiplicative discounting.
    Naive,
}

#[derive(Debug, Clone, Args)]
pub struct ReportArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub engine: EngineArgs,
    /// Methods to iterate; defaults to the configured discount.
    #[arg(long, value_enum, value_delimiter = ',')]
    pub methods: Option<Vec<ReportMethod>>,
    /// Write the reports as JSON to this file.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

impl EngineArgs {
    /// Flags layered over the config file, if any.
    pub fn settings(&self, input: Option<&InputArgs>) -> Result<Settings, CliError> {
        let flags = Settings {
            c: self.c,
            g: self.g,
            theta: self.theta,
            tol: self.tol,
            max_iter: self.max_iter,
            clusters: input.and_then(|i| i.clusters),
            scale: input.and_then(|i| i.scale),
        };
        let file = match &self.config {
            Some(path) => Settings::load(path)?,
            None => Settings::default(),
        };
        Ok(flags.over(file))
    }
}
