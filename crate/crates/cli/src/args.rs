use clap::{Args, Parser, Subcommand, ValueEnum};
use fixlab_core::{PayoffMatrix, Rule};

#[derive(Debug, Parser)]
#[command(
    name = "fixlab",
    version,
    about = "Fixation probabilities of evolutionary games on regular graphs",
    long_about = "Fixation probabilities of death-birth and imitation dynamics on regular graphs, \
                  computed exactly, by Monte Carlo, and from the first-order expansion in the \
                  intensity of selection."
)]
pub struct Cli {
    /// Worker threads for parallel work. Results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact fixation probability, 0-potential and w-derivative by linear solves (N <= 14).
    Exact(ExactArgs),
    /// Monte Carlo estimate of the fixation probability.
    Mc(McArgs),
    /// Evaluate the first-order formula for given k, N, n.
    Theorem1(Theorem1Args),
    /// Sign of the selection effect, or the critical population size.
    BcRule(BcArgs),
    /// CSV sweep over w, b/c or N.
    Sweep(SweepArgs),
    /// Hitting times, meeting times and their neighbor averages for a graph.
    Tables(TablesArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ChainArgs {
    /// cycle:N, complete:N, torus:AxB, rr:N:k:seed, petersen or file:PATH
    #[arg(long)]
    pub graph: String,

    /// voter, db or im
    #[arg(long, default_value = "db")]
    pub rule: Rule,

    /// Benefit of the donation game.
    #[arg(long = "b", allow_negative_numbers = true)]
    pub b: Option<f64>,

    /// Cost of the donation game.
    #[arg(long = "c", allow_negative_numbers = true)]
    pub c: Option<f64>,

    /// General matrix "p11,p10;p01,p00"; must have equal gains from switching.
    #[arg(long, conflicts_with_all = ["b", "c"], allow_hyphen_values = true)]
    pub payoff: Option<PayoffMatrix>,

    /// Intensity of selection.
    #[arg(long, default_value_t = 0.0)]
    pub w: f64,

    /// un:n, point:0110 or bern:u
    #[arg(long, default_value = "un:1")]
    pub init: String,
}

#[derive(Debug, Args)]
pub struct ExactArgs {
    #[command(flatten)]
    pub chain: ChainArgs,

    /// Emit the JSON run record.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct McArgs {
    #[command(flatten)]
    pub chain: ChainArgs,

    #[arg(long, default_value_t = 100_000)]
    pub replicas: u64,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Jump-chain steps per replica before it is censored.
    #[arg(long, default_value_t = fixlab_core::montecarlo::DEFAULT_MAX_STEPS)]
    pub max_steps: u64,

    /// Also solve exactly (N <= 14) and report the z-score.
    #[arg(long)]
    pub exact: bool,

    /// Print a JSON line with the running estimate to stderr after every chunk.
    #[arg(long)]
    pub progress: bool,

    #[arg(long, default_value_t = 10_000)]
    pub chunk: u64,

    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct Theorem1Args {
    #[arg(long, default_value = "db")]
    pub rule: Rule,

    /// Degree.
    #[arg(long)]
    pub k: usize,

    /// Population size.
    #[arg(long = "N")]
    pub population: usize,

    /// Initial number of cooperators.
    #[arg(long = "n", default_value_t = 1)]
    pub cooperators: usize,

    #[arg(long = "b", allow_negative_numbers = true)]
    pub b: f64,

    #[arg(long = "c", allow_negative_numbers = true)]
    pub c: f64,

    /// Report the first-order value at this intensity of selection.
    #[arg(long)]
    pub w: Option<f64>,

    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct BcArgs {
    #[arg(long, default_value = "db")]
    pub rule: Rule,

    #[arg(long)]
    pub k: usize,

    /// Population size; without it the critical size is reported.
    #[arg(long = "N")]
    pub population: Option<usize>,

    #[arg(long = "b", allow_negative_numbers = true)]
    pub b: f64,

    #[arg(long = "c", allow_negative_numbers = true)]
    pub c: f64,

    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Graph spec; with --vary N it must contain {N}, as in cycle:{N}.
    #[arg(long)]
    pub graph: String,

    #[arg(long, default_value = "db")]
    pub rule: Rule,

    #[arg(long = "b", default_value_t = 1.0, allow_negative_numbers = true)]
    pub b: f64,

    #[arg(long = "c", default_value_t = 1.0, allow_negative_numbers = true)]
    pub c: f64,

    #[arg(long, default_value_t = 1e-3)]
    pub w: f64,

    #[arg(long, default_value = "un:1")]
    pub init: String,

    /// PARAM:start:stop:step with PARAM one of w, bc, N. bc scales b with c fixed.
    #[arg(long)]
    pub vary: String,

    /// Monte Carlo replicas per grid point; 0 skips the simulation.
    #[arg(long, default_value_t = 0)]
    pub replicas: u64,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    #[arg(long, default_value_t = fixlab_core::montecarlo::DEFAULT_MAX_STEPS)]
    pub max_steps: u64,

    /// Accepted for symmetry with the other commands; sweeps always emit CSV.
    #[arg(long)]
    pub csv: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableKind {
    Hitting,
    Meeting,
    Averages,
}

#[derive(Debug, Args)]
pub struct TablesArgs {
    #[arg(long)]
    pub graph: String,

    #[arg(long, value_enum, default_value_t = TableKind::Hitting)]
    pub kind: TableKind,

    /// Emit every table in one JSON run record instead of a CSV.
    #[arg(long)]
    pub json: bool,
}
