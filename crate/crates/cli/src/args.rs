use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use supersat::InvariantEquation;

#[derive(Debug, Parser)]
#[command(
    name = "supersat",
    version,
    about = "Solution counts, extremal sets and affine amplification for invariant linear equations"
)]
pub struct Cli {
    /// Worker threads; reports do not depend on this
    #[arg(long, global = true, env = "SUPERSAT_THREADS")]
    pub threads: Option<usize>,

    /// Write the JSON report to this file instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Write plot data (density/count curves, slice sizes, ...) as CSV
    #[arg(long, global = true)]
    pub csv: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Count solutions of an equation inside a set
    Count(CountArgs),
    /// Largest solution-free subsets, thresholds and minimum solution counts
    Extremal(ExtremalArgs),
    /// Largest sphere slice of [t]^d, with the no-three-collinear check
    Sphere(SphereArgs),
    /// Behrend's 3-AP-free subset of [n]
    Behrend(BehrendArgs),
    /// Check that the base a·t encoding never carries
    EncodeCheck(EncodeCheckArgs),
    /// Three-variable amplification over X = [R]
    Varnavides(VarnavidesArgs),
    /// Four-variable amplification over a sphere cap
    Amplify(AmplifyArgs),
    /// Count affine samples hitting given targets on given points
    Fibercount(FibercountArgs),
    /// Re-run the configuration embedded in a report
    Replay(ReplayArgs),
}

fn parse_eq(s: &str) -> Result<InvariantEquation, String> {
    s.parse::<InvariantEquation>().map_err(|e| e.to_string())
}

/// Where the set `S` comes from.
#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SetArgs {
    /// Set file: one integer per line, or JSON {"n" | "p": .., "members": [..]}
    #[arg(long)]
    pub set: Option<PathBuf>,

    /// Random set of this density, as a decimal or a fraction
    #[arg(long, conflicts_with = "set")]
    pub density: Option<String>,

    /// The whole universe
    #[arg(long, conflicts_with_all = ["set", "density"])]
    pub full: bool,

    /// Behrend's 3-AP-free set
    #[arg(long, conflicts_with_all = ["set", "density", "full"])]
    pub behrend: bool,

    /// Seed for the random set (defaults to --seed)
    #[arg(long)]
    pub set_seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CountMode {
    /// Ordered tuples, entries may repeat
    All,
    /// Ordered tuples with pairwise distinct entries
    Distinct,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CountMethod {
    Naive,
    Convolution,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct CountArgs {
    /// Coefficients, e.g. 1,1,-2
    #[arg(long, value_parser = parse_eq, allow_hyphen_values = true)]
    pub eq: InvariantEquation,

    #[command(flatten)]
    pub source: SetArgs,

    /// Universe [1, n]
    #[arg(long)]
    pub n: Option<u64>,

    /// Work in F_p instead of [n]: a prime, or "auto" for the smallest prime above a·n
    #[arg(long)]
    pub p: Option<String>,

    #[arg(long, value_enum, default_value = "all")]
    pub mode: CountMode,

    #[arg(long, value_enum, default_value = "convolution")]
    pub method: CountMethod,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ExtremalArgs {
    #[arg(long, value_parser = parse_eq, allow_hyphen_values = true)]
    pub eq: InvariantEquation,

    /// Interval size for the maximum free subset or the minimum count
    #[arg(long)]
    pub n: Option<u64>,

    /// Exhaustive search (the default)
    #[arg(long, conflicts_with = "anneal")]
    pub exact: bool,

    /// Simulated annealing for --m (an upper bound only)
    #[arg(long)]
    pub anneal: bool,

    /// Estimate the threshold at this density over n = 1..=horizon
    #[arg(long)]
    pub epsilon: Option<String>,

    #[arg(long)]
    pub horizon: Option<u64>,

    /// Minimise the number of solutions over m-subsets of [n]
    #[arg(long, conflicts_with = "epsilon")]
    pub m: Option<u64>,

    /// Node budget (branch and bound), subset budget (exact --m) or move count (--anneal)
    #[arg(long)]
    pub budget: Option<u64>,

    /// Largest n accepted by exhaustive search
    #[arg(long, default_value_t = 64)]
    pub max_n: u64,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SphereArgs {
    #[arg(long)]
    pub t: u64,
    #[arg(long)]
    pub d: usize,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct BehrendArgs {
    #[arg(long)]
    pub n: u64,
    /// Fix the digit bound instead of sweeping (requires --d)
    #[arg(long, requires = "d")]
    pub t: Option<u64>,
    #[arg(long, requires = "t")]
    pub d: Option<usize>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct EncodeCheckArgs {
    #[arg(long, value_parser = parse_eq, allow_hyphen_values = true)]
    pub eq: InvariantEquation,
    #[arg(long)]
    pub t: u64,
    #[arg(long)]
    pub d: usize,
    /// Check every tuple of points instead of random ones
    #[arg(long)]
    pub exhaustive: bool,
    #[arg(long, default_value_t = 10_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// Prime and set for the amplification commands.
#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct FieldArgs {
    /// A prime, or "auto" for the smallest prime in (a·n, 2a·n]
    #[arg(long, default_value = "auto")]
    pub p: String,

    /// Size used by --p auto
    #[arg(long, default_value_t = 100)]
    pub n: u64,

    #[command(flatten)]
    pub source: SetArgs,

    #[arg(long, default_value_t = 1000)]
    pub trials: u64,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Enumerate every affine sample instead of drawing --trials
    #[arg(long)]
    pub exhaustive: bool,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct VarnavidesArgs {
    #[arg(long, value_parser = parse_eq, allow_hyphen_values = true, default_value = "1,1,-2")]
    pub eq: InvariantEquation,

    #[command(flatten)]
    pub field: FieldArgs,

    /// Size of X = [R]; by default the threshold at half the density
    #[arg(long)]
    pub r: Option<u64>,

    /// Horizon for computing R
    #[arg(long, default_value_t = 30)]
    pub horizon: u64,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct AmplifyArgs {
    #[arg(long, value_parser = parse_eq, allow_hyphen_values = true, default_value = "1,1,-1,-1")]
    pub eq: InvariantEquation,

    #[command(flatten)]
    pub field: FieldArgs,

    /// Target density for the parameter formulas (defaults to |S|/p)
    #[arg(long)]
    pub epsilon: Option<String>,

    /// Exponent C with R(ε) ≤ (1/ε)^C
    #[arg(long, default_value = "1")]
    pub c: String,

    /// Override t (requires --d)
    #[arg(long, requires = "d")]
    pub t: Option<u64>,

    #[arg(long, requires = "t")]
    pub d: Option<usize>,

    /// Refuse to run when ε|X| < 8
    #[arg(long)]
    pub enforce_guard: bool,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct FibercountArgs {
    #[arg(long)]
    pub p: u64,
    #[arg(long)]
    pub d: usize,
    /// Points separated by ';', coordinates by ',', e.g. "1,1;1,2;2,1"
    #[arg(long)]
    pub points: String,
    /// One residue per point, e.g. 0,3,4
    #[arg(long)]
    pub targets: String,
    /// Confirm by enumerating all p^(d+1) samples
    #[arg(long)]
    pub verify: bool,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ReplayArgs {
    /// A report written by any other subcommand
    #[arg(long)]
    pub report: PathBuf,
}
