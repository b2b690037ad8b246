use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use witsenhausen::LatticeKind;

#[derive(Debug, Parser)]
#[command(name = "witsen", version, about = "Bounds, exact costs and simulations for the vector Witsenhausen counterexample")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Upper and lower bounds at one (m, k, σ0), as JSON.
    Bounds(BoundsArgs),
    /// Ratio surface over a (k, σ0) grid, as CSV.
    Sweep(SweepArgs),
    /// Monte Carlo stage costs of a strategy.
    Simulate(SimulateArgs),
    /// Exact scalar quantization costs, optionally optimized.
    ScalarExact(ScalarArgs),
    /// Run verification suites; exits 1 if any check fails.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LatticeArg {
    Grid,
    Hex,
}

impl From<LatticeArg> for LatticeKind {
    fn from(l: LatticeArg) -> Self {
        match l {
            LatticeArg::Grid => LatticeKind::IntegerGrid,
            LatticeArg::Hex => LatticeKind::HexagonalA2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
}

/// Flags shared by every subcommand. Unset flags fall back to the config
/// file, then to per-command defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    /// Dimension.
    #[arg(long)]
    pub m: Option<usize>,
    /// Input-cost weight k (k² multiplies the first-stage power).
    #[arg(long, allow_negative_numbers = true)]
    pub k: Option<f64>,
    /// Standard deviation of the initial state.
    #[arg(long, allow_negative_numbers = true)]
    pub sigma0: Option<f64>,
    /// Packing-covering ratio; defaults to the lattice's own value.
    #[arg(long)]
    pub xi: Option<f64>,
    #[arg(long, value_enum)]
    pub lattice: Option<LatticeArg>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of Monte Carlo samples.
    #[arg(long)]
    pub n: Option<u64>,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// JSON file supplying defaults for any flag.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[command(flatten)]
    pub common: Common,
    /// Optimize the truncation L jointly instead of fixing L = 2.
    #[arg(long)]
    pub l_search: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeArg {
    Analytic,
    ExactScalar,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// log10 range of k as `lo,hi,n`.
    #[arg(long, allow_hyphen_values = true)]
    pub k_range: Option<String>,
    /// log10 range of σ0 as `lo,hi,n`.
    #[arg(long, allow_hyphen_values = true)]
    pub sigma0_range: Option<String>,
    #[arg(long)]
    pub l_search: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StrategyArg {
    Lattice,
    Slopey,
    ZeroInput,
    ZeroForcing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecoderArg {
    PackingSphere,
    Nearest,
    ScaledMle,
    Mmse,
    Identity,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_enum)]
    pub strategy: Option<StrategyArg>,
    #[arg(long, value_enum)]
    pub decoder: Option<DecoderArg>,
    /// Per-dimension power; the lattice is scaled so that r_c² = m·P.
    #[arg(long = "P", alias = "power")]
    pub power: Option<f64>,
    /// Lattice minimum distance or slopey bin width (instead of --P).
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Multiplier for the scaled-MLE decoder.
    #[arg(long)]
    pub scale: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScalarDecoderArg {
    Mmse,
    Mle,
    ScaledMle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyArg {
    Pure,
    Slopey,
}

#[derive(Debug, Args)]
pub struct ScalarArgs {
    #[command(flatten)]
    pub common: Common,
    /// Bin width; when absent the cost is optimized.
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long, value_enum)]
    pub decoder: Option<ScalarDecoderArg>,
    /// Scaled-MLE multiplier; optimized when absent.
    #[arg(long)]
    pub scale: Option<f64>,
    #[arg(long, value_enum)]
    pub family: Option<FamilyArg>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SuiteArg {
    All,
    Specfn,
    Bounds,
    CaseAnalysis,
    ScalarOptima,
    Benchmark,
    Simulation,
    Decoders,
    Ratios,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_enum)]
    pub suite: Option<SuiteArg>,
    /// Samples for the chi-square moment identity.
    #[arg(long)]
    pub mc_samples: Option<u64>,
}
