// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use faultbound_core::{DelayMode, SweepParam};

/// Energy, delay and redundancy lower bounds for circuits of noisy gates.
///
/// Data goes to stdout (or --output), diagnostics to stderr.
/// Exit codes: 0 success, 1 usage error, 2 input or parse error,
/// 3 every result row is infeasible.
#[derive(Debug, Parser)]
#[command(name = "faultbound", version, propagate_version = true)]
pub struct Cli {
    /// Worker threads; 0 uses one per core. Results do not depend on it.
    #[arg(long, global = true, default_value_t = 0, value_name = "N")]
    pub jobs: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a generated benchmark netlist in .bench format.
    Gen(GenArgs),
    /// Measure a netlist and evaluate every bound at each epsilon.
    Analyze(AnalyzeArgs),
    /// Monte-Carlo simulation of a netlist with noisy gates.
    Simulate(SimulateArgs),
    /// Evaluate the bounds over a parameter grid or a standard plot preset.
    Sweep(SweepArgs),
    /// Analyze a batch of netlists into one table.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenKind {
    /// n-input XOR tree of k-input gates (inputs x0.., output parity).
    Parity,
    /// Ripple-carry adder (inputs a*, b*, cin; outputs s*, cout).
    Adder,
    /// Array multiplier (inputs a*, b*; outputs p*).
    Multiplier,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    pub kind: GenKind,
    /// Parity input count, >= 2.
    #[arg(long, default_value_t = 16)]
    pub n: usize,
    /// Parity gate fanin, >= 2.
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    /// Adder or multiplier operand width in bits, >= 1.
    #[arg(long, default_value_t = 4)]
    pub width: usize,
    /// Output file; stdout when omitted.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableFormat {
    Csv,
    Json,
}

/// Energy and delay model shared by analyze, sweep and bench.
#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Output error budget delta: each output may be wrong with at most
    /// this probability. Domain [0, 0.5).
    #[arg(long, default_value_t = 0.01)]
    pub delta: f64,
    /// Leakage share lambda of the error-free total energy. Domain [0, 1).
    #[arg(long, default_value_t = 0.5)]
    pub leakage_share: f64,
    /// Supply voltage of the alpha-power delay model. Must exceed --vt.
    #[arg(long, default_value_t = 1.0)]
    pub vdd: f64,
    /// Threshold voltage of the alpha-power delay model. Domain (0, vdd).
    #[arg(long, default_value_t = 0.3)]
    pub vt: f64,
    /// Velocity-saturation exponent of the alpha-power delay model, > 0.
    #[arg(long, default_value_t = 1.3)]
    pub alpha: f64,
}

/// Error-free measurement of a netlist.
#[derive(Debug, Args)]
pub struct MeasureArgs {
    /// Random input vectors used to measure switching activity sw0, >= 2.
    #[arg(long, default_value_t = 100_000)]
    pub vectors: usize,
    /// Master seed for every random stream.
    #[arg(long, env = "FAULTBOUND_SEED", default_value_t = 1)]
    pub seed: u64,
    /// Inputs sampled for sensitivity when a netlist has more than 20
    /// inputs (exhaustive enumeration otherwise), >= 1.
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Netlist in .bench format.
    pub netlist: PathBuf,
    /// Gate error probabilities epsilon, comma separated. Domain [0, 0.5].
    #[arg(
        long,
        visible_alias = "epsilons",
        value_delimiter = ',',
        default_values_t = [0.001, 0.01, 0.1]
    )]
    pub epsilon: Vec<f64>,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub measure: MeasureArgs,
    /// Delay baseline: analyze divides the depth bound by the measured
    /// depth; figure uses the depth bound at epsilon = 0.
    #[arg(long, default_value_t = DelayMode::Analyze)]
    pub delay_mode: DelayMode,
    #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
    pub format: TableFormat,
    /// Output file; stdout when omitted.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SimFormat {
    Text,
    Json,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Netlist in .bench format.
    pub netlist: PathBuf,
    /// Per-gate output flip probability epsilon. Domain [0, 0.5].
    #[arg(long, default_value_t = 0.01)]
    pub epsilon: f64,
    /// Random input vectors, >= 2.
    #[arg(long, default_value_t = 100_000)]
    pub vectors: usize,
    /// Master seed for every random stream.
    #[arg(long, env = "FAULTBOUND_SEED", default_value_t = 1)]
    pub seed: u64,
    /// Replicate the netlist N times (odd, >= 3) and vote each output
    /// through MAJ3 gates before simulating.
    #[arg(long, value_name = "N")]
    pub nmr: Option<usize>,
    #[arg(long, value_enum, default_value_t = SimFormat::Text)]
    pub format: SimFormat,
    /// Output file; stdout when omitted.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Standard plot preset: 2 noisy switching activity vs sw0; 3 redundancy
    /// vs epsilon for fanin 2/3/4; 4 leakage ratio vs epsilon for sw0
    /// 0.2/0.5/0.8; 5 delay and energy-delay vs epsilon; 6 average power vs
    /// epsilon. Presets use s=10, S0=21, n=10, sw0=0.5, delta=0.01,
    /// lambda=0.5 and honour only --points, --sw0 (preset 4) and --format.
    #[arg(long, value_parser = clap::value_parser!(u8).range(2..=6))]
    pub figure: Option<u8>,
    /// Swept parameter (epsilon, delta, sw0 or k).
    #[arg(long, default_value = "epsilon")]
    pub param: SweepParam,
    /// First grid value. Default per parameter: epsilon 1e-4, delta 1e-4,
    /// sw0 0.01, k 1.
    #[arg(long)]
    pub start: Option<f64>,
    /// Last grid value. Default per parameter: epsilon 0.499, delta 0.499,
    /// sw0 0.99, k 8.
    #[arg(long)]
    pub stop: Option<f64>,
    /// Grid points, >= 2.
    #[arg(long, default_value_t = 50)]
    pub points: usize,
    /// Logarithmic spacing (default for epsilon and delta).
    #[arg(long, conflicts_with = "linear")]
    pub log: bool,
    /// Linear spacing (default for sw0 and k).
    #[arg(long)]
    pub linear: bool,
    /// Function sensitivity s, <= n.
    #[arg(long, default_value_t = 10)]
    pub s: usize,
    /// Error-free gate count S0, >= 1.
    #[arg(long = "s0", default_value_t = 21)]
    pub s0: usize,
    /// Average gate fanin k, >= 1.
    #[arg(long, default_value_t = 2.0)]
    pub k: f64,
    /// Primary input count n.
    #[arg(long, default_value_t = 10)]
    pub n: usize,
    /// Error-free switching activity sw0. Domain (0, 1).
    #[arg(long)]
    pub sw0: Option<f64>,
    /// Measure s, S0, k, n, sw0 and depth from this netlist instead of
    /// --s/--s0/--k/--n/--sw0.
    #[arg(long, conflicts_with_all = ["figure", "s", "s0", "k", "n", "sw0"])]
    pub netlist: Option<PathBuf>,
    /// Fixed gate error epsilon when another parameter is swept.
    #[arg(long, default_value_t = 0.01)]
    pub epsilon: f64,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub measure: MeasureArgs,
    /// Delay baseline (figure: depth bound at epsilon = 0; analyze: measured
    /// depth, needs --netlist).
    #[arg(long, default_value_t = DelayMode::Figure)]
    pub delay_mode: DelayMode,
    /// Curve label for the name column.
    #[arg(long, default_value = "sweep")]
    pub name: String,
    #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
    pub format: TableFormat,
    /// Output file; stdout when omitted.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Netlists in .bench format.
    pub files: Vec<PathBuf>,
    /// Also analyze every *.bench file in this directory (sorted by name).
    #[arg(long)]
    pub dir: Option<PathBuf>,
    /// Gate error probabilities epsilon, comma separated. Domain [0, 0.5].
    #[arg(
        long,
        visible_alias = "epsilon",
        value_delimiter = ',',
        default_values_t = [0.001, 0.01, 0.1]
    )]
    pub epsilons: Vec<f64>,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub measure: MeasureArgs,
    /// Delay baseline: analyze divides the depth bound by the measured
    /// depth; figure uses the depth bound at epsilon = 0.
    #[arg(long, default_value_t = DelayMode::Analyze)]
    pub delay_mode: DelayMode,
    #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
    pub format: TableFormat,
    /// Output file; stdout when omitted.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}
