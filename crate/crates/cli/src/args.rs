// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;

use ccp_core::ProtocolKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "ccp",
    version,
    about = "Exact and Monte Carlo evaluation of chained communication protocols"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Period N of the promise sets.
    #[arg(long = "N", id = "N", global = true, default_value_t = 60)]
    pub n: u64,

    /// Number of parties M.
    #[arg(long = "M", id = "M", global = true, default_value_t = 3)]
    pub m: usize,

    /// Alphabet size d.
    #[arg(long = "d", id = "d", global = true, default_value_t = 2)]
    pub d: usize,

    /// Promise width mu.
    #[arg(long = "mu", id = "mu", global = true, default_value_t = 1)]
    pub mu: u64,

    /// Detector efficiency in [0, 1]; ideal detectors when absent.
    #[arg(long, global = true)]
    pub eta: Option<f64>,

    /// Monte Carlo trials per grid point and protocol.
    #[arg(long, global = true, default_value_t = 10_000)]
    pub trials: u64,

    /// Master seed.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,

    /// Emit JSON instead of CSV (or text for table2).
    #[arg(long, global = true)]
    pub json: bool,

    /// Write output to this file instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact success of every protocol, with bounds and ground truth.
    Exact(ExactArgs),
    /// Monte Carlo success against exact values over a parameter grid.
    Montecarlo(MonteCarloArgs),
    /// Ideal predictions and averages for the bundled three-party dataset.
    Table2(Table2Args),
    /// Error against N with fitted log-log slopes.
    SweepScaling(ScalingArgs),
    /// Detector-efficiency adjusted success and crossover efficiencies.
    Efficiency(EfficiencyArgs),
}

#[derive(Debug, Args)]
pub struct ExactArgs {
    /// Use the inputs of this dataset row (1-based).
    #[arg(long, value_name = "ROW", conflicts_with_all = ["assignment", "samples"])]
    pub row_from_table2: Option<usize>,

    /// Inputs as JSON, inline or a path to a JSON file.
    #[arg(long, value_name = "JSON", conflicts_with = "samples")]
    pub assignment: Option<String>,

    /// Number of random assignments to report after the average.
    #[arg(long, default_value_t = 0)]
    pub samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Vary {
    #[value(name = "N")]
    N,
    #[value(name = "M")]
    M,
    #[value(name = "d")]
    D,
    #[value(name = "mu")]
    Mu,
    #[value(name = "eta")]
    Eta,
}

impl Vary {
    pub fn name(self) -> &'static str {
        match self {
            Vary::N => "N",
            Vary::M => "M",
            Vary::D => "d",
            Vary::Mu => "mu",
            Vary::Eta => "eta",
        }
    }
}

#[derive(Debug, Args)]
pub struct MonteCarloArgs {
    /// Parameter swept over the grid; the others come from the global flags.
    #[arg(long, value_enum)]
    pub vary: Option<Vary>,

    /// Comma-separated grid values for --vary.
    #[arg(long, value_delimiter = ',', requires = "vary")]
    pub grid: Vec<String>,

    /// Comma-separated protocols (classical, PE, P1, P2).
    #[arg(long, value_delimiter = ',', default_value = "classical,PE,P1,P2")]
    pub protocols: Vec<ProtocolKind>,

    /// Worker threads; the output does not depend on this.
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Args)]
pub struct Table2Args {
    /// Dataset CSV to use instead of the bundled copy; must match its checksum.
    #[arg(long, value_name = "PATH")]
    pub dataset: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScalingArgs {
    /// Comma-separated N values.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "30,60,90,120,150,180,210,240,270,300"
    )]
    pub grid: Vec<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum IdealBasis {
    /// Quantum ideals are worst-case exact success.
    Worst,
    /// Every ideal is the exact average over the distributor's law.
    Average,
}

#[derive(Debug, Args)]
pub struct EfficiencyArgs {
    /// Comma-separated efficiencies; defaults to 0.80, 0.81, ..., 1.00.
    #[arg(long, value_delimiter = ',')]
    pub grid: Vec<f64>,

    /// Which ideal success the efficiency model starts from.
    #[arg(long, value_enum, default_value_t = IdealBasis::Worst)]
    pub ideal: IdealBasis,
}
