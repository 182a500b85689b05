use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use neutrino_magic::harness::Method;
use neutrino_magic::maxmagic::MagicConstraint;

#[derive(Parser, Debug)]
#[command(name = "neutrino-magic", version, about = "Magic and entanglement in collective neutrino oscillations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evolve one initial state and write timeseries.csv and summary.json.
    Evolve(EvolveArgs),
    /// Asymptotic magic per neutrino for a set of initial states (table.csv).
    Table(TableArgs),
    /// Magic power of the free one-body propagator (magicpower.csv).
    MagicPower(MagicPowerArgs),
    /// Largest M2 over a constrained family of states (maxmagic.json).
    MaxMagic(MaxMagicArgs),
    /// Enumerate stabilizer states (stabilizers.json).
    Stabilizers(StabilizerArgs),
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// JSON config for this subcommand, or a manifest.json from an earlier run.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory (created if missing).
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
}

/// Flags shared by the two dynamics subcommands.
#[derive(Args, Debug, Clone)]
pub struct DynamicsFlags {
    #[arg(long, value_parser = parse_method)]
    pub method: Option<Method>,
    /// Trotter slice `Δκt`.
    #[arg(long)]
    pub dt: Option<f64>,
    /// Asymptotic window as `lo,hi` in `κt`; the run is extended to `hi` if needed.
    #[arg(long, value_parser = parse_pair)]
    pub window: Option<(f64, f64)>,
    /// Parameter samples for the spread estimate (0 disables sampling).
    #[arg(long)]
    pub samples: Option<usize>,
}

#[derive(Args, Debug)]
pub struct EvolveArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub dynamics: DynamicsFlags,
    /// Flavor letters, site 1 first (e.g. `emt`).
    #[arg(long)]
    pub flavors: Option<String>,
    /// 2 for two flavors, 3 for three.
    #[arg(long)]
    pub local_dim: Option<usize>,
}

#[derive(Args, Debug)]
pub struct TableArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub dynamics: DynamicsFlags,
    /// Include the six- to eight-neutrino rows.
    #[arg(long)]
    pub long: bool,
}

#[derive(Args, Debug)]
pub struct MagicPowerArgs {
    #[command(flatten)]
    pub common: Common,
    /// `κt` range as `lo,hi`.
    #[arg(long, value_parser = parse_pair)]
    pub window: Option<(f64, f64)>,
    #[arg(long)]
    pub points: Option<usize>,
    /// Parameter samples for the 68% band.
    #[arg(long)]
    pub samples: Option<usize>,
}

#[derive(Args, Debug)]
pub struct MaxMagicArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub local_dim: Option<usize>,
    #[arg(long)]
    pub sites: Option<usize>,
    /// any-pure, tensor-product or real-amplitudes.
    #[arg(long, value_parser = parse_constraint)]
    pub constraint: Option<MagicConstraint>,
    /// Number of random restarts.
    #[arg(long)]
    pub restarts: Option<usize>,
}

#[derive(Args, Debug)]
pub struct StabilizerArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub local_dim: Option<usize>,
    #[arg(long)]
    pub sites: Option<usize>,
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse().map_err(|e: neutrino_magic::Error| e.to_string())
}

fn parse_constraint(s: &str) -> Result<MagicConstraint, String> {
    s.parse().map_err(|e: neutrino_magic::Error| e.to_string())
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = s.split_once(',').ok_or_else(|| format!("expected lo,hi but got {s:?}"))?;
    let num = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("{v:?}: {e}"));
    Ok((num(lo)?, num(hi)?))
}
