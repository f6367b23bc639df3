//! The `heartgan` command surface.
//!
//! Five subcommands cover the workflow end to end: `prepare` turns raw
//! records or a beat file into balanced train/test splits, `train` fits
//! the conditional GAN, `generate` synthesizes beats from a checkpoint,
//! `evaluate` scores a trained pair on held-out beats, and `plot`
//! renders beats or training snapshots as SVG. Every run is
//! deterministic for a fixed seed unless `--timestamps` is requested,
//! and every run writes one manifest describing it.

mod evaluate;
mod generate;
mod plot;
mod prepare;
mod train;

use crate::config_file::ArchChoice;
use crate::error::Result;
use clap::{Args, Parser, Subcommand, ValueEnum};
use heartgan_core::data::DEFAULT_TRAIN_FRACTION;
use heartgan_core::train::TrainingConfig;
use std::path::PathBuf;

fn default_seed() -> u64 {
    TrainingConfig::default().seed
}

fn default_noise_sigma() -> f64 {
    TrainingConfig::default().noise_sigma
}

fn parse_arch(s: &str) -> std::result::Result<ArchChoice, String> {
    s.parse()
}

#[derive(Parser)]
#[command(
    name = "heartgan",
    version,
    about = "Conditional GAN for ECG heartbeat synthesis and arrhythmia screening"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Extract, balance, and split heartbeats into train and test sets
    Prepare(PrepareArgs),
    /// Train the generator and discriminator pair
    Train(TrainArgs),
    /// Synthesize one beat per conditioning beat from a generator checkpoint
    Generate(GenerateArgs),
    /// Score a trained pair on held-out beats
    Evaluate(EvaluateArgs),
    /// Render beats or training snapshots as SVG, one panel per class
    Plot(PlotArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SplitChoice {
    /// Pool all beats, shuffle, and split by fraction
    Intra,
    /// Patient-disjoint split by the canonical record lists
    Inter,
}

#[derive(Args)]
pub struct PrepareArgs {
    /// Record directory (*.sig.csv with *.ann.csv siblings) or a beat CSV file
    pub input: PathBuf,
    /// Output directory for train_beats.csv, test_beats.csv, manifest.json
    pub out_dir: PathBuf,
    /// Split scheme
    #[arg(long, value_enum, default_value_t = SplitChoice::Intra)]
    pub mode: SplitChoice,
    #[arg(long, default_value_t = default_seed())]
    pub seed: u64,
    /// Per-class fraction of beats kept for training (intra mode)
    #[arg(long, default_value_t = DEFAULT_TRAIN_FRACTION)]
    pub train_fraction: f64,
    /// Skip SMOTE balancing of the training split
    #[arg(long)]
    pub no_smote: bool,
    /// Record wall-clock time in the manifest
    #[arg(long)]
    pub timestamps: bool,
}

#[derive(Args)]
pub struct TrainArgs {
    /// Training beats CSV (from `prepare`)
    pub train_beats: PathBuf,
    /// Output directory for logs, snapshots, and checkpoints
    pub out_dir: PathBuf,
    /// `key = value` configuration file; flags override it
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    #[arg(long)]
    pub learning_rate: Option<f64>,
    #[arg(long)]
    pub beta1: Option<f64>,
    #[arg(long)]
    pub beta2: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub lambda_rec: Option<f64>,
    #[arg(long)]
    pub lambda_class: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub noise_sigma: Option<f64>,
    /// Emit per-class sample snapshots every N epochs (0 disables)
    #[arg(long)]
    pub snapshot_every: Option<usize>,
    /// Write a checkpoint pair every N epochs (0 disables)
    #[arg(long)]
    pub checkpoint_every: Option<usize>,
    /// Model width: full or halved
    #[arg(long, value_parser = parse_arch)]
    pub arch: Option<ArchChoice>,
    /// Continue from the newest checkpoint pair in the output directory
    #[arg(long)]
    pub resume: bool,
    /// Record wall-clock time in the log and manifest
    #[arg(long)]
    pub timestamps: bool,
}

#[derive(Args)]
pub struct GenerateArgs {
    /// Generator checkpoint
    pub generator: PathBuf,
    /// Conditioning beats CSV
    pub beats: PathBuf,
    /// Output beats CSV; a `<name>.manifest.json` sibling is written too
    pub out: PathBuf,
    #[arg(long, default_value_t = default_seed())]
    pub seed: u64,
    #[arg(long, default_value_t = default_noise_sigma())]
    pub noise_sigma: f64,
    /// Record wall-clock time in the manifest
    #[arg(long)]
    pub timestamps: bool,
}

#[derive(Args)]
pub struct EvaluateArgs {
    /// Generator checkpoint
    pub generator: PathBuf,
    /// Discriminator checkpoint
    pub discriminator: PathBuf,
    /// Held-out beats CSV
    pub test_beats: PathBuf,
    /// Output directory for similarity.json, classification tables, detection.csv
    pub out_dir: PathBuf,
    #[arg(long, default_value_t = default_seed())]
    pub seed: u64,
    #[arg(long, default_value_t = default_noise_sigma())]
    pub noise_sigma: f64,
    /// Record wall-clock time in the manifest
    #[arg(long)]
    pub timestamps: bool,
}

#[derive(Args)]
pub struct PlotArgs {
    /// Beats CSV file or a snapshots directory
    pub input: PathBuf,
    /// Output directory for plot_<class>.svg files
    pub out_dir: PathBuf,
    /// Most traces drawn per panel
    #[arg(long, default_value_t = 12)]
    pub max_traces: usize,
    /// Record wall-clock time in the manifest
    #[arg(long)]
    pub timestamps: bool,
}

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Prepare(args) => prepare::run(args),
        Command::Train(args) => train::run(args),
        Command::Generate(args) => generate::run(args),
        Command::Evaluate(args) => evaluate::run(args),
        Command::Plot(args) => plot::run(args),
    }
}
