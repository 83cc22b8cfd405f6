//! Command-line interface: data preparation, training, gradient checking,
//! gate visualization, and benchmarking, each leaving a run manifest
//! behind.
//!
//! Exit codes are categorical so scripts can branch on the failure kind:
//! 0 success, 2 configuration or unsupported-operation errors, 3 data or
//! parse errors, 4 numeric failures (non-finite values, gradient check),
//! 5 I/O errors.

mod bench;
mod grad_check;
mod manifest;
mod prepare;
mod train_cmd;
mod visualize;

pub use bench::{cmd_bench, BenchArgs, ModeTiming, TimingReport};
pub use grad_check::{cmd_grad_check, DimPreset, GradCheckArgs, GRAD_CHECK_EPS, GRAD_CHECK_TOL};
pub use manifest::{sha256_file, InputDigest, RunManifest};
pub use prepare::{cmd_prepare, ExpectRow, PrepareArgs};
pub use train_cmd::{cmd_train, resolve_config, TrainArgs};
pub use visualize::{cmd_visualize, VisualizeArgs};

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::data::XmlLayout;
use crate::error::{Error, Result};
use crate::model::{GateKind, ModelVariant, Task};
use crate::train::ExecMode;

/// Fallback for `--data` when the flag is omitted.
pub const DATA_DIR_ENV: &str = "GCAE_DATA_DIR";

/// Maps an error category onto a stable process exit code.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) | Error::ConfigList(_) | Error::Unsupported(_) => 2,
        Error::Data(_) | Error::Parse { .. } => 3,
        Error::ShapeMismatch { .. } | Error::NonFinite(_) | Error::GradCheck(_) => 4,
        Error::Io { .. } => 5,
    }
}

fn parse_task(s: &str) -> Result<Task> {
    match s {
        "acsa" => Ok(Task::Acsa),
        "atsa" => Ok(Task::Atsa),
        other => Err(Error::Config(format!(
            "unknown task '{other}' (acsa, atsa)"
        ))),
    }
}

fn parse_schema(s: &str) -> Result<Option<XmlLayout>> {
    match s {
        "auto" => Ok(None),
        "2014" => Ok(Some(XmlLayout::Flat)),
        "2015" | "2016" => Ok(Some(XmlLayout::Reviews)),
        other => Err(Error::Config(format!(
            "unknown schema '{other}' (2014, 2015, 2016, auto)"
        ))),
    }
}

fn parse_variant(variant: &str, gate: &str) -> Result<ModelVariant> {
    ModelVariant::parse(variant, GateKind::parse(gate)?)
}

fn resolve_data_dir(flag: Option<PathBuf>) -> Result<PathBuf> {
    flag.or_else(|| std::env::var_os(DATA_DIR_ENV).map(PathBuf::from))
        .ok_or_else(|| {
            Error::Config(format!(
                "no --data directory given and {DATA_DIR_ENV} is unset"
            ))
        })
}

#[derive(Debug, Parser)]
#[command(
    name = "gcae",
    version,
    about = "Gated convolutional networks for aspect-based sentiment analysis"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse annotation XML into JSON-lines splits plus a vocabulary
    Prepare(PrepareCli),
    /// Cross-validate, retrain, and evaluate over repeated seeded runs
    Train(TrainCli),
    /// Compare analytic gradients against central finite differences
    GradCheck(GradCheckCli),
    /// Emit per-word gate scores for one sentence as CSV
    Visualize(VisualizeCli),
    /// Time single-thread vs fan-out training on the same data
    Bench(BenchCli),
}

#[derive(Debug, Args)]
pub struct PrepareCli {
    /// Task the splits are for: acsa (categories) or atsa (terms)
    #[arg(long, default_value = "acsa")]
    task: String,
    /// Expected input layout: 2014 (flat), 2015/2016 (review-wrapped), or
    /// auto-detect per file
    #[arg(long, default_value = "auto")]
    schema: String,
    /// Training XML file (repeatable)
    #[arg(long = "train", visible_alias = "input", required = true, num_args = 1..)]
    train: Vec<PathBuf>,
    /// Test XML file (repeatable)
    #[arg(long = "test", required = true, num_args = 1..)]
    test: Vec<PathBuf>,
    /// Merge all inputs into the eight-category restaurant corpus
    #[arg(long)]
    merge_large: bool,
    /// Output directory
    #[arg(long)]
    out: PathBuf,
    /// Expectations file (`split.stat = count` lines) to compare against
    #[arg(long)]
    expect: Option<PathBuf>,
}

impl PrepareCli {
    fn resolve(self) -> Result<PrepareArgs> {
        Ok(PrepareArgs {
            task: parse_task(&self.task)?,
            schema: parse_schema(&self.schema)?,
            train: self.train,
            test: self.test,
            merge_large: self.merge_large,
            out: self.out,
            expect: self.expect,
        })
    }
}

#[derive(Debug, Args)]
pub struct TrainCli {
    /// Model variant: gcae-acsa, gcae-atsa, cnn, or gcn
    #[arg(long)]
    variant: String,
    /// Gating unit: gtru, gtu, or glu
    #[arg(long, default_value = "gtru")]
    gate: String,
    /// Configuration file (`key = value` lines)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override one configuration key, e.g. --set max_epochs=5 (repeatable)
    #[arg(long = "set")]
    sets: Vec<String>,
    /// Prepared data directory (defaults to $GCAE_DATA_DIR)
    #[arg(long)]
    data: Option<PathBuf>,
    /// Pretrained embedding file: token then values, one line per token
    #[arg(long)]
    embeddings: Option<PathBuf>,
    /// Execution mode: serialized (bit-reproducible) or fanout (parallel)
    #[arg(long, default_value = "serialized")]
    exec: String,
    /// Output directory
    #[arg(long)]
    out: PathBuf,
}

impl TrainCli {
    fn resolve(self) -> Result<TrainArgs> {
        Ok(TrainArgs {
            variant: parse_variant(&self.variant, &self.gate)?,
            config: self.config,
            sets: self.sets,
            data: resolve_data_dir(self.data)?,
            embeddings: self.embeddings,
            exec: ExecMode::parse(&self.exec)?,
            out: self.out,
        })
    }
}

#[derive(Debug, Args)]
pub struct GradCheckCli {
    /// Model variant: gcae-acsa, gcae-atsa, cnn, or gcn
    #[arg(long, default_value = "gcae-acsa")]
    variant: String,
    /// Gating unit: gtru, gtu, or glu
    #[arg(long, default_value = "gtru")]
    gate: String,
    /// Dimension preset: small or micro
    #[arg(long, default_value = "small")]
    dims: String,
    /// Seed for the model and the probe instance
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Deliberately corrupt this tensor's gradient (the check must fail)
    #[arg(long)]
    corrupt: Option<String>,
}

impl GradCheckCli {
    fn resolve(self) -> Result<GradCheckArgs> {
        Ok(GradCheckArgs {
            variant: parse_variant(&self.variant, &self.gate)?,
            dims: DimPreset::parse(&self.dims)?,
            seed: self.seed,
            corrupt: self.corrupt,
        })
    }
}

#[derive(Debug, Args)]
pub struct VisualizeCli {
    /// Trained model checkpoint
    #[arg(long)]
    checkpoint: PathBuf,
    /// Vocabulary file the checkpoint was trained with
    #[arg(long)]
    vocab: PathBuf,
    /// Sentence to score
    #[arg(long)]
    sentence: String,
    /// Aspect category name, or aspect term text for term models
    #[arg(long)]
    aspect: String,
    /// CSV destination (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

impl VisualizeCli {
    fn resolve(self) -> VisualizeArgs {
        VisualizeArgs {
            checkpoint: self.checkpoint,
            vocab: self.vocab,
            sentence: self.sentence,
            aspect: self.aspect,
            out: self.out,
        }
    }
}

#[derive(Debug, Args)]
pub struct BenchCli {
    /// Model variant: gcae-acsa, gcae-atsa, cnn, or gcn
    #[arg(long)]
    variant: String,
    /// Gating unit: gtru, gtu, or glu
    #[arg(long, default_value = "gtru")]
    gate: String,
    /// Configuration file (`key = value` lines)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override one configuration key (repeatable)
    #[arg(long = "set")]
    sets: Vec<String>,
    /// Prepared data directory (defaults to $GCAE_DATA_DIR)
    #[arg(long)]
    data: Option<PathBuf>,
    /// Pretrained embedding file
    #[arg(long)]
    embeddings: Option<PathBuf>,
    /// Output directory
    #[arg(long)]
    out: PathBuf,
}

impl BenchCli {
    fn resolve(self) -> Result<BenchArgs> {
        Ok(BenchArgs {
            variant: parse_variant(&self.variant, &self.gate)?,
            config: self.config,
            sets: self.sets,
            data: resolve_data_dir(self.data)?,
            embeddings: self.embeddings,
            out: self.out,
        })
    }
}

pub fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Prepare(args) => cmd_prepare(&args.resolve()?),
        Command::Train(args) => cmd_train(&args.resolve()?),
        Command::GradCheck(args) => cmd_grad_check(&args.resolve()?),
        Command::Visualize(args) => cmd_visualize(&args.resolve()),
        Command::Bench(args) => cmd_bench(&args.resolve()?),
    }
}
