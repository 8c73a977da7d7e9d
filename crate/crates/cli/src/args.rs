use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand};
use discloc::evaluation::OverlapMetric;

#[derive(Debug, Parser)]
#[command(name = "discloc", version, about = "Optic disc localization, ground-truth review and evaluation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Localize the optic disc in every manifest image.
    Localize(LocalizeArgs),
    /// Create an annotation store of heuristic proposals for review.
    Propose(ProposeArgs),
    /// Serve the review API over an annotation store.
    Serve(ServeArgs),
    /// Write accepted and corrected boxes as ground truth.
    ExportGt(ExportArgs),
    /// Score predicted boxes against ground truth.
    EvalLoc(EvalLocArgs),
    /// Score classifier outputs.
    EvalClf(EvalClfArgs),
    /// Stratified k-fold assignment or train/test subsample.
    Split(SplitArgs),
    /// Generate a synthetic fundus corpus with exact ground truth.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
pub struct BatchArgs {
    /// Dataset manifest (JSON); image paths are relative to its directory.
    #[arg(long)]
    pub manifest: PathBuf,
    /// Localizer configuration (`key = value` lines); defaults if omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Worker threads; defaults to the number of CPUs.
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Args)]
pub struct LocalizeArgs {
    #[command(flatten)]
    pub batch: BatchArgs,
    /// Prediction JSON-lines output.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ProposeArgs {
    #[command(flatten)]
    pub batch: BatchArgs,
    /// Annotation store (decision log) to create; replaced if present.
    #[arg(long, visible_alias = "out")]
    pub store: PathBuf,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    #[arg(long)]
    pub store: PathBuf,
    #[arg(long, value_name = "HOST:PORT", default_value = "127.0.0.1:8080")]
    pub listen: String,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    #[arg(long)]
    pub store: PathBuf,
    /// Ground-truth JSON-lines output.
    #[arg(long)]
    pub out: PathBuf,
    /// Check every exported box against these image dimensions.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalLocArgs {
    /// Ground truth, as written by `export-gt` or `synth`.
    #[arg(long)]
    pub gt: PathBuf,
    /// Predictions, as written by `localize`.
    #[arg(long)]
    pub pred: PathBuf,
    #[arg(long, default_value = "iou")]
    pub metric: OverlapMetric,
    #[arg(long, value_delimiter = ',', default_value = "0,0.2,0.5,0.6,0.7,0.8")]
    pub thresholds: Vec<f64>,
    /// Also write the report as JSON.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalClfArgs {
    /// `{"image_id","true_label","score"[,"fold"]}` lines; score is the
    /// glaucoma confidence.
    #[arg(long)]
    pub pred: PathBuf,
    #[arg(long, default_value_t = 0.85)]
    pub at_specificity: f64,
    /// Scores at or above this are called glaucoma for the confusion matrix.
    #[arg(long, default_value_t = 0.5)]
    pub decision_threshold: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("mode").required(true).args(["k", "train_n"])))]
pub struct SplitArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    /// Number of stratified folds.
    #[arg(long)]
    pub k: Option<usize>,
    /// Size of a stratified training subsample.
    #[arg(long)]
    pub train_n: Option<usize>,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub seed: u64,
    /// Output directory; receives `images/`, `manifest.json`, `gt.jsonl`
    /// and `generator.jsonl`.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub jobs: Option<usize>,
}
