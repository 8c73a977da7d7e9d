//! Scoring for localization and classification runs.

mod confusion;
mod overlap;
mod records;
mod roc;
mod split;

pub use confusion::{
    classification_report, f1, precision, recall, specificity, ClassMetrics, ClassificationReport,
    ConfusionMatrix, Metric,
};
pub use overlap::{
    gt_coverage, iou, localization_accuracy, mean_overlap, AccuracyRow, LocalizationPair,
    OverlapMetric,
};
pub use records::{
    join_localization, parse_jsonl, GroundTruthLine, PredictionLine, ScoredPrediction,
};
pub use roc::{auc, roc_curve, sensitivity_at_specificity, OperatingPoint, RocPoint};
pub use split::{stratified_kfold, stratified_subsample, FoldAssignment, Subsample};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("box {0:?} has zero area")]
    InvalidBox(crate::geometry::BoundingBox),
    #[error("no input to evaluate")]
    EmptyInput,
    #[error("ROC is undefined without both positive and negative examples")]
    UndefinedRoc,
    #[error("specificity {target} is not reached at any score threshold (best: {best:?})")]
    Unreachable { target: f64, best: OperatingPoint },
    #[error("class `{class}` has {size} members, fewer than {k} folds")]
    StratificationImpossible { class: String, size: usize, k: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}
