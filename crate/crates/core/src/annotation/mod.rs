//! Semi-automated ground truth: heuristic proposals, human review
//! decisions kept in an append-only log, and export of verified boxes.

mod export;
mod manifest;
mod proposals;
mod record;
mod store;

pub use export::{export_ground_truth, GroundTruthExport};
pub use manifest::{DatasetManifest, Label, ManifestImage};
pub use proposals::{generate_proposals, propose_all, propose_image, Proposal};
pub use record::{AnnotationRecord, Decision, ReviewStatus, HEURISTIC_SOURCE};
pub use store::{AnnotationStore, Durability, LogEntry, Progress, ReviewOutcome, LOCALIZER_REVIEWER};

use thiserror::Error;

use crate::geometry::BoundingBox;

#[derive(Debug, Error)]
pub enum AnnotationError {
    #[error("invalid manifest: {0}")]
    InvalidManifest(String),
    #[error("manifest has no images")]
    EmptyDataset,
    #[error("no annotation for image `{0}`")]
    NotFound(String),
    #[error("invalid box {bbox:?}: {reason}")]
    InvalidBox { bbox: BoundingBox, reason: String },
    #[error("invalid decision: {0}")]
    InvalidDecision(String),
    #[error("version conflict on `{image_id}`: expected {expected}, current {current}")]
    Conflict {
        image_id: String,
        expected: u64,
        current: u64,
    },
    #[error("corrupt decision log at line {line}: {message}")]
    CorruptLog { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
