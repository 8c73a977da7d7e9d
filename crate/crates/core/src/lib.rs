//! Optic disc localization in retinal fundus images, plus the bookkeeping
//! around it: a reviewable annotation store for building ground truth and
//! the metrics used to score localization and glaucoma classification.
//!
//! Modules:
//!
//! 1. [`imaging`]: grayscale, resize, thresholds, binary morphology,
//!    connected components.
//! 2. [`localizer`]: the rule-based disc localization pipeline.
//! 3. [`annotation`]: proposal generation, review decisions, append-only
//!    decision log and ground-truth export.
//! 4. [`evaluation`]: box overlap, confusion-matrix metrics, ROC/AUC and
//!    stratified splits.
//! 5. [`synth`]: procedural fundus images with exact disc ground truth.

pub mod annotation;
pub mod evaluation;
pub mod geometry;
pub mod imaging;
pub mod localizer;
pub mod synth;

pub use geometry::{BoundingBox, Circle};
pub use imaging::{BinaryMask, RasterImage};
