//! Rule-based optic disc localization.
//!
//! The disc is usually the brightest structure inside the retina. The
//! pipeline rescales to a fixed working size, finds the retina with Otsu's
//! threshold, masks off the rim where light-leak fringes appear, keeps the
//! brightest pixels, cleans them up with erosion then dilation, and turns
//! the dominant blob into a circle and an enclosing box.

mod config;
mod pipeline;

pub use config::{ConfigError, LocalizerConfig};
pub use pipeline::{
    circle_to_bbox, crop_fringe, estimate_retina_geometry, localize_disc, localize_disc_traced,
    DiscLocalization, Stage, StageImage, Trace,
};

use thiserror::Error;

use crate::imaging::ImagingError;

#[derive(Debug, Error)]
pub enum LocalizeError {
    #[error(transparent)]
    Imaging(#[from] ImagingError),
    #[error("retina not found: largest foreground region covers {fraction:.4} of the image")]
    RetinaNotFound { fraction: f64 },
    #[error("no candidate disc region survived filtering")]
    NoCandidateRegion,
    #[error("circle lies entirely outside the {width}x{height} image")]
    OutOfBounds { width: u32, height: u32 },
    #[error(transparent)]
    Config(#[from] ConfigError),
}
