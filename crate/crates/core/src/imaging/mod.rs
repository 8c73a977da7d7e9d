//! Deterministic pixel-level primitives used by the localizer.
//!
//! Everything here is a pure function of its inputs. Images and masks are
//! plain row-major buffers; no operation mutates its arguments.

mod components;
mod decode;
mod gray;
mod morphology;
mod raster;
mod resize;
mod threshold;

pub use components::{connected_components, label_components, Component};
pub use decode::{decode_image, encode_png, load_image};
pub use gray::{to_grayscale, ChannelMode};
pub use morphology::{dilate, erode, Shape, StructuringElement};
pub use raster::{BinaryMask, RasterImage};
pub use resize::resize;
pub use threshold::{binarize, otsu_threshold, otsu_threshold_from_histogram, top_percentile_mean_threshold};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ImagingError {
    #[error("image dimensions must be positive, got {width}x{height}")]
    InvalidDimensions { width: u32, height: u32 },
    #[error("invalid channel count {channels} for this operation")]
    InvalidChannelCount { channels: u8 },
    #[error("pixel buffer has {actual} bytes, expected {expected}")]
    DataLength { expected: usize, actual: usize },
    #[error("histogram has fewer than two distinct intensities")]
    DegenerateHistogram,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("cannot decode image: {0}")]
    Decode(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
