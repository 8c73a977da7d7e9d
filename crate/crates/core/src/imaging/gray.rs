use serde::{Deserialize, Serialize};

use super::{ImagingError, RasterImage};

/// How a colour image is reduced to one channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelMode {
    /// BT.601 weights 0.299 / 0.587 / 0.114, rounded to nearest.
    #[default]
    Luminance,
    Red,
    Green,
    /// Accepts an image that is already single-channel.
    Passthrough,
}

impl ChannelMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            ChannelMode::Luminance => "luminance",
            ChannelMode::Red => "red",
            ChannelMode::Green => "green",
            ChannelMode::Passthrough => "passthrough",
        }
    }
}

impl std::str::FromStr for ChannelMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "luminance" => Ok(ChannelMode::Luminance),
            "red" => Ok(ChannelMode::Red),
            "green" => Ok(ChannelMode::Green),
            "passthrough" => Ok(ChannelMode::Passthrough),
            other => Err(format!("unknown channel mode `{other}`")),
        }
    }
}

pub fn to_grayscale(img: &RasterImage, mode: ChannelMode) -> Result<RasterImage, ImagingError> {
    let channels = img.channels();
    match (channels, mode) {
        (1, ChannelMode::Passthrough) => return Ok(img.clone()),
        (3, ChannelMode::Passthrough) | (1, _) => {
            return Err(ImagingError::InvalidChannelCount { channels })
        }
        _ => {}
    }
    let data = img
        .data()
        .chunks_exact(3)
        .map(|p| match mode {
            ChannelMode::Red => p[0],
            ChannelMode::Green => p[1],
            _ => {
                let weighted = 299 * p[0] as u32 + 587 * p[1] as u32 + 114 * p[2] as u32;
                ((weighted + 500) / 1000) as u8
            }
        })
        .collect();
    RasterImage::new(img.width(), img.height(), 1, data)
}
