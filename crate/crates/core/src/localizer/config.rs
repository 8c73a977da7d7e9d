use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use crate::imaging::{ChannelMode, StructuringElement};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unknown config key `{key}` on line {line}")]
    UnknownKey { key: String, line: usize },
    #[error("invalid value: {0}")]
    Invalid(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Tunables of the localization pipeline.
///
/// Defaults are tuned against the bundled synthetic corpus; override them
/// per dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalizerConfig {
    /// Side of the square working raster.
    pub working_size: u32,
    pub channel_mode: ChannelMode,
    /// Fraction of the estimated retina radius kept by the rim mask.
    pub fringe_margin: f64,
    /// Fraction of brightest pixels averaged into the binarization level.
    pub top_percentile: f64,
    pub erode_se: StructuringElement,
    pub dilate_se: StructuringElement,
    /// Blobs smaller than this (working-scale pixels) are never the disc.
    pub min_blob_area: u64,
    /// Factor applied to the blob radius before drawing the output box.
    pub radius_expansion: f64,
}

impl Default for LocalizerConfig {
    fn default() -> Self {
        Self {
            working_size: 1500,
            channel_mode: ChannelMode::Luminance,
            fringe_margin: 0.95,
            top_percentile: 0.01,
            erode_se: StructuringElement::disk(5),
            dilate_se: StructuringElement::disk(15),
            min_blob_area: 100,
            radius_expansion: 1.15,
        }
    }
}

const KEYS: [&str; 8] = [
    "working_size",
    "channel_mode",
    "fringe_margin",
    "top_percentile",
    "erode_se",
    "dilate_se",
    "min_blob_area",
    "radius_expansion",
];

impl LocalizerConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.working_size == 0 {
            return Err(ConfigError::Invalid("working_size must be positive".into()));
        }
        if !(self.fringe_margin > 0.0 && self.fringe_margin < 1.0) {
            return Err(ConfigError::Invalid(format!(
                "fringe_margin must be in (0, 1), got {}",
                self.fringe_margin
            )));
        }
        if !(self.top_percentile > 0.0 && self.top_percentile <= 1.0) {
            return Err(ConfigError::Invalid(format!(
                "top_percentile must be in (0, 1], got {}",
                self.top_percentile
            )));
        }
        if !(self.radius_expansion > 1.0 && self.radius_expansion.is_finite()) {
            return Err(ConfigError::Invalid(format!(
                "radius_expansion must be greater than 1, got {}",
                self.radius_expansion
            )));
        }
        for se in [self.erode_se, self.dilate_se] {
            if se.radius == 0 || se.radius * 2 + 1 > self.working_size {
                return Err(ConfigError::Invalid(format!(
                    "structuring element {se} does not fit a {0}x{0} working raster",
                    self.working_size
                )));
            }
        }
        Ok(())
    }

    /// Parses flat `key = value` text. Blank lines and `#` comments are
    /// skipped; keys not listed above are rejected. Missing keys keep their
    /// defaults.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| ConfigError::Parse {
                line,
                message: format!("expected `key = value`, got `{content}`"),
            })?;
            let (key, value) = (key.trim(), value.trim());
            let bad = |message: String| ConfigError::Parse { line, message };
            let num = |v: &str| {
                v.parse::<f64>()
                    .map_err(|_| bad(format!("`{key}` expects a number, got `{v}`")))
            };
            match key {
                "working_size" => {
                    cfg.working_size = value
                        .parse()
                        .map_err(|_| bad(format!("`{key}` expects an integer, got `{value}`")))?
                }
                "channel_mode" => cfg.channel_mode = value.parse().map_err(bad)?,
                "fringe_margin" => cfg.fringe_margin = num(value)?,
                "top_percentile" => cfg.top_percentile = num(value)?,
                "erode_se" => cfg.erode_se = value.parse().map_err(bad)?,
                "dilate_se" => cfg.dilate_se = value.parse().map_err(bad)?,
                "min_blob_area" => {
                    cfg.min_blob_area = value
                        .parse()
                        .map_err(|_| bad(format!("`{key}` expects an integer, got `{value}`")))?
                }
                "radius_expansion" => cfg.radius_expansion = num(value)?,
                _ => {
                    return Err(ConfigError::UnknownKey {
                        key: key.to_string(),
                        line,
                    })
                }
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Renders the config in the same format [`LocalizerConfig::parse`] reads.
    pub fn to_config_string(&self) -> String {
        let mut out = String::new();
        for key in KEYS {
            let value = match key {
                "working_size" => self.working_size.to_string(),
                "channel_mode" => self.channel_mode.as_str().to_string(),
                "fringe_margin" => self.fringe_margin.to_string(),
                "top_percentile" => self.top_percentile.to_string(),
                "erode_se" => self.erode_se.to_string(),
                "dilate_se" => self.dilate_se.to_string(),
                "min_blob_area" => self.min_blob_area.to_string(),
                _ => self.radius_expansion.to_string(),
            };
            let _ = writeln!(out, "{key} = {value}");
        }
        out
    }
}
