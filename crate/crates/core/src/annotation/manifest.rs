use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::AnnotationError;

/// Diagnostic class of an image.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Healthy,
    Glaucoma,
    Unlabeled,
}

impl Label {
    pub fn as_str(&self) -> &'static str {
        match self {
            Label::Healthy => "healthy",
            Label::Glaucoma => "glaucoma",
            Label::Unlabeled => "unlabeled",
        }
    }
}

impl std::str::FromStr for Label {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "healthy" => Ok(Label::Healthy),
            "glaucoma" => Ok(Label::Glaucoma),
            "unlabeled" => Ok(Label::Unlabeled),
            other => Err(format!("unknown label `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestImage {
    pub image_id: String,
    /// Relative to the manifest's directory.
    pub path: PathBuf,
    pub width: u32,
    pub height: u32,
    pub label: Label,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub dataset_name: String,
    pub images: Vec<ManifestImage>,
}

impl DatasetManifest {
    /// Checks id uniqueness and positive dimensions.
    pub fn validate(&self) -> Result<(), AnnotationError> {
        let mut seen = HashSet::new();
        for img in &self.images {
            if !seen.insert(img.image_id.as_str()) {
                return Err(AnnotationError::InvalidManifest(format!(
                    "duplicate image_id `{}`",
                    img.image_id
                )));
            }
            if img.width == 0 || img.height == 0 {
                return Err(AnnotationError::InvalidManifest(format!(
                    "image `{}` has zero dimensions",
                    img.image_id
                )));
            }
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self, AnnotationError> {
        let manifest: Self = serde_json::from_str(text)
            .map_err(|e| AnnotationError::InvalidManifest(e.to_string()))?;
        manifest.validate()?;
        Ok(manifest)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, AnnotationError> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn get(&self, image_id: &str) -> Option<&ManifestImage> {
        self.images.iter().find(|i| i.image_id == image_id)
    }

    /// Number of images per label.
    pub fn class_counts(&self) -> std::collections::BTreeMap<Label, usize> {
        let mut counts = std::collections::BTreeMap::new();
        for img in &self.images {
            *counts.entry(img.label).or_insert(0) += 1;
        }
        counts
    }
}
