use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use chrono::{DateTime, Utc};

use super::manifest::{DatasetManifest, ManifestImage};
use super::store::{AnnotationStore, LogEntry};
use super::AnnotationError;
use crate::imaging::load_image;
use crate::localizer::{localize_disc, DiscLocalization, LocalizerConfig};

/// Heuristic result for one manifest image.
#[derive(Debug, Clone)]
pub struct Proposal {
    pub image_id: String,
    pub width: u32,
    pub height: u32,
    /// The localization, or a description of why there is none.
    pub outcome: Result<DiscLocalization, String>,
}

impl Proposal {
    pub fn to_log_entry(&self, at: DateTime<Utc>) -> LogEntry {
        LogEntry::Propose {
            image_id: self.image_id.clone(),
            width: self.width,
            height: self.height,
            proposed_box: self.outcome.as_ref().ok().map(|d| d.bbox),
            note: self.outcome.as_ref().err().cloned(),
            at,
        }
    }
}

/// Loads one image (relative paths resolve against `base_dir`) and runs the
/// localizer on it. Never fails; problems end up in `outcome`.
pub fn propose_image(image: &ManifestImage, base_dir: &Path, cfg: &LocalizerConfig) -> Proposal {
    let outcome = (|| {
        let raster = load_image(base_dir.join(&image.path)).map_err(|e| e.to_string())?;
        if raster.width() != image.width || raster.height() != image.height {
            return Err(format!(
                "decoded size {}x{} does not match manifest {}x{}",
                raster.width(),
                raster.height(),
                image.width,
                image.height
            ));
        }
        localize_disc(&raster, cfg).map_err(|e| e.to_string())
    })();
    Proposal {
        image_id: image.image_id.clone(),
        width: image.width,
        height: image.height,
        outcome,
    }
}

/// Runs [`propose_image`] over the whole manifest on up to `jobs` threads.
/// Results come back in manifest order.
pub fn propose_all(
    manifest: &DatasetManifest,
    base_dir: &Path,
    cfg: &LocalizerConfig,
    jobs: usize,
) -> Vec<Proposal> {
    let n = manifest.images.len();
    let jobs = jobs.clamp(1, n.max(1));
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<Proposal>>> = Mutex::new(vec![None; n]);
    std::thread::scope(|s| {
        for _ in 0..jobs {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= n {
                    break;
                }
                let p = propose_image(&manifest.images[i], base_dir, cfg);
                slots.lock().unwrap()[i] = Some(p);
            });
        }
    });
    slots
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|p| p.expect("every slot filled"))
        .collect()
}

/// Proposes a box for every manifest image and returns the resulting store.
/// With `log` set, the store is persisted there (replacing any existing
/// file); otherwise it lives in memory.
pub fn generate_proposals(
    manifest: &DatasetManifest,
    base_dir: &Path,
    cfg: &LocalizerConfig,
    jobs: usize,
    log: Option<(&Path, super::Durability)>,
    at: DateTime<Utc>,
) -> Result<(AnnotationStore, Vec<Proposal>), AnnotationError> {
    if manifest.images.is_empty() {
        return Err(AnnotationError::EmptyDataset);
    }
    manifest.validate()?;
    let proposals = propose_all(manifest, base_dir, cfg, jobs);
    let entries: Vec<LogEntry> = proposals.iter().map(|p| p.to_log_entry(at)).collect();
    let store = match log {
        Some((path, durability)) => AnnotationStore::create(path, &entries, durability)?,
        None => AnnotationStore::from_entries(&entries)?,
    };
    Ok((store, proposals))
}
