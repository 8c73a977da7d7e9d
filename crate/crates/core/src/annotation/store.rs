//! Annotation state backed by an append-only JSON-lines decision log.
//!
//! Every change is written to the log before it is applied in memory, and
//! replaying the log from the start rebuilds the same state. A trailing
//! line without a newline is the residue of an interrupted append; it is
//! discarded on open.

use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use super::record::{AnnotationRecord, Decision, ReviewStatus, HEURISTIC_SOURCE};
use super::AnnotationError;
use crate::geometry::BoundingBox;

/// One line of the decision log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase")]
pub enum LogEntry {
    /// Creates a record. `proposed_box` is absent when the localizer
    /// failed, in which case the record starts out rejected.
    Propose {
        image_id: String,
        width: u32,
        height: u32,
        proposed_box: Option<BoundingBox>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        note: Option<String>,
        at: DateTime<Utc>,
    },
    Review {
        image_id: String,
        #[serde(flatten)]
        decision: Decision,
        reviewer: String,
        at: DateTime<Utc>,
    },
}

/// How hard an append is pushed to storage before it is acknowledged.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Durability {
    /// `fsync` after every entry.
    Sync,
    /// Flush to the OS only.
    Flush,
}

struct LogWriter {
    path: PathBuf,
    file: File,
    durability: Durability,
}

impl LogWriter {
    fn append(&mut self, entry: &LogEntry) -> Result<(), AnnotationError> {
        let mut line = serde_json::to_string(entry).expect("log entries serialize");
        line.push('\n');
        self.file.write_all(line.as_bytes())?;
        match self.durability {
            Durability::Sync => self.file.sync_data()?,
            Durability::Flush => self.file.flush()?,
        }
        Ok(())
    }
}

/// Per-status counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Progress {
    pub proposed: usize,
    pub accepted: usize,
    pub corrected: usize,
    pub rejected: usize,
}

impl Progress {
    pub fn total(&self) -> usize {
        self.proposed + self.accepted + self.corrected + self.rejected
    }

    pub fn get(&self, status: ReviewStatus) -> usize {
        match status {
            ReviewStatus::Proposed => self.proposed,
            ReviewStatus::Accepted => self.accepted,
            ReviewStatus::Corrected => self.corrected,
            ReviewStatus::Rejected => self.rejected,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReviewOutcome {
    pub record: AnnotationRecord,
    /// False when the decision matched the current state and nothing was
    /// logged.
    pub changed: bool,
}

/// Records keyed by image id plus the log they were built from.
pub struct AnnotationStore {
    records: BTreeMap<String, AnnotationRecord>,
    log: Option<LogWriter>,
}

impl std::fmt::Debug for AnnotationStore {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AnnotationStore")
            .field("records", &self.records.len())
            .field("log", &self.log.as_ref().map(|l| &l.path))
            .finish()
    }
}

/// Reviewer name recorded on records the localizer could not propose for.
pub const LOCALIZER_REVIEWER: &str = "localizer";

impl AnnotationStore {
    /// A store with no backing log.
    pub fn in_memory() -> Self {
        Self {
            records: BTreeMap::new(),
            log: None,
        }
    }

    /// An in-memory store built by applying `entries` in order.
    pub fn from_entries(entries: &[LogEntry]) -> Result<Self, AnnotationError> {
        let mut store = Self::in_memory();
        for (i, e) in entries.iter().enumerate() {
            store.apply_entry(e, i + 1)?;
        }
        Ok(store)
    }

    /// Writes a fresh log holding `entries` to `path` (via a temporary file
    /// and rename) and returns the store opened on it.
    pub fn create(
        path: impl AsRef<Path>,
        entries: &[LogEntry],
        durability: Durability,
    ) -> Result<Self, AnnotationError> {
        let path = path.as_ref();
        let mut store = Self::from_entries(entries)?;
        let tmp = path.with_extension("jsonl.tmp");
        {
            let mut file = File::create(&tmp)?;
            for e in entries {
                serde_json::to_writer(&mut file, e).expect("log entries serialize");
                file.write_all(b"\n")?;
            }
            file.sync_all()?;
        }
        std::fs::rename(&tmp, path)?;
        store.attach(path, durability)?;
        Ok(store)
    }

    /// Replays the log at `path` and keeps appending to it.
    pub fn open(path: impl AsRef<Path>, durability: Durability) -> Result<Self, AnnotationError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        let complete = match text.rfind('\n') {
            Some(i) => i + 1,
            None => 0,
        };
        let store = Self::replay(&text[..complete])?;
        if complete < text.len() {
            let file = OpenOptions::new().write(true).open(path)?;
            file.set_len(complete as u64)?;
            file.sync_all()?;
        }
        let mut store = store;
        store.attach(path, durability)?;
        Ok(store)
    }

    /// Rebuilds state from log text. Every line must be a complete entry.
    pub fn replay(text: &str) -> Result<Self, AnnotationError> {
        let mut store = Self::in_memory();
        for (idx, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let entry: LogEntry = serde_json::from_str(line).map_err(|e| AnnotationError::CorruptLog {
                line: idx + 1,
                message: e.to_string(),
            })?;
            store.apply_entry(&entry, idx + 1)?;
        }
        Ok(store)
    }

    fn attach(&mut self, path: &Path, durability: Durability) -> Result<(), AnnotationError> {
        let file = OpenOptions::new().append(true).open(path)?;
        self.log = Some(LogWriter {
            path: path.to_path_buf(),
            file,
            durability,
        });
        Ok(())
    }

    fn apply_entry(&mut self, entry: &LogEntry, line: usize) -> Result<(), AnnotationError> {
        match entry {
            LogEntry::Propose {
                image_id,
                width,
                height,
                proposed_box,
                note,
                at,
            } => {
                if self.records.contains_key(image_id) {
                    return Err(AnnotationError::CorruptLog {
                        line,
                        message: format!("duplicate proposal for `{image_id}`"),
                    });
                }
                let failed = proposed_box.is_none();
                self.records.insert(
                    image_id.clone(),
                    AnnotationRecord {
                        image_id: image_id.clone(),
                        proposed_box: *proposed_box,
                        status: if failed {
                            ReviewStatus::Rejected
                        } else {
                            ReviewStatus::Proposed
                        },
                        final_box: None,
                        reviewer: failed.then(|| LOCALIZER_REVIEWER.to_string()),
                        reviewed_at: failed.then_some(*at),
                        source: HEURISTIC_SOURCE.to_string(),
                        note: note.clone(),
                        width: *width,
                        height: *height,
                        version: 0,
                    },
                );
                Ok(())
            }
            LogEntry::Review {
                image_id,
                decision,
                reviewer,
                at,
            } => {
                let record = self.records.get_mut(image_id).ok_or_else(|| AnnotationError::CorruptLog {
                    line,
                    message: format!("review of unknown image `{image_id}`"),
                })?;
                let (status, final_box) = resolve(record, decision)?;
                record.status = status;
                record.final_box = final_box;
                record.reviewer = Some(reviewer.clone());
                record.reviewed_at = Some(*at);
                record.version += 1;
                Ok(())
            }
        }
    }

    pub fn get(&self, image_id: &str) -> Option<&AnnotationRecord> {
        self.records.get(image_id)
    }

    /// Records in image-id order.
    pub fn records(&self) -> impl Iterator<Item = &AnnotationRecord> {
        self.records.values()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn progress(&self) -> Progress {
        let mut p = Progress::default();
        for r in self.records.values() {
            match r.status {
                ReviewStatus::Proposed => p.proposed += 1,
                ReviewStatus::Accepted => p.accepted += 1,
                ReviewStatus::Corrected => p.corrected += 1,
                ReviewStatus::Rejected => p.rejected += 1,
            }
        }
        p
    }

    /// Applies a reviewer decision.
    ///
    /// A decision that would leave the record exactly as it is (same
    /// status, final box and reviewer) is a no-op and is not logged, even
    /// if `expected_version` is stale. Otherwise a stale `expected_version`
    /// is a [`AnnotationError::Conflict`].
    pub fn apply_review(
        &mut self,
        image_id: &str,
        decision: Decision,
        reviewer: &str,
        at: DateTime<Utc>,
        expected_version: Option<u64>,
    ) -> Result<ReviewOutcome, AnnotationError> {
        if reviewer.trim().is_empty() {
            return Err(AnnotationError::InvalidDecision("reviewer must not be empty".into()));
        }
        let record = self
            .records
            .get(image_id)
            .ok_or_else(|| AnnotationError::NotFound(image_id.to_string()))?;
        let (status, final_box) = resolve(record, &decision)?;
        if status == record.status
            && final_box == record.final_box
            && record.reviewer.as_deref() == Some(reviewer)
        {
            return Ok(ReviewOutcome {
                record: record.clone(),
                changed: false,
            });
        }
        if let Some(expected) = expected_version {
            if expected != record.version {
                return Err(AnnotationError::Conflict {
                    image_id: image_id.to_string(),
                    expected,
                    current: record.version,
                });
            }
        }
        let entry = LogEntry::Review {
            image_id: image_id.to_string(),
            decision,
            reviewer: reviewer.to_string(),
            at,
        };
        if let Some(log) = self.log.as_mut() {
            log.append(&entry)?;
        }
        self.apply_entry(&entry, 0)?;
        Ok(ReviewOutcome {
            record: self.records[image_id].clone(),
            changed: true,
        })
    }

    pub fn log_path(&self) -> Option<&Path> {
        self.log.as_ref().map(|l| l.path.as_path())
    }
}

impl PartialEq for AnnotationStore {
    fn eq(&self, other: &Self) -> bool {
        self.records == other.records
    }
}

/// The status and final box a decision leads to, after validation.
fn resolve(
    record: &AnnotationRecord,
    decision: &Decision,
) -> Result<(ReviewStatus, Option<BoundingBox>), AnnotationError> {
    match decision {
        Decision::Accept => match record.proposed_box {
            Some(b) => Ok((ReviewStatus::Accepted, Some(b))),
            None => Err(AnnotationError::InvalidDecision(format!(
                "`{}` has no proposal to accept; correct it with a box instead",
                record.image_id
            ))),
        },
        Decision::Reject => Ok((ReviewStatus::Rejected, None)),
        Decision::Correct { bbox } => {
            if !bbox.is_valid() {
                return Err(AnnotationError::InvalidBox {
                    bbox: *bbox,
                    reason: "zero area".into(),
                });
            }
            if !bbox.fits_within(record.width, record.height) {
                return Err(AnnotationError::InvalidBox {
                    bbox: *bbox,
                    reason: format!("outside the {}x{} image", record.width, record.height),
                });
            }
            // Correcting to the proposal itself is an acceptance.
            if Some(*bbox) == record.proposed_box {
                Ok((ReviewStatus::Accepted, Some(*bbox)))
            } else {
                Ok((ReviewStatus::Corrected, Some(*bbox)))
            }
        }
    }
}
