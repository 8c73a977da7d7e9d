use serde::Serialize;

use super::record::ReviewStatus;
use super::store::{AnnotationStore, Progress};
use crate::evaluation::GroundTruthLine;

/// Verified boxes plus per-status counts of the store they came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundTruthExport {
    pub lines: Vec<GroundTruthLine>,
    pub summary: Progress,
}

#[derive(Serialize)]
struct SummaryLine<'a> {
    summary: &'a Progress,
}

impl GroundTruthExport {
    /// One `{"image_id","box"}` line per box, then a `{"summary":{..}}` line.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for line in &self.lines {
            out.push_str(&serde_json::to_string(line).expect("serializable"));
            out.push('\n');
        }
        out.push_str(&serde_json::to_string(&SummaryLine { summary: &self.summary }).expect("serializable"));
        out.push('\n');
        out
    }
}

/// Accepted and corrected records, in image-id order, with their final box.
pub fn export_ground_truth(store: &AnnotationStore) -> GroundTruthExport {
    let lines = store
        .records()
        .filter(|r| matches!(r.status, ReviewStatus::Accepted | ReviewStatus::Corrected))
        .filter_map(|r| {
            r.final_box.map(|bbox| GroundTruthLine {
                image_id: r.image_id.clone(),
                bbox,
            })
        })
        .collect();
    GroundTruthExport {
        lines,
        summary: store.progress(),
    }
}
