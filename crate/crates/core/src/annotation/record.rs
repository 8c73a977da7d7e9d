use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::geometry::BoundingBox;

/// Provenance tag of machine-generated proposals.
pub const HEURISTIC_SOURCE: &str = "heuristic";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReviewStatus {
    Proposed,
    Accepted,
    Corrected,
    Rejected,
}

impl ReviewStatus {
    pub const ALL: [ReviewStatus; 4] = [
        ReviewStatus::Proposed,
        ReviewStatus::Accepted,
        ReviewStatus::Corrected,
        ReviewStatus::Rejected,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ReviewStatus::Proposed => "proposed",
            ReviewStatus::Accepted => "accepted",
            ReviewStatus::Corrected => "corrected",
            ReviewStatus::Rejected => "rejected",
        }
    }
}

/// A reviewer's verdict on one proposal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "decision", rename_all = "lowercase")]
pub enum Decision {
    Accept,
    Reject,
    Correct {
        #[serde(rename = "box")]
        bbox: BoundingBox,
    },
}

/// Review state of one image.
///
/// Invariants, upheld by [`super::AnnotationStore`]:
/// - accepted ⇒ `final_box == proposed_box`
/// - corrected ⇒ `final_box` present and different from `proposed_box`
/// - rejected ⇒ no `final_box`
/// - anything but proposed ⇒ `reviewer` and `reviewed_at` present
///
/// Images the localizer could not handle start out rejected with no
/// proposal, reviewer `"localizer"` and the failure in `note`; a human can
/// still correct them with a hand-drawn box.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotationRecord {
    pub image_id: String,
    pub proposed_box: Option<BoundingBox>,
    pub status: ReviewStatus,
    pub final_box: Option<BoundingBox>,
    pub reviewer: Option<String>,
    pub reviewed_at: Option<DateTime<Utc>>,
    pub source: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub width: u32,
    pub height: u32,
    /// Number of decisions applied; used as the optimistic-concurrency token.
    pub version: u64,
}

impl AnnotationRecord {
    /// Checks the status invariants listed on the type.
    pub fn is_consistent(&self) -> bool {
        let reviewed = self.reviewer.is_some() && self.reviewed_at.is_some();
        match self.status {
            ReviewStatus::Proposed => self.final_box.is_none() && self.proposed_box.is_some(),
            ReviewStatus::Accepted => {
                reviewed && self.final_box.is_some() && self.final_box == self.proposed_box
            }
            ReviewStatus::Corrected => {
                reviewed && self.final_box.is_some() && self.final_box != self.proposed_box
            }
            ReviewStatus::Rejected => reviewed && self.final_box.is_none(),
        }
    }
}
