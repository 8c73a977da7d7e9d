//! JSON-lines record types read by the evaluation commands.

use std::collections::HashMap;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::{EvalError, LocalizationPair};
use crate::annotation::Label;
use crate::geometry::BoundingBox;

/// Classifier output for one image.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredPrediction {
    pub image_id: String,
    pub true_label: Label,
    /// Confidence that the image belongs to the positive class.
    pub score: f64,
    /// Cross-validation fold the prediction came from, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fold: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundTruthLine {
    pub image_id: String,
    #[serde(rename = "box")]
    pub bbox: BoundingBox,
}

/// A localizer output line; extra fields such as circles are ignored.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredictionLine {
    pub image_id: String,
    #[serde(rename = "box", default)]
    pub bbox: Option<BoundingBox>,
}

/// Parses one JSON value per non-blank line. Lines carrying a top-level
/// `summary` key (written by the ground-truth export) are skipped.
pub fn parse_jsonl<T: DeserializeOwned>(text: &str) -> Result<Vec<T>, EvalError> {
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let parse_err = |e: serde_json::Error| EvalError::Parse {
            line: idx + 1,
            message: e.to_string(),
        };
        let value: serde_json::Value = serde_json::from_str(line).map_err(parse_err)?;
        if value.get("summary").is_some() {
            continue;
        }
        out.push(serde_json::from_value(value).map_err(parse_err)?);
    }
    Ok(out)
}

/// Pairs every ground-truth box with the prediction for the same image,
/// in ground-truth order. Predictions without ground truth are dropped.
pub fn join_localization(truth: &[GroundTruthLine], predictions: &[PredictionLine]) -> Vec<LocalizationPair> {
    let by_id: HashMap<&str, Option<BoundingBox>> = predictions
        .iter()
        .map(|p| (p.image_id.as_str(), p.bbox))
        .collect();
    truth
        .iter()
        .map(|t| LocalizationPair {
            image_id: t.image_id.clone(),
            predicted: by_id.get(t.image_id.as_str()).copied().flatten(),
            truth: t.bbox,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn skips_summary_and_blank_lines() {
        let text = "{\"image_id\":\"a\",\"box\":{\"x\":1,\"y\":2,\"w\":3,\"h\":4}}\n\n{\"summary\":{\"accepted\":1}}\n";
        let lines: Vec<GroundTruthLine> = parse_jsonl(text).unwrap();
        assert_eq!(lines.len(), 1);
        assert_eq!(lines[0].bbox, BoundingBox::new(1, 2, 3, 4));
    }

    #[test]
    fn reports_bad_line_number() {
        let err = parse_jsonl::<ScoredPrediction>("{\"image_id\":\"a\",\"true_label\":\"healthy\",\"score\":0.2}\nnope\n");
        assert!(matches!(err, Err(EvalError::Parse { line: 2, .. })));
    }

    #[test]
    fn join_marks_missing_predictions() {
        let gt = vec![
            GroundTruthLine { image_id: "a".into(), bbox: BoundingBox::new(0, 0, 2, 2) },
            GroundTruthLine { image_id: "b".into(), bbox: BoundingBox::new(0, 0, 2, 2) },
        ];
        let preds = vec![
            PredictionLine { image_id: "b".into(), bbox: Some(BoundingBox::new(1, 1, 2, 2)) },
            PredictionLine { image_id: "z".into(), bbox: Some(BoundingBox::new(1, 1, 2, 2)) },
        ];
        let pairs = join_localization(&gt, &preds);
        assert_eq!(pairs.len(), 2);
        assert_eq!(pairs[0].predicted, None);
        assert_eq!(pairs[1].predicted, Some(BoundingBox::new(1, 1, 2, 2)));
    }

    #[test]
    fn prediction_lines_accept_localizer_output() {
        let line = r#"{"image_id":"a","box":{"x":1,"y":2,"w":3,"h":4},"circle":{"cx":1.0,"cy":2.0,"r":3.0},"retina":{"cx":1.0,"cy":2.0,"r":3.0}}"#;
        let preds: Vec<PredictionLine> = parse_jsonl(line).unwrap();
        assert_eq!(preds[0].bbox, Some(BoundingBox::new(1, 2, 3, 4)));
    }
}
