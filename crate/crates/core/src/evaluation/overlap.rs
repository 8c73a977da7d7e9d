use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::geometry::BoundingBox;

/// Which overlap a localization report is scored with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OverlapMetric {
    /// Intersection over union.
    Iou,
    /// Intersection over ground-truth area: how much of the true disc the
    /// prediction contains.
    Coverage,
}

impl OverlapMetric {
    pub fn name(&self) -> &'static str {
        match self {
            OverlapMetric::Iou => "iou",
            OverlapMetric::Coverage => "coverage",
        }
    }

    pub fn score(&self, pred: &BoundingBox, truth: &BoundingBox) -> Result<f64, EvalError> {
        match self {
            OverlapMetric::Iou => iou(pred, truth),
            OverlapMetric::Coverage => gt_coverage(pred, truth),
        }
    }
}

impl std::str::FromStr for OverlapMetric {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "iou" => Ok(OverlapMetric::Iou),
            "coverage" => Ok(OverlapMetric::Coverage),
            other => Err(format!("unknown overlap metric `{other}`")),
        }
    }
}

fn check(b: &BoundingBox) -> Result<(), EvalError> {
    if b.is_valid() {
        Ok(())
    } else {
        Err(EvalError::InvalidBox(*b))
    }
}

pub fn iou(a: &BoundingBox, b: &BoundingBox) -> Result<f64, EvalError> {
    check(a)?;
    check(b)?;
    Ok(a.intersection_area(b) as f64 / a.union_area(b) as f64)
}

pub fn gt_coverage(pred: &BoundingBox, truth: &BoundingBox) -> Result<f64, EvalError> {
    check(pred)?;
    check(truth)?;
    Ok(pred.intersection_area(truth) as f64 / truth.area() as f64)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalizationPair {
    pub image_id: String,
    pub predicted: Option<BoundingBox>,
    pub truth: BoundingBox,
}

impl LocalizationPair {
    /// Overlap score, 0 for a missing prediction.
    pub fn score(&self, metric: OverlapMetric) -> Result<f64, EvalError> {
        match &self.predicted {
            Some(p) => metric.score(p, &self.truth),
            None => {
                check(&self.truth)?;
                Ok(0.0)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccuracyRow {
    pub threshold: f64,
    pub percent: f64,
    pub correct: usize,
    pub total: usize,
}

/// Percentage of pairs whose overlap is strictly above each threshold.
/// Threshold 0 therefore means "any overlap at all". Missing predictions
/// fail at every threshold.
pub fn localization_accuracy(
    pairs: &[LocalizationPair],
    thresholds: &[f64],
    metric: OverlapMetric,
) -> Result<Vec<AccuracyRow>, EvalError> {
    if pairs.is_empty() {
        return Err(EvalError::EmptyInput);
    }
    if let Some(t) = thresholds.iter().find(|t| !(0.0..1.0).contains(*t)) {
        return Err(EvalError::InvalidParameter(format!("threshold {t} outside [0, 1)")));
    }
    let scores: Vec<Option<f64>> = pairs
        .iter()
        .map(|p| p.predicted.map(|_| p.score(metric)).transpose())
        .collect::<Result<_, _>>()?;
    Ok(thresholds
        .iter()
        .map(|&t| {
            let correct = scores.iter().filter(|s| matches!(s, Some(v) if *v > t)).count();
            AccuracyRow {
                threshold: t,
                percent: 100.0 * correct as f64 / pairs.len() as f64,
                correct,
                total: pairs.len(),
            }
        })
        .collect())
}

/// Mean overlap in percent; missing predictions count as 0.
pub fn mean_overlap(pairs: &[LocalizationPair], metric: OverlapMetric) -> Result<f64, EvalError> {
    if pairs.is_empty() {
        return Err(EvalError::EmptyInput);
    }
    let total: f64 = pairs
        .iter()
        .map(|p| p.score(metric))
        .sum::<Result<f64, _>>()?;
    Ok(100.0 * total / pairs.len() as f64)
}
