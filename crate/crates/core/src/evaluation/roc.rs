use serde::{Deserialize, Serialize};

use super::{EvalError, ScoredPrediction};
use crate::annotation::Label;

/// One ROC vertex: scores `>= threshold` are called positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    /// `+inf` for the all-negative starting vertex.
    pub threshold: f64,
    pub specificity: f64,
    pub sensitivity: f64,
    pub true_positives: u64,
    pub false_positives: u64,
}

/// An operating point picked off the ROC curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatingPoint {
    pub threshold: f64,
    pub sensitivity: f64,
    pub specificity: f64,
}

impl From<&RocPoint> for OperatingPoint {
    fn from(p: &RocPoint) -> Self {
        Self {
            threshold: p.threshold,
            sensitivity: p.sensitivity,
            specificity: p.specificity,
        }
    }
}

/// Splits scores into positives and negatives. Unlabeled examples are
/// ignored unless they are the positive class.
fn partition(preds: &[ScoredPrediction], positive: Label) -> Result<(Vec<f64>, Vec<f64>), EvalError> {
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    for p in preds {
        if !(0.0..=1.0).contains(&p.score) {
            return Err(EvalError::InvalidParameter(format!(
                "score {} of `{}` outside [0, 1]",
                p.score, p.image_id
            )));
        }
        if p.true_label == positive {
            pos.push(p.score);
        } else if p.true_label != Label::Unlabeled {
            neg.push(p.score);
        }
    }
    if pos.is_empty() || neg.is_empty() {
        return Err(EvalError::UndefinedRoc);
    }
    Ok((pos, neg))
}

/// ROC vertices ordered by decreasing threshold, from (specificity 1,
/// sensitivity 0) to (0, 1). Equal scores form one step.
pub fn roc_curve(preds: &[ScoredPrediction], positive: Label) -> Result<Vec<RocPoint>, EvalError> {
    let (pos, neg) = partition(preds, positive)?;
    let (p_total, n_total) = (pos.len() as u64, neg.len() as u64);
    let mut all: Vec<(f64, bool)> = pos
        .iter()
        .map(|&s| (s, true))
        .chain(neg.iter().map(|&s| (s, false)))
        .collect();
    all.sort_by(|a, b| b.0.total_cmp(&a.0));

    let point = |threshold, tp: u64, fp: u64| RocPoint {
        threshold,
        specificity: (n_total - fp) as f64 / n_total as f64,
        sensitivity: tp as f64 / p_total as f64,
        true_positives: tp,
        false_positives: fp,
    };
    let mut points = vec![point(f64::INFINITY, 0, 0)];
    let (mut tp, mut fp) = (0u64, 0u64);
    let mut i = 0;
    while i < all.len() {
        let score = all[i].0;
        while i < all.len() && all[i].0 == score {
            if all[i].1 {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        points.push(point(score, tp, fp));
    }
    Ok(points)
}

/// Trapezoidal area under the tie-grouped ROC curve. Accumulated in
/// integer counts, so it equals the Mann-Whitney statistic
/// `(#pos>neg + 0.5 #ties) / (P N)` up to one final division.
pub fn auc(preds: &[ScoredPrediction], positive: Label) -> Result<f64, EvalError> {
    let points = roc_curve(preds, positive)?;
    let last = points.last().expect("curve has endpoints");
    let (p_total, n_total) = (last.true_positives, last.false_positives);
    let doubled: u128 = points
        .windows(2)
        .map(|w| {
            let dfp = (w[1].false_positives - w[0].false_positives) as u128;
            dfp * (w[1].true_positives + w[0].true_positives) as u128
        })
        .sum();
    Ok(doubled as f64 / (2 * p_total as u128 * n_total as u128) as f64)
}

/// Sensitivity at the score threshold whose specificity is closest to
/// `target` from above. Only real score thresholds qualify; if none
/// reaches the target, the error carries the all-negative endpoint
/// (specificity 1, sensitivity 0) as the best achievable point.
pub fn sensitivity_at_specificity(
    preds: &[ScoredPrediction],
    positive: Label,
    target: f64,
) -> Result<OperatingPoint, EvalError> {
    if !(0.0..=1.0).contains(&target) {
        return Err(EvalError::InvalidParameter(format!("target specificity {target} outside [0, 1]")));
    }
    let points = roc_curve(preds, positive)?;
    // Specificity is non-increasing along the curve, so the last qualifying
    // vertex has the smallest qualifying specificity and, among equal
    // specificities, the highest sensitivity.
    points[1..]
        .iter()
        .take_while(|p| p.specificity >= target)
        .last()
        .map(OperatingPoint::from)
        .ok_or(EvalError::Unreachable {
            target,
            best: OperatingPoint::from(&points[0]),
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn preds(pos: &[f64], neg: &[f64]) -> Vec<ScoredPrediction> {
        let mk = |label, s: &f64| ScoredPrediction {
            image_id: String::new(),
            true_label: label,
            score: *s,
            fold: None,
        };
        pos.iter()
            .map(|s| mk(Label::Glaucoma, s))
            .chain(neg.iter().map(|s| mk(Label::Healthy, s)))
            .collect()
    }

    /// (specificity, sensitivity) at threshold `t`, by direct counting.
    fn at_threshold(pos: &[f64], neg: &[f64], t: f64) -> (f64, f64) {
        let tp = pos.iter().filter(|&&s| s >= t).count() as f64;
        let fp = neg.iter().filter(|&&s| s >= t).count() as f64;
        (1.0 - fp / neg.len() as f64, tp / pos.len() as f64)
    }

    fn mann_whitney(pos: &[f64], neg: &[f64]) -> f64 {
        let mut wins = 0.0;
        for &p in pos {
            for &n in neg {
                if p > n {
                    wins += 1.0;
                } else if p == n {
                    wins += 0.5;
                }
            }
        }
        wins / (pos.len() * neg.len()) as f64
    }

    #[test]
    fn small_curve_matches_enumeration() {
        let (pos, neg) = ([0.9, 0.4], [0.6, 0.1]);
        let curve = roc_curve(&preds(&pos, &neg), Label::Glaucoma).unwrap();
        let mut thresholds: Vec<f64> = pos.iter().chain(&neg).copied().collect();
        thresholds.sort_by(|a, b| b.total_cmp(a));
        assert_eq!(curve.len(), thresholds.len() + 1);
        assert_eq!((curve[0].specificity, curve[0].sensitivity), (1.0, 0.0));
        for (p, &t) in curve[1..].iter().zip(&thresholds) {
            assert_eq!(p.threshold, t);
            assert_eq!((p.specificity, p.sensitivity), at_threshold(&pos, &neg, t));
        }
        assert_eq!(auc(&preds(&pos, &neg), Label::Glaucoma).unwrap(), 0.75);
    }

    #[test]
    fn separated_and_tied_scores() {
        let sep = preds(&[0.9, 0.8], &[0.2, 0.1]);
        let curve = roc_curve(&sep, Label::Glaucoma).unwrap();
        assert!(curve.iter().any(|p| p.specificity == 1.0 && p.sensitivity == 1.0));
        assert_eq!(auc(&sep, Label::Glaucoma).unwrap(), 1.0);

        let tied = preds(&[0.5, 0.5, 0.5], &[0.5, 0.5]);
        let curve = roc_curve(&tied, Label::Glaucoma).unwrap();
        assert_eq!(curve.len(), 2);
        assert_eq!(auc(&tied, Label::Glaucoma).unwrap(), 0.5);
    }

    #[test]
    fn single_class_is_undefined() {
        assert!(matches!(
            roc_curve(&preds(&[0.3, 0.4], &[]), Label::Glaucoma),
            Err(EvalError::UndefinedRoc)
        ));
        assert!(matches!(auc(&preds(&[], &[0.3]), Label::Glaucoma), Err(EvalError::UndefinedRoc)));
    }

    #[test]
    fn out_of_range_score_rejected() {
        assert!(roc_curve(&preds(&[1.5], &[0.1]), Label::Glaucoma).is_err());
    }

    #[test]
    fn operating_point_examples() {
        let perfect = preds(&[0.9, 0.8], &[0.3, 0.1]);
        for target in [0.0, 0.5, 0.85, 1.0] {
            let op = sensitivity_at_specificity(&perfect, Label::Glaucoma, target).unwrap();
            assert_eq!(op.sensitivity, 1.0);
        }

        let tied = preds(&[0.5, 0.5], &[0.5, 0.5, 0.5]);
        match sensitivity_at_specificity(&tied, Label::Glaucoma, 0.85) {
            Err(EvalError::Unreachable { best, .. }) => {
                assert_eq!((best.specificity, best.sensitivity), (1.0, 0.0));
            }
            other => panic!("expected Unreachable, got {other:?}"),
        }

        let (pos, neg) = ([0.9, 0.8, 0.3], [0.7, 0.6, 0.2, 0.1]);
        // Exhaustive: among score thresholds with specificity >= 0.75, take
        // the smallest specificity, then the largest sensitivity.
        let mut best: Option<(f64, f64, f64)> = None;
        for &t in pos.iter().chain(&neg) {
            let (spec, sens) = at_threshold(&pos, &neg, t);
            if spec >= 0.75 {
                let better = match best {
                    None => true,
                    Some((bs, bsens, _)) => spec < bs || (spec == bs && sens > bsens),
                };
                if better {
                    best = Some((spec, sens, t));
                }
            }
        }
        let (spec, sens, t) = best.unwrap();
        let op = sensitivity_at_specificity(&preds(&pos, &neg), Label::Glaucoma, 0.75).unwrap();
        assert_eq!((op.specificity, op.sensitivity, op.threshold), (spec, sens, t));
        assert_eq!((spec, sens, t), (0.75, 2.0 / 3.0, 0.7));
    }

    fn score_sets() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
        let score = (0u32..=20).prop_map(|v| v as f64 / 20.0);
        (
            prop::collection::vec(score.clone(), 1..30),
            prop::collection::vec(score, 1..30),
        )
    }

    proptest! {
        #[test]
        fn auc_equals_pair_count((pos, neg) in score_sets()) {
            let a = auc(&preds(&pos, &neg), Label::Glaucoma).unwrap();
            prop_assert!((a - mann_whitney(&pos, &neg)).abs() < 1e-9);
        }

        #[test]
        fn auc_of_flipped_scores_complements((pos, neg) in score_sets()) {
            let flip = |v: &[f64]| v.iter().map(|s| 1.0 - s).collect::<Vec<_>>();
            let a = auc(&preds(&pos, &neg), Label::Glaucoma).unwrap();
            let b = auc(&preds(&flip(&pos), &flip(&neg)), Label::Glaucoma).unwrap();
            prop_assert!((a + b - 1.0).abs() < 1e-9);
        }

        #[test]
        fn curve_is_monotone((pos, neg) in score_sets()) {
            let curve = roc_curve(&preds(&pos, &neg), Label::Glaucoma).unwrap();
            for w in curve.windows(2) {
                prop_assert!(w[0].threshold > w[1].threshold);
                prop_assert!(w[0].specificity >= w[1].specificity);
                prop_assert!(w[0].sensitivity <= w[1].sensitivity);
            }
            let last = curve.last().unwrap();
            prop_assert_eq!((last.specificity, last.sensitivity), (0.0, 1.0));
        }
    }
}
