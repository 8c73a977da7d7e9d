use serde::{Deserialize, Serialize};

use super::EvalError;

/// Counts indexed by (true class, predicted class).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    classes: Vec<String>,
    /// Row-major: `counts[true * n + predicted]`.
    counts: Vec<u64>,
}

impl ConfusionMatrix {
    pub fn new<S: Into<String>>(classes: impl IntoIterator<Item = S>) -> Self {
        let classes: Vec<String> = classes.into_iter().map(Into::into).collect();
        let n = classes.len();
        Self {
            classes,
            counts: vec![0; n * n],
        }
    }

    /// Healthy/glaucoma matrix, the default class set.
    pub fn binary() -> Self {
        Self::new(["healthy", "glaucoma"])
    }

    /// Builds from rows of counts, one row per true class.
    pub fn from_rows<S: Into<String>>(
        classes: impl IntoIterator<Item = S>,
        rows: &[&[u64]],
    ) -> Result<Self, EvalError> {
        let mut cm = Self::new(classes);
        let n = cm.classes.len();
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(EvalError::InvalidParameter(format!("expected a {n}x{n} matrix")));
        }
        for (t, row) in rows.iter().enumerate() {
            for (p, &v) in row.iter().enumerate() {
                cm.counts[t * n + p] = v;
            }
        }
        Ok(cm)
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn index_of(&self, class: &str) -> Option<usize> {
        self.classes.iter().position(|c| c == class)
    }

    pub fn record(&mut self, truth: usize, predicted: usize) {
        let n = self.classes.len();
        self.counts[truth * n + predicted] += 1;
    }

    pub fn get(&self, truth: usize, predicted: usize) -> u64 {
        self.counts[truth * self.classes.len() + predicted]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn support(&self, class: usize) -> u64 {
        (0..self.classes.len()).map(|p| self.get(class, p)).sum()
    }

    fn predicted_total(&self, class: usize) -> u64 {
        (0..self.classes.len()).map(|t| self.get(t, class)).sum()
    }

    fn diagonal(&self) -> u64 {
        (0..self.classes.len()).map(|i| self.get(i, i)).sum()
    }

    /// One-vs-rest counts for `class`: (tp, fp, fn, tn).
    pub fn one_vs_rest(&self, class: usize) -> (u64, u64, u64, u64) {
        let tp = self.get(class, class);
        let fp = self.predicted_total(class) - tp;
        let fn_ = self.support(class) - tp;
        let tn = self.total() - tp - fp - fn_;
        (tp, fp, fn_, tn)
    }
}

/// A ratio that may have had a zero denominator. Degenerate values are
/// reported as 0 with the flag set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metric {
    pub value: f64,
    pub degenerate: bool,
}

impl Metric {
    fn ratio(num: f64, den: f64) -> Self {
        if den == 0.0 {
            Self {
                value: 0.0,
                degenerate: true,
            }
        } else {
            Self {
                value: num / den,
                degenerate: false,
            }
        }
    }

    fn percent(self) -> Self {
        Self {
            value: self.value * 100.0,
            ..self
        }
    }
}

/// TP / (TP + FP), in percent.
pub fn precision(cm: &ConfusionMatrix, class: usize) -> Metric {
    let (tp, fp, _, _) = cm.one_vs_rest(class);
    Metric::ratio(tp as f64, (tp + fp) as f64).percent()
}

/// TP / (TP + FN), in percent. Also called sensitivity.
pub fn recall(cm: &ConfusionMatrix, class: usize) -> Metric {
    let (tp, _, fn_, _) = cm.one_vs_rest(class);
    Metric::ratio(tp as f64, (tp + fn_) as f64).percent()
}

/// Harmonic mean of precision and recall, as a ratio in [0, 1].
pub fn f1(cm: &ConfusionMatrix, class: usize) -> Metric {
    let p = precision(cm, class);
    let r = recall(cm, class);
    let (p_frac, r_frac) = (p.value / 100.0, r.value / 100.0);
    let m = Metric::ratio(2.0 * p_frac * r_frac, p_frac + r_frac);
    Metric {
        degenerate: m.degenerate || p.degenerate || r.degenerate,
        ..m
    }
}

/// TN / (TN + FP), in percent.
pub fn specificity(cm: &ConfusionMatrix, class: usize) -> Metric {
    let (_, fp, _, tn) = cm.one_vs_rest(class);
    Metric::ratio(tn as f64, (tn + fp) as f64).percent()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub class: String,
    pub precision: Metric,
    pub recall: Metric,
    pub f1: Metric,
    pub specificity: Metric,
    pub support: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub per_class: Vec<ClassMetrics>,
    /// Support-weighted averages; precision and recall in percent.
    pub weighted_precision: f64,
    pub weighted_recall: f64,
    pub weighted_f1: f64,
    /// Percent of the diagonal.
    pub accuracy: f64,
    pub total: u64,
}

pub fn classification_report(cm: &ConfusionMatrix) -> Result<ClassificationReport, EvalError> {
    let total = cm.total();
    if total == 0 {
        return Err(EvalError::EmptyInput);
    }
    let per_class: Vec<ClassMetrics> = (0..cm.classes().len())
        .map(|c| ClassMetrics {
            class: cm.classes()[c].clone(),
            precision: precision(cm, c),
            recall: recall(cm, c),
            f1: f1(cm, c),
            specificity: specificity(cm, c),
            support: cm.support(c),
        })
        .collect();
    let weighted = |f: fn(&ClassMetrics) -> f64| {
        per_class.iter().map(|m| f(m) * m.support as f64).sum::<f64>() / total as f64
    };
    Ok(ClassificationReport {
        weighted_precision: weighted(|m| m.precision.value),
        weighted_recall: weighted(|m| m.recall.value),
        weighted_f1: weighted(|m| m.f1.value),
        accuracy: 100.0 * cm.diagonal() as f64 / total as f64,
        total,
        per_class,
    })
}
