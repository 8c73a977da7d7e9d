use std::collections::BTreeMap;

use anyhow::{bail, Context};
use discloc::annotation::{DatasetManifest, Label};
use discloc::evaluation::{
    auc, classification_report, join_localization, localization_accuracy, mean_overlap, parse_jsonl,
    sensitivity_at_specificity, stratified_kfold, stratified_subsample, AccuracyRow, ClassificationReport,
    ConfusionMatrix, EvalError, GroundTruthLine, OperatingPoint, OverlapMetric, PredictionLine,
    ScoredPrediction,
};
use serde::Serialize;

use crate::args::{EvalClfArgs, EvalLocArgs, SplitArgs};
use crate::output::{read_text, write_json};
use crate::Status;

#[derive(Serialize)]
struct LocReport {
    metric: OverlapMetric,
    images: usize,
    missing_predictions: Vec<String>,
    accuracy: Vec<AccuracyRow>,
    mean_overlap_percent: f64,
}

pub fn eval_loc(args: EvalLocArgs) -> anyhow::Result<Status> {
    let truth: Vec<GroundTruthLine> =
        parse_jsonl(&read_text(&args.gt)?).with_context(|| format!("ground truth {}", args.gt.display()))?;
    let preds: Vec<PredictionLine> =
        parse_jsonl(&read_text(&args.pred)?).with_context(|| format!("predictions {}", args.pred.display()))?;
    let pairs = join_localization(&truth, &preds);
    let report = LocReport {
        metric: args.metric,
        images: pairs.len(),
        missing_predictions: pairs
            .iter()
            .filter(|p| p.predicted.is_none())
            .map(|p| p.image_id.clone())
            .collect(),
        accuracy: localization_accuracy(&pairs, &args.thresholds, args.metric)?,
        mean_overlap_percent: mean_overlap(&pairs, args.metric)?,
    };

    let name = args.metric.name();
    println!("{:<12} {:>9} {:>9}", format!("{name} >"), "accuracy", "correct");
    for row in &report.accuracy {
        println!(
            "{:<12} {:>8.2}% {:>5}/{}",
            row.threshold, row.percent, row.correct, row.total
        );
    }
    println!("mean {name}: {:.2}%", report.mean_overlap_percent);
    if !report.missing_predictions.is_empty() {
        println!("no prediction: {} images", report.missing_predictions.len());
    }
    if let Some(out) = &args.out {
        write_json(out, &report)?;
    }
    Ok(Status::Ok)
}

#[derive(Serialize)]
struct FoldAuc {
    fold: usize,
    auc: Option<f64>,
}

#[derive(Serialize)]
struct ClfReport {
    decision_threshold: f64,
    confusion: ConfusionMatrix,
    report: ClassificationReport,
    unlabeled: usize,
    auc_pooled: Option<f64>,
    auc_per_fold: Vec<FoldAuc>,
    auc_fold_mean: Option<f64>,
    target_specificity: f64,
    operating_point: Option<OperatingPoint>,
    /// Set when no score threshold reaches the target specificity.
    best_below_target: Option<OperatingPoint>,
}

pub fn eval_clf(args: EvalClfArgs) -> anyhow::Result<Status> {
    let preds: Vec<ScoredPrediction> =
        parse_jsonl(&read_text(&args.pred)?).with_context(|| format!("predictions {}", args.pred.display()))?;
    if preds.is_empty() {
        bail!("no predictions in {}", args.pred.display());
    }
    let mut cm = ConfusionMatrix::binary();
    let mut unlabeled = 0;
    for p in &preds {
        let truth = match p.true_label {
            Label::Healthy => 0,
            Label::Glaucoma => 1,
            Label::Unlabeled => {
                unlabeled += 1;
                continue;
            }
        };
        let predicted = usize::from(p.score >= args.decision_threshold);
        cm.record(truth, predicted);
    }
    let report = classification_report(&cm)?;

    let defined = |r: Result<f64, EvalError>| match r {
        Ok(v) => Ok(Some(v)),
        Err(EvalError::UndefinedRoc) => Ok(None),
        Err(e) => Err(e),
    };
    let auc_pooled = defined(auc(&preds, Label::Glaucoma))?;
    let mut by_fold: BTreeMap<usize, Vec<ScoredPrediction>> = BTreeMap::new();
    for p in &preds {
        if let Some(f) = p.fold {
            by_fold.entry(f).or_default().push(p.clone());
        }
    }
    let auc_per_fold = by_fold
        .iter()
        .map(|(&fold, ps)| Ok(FoldAuc { fold, auc: defined(auc(ps, Label::Glaucoma))? }))
        .collect::<Result<Vec<_>, EvalError>>()?;
    let fold_values: Vec<f64> = auc_per_fold.iter().filter_map(|f| f.auc).collect();
    let auc_fold_mean =
        (!fold_values.is_empty()).then(|| fold_values.iter().sum::<f64>() / fold_values.len() as f64);

    let (operating_point, best_below_target) =
        match sensitivity_at_specificity(&preds, Label::Glaucoma, args.at_specificity) {
            Ok(p) => (Some(p), None),
            Err(EvalError::Unreachable { best, .. }) => (None, Some(best)),
            Err(EvalError::UndefinedRoc) => (None, None),
            Err(e) => return Err(e.into()),
        };

    let out = ClfReport {
        decision_threshold: args.decision_threshold,
        confusion: cm,
        report,
        unlabeled,
        auc_pooled,
        auc_per_fold,
        auc_fold_mean,
        target_specificity: args.at_specificity,
        operating_point,
        best_below_target,
    };
    print_clf(&out);
    if let Some(path) = &args.out {
        write_json(path, &out)?;
    }
    Ok(Status::Ok)
}

fn print_clf(r: &ClfReport) {
    let rep = &r.report;
    println!("{:<10} {:>10} {:>10} {:>8} {:>8}", "class", "precision", "recall", "f1", "support");
    for m in &rep.per_class {
        println!(
            "{:<10} {:>9.2}% {:>9.2}% {:>8.4} {:>8}",
            m.class, m.precision.value, m.recall.value, m.f1.value, m.support
        );
    }
    println!(
        "{:<10} {:>9.2}% {:>9.2}% {:>8.4} {:>8}",
        "weighted", rep.weighted_precision, rep.weighted_recall, rep.weighted_f1, rep.total
    );
    println!("accuracy: {:.2}%", rep.accuracy);
    if r.unlabeled > 0 {
        println!("unlabeled (ignored): {}", r.unlabeled);
    }
    match r.auc_pooled {
        Some(a) => println!("AUC (pooled): {a:.4}"),
        None => println!("AUC (pooled): undefined"),
    }
    if let Some(mean) = r.auc_fold_mean {
        println!("AUC (mean of {} folds): {mean:.4}", r.auc_per_fold.len());
    }
    match (&r.operating_point, &r.best_below_target) {
        (Some(p), _) => println!(
            "sensitivity at specificity >= {:.2}: {:.2}% (specificity {:.2}%, threshold {})",
            r.target_specificity,
            100.0 * p.sensitivity,
            100.0 * p.specificity,
            p.threshold
        ),
        (None, Some(_)) => println!(
            "sensitivity at specificity >= {:.2}: unreachable",
            r.target_specificity
        ),
        (None, None) => {}
    }
}

#[derive(Serialize)]
struct KFoldOut {
    k: usize,
    seed: u64,
    fold_sizes: Vec<usize>,
    folds: BTreeMap<String, usize>,
}

pub fn split(args: SplitArgs) -> anyhow::Result<Status> {
    let manifest = DatasetManifest::load(&args.manifest)
        .with_context(|| format!("manifest {}", args.manifest.display()))?;
    match (args.k, args.train_n) {
        (Some(k), None) => {
            let a = stratified_kfold(&manifest, k, args.seed)?;
            let sizes = a.fold_sizes();
            println!("{k} folds, sizes {sizes:?}");
            write_json(
                &args.out,
                &KFoldOut {
                    k,
                    seed: args.seed,
                    fold_sizes: sizes,
                    folds: a.folds,
                },
            )?;
        }
        (None, Some(n)) => {
            let s = stratified_subsample(&manifest, n, args.seed)?;
            println!("train {}, test {}", s.train.len(), s.test.len());
            if s.degraded {
                eprintln!("warning: a class was too small for its proportional share; gave it one training image");
            }
            write_json(&args.out, &s)?;
        }
        _ => unreachable!("clap enforces exactly one of --k and --train-n"),
    }
    Ok(Status::Ok)
}
