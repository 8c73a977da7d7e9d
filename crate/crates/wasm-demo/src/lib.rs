//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Results cross the boundary as JSON strings and raw RGBA buffers, so the
//! page needs nothing beyond `JSON.parse` and `ImageData`.

use discloc::annotation::Label;
use discloc::evaluation::{auc, gt_coverage, iou, roc_curve, sensitivity_at_specificity, EvalError, ScoredPrediction};
use discloc::imaging::{ChannelMode, RasterImage, StructuringElement};
use discloc::localizer::{localize_disc_traced, LocalizerConfig, StageImage, Trace};
use discloc::synth::Scene;
use discloc::BoundingBox;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;
use wasm_bindgen::prelude::*;

/// A rendered synthetic fundus and the trace of the last localization.
#[wasm_bindgen]
pub struct FundusDemo {
    scene: Scene,
    image: RasterImage,
    trace: Option<Trace>,
}

#[wasm_bindgen]
impl FundusDemo {
    #[wasm_bindgen(constructor)]
    pub fn new(seed: u32, size: u32, fringe: bool, spots: bool) -> FundusDemo {
        let mut rng = ChaCha8Rng::seed_from_u64(seed as u64);
        let size = size.clamp(64, 2000);
        let scene = Scene::random(&mut rng, size, size, fringe, spots, 3.0);
        let image = scene.render(1.0);
        FundusDemo { scene, image, trace: None }
    }

    pub fn width(&self) -> u32 {
        self.image.width()
    }

    pub fn height(&self) -> u32 {
        self.image.height()
    }

    /// The rendered image as RGBA.
    pub fn rgba(&self) -> Vec<u8> {
        rgba_of(&self.image)
    }

    /// Runs the localizer at a working size equal to the image size.
    /// Radii and areas are in working pixels. Returns a JSON summary.
    #[allow(clippy::too_many_arguments)]
    pub fn localize(
        &mut self,
        channel: &str,
        fringe_margin: f64,
        top_percentile: f64,
        erode_radius: u32,
        dilate_radius: u32,
        min_blob_area: u32,
        radius_expansion: f64,
    ) -> Result<String, String> {
        let cfg = LocalizerConfig {
            working_size: self.image.width(),
            channel_mode: channel.parse::<ChannelMode>().map_err(|e| e.to_string())?,
            fringe_margin,
            top_percentile,
            erode_se: StructuringElement::disk(erode_radius.max(1)),
            dilate_se: StructuringElement::disk(dilate_radius.max(1)),
            min_blob_area: min_blob_area as u64,
            radius_expansion,
        };
        cfg.validate().map_err(|e| e.to_string())?;
        let (result, trace) = localize_disc_traced(&self.image, &cfg, true);
        let truth = self.scene.disc_box(1.0);
        let stages: Vec<_> = trace
            .stages
            .iter()
            .map(|s| json!({"name": s.name, "foreground": s.foreground}))
            .collect();
        let summary = match &result {
            Ok(d) => json!({
                "ok": true,
                "box": d.bbox,
                "circle": d.circle,
                "retina": d.retina,
                "truth": truth,
                "iou": iou(&d.bbox, &truth).ok(),
                "coverage": gt_coverage(&d.bbox, &truth).ok(),
                "level": trace.binarization_level,
                "candidates": trace.candidates.len(),
                "stages": stages,
            }),
            Err(e) => json!({
                "ok": false,
                "error": e.to_string(),
                "truth": truth,
                "stages": stages,
            }),
        };
        self.trace = Some(trace);
        Ok(summary.to_string())
    }

    /// RGBA of a stage from the last `localize` call, or an empty buffer.
    /// Stages are at working size, which here equals the image size.
    pub fn stage_rgba(&self, name: &str) -> Vec<u8> {
        let Some(stage) = self.trace.as_ref().and_then(|t| t.stage(name)) else {
            return Vec::new();
        };
        match &stage.image {
            Some(StageImage::Gray(img)) => rgba_of(img),
            Some(StageImage::Mask(mask)) => rgba_of(&mask.to_image()),
            None => Vec::new(),
        }
    }
}

fn rgba_of(img: &RasterImage) -> Vec<u8> {
    let channels = img.channels() as usize;
    img.data()
        .chunks_exact(channels)
        .flat_map(|p| match p {
            [v] => [*v, *v, *v, 255],
            [r, g, b] => [*r, *g, *b, 255],
            _ => unreachable!("rasters have 1 or 3 channels"),
        })
        .collect()
}

/// Draws `n` scores with a bell-ish spread around `center`, rounded to
/// `levels` distinct values when `levels > 0` (which creates ties).
fn draw_scores(rng: &mut ChaCha8Rng, n: usize, center: f64, levels: u32) -> Vec<f64> {
    (0..n)
        .map(|_| {
            let bump: f64 = (0..4).map(|_| rng.random::<f64>()).sum::<f64>() / 4.0 - 0.5;
            let v = (center + 0.6 * bump).clamp(0.0, 1.0);
            if levels > 0 {
                (v * levels as f64).round() / levels as f64
            } else {
                v
            }
        })
        .collect()
}

#[derive(Serialize)]
struct RocView {
    /// `[1 - specificity, sensitivity]` vertices.
    points: Vec<[f64; 2]>,
    auc: f64,
    target_specificity: f64,
    operating_point: Option<discloc::evaluation::OperatingPoint>,
}

/// Simulated classifier scores: glaucoma centred `separation / 2` above
/// healthy. Returns the ROC curve, AUC and the operating point at
/// `target_specificity` as JSON.
#[wasm_bindgen]
pub fn roc_explorer(
    positives: u32,
    negatives: u32,
    separation: f64,
    levels: u32,
    target_specificity: f64,
    seed: u32,
) -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed as u64);
    let pos = draw_scores(&mut rng, positives.max(1) as usize, 0.5 + separation / 2.0, levels);
    let neg = draw_scores(&mut rng, negatives.max(1) as usize, 0.5 - separation / 2.0, levels);
    let preds: Vec<ScoredPrediction> = pos
        .iter()
        .map(|&s| (Label::Glaucoma, s))
        .chain(neg.iter().map(|&s| (Label::Healthy, s)))
        .enumerate()
        .map(|(i, (true_label, score))| ScoredPrediction {
            image_id: i.to_string(),
            true_label,
            score,
            fold: None,
        })
        .collect();
    let curve = roc_curve(&preds, Label::Glaucoma).map_err(|e| e.to_string())?;
    let operating_point = match sensitivity_at_specificity(&preds, Label::Glaucoma, target_specificity) {
        Ok(p) => Some(p),
        Err(EvalError::Unreachable { .. }) => None,
        Err(e) => return Err(e.to_string()),
    };
    let view = RocView {
        points: curve.iter().map(|p| [1.0 - p.specificity, p.sensitivity]).collect(),
        auc: auc(&preds, Label::Glaucoma).map_err(|e| e.to_string())?,
        target_specificity,
        operating_point,
    };
    Ok(serde_json::to_string(&view).expect("serializable"))
}

/// IOU and ground-truth coverage of two boxes as JSON.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn box_overlap(px: u32, py: u32, pw: u32, ph: u32, tx: u32, ty: u32, tw: u32, th: u32) -> Result<String, String> {
    let pred = BoundingBox::new(px, py, pw, ph);
    let truth = BoundingBox::new(tx, ty, tw, th);
    let iou = iou(&pred, &truth).map_err(|e| e.to_string())?;
    let coverage = gt_coverage(&pred, &truth).map_err(|e| e.to_string())?;
    Ok(json!({
        "iou": iou,
        "coverage": coverage,
        "intersection": pred.intersection_area(&truth),
        "union": pred.union_area(&truth),
    })
    .to_string())
}
