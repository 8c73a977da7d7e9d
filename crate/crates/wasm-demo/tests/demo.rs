use discloc_demo::{box_overlap, roc_explorer, FundusDemo};
use serde_json::Value;

fn parse(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

#[test]
fn fundus_localizes_with_page_defaults() {
    let mut demo = FundusDemo::new(3, 600, true, true);
    assert_eq!((demo.width(), demo.height()), (600, 600));
    assert_eq!(demo.rgba().len(), 600 * 600 * 4);
    let out = parse(&demo.localize("luminance", 0.95, 0.01, 2, 6, 16, 1.15).unwrap());
    assert_eq!(out["ok"], true, "{out}");
    assert!(out["iou"].as_f64().unwrap() >= 0.5, "{out}");
    assert_eq!(out["stages"].as_array().unwrap().len(), 5);
    for stage in ["gray", "cropped", "binary", "eroded", "dilated"] {
        assert_eq!(demo.stage_rgba(stage).len(), 600 * 600 * 4, "{stage}");
    }
    assert!(demo.stage_rgba("nope").is_empty());
}

#[test]
fn fundus_reports_failures_and_bad_parameters() {
    let mut demo = FundusDemo::new(1, 300, false, false);
    assert!(demo.localize("luminance", 1.5, 0.01, 2, 6, 16, 1.15).is_err());
    assert!(demo.localize("infrared", 0.95, 0.01, 2, 6, 16, 1.15).is_err());
    let out = parse(&demo.localize("luminance", 0.95, 0.01, 2, 6, 1_000_000, 1.15).unwrap());
    assert_eq!(out["ok"], false);
    assert!(out["error"].is_string());
}

#[test]
fn roc_explorer_tracks_separation() {
    let weak = parse(&roc_explorer(60, 80, 0.0, 0, 0.85, 9).unwrap());
    let strong = parse(&roc_explorer(60, 80, 0.6, 0, 0.85, 9).unwrap());
    let (a0, a1) = (weak["auc"].as_f64().unwrap(), strong["auc"].as_f64().unwrap());
    assert!(a1 > a0 && a1 > 0.95, "{a0} {a1}");
    let points = strong["points"].as_array().unwrap();
    assert_eq!(points.first().unwrap(), &serde_json::json!([0.0, 0.0]));
    assert_eq!(points.last().unwrap(), &serde_json::json!([1.0, 1.0]));
    let op = &strong["operating_point"];
    assert!(op["specificity"].as_f64().unwrap() >= 0.85);

    let tied = parse(&roc_explorer(60, 80, 0.3, 4, 0.85, 9).unwrap());
    assert!(tied["points"].as_array().unwrap().len() <= 7);
}

#[test]
fn overlap_matches_hand_counts() {
    let out = parse(&box_overlap(0, 0, 10, 10, 5, 5, 10, 10).unwrap());
    assert_eq!(out["intersection"], 25);
    assert_eq!(out["union"], 175);
    assert_eq!(out["iou"].as_f64().unwrap(), 25.0 / 175.0);
    assert_eq!(out["coverage"].as_f64().unwrap(), 0.25);
    assert!(box_overlap(0, 0, 0, 10, 5, 5, 10, 10).is_err());
}
