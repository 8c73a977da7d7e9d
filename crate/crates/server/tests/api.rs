use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use chrono::{TimeZone, Utc};
use discloc::annotation::{
    AnnotationStore, DatasetManifest, Durability, Label, LogEntry, ManifestImage,
};
use discloc::BoundingBox;
use discloc_server::{router, serve, AppState, ImageSummary};
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

struct Fixture {
    _dir: tempfile::TempDir,
    log: std::path::PathBuf,
    state: Arc<AppState>,
}

fn proposed() -> BoundingBox {
    BoundingBox::new(10, 12, 20, 20)
}

fn fixture() -> Fixture {
    let dir = tempfile::tempdir().unwrap();
    let mut images = Vec::new();
    let mut entries = Vec::new();
    for (i, id) in ["a", "b", "c"].iter().enumerate() {
        let file = format!("{id}.png");
        image::GrayImage::from_pixel(64, 48, image::Luma([i as u8 * 40]))
            .save(dir.path().join(&file))
            .unwrap();
        images.push(ManifestImage {
            image_id: id.to_string(),
            path: file.into(),
            width: 64,
            height: 48,
            label: Label::Unlabeled,
        });
        entries.push(LogEntry::Propose {
            image_id: id.to_string(),
            width: 64,
            height: 48,
            proposed_box: (i < 2).then(proposed),
            note: (i == 2).then(|| "no candidate region".to_string()),
            at: Utc.timestamp_opt(0, 0).unwrap(),
        });
    }
    let manifest = DatasetManifest {
        dataset_name: "t".into(),
        images,
    };
    let log = dir.path().join("store.jsonl");
    let store = AnnotationStore::create(&log, &entries, Durability::Sync).unwrap();
    let state = AppState::new(store, manifest, dir.path());
    Fixture { _dir: dir, log, state }
}

async fn call(state: &Arc<AppState>, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let req = Request::builder().method(method).uri(uri);
    let req = match body {
        Some(b) => req
            .header("content-type", "application/json")
            .body(Body::from(b.to_string())),
        None => req.body(Body::empty()),
    }
    .unwrap();
    let resp = router(state.clone()).oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let value = serde_json::from_slice(&bytes).unwrap_or(Value::Null);
    (status, value)
}

async fn put(state: &Arc<AppState>, id: &str, body: Value) -> (StatusCode, Value) {
    call(state, "PUT", &format!("/api/annotations/{id}"), Some(body)).await
}

#[tokio::test]
async fn read_back_after_propose() {
    let f = fixture();
    let (status, body) = call(&f.state, "GET", "/api/annotations/a", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["status"], "proposed");
    assert_eq!(body["proposed_box"], json!({"x": 10, "y": 12, "w": 20, "h": 20}));
    assert_eq!(body["source"], "heuristic");
    assert_eq!(body["version"], 0);
}

#[tokio::test]
async fn failed_localization_is_queued_without_box() {
    let f = fixture();
    let (_, body) = call(&f.state, "GET", "/api/annotations/c", None).await;
    assert_eq!(body["status"], "rejected");
    assert!(body["proposed_box"].is_null());
    assert_eq!(body["note"], "no candidate region");
}

#[tokio::test]
async fn list_images_in_manifest_order() {
    let f = fixture();
    let (status, body) = call(&f.state, "GET", "/api/images", None).await;
    assert_eq!(status, StatusCode::OK);
    let list: Vec<ImageSummary> = serde_json::from_value(body).unwrap();
    let ids: Vec<_> = list.iter().map(|s| s.image_id.as_str()).collect();
    assert_eq!(ids, ["a", "b", "c"]);
    assert_eq!((list[0].width, list[0].height), (64, 48));
}

#[tokio::test]
async fn image_file_is_served_verbatim() {
    let f = fixture();
    let req = Request::builder().uri("/api/images/b/file").body(Body::empty()).unwrap();
    let resp = router(f.state.clone()).oneshot(req).await.unwrap();
    assert_eq!(resp.status(), StatusCode::OK);
    assert_eq!(resp.headers()["content-type"], "image/png");
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let on_disk = std::fs::read(f._dir.path().join("b.png")).unwrap();
    assert_eq!(bytes.as_ref(), on_disk.as_slice());

    let (status, _) = call(&f.state, "GET", "/api/images/zz/file", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn put_then_get_reflects_decision() {
    let f = fixture();
    let (status, body) = put(&f.state, "a", json!({"decision": "accept", "reviewer": "dr", "version": 0})).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["status"], "accepted");
    let (_, body) = call(&f.state, "GET", "/api/annotations/a", None).await;
    assert_eq!(body["status"], "accepted");
    assert_eq!(body["final_box"], body["proposed_box"]);
    assert_eq!(body["reviewer"], "dr");
    assert!(body["reviewed_at"].is_string());
    assert_eq!(body["version"], 1);

    let corrected = json!({"x": 20, "y": 12, "w": 20, "h": 20});
    let (status, body) = put(
        &f.state,
        "b",
        json!({"decision": "correct", "box": corrected, "reviewer": "dr", "version": 0}),
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["status"], "corrected");
    assert_eq!(body["final_box"], corrected);

    let (_, progress) = call(&f.state, "GET", "/api/progress", None).await;
    assert_eq!(progress, json!({"proposed": 0, "accepted": 1, "corrected": 1, "rejected": 1}));
}

#[tokio::test]
async fn malformed_box_is_422_and_store_unchanged() {
    let f = fixture();
    let before = f.state.snapshot().await;
    let log_before = std::fs::read(&f.log).unwrap();
    let bad = [
        json!({"decision": "correct", "box": {"x": -1, "y": 0, "w": 5, "h": 5}, "reviewer": "dr"}),
        json!({"decision": "correct", "box": {"x": 1, "y": 0, "w": 5}, "reviewer": "dr"}),
        json!({"decision": "correct", "box": {"x": 1, "y": 1, "w": 0, "h": 5}, "reviewer": "dr"}),
        json!({"decision": "correct", "box": {"x": 60, "y": 1, "w": 10, "h": 5}, "reviewer": "dr"}),
        json!({"decision": "correct", "box": "nope", "reviewer": "dr"}),
        json!({"decision": "correct", "reviewer": "dr"}),
        json!({"decision": "accept", "box": {"x": 1, "y": 1, "w": 5, "h": 5}, "reviewer": "dr"}),
        json!({"decision": "maybe", "reviewer": "dr"}),
        json!({"decision": "accept", "reviewer": ""}),
        json!({"decision": "accept"}),
    ];
    for body in bad {
        let (status, resp) = put(&f.state, "a", body.clone()).await;
        assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY, "{body} -> {resp}");
        assert!(resp["error"].is_string());
    }
    assert_eq!(f.state.snapshot().await, before);
    assert_eq!(std::fs::read(&f.log).unwrap(), log_before);
}

#[tokio::test]
async fn non_json_body_is_400() {
    let f = fixture();
    let req = Request::builder()
        .method("PUT")
        .uri("/api/annotations/a")
        .body(Body::from("{not json"))
        .unwrap();
    let resp = router(f.state.clone()).oneshot(req).await.unwrap();
    assert_eq!(resp.status(), StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn unknown_id_is_404() {
    let f = fixture();
    let (status, _) = call(&f.state, "GET", "/api/annotations/zz", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    let (status, _) = put(&f.state, "zz", json!({"decision": "accept", "reviewer": "dr"})).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn stale_version_is_409_with_current_record() {
    let f = fixture();
    put(&f.state, "a", json!({"decision": "accept", "reviewer": "one", "version": 0})).await;
    let (status, body) = put(&f.state, "a", json!({"decision": "reject", "reviewer": "two", "version": 0})).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(body["current"]["status"], "accepted");
    assert_eq!(body["current"]["version"], 1);
}

#[tokio::test]
async fn identical_resubmission_changes_nothing() {
    let f = fixture();
    let req = json!({"decision": "accept", "reviewer": "dr", "version": 0});
    let (_, first) = put(&f.state, "a", req.clone()).await;
    let log_after_first = std::fs::read(&f.log).unwrap();
    let (status, second) = put(&f.state, "a", req).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(first, second);
    assert_eq!(std::fs::read(&f.log).unwrap(), log_after_first);
}

#[tokio::test]
async fn concurrent_writes_to_distinct_images_all_land() {
    let f = fixture();
    let tasks: Vec<_> = ["a", "b"]
        .into_iter()
        .map(|id| {
            let state = f.state.clone();
            tokio::spawn(async move {
                put(&state, id, json!({"decision": "accept", "reviewer": id, "version": 0})).await
            })
        })
        .collect();
    for t in tasks {
        assert_eq!(t.await.unwrap().0, StatusCode::OK);
    }
    let replayed = AnnotationStore::open(&f.log, Durability::Flush).unwrap();
    assert_eq!(replayed.progress().accepted, 2);
}

#[tokio::test]
async fn acknowledged_decisions_survive_restart() {
    let f = fixture();
    put(&f.state, "a", json!({"decision": "reject", "reviewer": "dr", "version": 0})).await;
    let reopened = AnnotationStore::open(&f.log, Durability::Flush).unwrap();
    let live = f.state.snapshot().await;
    assert_eq!(reopened.records().cloned().collect::<Vec<_>>(), live);
}

#[tokio::test(flavor = "multi_thread")]
async fn serves_over_tcp_and_reports_address_in_use() {
    let f = fixture();
    let (tx, rx) = tokio::sync::oneshot::channel();
    let state = f.state.clone();
    tokio::spawn(async move {
        serve(state, "127.0.0.1:0", |addr| {
            let _ = tx.send(addr);
        })
        .await
    });
    let addr = rx.await.unwrap();

    use tokio::io::{AsyncReadExt, AsyncWriteExt};
    let mut conn = tokio::net::TcpStream::connect(addr).await.unwrap();
    conn.write_all(b"GET /api/progress HTTP/1.1\r\nHost: x\r\nConnection: close\r\n\r\n")
        .await
        .unwrap();
    let mut resp = String::new();
    conn.read_to_string(&mut resp).await.unwrap();
    assert!(resp.starts_with("HTTP/1.1 200"), "{resp}");
    assert!(resp.contains(r#""rejected":1"#));

    let err = serve(f.state.clone(), &addr.to_string(), |_| {}).await.unwrap_err();
    assert!(matches!(err, discloc_server::ServeError::Bind { .. }), "{err}");
}

