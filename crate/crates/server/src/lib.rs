//! HTTP API over an [`AnnotationStore`] for the human review step.
//!
//! | method | path | |
//! |---|---|---|
//! | GET | `/api/images` | ids, status, dimensions and version of every image |
//! | GET | `/api/images/{id}/file` | the image file as stored |
//! | GET | `/api/annotations/{id}` | the full record |
//! | PUT | `/api/annotations/{id}` | `{"decision","box"?,"reviewer","version"}` |
//! | GET | `/api/progress` | per-status counts |
//!
//! Mutations are appended to the store's log before the response is sent.

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use chrono::Utc;
use discloc::annotation::{AnnotationError, AnnotationRecord, AnnotationStore, DatasetManifest, Decision, ReviewStatus};
use discloc::BoundingBox;
use serde::{Deserialize, Serialize};
use tokio::sync::RwLock;

pub struct AppState {
    store: RwLock<AnnotationStore>,
    manifest: DatasetManifest,
    base_dir: PathBuf,
}

impl AppState {
    /// `base_dir` is what relative manifest paths resolve against.
    pub fn new(store: AnnotationStore, manifest: DatasetManifest, base_dir: impl Into<PathBuf>) -> Arc<Self> {
        Arc::new(Self {
            store: RwLock::new(store),
            manifest,
            base_dir: base_dir.into(),
        })
    }

    pub async fn snapshot(&self) -> Vec<AnnotationRecord> {
        self.store.read().await.records().cloned().collect()
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ServeError {
    #[error("cannot listen on {addr}: {source}")]
    Bind { addr: String, source: std::io::Error },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/api/images", get(list_images))
        .route("/api/images/{id}/file", get(image_file))
        .route("/api/annotations/{id}", get(get_annotation).put(put_annotation))
        .route("/api/progress", get(progress))
        .with_state(state)
}

/// Binds `addr`, then serves until ctrl-c. `on_ready` gets the bound
/// address (useful with port 0).
pub async fn serve(
    state: Arc<AppState>,
    addr: &str,
    on_ready: impl FnOnce(SocketAddr),
) -> Result<(), ServeError> {
    let listener = tokio::net::TcpListener::bind(addr).await.map_err(|source| ServeError::Bind {
        addr: addr.to_string(),
        source,
    })?;
    on_ready(listener.local_addr()?);
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ImageSummary {
    pub image_id: String,
    pub status: ReviewStatus,
    pub width: u32,
    pub height: u32,
    pub version: u64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReviewRequest {
    pub decision: String,
    #[serde(rename = "box", default)]
    pub bbox: Option<BoundingBox>,
    pub reviewer: String,
    #[serde(default)]
    pub version: Option<u64>,
}

#[derive(Serialize)]
struct ErrorBody {
    error: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    current: Option<AnnotationRecord>,
}

fn error(status: StatusCode, message: impl Into<String>) -> Response {
    (
        status,
        Json(ErrorBody {
            error: message.into(),
            current: None,
        }),
    )
        .into_response()
}

async fn list_images(State(state): State<Arc<AppState>>) -> Json<Vec<ImageSummary>> {
    let store = state.store.read().await;
    Json(
        state
            .manifest
            .images
            .iter()
            .filter_map(|m| store.get(&m.image_id))
            .map(|r| ImageSummary {
                image_id: r.image_id.clone(),
                status: r.status,
                width: r.width,
                height: r.height,
                version: r.version,
            })
            .collect(),
    )
}

fn content_type(bytes: &[u8]) -> &'static str {
    if bytes.starts_with(b"\x89PNG\r\n\x1a\n") {
        "image/png"
    } else if bytes.starts_with(&[0xff, 0xd8, 0xff]) {
        "image/jpeg"
    } else {
        "application/octet-stream"
    }
}

async fn image_file(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> Response {
    let Some(entry) = state.manifest.get(&id) else {
        return error(StatusCode::NOT_FOUND, format!("unknown image `{id}`"));
    };
    match tokio::fs::read(state.base_dir.join(&entry.path)).await {
        Ok(bytes) => ([(header::CONTENT_TYPE, content_type(&bytes))], bytes).into_response(),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            error(StatusCode::NOT_FOUND, format!("file for `{id}` is missing"))
        }
        Err(e) => error(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()),
    }
}

async fn get_annotation(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> Response {
    match state.store.read().await.get(&id) {
        Some(r) => Json(r.clone()).into_response(),
        None => error(StatusCode::NOT_FOUND, format!("unknown image `{id}`")),
    }
}

async fn put_annotation(State(state): State<Arc<AppState>>, Path(id): Path<String>, body: Bytes) -> Response {
    let req: ReviewRequest = match serde_json::from_slice(&body) {
        Ok(r) => r,
        Err(e) if e.is_data() => return error(StatusCode::UNPROCESSABLE_ENTITY, e.to_string()),
        Err(e) => return error(StatusCode::BAD_REQUEST, e.to_string()),
    };
    let decision = match (req.decision.as_str(), req.bbox) {
        ("accept", None) => Decision::Accept,
        ("reject", None) => Decision::Reject,
        ("correct", Some(bbox)) => Decision::Correct { bbox },
        ("correct", None) => return error(StatusCode::UNPROCESSABLE_ENTITY, "correct requires a box"),
        ("accept" | "reject", Some(_)) => {
            return error(StatusCode::UNPROCESSABLE_ENTITY, "only correct takes a box")
        }
        (other, _) => return error(StatusCode::UNPROCESSABLE_ENTITY, format!("unknown decision `{other}`")),
    };
    let mut store = state.store.write().await;
    match store.apply_review(&id, decision, &req.reviewer, Utc::now(), req.version) {
        Ok(outcome) => Json(outcome.record).into_response(),
        Err(AnnotationError::NotFound(_)) => error(StatusCode::NOT_FOUND, format!("unknown image `{id}`")),
        Err(e @ AnnotationError::Conflict { .. }) => (
            StatusCode::CONFLICT,
            Json(ErrorBody {
                error: e.to_string(),
                current: store.get(&id).cloned(),
            }),
        )
            .into_response(),
        Err(e @ (AnnotationError::InvalidBox { .. } | AnnotationError::InvalidDecision(_))) => {
            error(StatusCode::UNPROCESSABLE_ENTITY, e.to_string())
        }
        Err(e) => error(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()),
    }
}

async fn progress(State(state): State<Arc<AppState>>) -> Json<discloc::annotation::Progress> {
    Json(state.store.read().await.progress())
}
