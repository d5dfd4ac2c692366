//! HTTP/JSON API over an immutable [`Engine`] snapshot.
//!
//! Each request clones the current `Arc<Engine>` once and answers from it,
//! so a concurrent reindex is seen entirely or not at all.

use std::collections::HashMap;
use std::net::SocketAddr;
use std::sync::{Arc, RwLock};
use std::time::Instant;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use ontorank_core::{ApiError, Engine, QueryRequest};
use serde_json::json;
use tower_http::cors::CorsLayer;

pub const DEFAULT_AUTOCOMPLETE_LIMIT: usize = 20;
pub const MAX_AUTOCOMPLETE_LIMIT: usize = 1000;

/// Builds a fresh engine for `POST /api/reindex`.
pub type Reloader = Box<dyn Fn() -> Result<Engine, String> + Send + Sync>;

pub struct AppState {
    snapshot: RwLock<Arc<Engine>>,
    reloader: Option<Reloader>,
}

impl AppState {
    pub fn new(engine: Engine) -> Self {
        Self {
            snapshot: RwLock::new(Arc::new(engine)),
            reloader: None,
        }
    }

    pub fn with_reloader(mut self, reloader: Reloader) -> Self {
        self.reloader = Some(reloader);
        self
    }

    pub fn snapshot(&self) -> Arc<Engine> {
        Arc::clone(&self.snapshot.read().unwrap_or_else(|e| e.into_inner()))
    }

    /// Replaces the snapshot; requests already holding the old one finish
    /// against it.
    pub fn swap(&self, engine: Engine) -> Arc<Engine> {
        let fresh = Arc::new(engine);
        let mut slot = self.snapshot.write().unwrap_or_else(|e| e.into_inner());
        *slot = Arc::clone(&fresh);
        fresh
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/api/health", get(health))
        .route("/api/concepts", get(concepts))
        .route("/api/query", post(query))
        .route("/api/documents/{id}", get(document))
        .route("/api/reindex", post(reindex))
        .fallback(not_found)
        .layer(CorsLayer::permissive())
        .with_state(state)
}

pub async fn serve(state: Arc<AppState>, bind: SocketAddr) -> std::io::Result<()> {
    serve_on(tokio::net::TcpListener::bind(bind).await?, state).await
}

/// Serves until Ctrl-C.
pub async fn serve_on(listener: tokio::net::TcpListener, state: Arc<AppState>) -> std::io::Result<()> {
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

struct Failure(StatusCode, serde_json::Value);

impl From<ApiError> for Failure {
    fn from(e: ApiError) -> Self {
        let status = StatusCode::from_u16(e.code.http_status()).unwrap_or(StatusCode::BAD_REQUEST);
        Self(status, e.body())
    }
}

impl IntoResponse for Failure {
    fn into_response(self) -> Response {
        (self.0, Json(self.1)).into_response()
    }
}

async fn health(State(state): State<Arc<AppState>>) -> Response {
    Json(state.snapshot().health()).into_response()
}

async fn concepts(
    State(state): State<Arc<AppState>>,
    Query(params): Query<HashMap<String, String>>,
) -> Result<Response, Failure> {
    let prefix = params.get("prefix").map(String::as_str).unwrap_or("");
    let limit = match params.get("limit") {
        None => DEFAULT_AUTOCOMPLETE_LIMIT,
        Some(raw) => match raw.parse::<usize>() {
            Ok(n) if n >= 1 => n.min(MAX_AUTOCOMPLETE_LIMIT),
            _ => return Err(ApiError::bad_query(format!("limit must be a positive integer, got `{raw}`")).into()),
        },
    };
    Ok(Json(state.snapshot().autocomplete(prefix, limit)).into_response())
}

async fn query(State(state): State<Arc<AppState>>, body: Bytes) -> Result<Response, Failure> {
    let started = Instant::now();
    let request: QueryRequest =
        serde_json::from_slice(&body).map_err(|e| ApiError::bad_query(format!("malformed query body: {e}")))?;
    let engine = state.snapshot();
    let mut response = engine.respond(&request)?;
    response.timing_ms = started.elapsed().as_secs_f64() * 1e3;
    Ok(Json(response).into_response())
}

async fn document(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> Result<Response, Failure> {
    match state.snapshot().document(&id) {
        Some(view) => Ok(Json(view).into_response()),
        None => Err(ApiError::not_found(format!("no document {id}")).into()),
    }
}

async fn reindex(State(state): State<Arc<AppState>>) -> Result<Response, Failure> {
    if state.reloader.is_none() {
        return Err(ApiError::bad_query("this server has no index source to reload").into());
    }
    let worker = Arc::clone(&state);
    let built = tokio::task::spawn_blocking(move || (worker.reloader.as_ref().expect("checked above"))())
        .await
        .map_err(|e| e.to_string())
        .and_then(|r| r);
    match built {
        Ok(engine) => Ok(Json(state.swap(engine).health()).into_response()),
        Err(message) => Err(Failure(
            StatusCode::INTERNAL_SERVER_ERROR,
            json!({ "error": { "code": "REINDEX_FAILED", "message": message } }),
        )),
    }
}

async fn not_found() -> Failure {
    ApiError::not_found("no such endpoint").into()
}
