//! JSON-over-HTTP adapter for [`SearchEngine`].
//!
//! Routes: `GET /health`, `POST /query`, `GET /concepts/{name}`, `GET /provisions?ref=`,
//! `POST /admin/reload`. The engine sits behind an `RwLock<Arc<_>>`; a reload builds a new
//! engine off to the side and swaps the pointer, so in-flight requests finish on the old one.

pub mod api;
mod source;

use std::collections::HashMap;
use std::net::SocketAddr;
use std::sync::{Arc, RwLock};
use std::time::Instant;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, HeaderValue, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use lexsearch_core::text::normalize_term;
use lexsearch_core::{Config, CorpusError, RefPath, SearchEngine, Violation};
use tower_http::cors::CorsLayer;

use api::{
    ErrorBody, HealthResponse, ProvisionResponse, QueryRequest, QueryResponse, DEFAULT_MAX_RESULTS,
    MAX_TEXT_CHARS,
};
pub use source::{EngineSource, LoadError};

pub struct AppState {
    engine: RwLock<Arc<SearchEngine>>,
    source: Option<EngineSource>,
}

impl AppState {
    pub fn new(engine: SearchEngine, source: Option<EngineSource>) -> Arc<Self> {
        Arc::new(AppState {
            engine: RwLock::new(Arc::new(engine)),
            source,
        })
    }

    pub fn engine(&self) -> Arc<SearchEngine> {
        Arc::clone(&self.engine.read().unwrap_or_else(|e| e.into_inner()))
    }

    /// Rebuilds from the configured source and swaps it in. On failure the current engine
    /// stays in place.
    pub fn reload(&self) -> Result<Arc<SearchEngine>, Vec<Violation>> {
        let Some(source) = &self.source else {
            return Err(vec![Violation::new(
                "server",
                "reload",
                "no reload source configured",
            )]);
        };
        let config = self.engine().config().clone();
        let fresh = Arc::new(source.load(&config).map_err(|e| e.violations())?);
        *self.engine.write().unwrap_or_else(|e| e.into_inner()) = Arc::clone(&fresh);
        Ok(fresh)
    }
}

fn error(status: StatusCode, code: &str, message: impl Into<String>) -> Response {
    let body = ErrorBody {
        error: code.to_owned(),
        message: message.into(),
        violations: Vec::new(),
    };
    (status, Json(body)).into_response()
}

fn cors(config: &Config) -> Option<CorsLayer> {
    let origin = config.service.cors_origin.as_deref()?;
    match HeaderValue::from_str(origin) {
        Ok(origin) => Some(
            CorsLayer::new()
                .allow_origin(origin)
                .allow_methods([Method::GET, Method::POST])
                .allow_headers([header::CONTENT_TYPE]),
        ),
        Err(_) => {
            tracing::warn!(origin, "ignoring invalid CORS origin");
            None
        }
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    let cors = cors(state.engine().config());
    let router = Router::new()
        .route("/health", get(health))
        .route("/query", post(query))
        .route("/concepts/{name}", get(concept))
        .route("/provisions", get(provision))
        .route("/admin/reload", post(reload))
        .with_state(state);
    match cors {
        Some(layer) => router.layer(layer),
        None => router,
    }
}

/// Serves until Ctrl-C.
pub async fn serve(state: Arc<AppState>, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!(addr = %listener.local_addr()?, "listening");
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

fn health_body(engine: &SearchEngine) -> HealthResponse {
    HealthResponse {
        status: "ok".into(),
        documents: engine.corpus().documents().len(),
        concepts: engine.kb().concept_count(),
        relations: engine.kb().relation_count(),
        rules: engine.kb().rule_count(),
    }
}

async fn health(State(state): State<Arc<AppState>>) -> Json<HealthResponse> {
    Json(health_body(&state.engine()))
}

async fn query(State(state): State<Arc<AppState>>, body: Bytes) -> Response {
    let request: QueryRequest = match serde_json::from_slice(&body) {
        Ok(r) => r,
        Err(e) => return error(StatusCode::BAD_REQUEST, "malformed_body", e.to_string()),
    };
    if request.text.trim().is_empty() {
        return error(
            StatusCode::BAD_REQUEST,
            "empty_text",
            "text must not be empty",
        );
    }
    if request.text.chars().count() > MAX_TEXT_CHARS {
        return error(
            StatusCode::BAD_REQUEST,
            "text_too_long",
            format!("text exceeds {MAX_TEXT_CHARS} characters"),
        );
    }
    let max_results = match request.max_results {
        None => DEFAULT_MAX_RESULTS,
        Some(n) if n >= 1 => usize::try_from(n).unwrap_or(usize::MAX),
        Some(n) => {
            return error(
                StatusCode::BAD_REQUEST,
                "invalid_max_results",
                format!("max_results must be a positive integer, got {n}"),
            )
        }
    };

    let started = Instant::now();
    let answer = state.engine().answer(&request.text);
    let elapsed_ms = u64::try_from(started.elapsed().as_millis()).unwrap_or(u64::MAX);
    tracing::debug!(class = %answer.query_class, items = answer.items.len(), elapsed_ms, "query");
    Json(QueryResponse::new(&answer, max_results, elapsed_ms)).into_response()
}

fn loose_key(name: &str) -> String {
    normalize_term(&name.replace('-', " "))
}

async fn concept(State(state): State<Arc<AppState>>, Path(name): Path<String>) -> Response {
    let engine = state.engine();
    let wanted = loose_key(&name);
    let found = engine
        .kb()
        .concepts()
        .find(|(key, _)| loose_key(key) == wanted)
        .map(|(_, concept)| concept.clone());
    match found {
        Some(concept) => Json(concept).into_response(),
        None => error(
            StatusCode::NOT_FOUND,
            "not_found",
            format!("no concept named {name:?}"),
        ),
    }
}

async fn provision(
    State(state): State<Arc<AppState>>,
    Query(params): Query<HashMap<String, String>>,
) -> Response {
    let Some(raw) = params.get("ref") else {
        return error(
            StatusCode::BAD_REQUEST,
            "malformed_ref",
            "missing ref parameter",
        );
    };
    let path: RefPath = match raw.parse() {
        Ok(p) => p,
        Err(e) => return error(StatusCode::BAD_REQUEST, "malformed_ref", e.to_string()),
    };
    let engine = state.engine();
    match engine.corpus().resolve_path(&path) {
        Ok((reference, node)) => {
            let title = engine
                .corpus()
                .document(&reference.document_id)
                .map(|d| d.title.clone())
                .unwrap_or_default();
            Json(ProvisionResponse {
                legal_ref: reference.to_string(),
                ref_path: reference.wire_path(),
                document_id: reference.document_id.clone(),
                document_title: title,
                level: node.level,
                heading: node.heading.clone(),
                text: node.provision_text(),
            })
            .into_response()
        }
        Err(e @ CorpusError::NotFound { .. }) => {
            error(StatusCode::NOT_FOUND, "not_found", e.to_string())
        }
        Err(e) => error(StatusCode::BAD_REQUEST, "malformed_ref", e.to_string()),
    }
}

async fn reload(State(state): State<Arc<AppState>>) -> Response {
    let outcome = tokio::task::spawn_blocking({
        let state = Arc::clone(&state);
        move || state.reload()
    })
    .await;
    match outcome {
        Ok(Ok(engine)) => {
            tracing::info!("knowledge base reloaded");
            Json(health_body(&engine)).into_response()
        }
        Ok(Err(violations)) => {
            tracing::warn!(count = violations.len(), "reload rejected");
            let body = ErrorBody {
                error: "reload_failed".into(),
                message: format!(
                    "{} violation(s); previous knowledge base retained",
                    violations.len()
                ),
                violations,
            };
            (StatusCode::CONFLICT, Json(body)).into_response()
        }
        Err(e) => error(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()),
    }
}
