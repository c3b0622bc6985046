use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use tower_http::catch_panic::CatchPanicLayer;

use paretoinfer::analytics::{AnalyticsBundle, ImportanceTiers, ParetoFront};
use paretoinfer::emo::NsgaParams;
use paretoinfer::inference::{
    build_context, build_prompt, infer, BackendConfig, ContextOptions, InferenceReport, Mode,
    Persona, Question, TemplateId, DEFAULT_CHARACTER_BUDGET,
};

use crate::error::ApiError;
use crate::store::{RunDescriptor, RunStore};
use crate::worker::RunQueue;

pub const FRONT_FORMAT: &str = "paretoinfer/front-response";
pub const FRONT_VERSION: u32 = 1;

#[derive(Clone)]
pub struct AppState {
    pub store: Arc<RunStore>,
    pub queue: Arc<RunQueue>,
    pub backend: BackendConfig,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CreateRunRequest {
    pub params: NsgaParams,
    pub instance_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontResponse {
    pub format: String,
    pub version: u32,
    pub run_id: String,
    pub front: ParetoFront,
    pub analytics: AnalyticsBundle,
}

/// A solution number, or one of `knee`, `min_cost`, `min_impact`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SelectionItem {
    Number(usize),
    Named(String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InferenceRequest {
    pub selection: Vec<SelectionItem>,
    pub persona: Persona,
    pub question: Question,
    pub backend_mode: Option<Mode>,
    pub options: ContextOptions,
    pub character_budget: usize,
}

impl Default for InferenceRequest {
    fn default() -> Self {
        Self {
            selection: vec![],
            persona: Persona::default(),
            question: Question::Template(TemplateId::SolutionBrief),
            backend_mode: None,
            options: ContextOptions::default(),
            character_budget: DEFAULT_CHARACTER_BUDGET,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InferenceResponse {
    pub report_name: String,
    pub digest: String,
    pub report: InferenceReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportsResponse {
    pub prompt_hash: String,
    pub reports: Vec<InferenceReport>,
}

fn body<T>(payload: Result<Json<T>, JsonRejection>) -> Result<T, ApiError> {
    payload
        .map(|Json(v)| v)
        .map_err(|e| ApiError::validation(e.body_text()))
}

async fn blocking<T: Send + 'static>(
    f: impl FnOnce() -> Result<T, ApiError> + Send + 'static,
) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::internal(format!("task failed: {e}")))?
}

async fn create_run(
    State(s): State<AppState>,
    payload: Result<Json<CreateRunRequest>, JsonRejection>,
) -> Result<(StatusCode, Json<RunDescriptor>), ApiError> {
    let req = body(payload)?;
    let d = s.store.create(req.params, req.instance_seed)?;
    s.queue.submit(&d.run_id)?;
    Ok((StatusCode::ACCEPTED, Json(d)))
}

async fn list_runs(State(s): State<AppState>) -> Result<Json<Vec<RunDescriptor>>, ApiError> {
    Ok(Json(s.store.list()?))
}

async fn get_run(State(s): State<AppState>, Path(id): Path<String>) -> Result<Json<RunDescriptor>, ApiError> {
    Ok(Json(s.store.get(&id)?))
}

pub fn front_response(store: &RunStore, id: &str) -> Result<FrontResponse, ApiError> {
    Ok(FrontResponse {
        format: FRONT_FORMAT.into(),
        version: FRONT_VERSION,
        run_id: id.to_string(),
        front: store.front(id)?,
        analytics: store.analytics(id)?,
    })
}

async fn get_front(State(s): State<AppState>, Path(id): Path<String>) -> Result<Json<FrontResponse>, ApiError> {
    let store = s.store.clone();
    blocking(move || front_response(&store, &id)).await.map(Json)
}

async fn get_analytics(
    State(s): State<AppState>,
    Path(id): Path<String>,
) -> Result<Json<AnalyticsBundle>, ApiError> {
    let store = s.store.clone();
    blocking(move || store.analytics(&id)).await.map(Json)
}

pub fn resolve(items: &[SelectionItem], bundle: &AnalyticsBundle) -> Result<Vec<usize>, ApiError> {
    let mut out = Vec::new();
    for item in items {
        let n = match item {
            SelectionItem::Number(n) => *n,
            SelectionItem::Named(name) => match name.as_str() {
                "knee" => bundle
                    .knee
                    .map(|k| k.number)
                    .ok_or_else(|| ApiError::validation("front is too small to have a knee"))?,
                "min_cost" => bundle.min_cost.number,
                "min_impact" => bundle.min_impact.number,
                other => return Err(ApiError::validation(format!("unknown selection {other:?}"))),
            },
        };
        if !out.contains(&n) {
            out.push(n);
        }
    }
    Ok(out)
}

/// Context, prompt and backend call for one stored run.
pub fn run_inference(
    store: &RunStore,
    backend: &BackendConfig,
    id: &str,
    req: &InferenceRequest,
) -> Result<InferenceResponse, ApiError> {
    let front = store.front(id)?;
    let bundle = store.analytics(id)?;
    let selection = resolve(&req.selection, &bundle)?;
    let tiers = bundle.tiers.clone().unwrap_or_else(|| ImportanceTiers::unscored(&front));
    let ctx = build_context(&front, &bundle, &selection, &tiers, req.options)?;
    let prompt = build_prompt(&ctx, &req.persona, &req.question, req.character_budget)?;
    let mut cfg = backend.clone();
    if let Some(mode) = req.backend_mode {
        cfg.mode = mode;
    }
    let (report, report_name) = infer(&prompt, &cfg, store.reports())?;
    Ok(InferenceResponse {
        report_name,
        digest: report.content_digest(),
        report,
    })
}

async fn post_inference(
    State(s): State<AppState>,
    Path(id): Path<String>,
    payload: Result<Json<InferenceRequest>, JsonRejection>,
) -> Result<Json<InferenceResponse>, ApiError> {
    let req = body(payload)?;
    let (store, backend) = (s.store.clone(), s.backend.clone());
    blocking(move || run_inference(&store, &backend, &id, &req)).await.map(Json)
}

async fn get_reports(
    State(s): State<AppState>,
    Path(hash): Path<String>,
) -> Result<Json<ReportsResponse>, ApiError> {
    if hash.len() != 64 || !hash.chars().all(|c| c.is_ascii_hexdigit()) {
        return Err(ApiError::validation("prompt hash must be 64 hex digits"));
    }
    let reports = s.store.reports().by_hash(&hash)?;
    if reports.is_empty() {
        return Err(ApiError::not_found(format!("no reports for {hash}")));
    }
    Ok(Json(ReportsResponse {
        prompt_hash: hash,
        reports,
    }))
}

async fn no_route() -> ApiError {
    ApiError::not_found("no such endpoint")
}

async fn bad_method() -> ApiError {
    ApiError::validation("method not allowed for this endpoint")
}

fn panic_response(_: Box<dyn std::any::Any + Send + 'static>) -> Response {
    ApiError::internal("internal error").into_response()
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/runs", post(create_run).get(list_runs))
        .route("/runs/{id}", get(get_run))
        .route("/runs/{id}/front", get(get_front))
        .route("/runs/{id}/analytics", get(get_analytics))
        .route("/runs/{id}/inference", post(post_inference))
        .route("/reports/{hash}", get(get_reports))
        .fallback(no_route)
        .method_not_allowed_fallback(bad_method)
        .layer(CatchPanicLayer::custom(panic_response))
        .with_state(state)
}

/// A bound server plus the worker pool behind it.
pub struct Gateway {
    pub state: AppState,
}

impl Gateway {
    pub fn open(store_dir: &std::path::Path, workers: usize, backend: BackendConfig) -> Result<Self, ApiError> {
        let store = Arc::new(RunStore::open(store_dir)?);
        let queue = Arc::new(RunQueue::start(store.clone(), workers));
        Ok(Self {
            state: AppState { store, queue, backend },
        })
    }

    pub fn router(&self) -> Router {
        router(self.state.clone())
    }

    pub async fn serve(self, listener: tokio::net::TcpListener) -> std::io::Result<()> {
        axum::serve(listener, self.router())
            .with_graceful_shutdown(async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await
    }
}
