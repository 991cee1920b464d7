//! HTTP/JSON API over the shared pipeline.

use std::collections::BTreeMap;
use std::sync::Arc;

use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use codetoon_core::pipeline::{generate_comic, story, PipelineError, Project, Resources};
use codetoon_core::{ComicDoc, ComposeOptions, Layout, Sprite, StoryTemplate, SuggestKind};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::store::{ProjectStore, StoreError};

pub const DEFAULT_SUGGEST_LIMIT: usize = 10;

#[derive(Debug, Clone)]
pub struct AppState {
    pub resources: Arc<Resources>,
    pub store: Arc<ProjectStore>,
    pub layout: Layout,
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/api/story-template", post(story_template))
        .route("/api/comic", post(comic))
        .route("/api/suggest", get(suggest))
        .route("/api/sprites/{category}", get(sprite))
        .route("/api/project", post(save_project))
        .route("/api/project/{id}", get(load_project))
        .route("/api/examples", get(examples))
        .with_state(state)
}

/// Error body: `{"error": code, "line": n | null, "detail": text}`.
#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    code: &'static str,
    line: Option<u32>,
    detail: String,
}

impl ApiError {
    fn bad_request(code: &'static str, detail: impl Into<String>) -> ApiError {
        ApiError { status: StatusCode::BAD_REQUEST, code, line: None, detail: detail.into() }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = json!({"error": self.code, "line": self.line, "detail": self.detail});
        (self.status, Json(body)).into_response()
    }
}

impl From<PipelineError> for ApiError {
    fn from(e: PipelineError) -> Self {
        ApiError { status: StatusCode::BAD_REQUEST, code: e.code(), line: e.line(), detail: e.to_string() }
    }
}

impl From<JsonRejection> for ApiError {
    fn from(e: JsonRejection) -> Self {
        ApiError::bad_request("invalid_request", e.body_text())
    }
}

impl From<QueryRejection> for ApiError {
    fn from(e: QueryRejection) -> Self {
        ApiError::bad_request("invalid_request", e.body_text())
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        let status = match e {
            StoreError::NotFound(_) => StatusCode::NOT_FOUND,
            _ => StatusCode::INTERNAL_SERVER_ERROR,
        };
        let code = if status == StatusCode::NOT_FOUND { "not_found" } else { "internal" };
        ApiError { status, code, line: None, detail: e.to_string() }
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;

#[derive(Debug, Deserialize)]
struct CodeRequest {
    code: String,
}

async fn story_template(body: Result<Json<CodeRequest>, JsonRejection>) -> ApiResult<StoryTemplate> {
    let Json(req) = body?;
    let (_, template) = story(&req.code)?;
    Ok(Json(template))
}

#[derive(Debug, Deserialize)]
pub struct ComicRequest {
    pub code: String,
    #[serde(default)]
    pub fills: BTreeMap<String, String>,
    #[serde(default)]
    pub options: ComposeOptions,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ComicResponse {
    pub comic_doc: ComicDoc,
    pub svg: String,
}

async fn comic(State(state): State<AppState>, body: Result<Json<ComicRequest>, JsonRejection>) -> ApiResult<ComicResponse> {
    let Json(req) = body?;
    let out = generate_comic(&req.code, &req.fills, &req.options, &state.resources.sprites, &state.layout)?;
    Ok(Json(ComicResponse { comic_doc: out.doc, svg: out.svg }))
}

#[derive(Debug, Deserialize)]
struct SuggestQuery {
    kind: String,
    prefix: Option<String>,
    limit: Option<usize>,
}

async fn suggest(
    State(state): State<AppState>,
    query: Result<Query<SuggestQuery>, QueryRejection>,
) -> ApiResult<serde_json::Value> {
    let Query(q) = query?;
    let kind: SuggestKind = q.kind.parse().map_err(|e: codetoon_core::LexiconError| {
        ApiError::bad_request("unknown_kind", e.to_string())
    })?;
    let limit = q.limit.unwrap_or(DEFAULT_SUGGEST_LIMIT);
    let suggestions = state
        .resources
        .lexicon
        .suggest(&kind, q.prefix.as_deref(), limit)
        .map_err(|e| ApiError::bad_request("invalid_request", e.to_string()))?;
    Ok(Json(json!({"kind": q.kind, "suggestions": suggestions})))
}

/// Always succeeds: unknown categories get the labeled placeholder.
async fn sprite(State(state): State<AppState>, Path(category): Path<String>) -> Json<Sprite> {
    Json(state.resources.sprites.get(&category))
}

#[derive(Debug, Deserialize)]
struct SaveRequest {
    id: Option<String>,
    #[serde(flatten)]
    project: Project,
}

async fn save_project(
    State(state): State<AppState>,
    body: Result<Json<SaveRequest>, JsonRejection>,
) -> Result<(StatusCode, Json<serde_json::Value>), ApiError> {
    let Json(req) = body?;
    req.project.validate()?;
    let id = state.store.save(req.id.as_deref(), &req.project).await?;
    Ok((StatusCode::CREATED, Json(json!({"id": id}))))
}

async fn load_project(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult<Project> {
    Ok(Json(state.store.load(&id).await?))
}

async fn examples(State(state): State<AppState>) -> Json<serde_json::Value> {
    Json(json!(state.resources.examples))
}
