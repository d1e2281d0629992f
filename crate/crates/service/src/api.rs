use std::collections::HashMap;
use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::{Query, State};
use axum::http::{HeaderMap, Method, StatusCode, Uri};
use axum::response::{IntoResponse, Response};
use axum::Json;
use cognate_core::annotation::{
    agreement_for, format_timestamp, AgreementReport, AnnotationError, AnnotationRecord, AnnotationStore, Label,
};
use cognate_core::extraction::{CandidateRecord, Task};
use cognate_core::lang::{LanguageCode, LanguagePair};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::{static_files, AppState, Queue, ANNOTATOR_HEADER};

const MAX_PAGE_SIZE: usize = 500;
const DEFAULT_PAGE_SIZE: usize = 20;

/// A JSON error body: `{"error": code, "message": text}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ApiError {
    pub status: StatusCode,
    pub code: &'static str,
    pub message: String,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        ApiError { status, code, message: message.into() }
    }

    fn bad_request(code: &'static str, message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, code, message)
    }

    fn not_found(code: &'static str, message: impl Into<String>) -> Self {
        Self::new(StatusCode::NOT_FOUND, code, message)
    }

    fn internal(message: impl Into<String>) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(json!({ "error": self.code, "message": self.message }))).into_response()
    }
}

type Params = Query<HashMap<String, String>>;

#[derive(Debug, Clone, Serialize)]
pub struct CandidateView {
    #[serde(flatten)]
    pub candidate: CandidateRecord,
    pub source_canonical: String,
    pub target_canonical: String,
    pub pos: String,
    pub gloss_src: String,
    pub example_src: String,
    pub gloss_tgt: String,
    pub example_tgt: String,
    /// The requesting annotator's current label, if any.
    pub label: Option<Label>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CandidatePage {
    pub task: Task,
    pub language_pair: LanguagePair,
    pub status: String,
    pub annotator: Option<String>,
    pub page: usize,
    pub page_size: usize,
    pub total: usize,
    pub items: Vec<CandidateView>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Progress {
    pub annotator: String,
    pub total: usize,
    pub labeled: usize,
    pub positive: usize,
    pub negative: usize,
    pub skip: usize,
    pub pending: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProgressReport {
    pub task: Task,
    pub language_pair: LanguagePair,
    pub total: usize,
    pub annotators: Vec<Progress>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SubmitResponse {
    pub pair_id: String,
    pub annotator: String,
    pub label: Label,
    pub timestamp: String,
    pub task: Task,
    pub language_pair: LanguagePair,
    pub progress: Progress,
}

#[derive(Debug, Clone, Serialize)]
pub struct QueueView {
    pub task: Task,
    pub language_pair: LanguagePair,
    pub candidates: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProjectView {
    pub name: String,
    pub source_lang: LanguageCode,
    pub target_langs: Vec<LanguageCode>,
    pub threshold: f64,
    pub shingle_n: usize,
    pub seed: u64,
    pub queues: Vec<QueueView>,
}

#[derive(Debug, Deserialize)]
pub struct SubmitBody {
    pair_id: String,
    label: String,
    annotator: Option<String>,
}

fn param<'a>(params: &'a HashMap<String, String>, key: &str) -> Result<&'a str, ApiError> {
    params
        .get(key)
        .map(String::as_str)
        .ok_or_else(|| ApiError::bad_request("missing_parameter", format!("`{key}` is required")))
}

fn find_queue<'a>(state: &'a AppState, params: &HashMap<String, String>) -> Result<&'a Queue, ApiError> {
    let task: Task = param(params, "task")?.parse().map_err(|e: String| ApiError::not_found("unknown_task", e))?;
    let raw = param(params, "pair")?;
    let unknown = || ApiError::not_found("unknown_pair", format!("unknown language pair `{raw}`"));
    let pair: LanguagePair = raw.parse().map_err(|_| unknown())?;
    state.queues.get(&(task, pair)).ok_or_else(unknown)
}

fn annotator(headers: &HeaderMap, fallback: Option<&str>) -> Option<String> {
    headers
        .get(ANNOTATOR_HEADER)
        .and_then(|v| v.to_str().ok())
        .or(fallback)
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_string)
}

fn usize_param(params: &HashMap<String, String>, key: &str, default: usize) -> Result<usize, ApiError> {
    match params.get(key) {
        None => Ok(default),
        Some(v) => {
            v.parse().map_err(|_| ApiError::bad_request("invalid_page", format!("`{key}` must be a positive integer")))
        }
    }
}

fn progress_of(queue: &Queue, store: &AnnotationStore, annotator: &str) -> Progress {
    let mut p = Progress {
        annotator: annotator.to_string(),
        total: queue.items.len(),
        labeled: 0,
        positive: 0,
        negative: 0,
        skip: 0,
        pending: 0,
    };
    for item in &queue.items {
        match store.get(&item.candidate.pair_id, annotator).map(|r| r.label) {
            Some(Label::Positive) => p.positive += 1,
            Some(Label::Negative) => p.negative += 1,
            Some(Label::Skip) => p.skip += 1,
            None => p.pending += 1,
        }
    }
    p.labeled = p.total - p.pending;
    p
}

fn lock_poisoned() -> ApiError {
    ApiError::internal("annotation store is unavailable after an earlier failure")
}

pub(crate) async fn projects(State(state): State<Arc<AppState>>) -> Json<Vec<ProjectView>> {
    let queues = state
        .queues
        .values()
        .map(|q| QueueView { task: q.task, language_pair: q.pair, candidates: q.items.len() })
        .collect();
    Json(vec![ProjectView {
        name: state.name.clone(),
        source_lang: state.config.source,
        target_langs: state.config.targets.clone(),
        threshold: state.config.threshold,
        shingle_n: state.config.shingle_n,
        seed: state.config.seed,
        queues,
    }])
}

pub(crate) async fn candidates(
    State(state): State<Arc<AppState>>,
    headers: HeaderMap,
    Query(params): Params,
) -> Result<Json<CandidatePage>, ApiError> {
    let queue = find_queue(&state, &params)?;
    let who = annotator(&headers, params.get("annotator").map(String::as_str));
    let status = params.get("status").map(String::as_str).unwrap_or("all");
    let pending_only = match status {
        "all" => false,
        "pending" => true,
        other => {
            return Err(ApiError::bad_request(
                "invalid_status",
                format!("unknown status `{other}` (expected pending or all)"),
            ))
        }
    };
    if pending_only && who.is_none() {
        return Err(ApiError::bad_request("missing_annotator", "the pending filter needs an annotator"));
    }
    let page = usize_param(&params, "page", 1)?;
    let page_size = usize_param(&params, "page_size", DEFAULT_PAGE_SIZE)?;
    if page == 0 || page_size == 0 || page_size > MAX_PAGE_SIZE {
        return Err(ApiError::bad_request(
            "invalid_page",
            format!("page must be at least 1 and page_size between 1 and {MAX_PAGE_SIZE}"),
        ));
    }

    let guard = state.annotations.read().map_err(|_| lock_poisoned())?;
    let label_of = |item: &CandidateView| {
        who.as_deref().and_then(|a| guard.store.get(&item.candidate.pair_id, a)).map(|r| r.label)
    };
    let visible: Vec<&CandidateView> =
        queue.items.iter().filter(|item| !pending_only || label_of(item).is_none()).collect();
    let items = visible
        .iter()
        .skip((page - 1).saturating_mul(page_size))
        .take(page_size)
        .map(|item| CandidateView { label: label_of(item), ..(*item).clone() })
        .collect();
    Ok(Json(CandidatePage {
        task: queue.task,
        language_pair: queue.pair,
        status: status.to_string(),
        annotator: who.clone(),
        page,
        page_size,
        total: visible.len(),
        items,
    }))
}

pub(crate) async fn submit(
    State(state): State<Arc<AppState>>,
    headers: HeaderMap,
    body: Result<Json<SubmitBody>, JsonRejection>,
) -> Result<Json<SubmitResponse>, ApiError> {
    let Json(body) = body.map_err(|e| ApiError::bad_request("invalid_body", e.body_text()))?;
    let who = annotator(&headers, body.annotator.as_deref())
        .ok_or_else(|| ApiError::bad_request("missing_annotator", "name the annotator in the x-annotator header"))?;
    let label: Label = body.label.parse().map_err(|e: AnnotationError| {
        ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "invalid_label", e.to_string())
    })?;
    let &(task, pair) = state
        .by_pair_id
        .get(&body.pair_id)
        .ok_or_else(|| ApiError::not_found("unknown_pair_id", format!("unknown pair_id `{}`", body.pair_id)))?;
    let queue = &state.queues[&(task, pair)];

    let record =
        AnnotationRecord { pair_id: body.pair_id.clone(), annotator: who.clone(), label, timestamp: (state.clock)() };
    let mut guard = state.annotations.write().map_err(|_| lock_poisoned())?;
    let ann = &mut *guard;
    ann.log.submit(&mut ann.store, record).map_err(|e| ApiError::internal(e.to_string()))?;
    let stored = ann.store.get(&body.pair_id, &who).expect("just upserted");
    Ok(Json(SubmitResponse {
        pair_id: stored.pair_id.clone(),
        annotator: stored.annotator.clone(),
        label: stored.label,
        timestamp: format_timestamp(&stored.timestamp),
        task,
        language_pair: pair,
        progress: progress_of(queue, &ann.store, &who),
    }))
}

pub(crate) async fn progress(
    State(state): State<Arc<AppState>>,
    headers: HeaderMap,
    Query(params): Params,
) -> Result<Json<ProgressReport>, ApiError> {
    let queue = find_queue(&state, &params)?;
    let guard = state.annotations.read().map_err(|_| lock_poisoned())?;
    let names: Vec<String> = match annotator(&headers, params.get("annotator").map(String::as_str)) {
        Some(a) => vec![a],
        None => {
            let mut names: Vec<String> = guard
                .store
                .records()
                .filter(|r| state.by_pair_id.get(&r.pair_id) == Some(&(queue.task, queue.pair)))
                .map(|r| r.annotator.clone())
                .collect();
            names.sort();
            names.dedup();
            names
        }
    };
    Ok(Json(ProgressReport {
        task: queue.task,
        language_pair: queue.pair,
        total: queue.items.len(),
        annotators: names.iter().map(|a| progress_of(queue, &guard.store, a)).collect(),
    }))
}

pub(crate) async fn agreement(
    State(state): State<Arc<AppState>>,
    Query(params): Params,
) -> Result<Json<AgreementReport>, ApiError> {
    let queue = find_queue(&state, &params)?;
    let pair = match (params.get("annotator_a"), params.get("annotator_b")) {
        (Some(a), Some(b)) => Some((a.as_str(), b.as_str())),
        (None, None) => None,
        _ => {
            return Err(ApiError::bad_request("missing_parameter", "give both annotator_a and annotator_b, or neither"))
        }
    };
    let candidates: Vec<CandidateRecord> = queue.items.iter().map(|i| i.candidate.clone()).collect();
    let guard = state.annotations.read().map_err(|_| lock_poisoned())?;
    match agreement_for(&guard.store, &candidates, Some(queue.pair), pair) {
        Ok((_, report)) => Ok(Json(report)),
        Err(AnnotationError::InsufficientOverlap) => Err(ApiError::new(
            StatusCode::CONFLICT,
            "insufficient_overlap",
            "two annotators must have labeled at least one common candidate",
        )),
        Err(e) => Err(ApiError::internal(e.to_string())),
    }
}

pub(crate) async fn fallback(State(state): State<Arc<AppState>>, method: Method, uri: Uri) -> Response {
    if uri.path().starts_with("/api/") || uri.path() == "/api" {
        return ApiError::not_found("not_found", format!("no endpoint at {}", uri.path())).into_response();
    }
    if method != Method::GET && method != Method::HEAD {
        return StatusCode::METHOD_NOT_ALLOWED.into_response();
    }
    static_files::serve_file(state.static_dir.as_deref(), uri.path()).await
}
