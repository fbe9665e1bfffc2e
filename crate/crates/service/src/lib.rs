//! Session-scoped HTTP front end over the hiding engine.
//!
//! | method | path                     | body                          | reply                        |
//! |--------|--------------------------|-------------------------------|------------------------------|
//! | POST   | `/sessions`              | CSV                           | `{id}`                       |
//! | GET    | `/sessions/{id}/tree`    |                               | `{tree, leaves}`             |
//! | POST   | `/sessions/{id}/preview` | `{paths, strategy?, seed?}`   | report                       |
//! | POST   | `/sessions/{id}/commit`  | `{paths, strategy?, seed?}`   | `{report, tree}`             |
//! | POST   | `/sessions/{id}/undo`    |                               | `{tree, atRoot}`             |
//! | GET    | `/sessions/{id}/export`  |                               | CSV                          |
//!
//! Errors are `{code, message, location?}` with a 400, 404 or 422 status.

mod error;
mod store;

use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::{header, StatusCode};
use axum::response::IntoResponse;
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use treehide::dataset::{parse_csv, write_csv};
use treehide::hiding::{hide, ReportDoc, Request};
use treehide::induction::{NodePath, TreeDoc};
use treehide::{induce, Class, Dataset, DecisionTree, HideOutcome, Strategy};
use uuid::Uuid;

pub use error::{ApiError, ErrorBody, Location};
pub use store::{Session, SessionHandle, SessionStore};

pub const DEFAULT_MAX_SESSIONS: usize = 64;

#[derive(Clone)]
pub struct AppState {
    store: Arc<SessionStore>,
}

impl AppState {
    pub fn new(max_sessions: usize) -> Self {
        Self {
            store: Arc::new(SessionStore::new(max_sessions)),
        }
    }

    pub fn store(&self) -> &SessionStore {
        &self.store
    }
}

impl Default for AppState {
    fn default() -> Self {
        Self::new(DEFAULT_MAX_SESSIONS)
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/{id}/tree", get(get_tree))
        .route("/sessions/{id}/preview", post(preview_hide))
        .route("/sessions/{id}/commit", post(commit_hide))
        .route("/sessions/{id}/undo", post(undo))
        .route("/sessions/{id}/export", get(export))
        .with_state(state)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Created {
    pub id: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeafDoc {
    pub path: String,
    pub rule: String,
    pub label: Class,
    pub p: u64,
    pub n: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeView {
    pub tree: TreeDoc,
    pub leaves: Vec<LeafDoc>,
}

impl TreeView {
    pub fn of(tree: &DecisionTree) -> Self {
        let schema = tree.schema();
        Self {
            tree: TreeDoc::from(tree),
            leaves: tree
                .leaves()
                .iter()
                .map(|l| LeafDoc {
                    path: l.path.render(schema),
                    rule: l.rule().render(schema),
                    label: l.label,
                    p: l.counts.p,
                    n: l.counts.n,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HideRequest {
    pub paths: Vec<String>,
    #[serde(default)]
    pub strategy: Strategy,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Committed {
    pub report: ReportDoc,
    pub tree: TreeView,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Undone {
    pub tree: TreeView,
    pub at_root: bool,
}

fn session(state: &AppState, id: &str) -> Result<SessionHandle, ApiError> {
    Uuid::parse_str(id)
        .ok()
        .and_then(|uuid| state.store.get(&uuid))
        .ok_or_else(|| ApiError::no_session(id))
}

/// Runs CPU-bound work off the async workers.
async fn blocking<T, F>(f: F) -> Result<T, ApiError>
where
    F: FnOnce() -> Result<T, ApiError> + Send + 'static,
    T: Send + 'static,
{
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()))?
}

fn lock(handle: &SessionHandle) -> std::sync::MutexGuard<'_, Session> {
    handle.lock().unwrap_or_else(|poisoned| poisoned.into_inner())
}

fn parse_hide_request(body: &[u8]) -> Result<HideRequest, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::bad_request(format!("malformed hide request: {e}")))
}

fn run_hide(ds: &Dataset, req: &HideRequest) -> Result<HideOutcome, ApiError> {
    let requests = req
        .paths
        .iter()
        .map(|p| {
            NodePath::parse(ds.schema(), p)
                .map(Request::Path)
                .map_err(|e| ApiError::bad_path(p, &e))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(hide(ds, &requests, req.strategy, req.seed)?)
}

async fn create_session(State(state): State<AppState>, body: Bytes) -> Result<impl IntoResponse, ApiError> {
    if body.iter().all(u8::is_ascii_whitespace) {
        return Err(ApiError::new(
            StatusCode::BAD_REQUEST,
            "empty_body",
            "request body holds no CSV",
        ));
    }
    let text =
        String::from_utf8(body.to_vec()).map_err(|e| ApiError::bad_request(format!("body is not UTF-8: {e}")))?;
    let ds = parse_csv(&text)?;
    let id = state.store.insert(Session::new(ds));
    Ok((StatusCode::CREATED, Json(Created { id: id.to_string() })))
}

async fn get_tree(State(state): State<AppState>, Path(id): Path<String>) -> Result<Json<TreeView>, ApiError> {
    let handle = session(&state, &id)?;
    blocking(move || {
        let s = lock(&handle);
        Ok(Json(TreeView::of(&induce(s.current())?)))
    })
    .await
}

async fn preview_hide(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Json<ReportDoc>, ApiError> {
    let handle = session(&state, &id)?;
    let req = parse_hide_request(&body)?;
    blocking(move || {
        let s = lock(&handle);
        let out = run_hide(s.current(), &req)?;
        Ok(Json(out.report.to_doc(out.sanitized.schema())))
    })
    .await
}

async fn commit_hide(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Json<Committed>, ApiError> {
    let handle = session(&state, &id)?;
    let req = parse_hide_request(&body)?;
    blocking(move || {
        let mut s = lock(&handle);
        let out = run_hide(s.current(), &req)?;
        let reply = Committed {
            report: out.report.to_doc(out.sanitized.schema()),
            tree: TreeView::of(&out.sanitized_tree),
        };
        s.push(out.sanitized);
        Ok(Json(reply))
    })
    .await
}

async fn undo(State(state): State<AppState>, Path(id): Path<String>) -> Result<Json<Undone>, ApiError> {
    let handle = session(&state, &id)?;
    blocking(move || {
        let mut s = lock(&handle);
        let at_root = !s.undo();
        Ok(Json(Undone {
            tree: TreeView::of(&induce(s.current())?),
            at_root,
        }))
    })
    .await
}

async fn export(State(state): State<AppState>, Path(id): Path<String>) -> Result<impl IntoResponse, ApiError> {
    let handle = session(&state, &id)?;
    let csv = write_csv(lock(&handle).current());
    Ok(([(header::CONTENT_TYPE, "text/csv; charset=utf-8")], csv))
}
