//! HTTP JSON session service. Requests on one session are serialized by its mutex; distinct sessions run independently.

use std::collections::{BTreeMap, HashMap};
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use atf_core::staircase::{ManifoldPreset, PresetName};
use atf_core::tropical::validate_stc;
use atf_core::Error;
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::{json, Value};
use tokio::sync::{Mutex, RwLock};

use crate::json::{stc_report_json, AtbdJson, StcJson};
use crate::render::{atbd_svg, chart_svg, stc_svg, RenderOptions};
use crate::session::{Session, StoredSession};

pub struct AppState {
    sessions: RwLock<HashMap<u64, Arc<Mutex<Session>>>>,
    next: AtomicU64,
    data_dir: Option<PathBuf>,
}

impl AppState {
    pub fn new(data_dir: Option<PathBuf>) -> Self {
        Self { sessions: RwLock::new(HashMap::new()), next: AtomicU64::new(1), data_dir }
    }

    /// Loads every `session-*.json` file of the data directory.
    pub fn load(data_dir: PathBuf) -> std::io::Result<Self> {
        std::fs::create_dir_all(&data_dir)?;
        let mut sessions = HashMap::new();
        let mut max_id = 0;
        for entry in std::fs::read_dir(&data_dir)? {
            let path = entry?.path();
            let is_session = path.file_name().and_then(|n| n.to_str()).is_some_and(|n| n.starts_with("session-") && n.ends_with(".json"));
            if !is_session {
                continue;
            }
            let text = std::fs::read_to_string(&path)?;
            let stored: StoredSession = serde_json::from_str(&text).map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, format!("{}: {e}", path.display())))?;
            let s = Session::from_stored(&stored).map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, format!("{}: {e}", path.display())))?;
            max_id = max_id.max(s.id);
            sessions.insert(s.id, Arc::new(Mutex::new(s)));
        }
        Ok(Self { sessions: RwLock::new(sessions), next: AtomicU64::new(max_id + 1), data_dir: Some(data_dir) })
    }

    fn persist(&self, s: &Session) -> Result<(), ApiError> {
        let Some(dir) = &self.data_dir else { return Ok(()) };
        let text = serde_json::to_string_pretty(&s.stored()).expect("stored sessions serialize");
        std::fs::write(dir.join(format!("session-{}.json", s.id)), text).map_err(|e| ApiError::internal(e.to_string()))
    }

    async fn session(&self, id: u64) -> Result<Arc<Mutex<Session>>, ApiError> {
        self.sessions.read().await.get(&id).cloned().ok_or(ApiError::not_found(id))
    }
}

pub struct ApiError {
    status: StatusCode,
    kind: &'static str,
    message: String,
}

impl ApiError {
    fn not_found(id: u64) -> Self {
        Self { status: StatusCode::NOT_FOUND, kind: "unknown_session", message: format!("no session {id}") }
    }

    fn bad_request(message: impl Into<String>) -> Self {
        Self { status: StatusCode::BAD_REQUEST, kind: "malformed", message: message.into() }
    }

    fn internal(message: String) -> Self {
        Self { status: StatusCode::INTERNAL_SERVER_ERROR, kind: "internal", message }
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::NotPrimitive(_) => "not_primitive",
        Error::Malformed(_) => "malformed",
        Error::VertexOutOfRange { .. } => "vertex_out_of_range",
        Error::OrderOutOfRange { .. } => "order_out_of_range",
        Error::CutNotInward(_) => "cut_not_inward",
        Error::IncompatibleCut { .. } => "incompatible_cut",
        Error::RayCrossesCut { .. } => "ray_crosses_cut",
        Error::FrozenMutation(_) => "frozen_vertex",
        Error::InvalidBase(_) => "invalid_base",
        _ => "rejected",
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        Self { status: StatusCode::UNPROCESSABLE_ENTITY, kind: error_kind(&e), message: e.to_string() }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(json!({ "error": { "kind": self.kind, "message": self.message } }))).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

#[derive(Deserialize)]
struct CreateBody {
    preset: Option<String>,
    atbd: Option<AtbdJson>,
}

#[derive(Deserialize)]
struct MutateBody {
    vertex: usize,
    order: u64,
}

#[derive(Deserialize)]
struct StcBody {
    graph: StcJson,
}

#[derive(Deserialize)]
struct RenderQuery {
    what: Option<String>,
    cuts: Option<bool>,
    nodes: Option<bool>,
    labels: Option<bool>,
    frozen: Option<bool>,
}

async fn list_presets() -> Json<Value> {
    Json(json!(ManifoldPreset::all()
        .iter()
        .map(|p| json!({ "name": p.name.as_str(), "config": p.markov.to_string(), "frozen_vertex": p.frozen_vertex }))
        .collect::<Vec<_>>()))
}

async fn list_sessions(State(app): State<Arc<AppState>>) -> Json<Value> {
    let ids: BTreeMap<u64, ()> = app.sessions.read().await.keys().map(|&k| (k, ())).collect();
    Json(json!(ids.keys().collect::<Vec<_>>()))
}

async fn create(State(app): State<Arc<AppState>>, Json(body): Json<CreateBody>) -> ApiResult<(StatusCode, Json<Value>)> {
    let id = app.next.fetch_add(1, Ordering::SeqCst);
    let s = match (body.preset, body.atbd) {
        (Some(p), None) => Session::from_preset(id, p.parse::<PresetName>().map_err(|e| ApiError::bad_request(e.to_string()))?),
        (None, Some(a)) => Session::from_base(id, a.to_base()?)?,
        _ => return Err(ApiError::bad_request("give exactly one of preset and atbd")),
    };
    app.persist(&s)?;
    let state = s.state_json();
    app.sessions.write().await.insert(id, Arc::new(Mutex::new(s)));
    Ok((StatusCode::CREATED, Json(json!({ "id": id, "state": state }))))
}

async fn get_session(State(app): State<Arc<AppState>>, Path(id): Path<u64>) -> ApiResult<Json<Value>> {
    let s = app.session(id).await?;
    let s = s.lock().await;
    Ok(Json(s.state_json()))
}

async fn mutate_session(State(app): State<Arc<AppState>>, Path(id): Path<u64>, Json(body): Json<MutateBody>) -> ApiResult<Json<Value>> {
    let s = app.session(id).await?;
    let mut s = s.lock().await;
    s.mutate(body.vertex, body.order)?;
    app.persist(&s)?;
    Ok(Json(s.state_json()))
}

async fn undo_session(State(app): State<Arc<AppState>>, Path(id): Path<u64>) -> ApiResult<Json<Value>> {
    let s = app.session(id).await?;
    let mut s = s.lock().await;
    if !s.undo() {
        return Err(ApiError { status: StatusCode::UNPROCESSABLE_ENTITY, kind: "empty_history", message: "nothing to undo".into() });
    }
    app.persist(&s)?;
    Ok(Json(s.state_json()))
}

async fn render_session(State(app): State<Arc<AppState>>, Path(id): Path<u64>, Query(q): Query<RenderQuery>) -> ApiResult<Response> {
    let s = app.session(id).await?;
    let s = s.lock().await;
    let opts = RenderOptions {
        cuts: q.cuts.unwrap_or(true),
        nodes: q.nodes.unwrap_or(true),
        labels: q.labels.unwrap_or(true),
        frozen: if q.frozen.unwrap_or(true) { s.frozen() } else { None },
    };
    let svg = match q.what.as_deref().unwrap_or("atbd") {
        "atbd" => atbd_svg(s.current(), &opts)?,
        "stc-overlay" => match &s.stc {
            Some(g) => stc_svg(g, &opts)?,
            None => atbd_svg(s.current(), &opts)?,
        },
        "staircase-chart" => {
            let pts: Vec<(usize, f64)> = s.sharp_points().iter().map(|p| (p.n, atf_core::lattice::rational_to_f64(&p.value))).collect();
            chart_svg(&pts, s.accumulation().map(|a| a.to_f64()))
        }
        other => return Err(ApiError::bad_request(format!("unknown render target {other:?}"))),
    };
    Ok(([(header::CONTENT_TYPE, "image/svg+xml")], svg).into_response())
}

async fn staircase_session(State(app): State<Arc<AppState>>, Path(id): Path<u64>) -> ApiResult<Json<Value>> {
    let s = app.session(id).await?;
    let s = s.lock().await;
    Ok(Json(s.staircase_json()))
}

async fn stc_session(State(app): State<Arc<AppState>>, Path(id): Path<u64>, Json(body): Json<StcBody>) -> ApiResult<Json<Value>> {
    let s = app.session(id).await?;
    let mut s = s.lock().await;
    let g = body.graph.to_graph(Some(s.current()))?;
    let report = validate_stc(&g)?;
    s.stc = Some(g);
    Ok(Json(stc_report_json(&report)))
}

pub fn router(app: Arc<AppState>) -> Router {
    Router::new()
        .route("/presets", get(list_presets))
        .route("/sessions", get(list_sessions).post(create))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/mutate", post(mutate_session))
        .route("/sessions/{id}/undo", post(undo_session))
        .route("/sessions/{id}/render", get(render_session))
        .route("/sessions/{id}/staircase", get(staircase_session))
        .route("/sessions/{id}/stc", post(stc_session))
        .with_state(app)
}

pub async fn serve(bind: &str, port: u16, data_dir: Option<PathBuf>) -> std::io::Result<()> {
    let app = match data_dir {
        Some(d) => AppState::load(d)?,
        None => AppState::new(None),
    };
    let listener = tokio::net::TcpListener::bind((bind, port)).await?;
    axum::serve(listener, router(Arc::new(app))).await
}
