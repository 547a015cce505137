//! HTTP and WebSocket steering service.
//!
//! Each session owns a [`RuntimeState`] behind its own lock; at most one
//! WebSocket client may stream frames into a session at a time.

use std::collections::HashMap;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use axum::body::Bytes;
use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use fdms_core::fdms::AssignmentSpec;
use fdms_core::hand::HandModel;
use fdms_core::simtasks::bundled_script;
use fdms_core::switching::{Phase, RuntimeState, SynergyDatabase, TaskScript, Termination};
use fdms_core::synergy::Centering;
use serde::{Deserialize, Serialize};
use tower_http::services::ServeDir;

use crate::wire::{self, ErrorFrame, Reply};

pub struct Session {
    pub state: RuntimeState,
    pub script: Option<TaskScript>,
    streaming: bool,
}

pub struct AppState {
    db: Arc<SynergyDatabase>,
    model: Arc<HandModel>,
    sessions: Mutex<HashMap<u64, Arc<Mutex<Session>>>>,
    next_id: AtomicU64,
}

impl AppState {
    pub fn new(db: SynergyDatabase, model: HandModel) -> Arc<Self> {
        Arc::new(AppState {
            db: Arc::new(db),
            model: Arc::new(model),
            sessions: Mutex::new(HashMap::new()),
            next_id: AtomicU64::new(1),
        })
    }

    fn session(&self, id: u64) -> Result<Arc<Mutex<Session>>, ApiError> {
        self.sessions
            .lock()
            .expect("session table lock")
            .get(&id)
            .cloned()
            .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, "UnknownSession", format!("no session {id}")))
    }
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    frame: ErrorFrame,
}

impl ApiError {
    fn new(status: StatusCode, kind: &str, message: impl Into<String>) -> Self {
        ApiError {
            status,
            frame: ErrorFrame::new(kind, message),
        }
    }

    fn bad_request(e: fdms_core::Error) -> Self {
        ApiError {
            status: StatusCode::BAD_REQUEST,
            frame: ErrorFrame::from(&e),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.frame)).into_response()
    }
}

fn parse_body<T: for<'de> Deserialize<'de>>(body: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "MalformedRequest", e.to_string()))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SynergyInfo {
    pub name: String,
    pub kind: String,
    pub label: Option<String>,
    pub f: usize,
    pub subset: Vec<usize>,
    pub centering: Centering,
    pub contribution_ratios: Vec<f64>,
}

async fn list_synergies(State(app): State<Arc<AppState>>) -> Json<Vec<SynergyInfo>> {
    let list = app
        .db
        .entries()
        .map(|(name, e)| {
            let m = e.document.model();
            SynergyInfo {
                name: name.to_string(),
                kind: e.kind.to_string(),
                label: e.document.label().map(str::to_string),
                f: m.dim(),
                subset: m.subset().indices().to_vec(),
                centering: m.centering(),
                contribution_ratios: m.contribution_ratios().unwrap_or_default(),
            }
        })
        .collect();
    Json(list)
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum ScriptRef {
    Bundled(String),
    Inline(TaskScript),
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct CreateSession {
    #[serde(default)]
    task_script: Option<ScriptRef>,
    #[serde(default)]
    hand_model: Option<serde_json::Value>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SessionCreated {
    pub id: u64,
    pub dof: usize,
    pub joint_names: Vec<String>,
    pub posture: Vec<f64>,
    pub script: Option<TaskScript>,
}

async fn create_session(State(app): State<Arc<AppState>>, body: Bytes) -> Result<Response, ApiError> {
    let req: CreateSession = if body.iter().all(u8::is_ascii_whitespace) {
        CreateSession::default()
    } else {
        parse_body(&body)?
    };
    let model = match req.hand_model {
        Some(v) => Arc::new(HandModel::from_json_str(&v.to_string()).map_err(ApiError::bad_request)?),
        None => app.model.clone(),
    };
    let script = match req.task_script {
        None => None,
        Some(ScriptRef::Bundled(name)) => Some(bundled_script(&name).map_err(ApiError::bad_request)?),
        Some(ScriptRef::Inline(s)) => Some(s),
    };
    if let Some(s) = &script {
        s.validate(&app.db, &model).map_err(ApiError::bad_request)?;
    }
    let state = RuntimeState::new(model.clone(), None).map_err(ApiError::bad_request)?;
    let id = app.next_id.fetch_add(1, Ordering::Relaxed);
    let created = SessionCreated {
        id,
        dof: model.dof(),
        joint_names: model.joint_names(),
        posture: state.current_posture().to_vec(),
        script: script.clone(),
    };
    app.sessions.lock().expect("session table lock").insert(
        id,
        Arc::new(Mutex::new(Session {
            state,
            script,
            streaming: false,
        })),
    );
    Ok((StatusCode::CREATED, Json(created)).into_response())
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PhaseRequest {
    #[serde(default)]
    assignment: Option<AssignmentSpec>,
    #[serde(default)]
    synergy: Option<String>,
    #[serde(default)]
    n_s: Option<usize>,
    /// Index of a phase of the session's task script.
    #[serde(default)]
    script_phase: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PhaseView {
    pub synergy: String,
    pub label: Option<String>,
    pub assignment: AssignmentSpec,
    pub n_s: usize,
    pub f: usize,
    pub contribution_ratios: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PhaseStarted {
    pub frozen: Vec<usize>,
    pub frozen_values: Vec<f64>,
    pub phase: PhaseView,
    pub coefficients: Vec<f64>,
    pub posture: Vec<f64>,
}

fn phase_view(app: &AppState, state: &RuntimeState) -> Option<PhaseView> {
    let name = state.active_synergy()?;
    let model = app.db.lookup(name).ok()?.document.model();
    Some(PhaseView {
        synergy: name.to_string(),
        label: state.active_label().map(str::to_string),
        assignment: state.active_assignment()?.spec().clone(),
        n_s: state.active_matrix()?.n_s(),
        f: model.dim(),
        contribution_ratios: model.contribution_ratios().unwrap_or_default(),
    })
}

fn requested_phase(req: PhaseRequest, session: &Session) -> Result<Phase, ApiError> {
    let bad = |m: &str| ApiError::new(StatusCode::BAD_REQUEST, "MalformedRequest", m);
    match req {
        PhaseRequest {
            script_phase: Some(k),
            assignment: None,
            synergy: None,
            n_s: None,
        } => {
            let script = session
                .script
                .as_ref()
                .ok_or_else(|| bad("session has no task script"))?;
            script
                .phases
                .get(k)
                .cloned()
                .ok_or_else(|| bad(&format!("script has {} phases", script.phases.len())))
        }
        PhaseRequest {
            script_phase: None,
            assignment: Some(assignment),
            synergy: Some(synergy),
            n_s: Some(n_s),
        } => Ok(Phase {
            name: None,
            assignment,
            synergy,
            n_s,
            termination: Termination::ExternalSignal,
        }),
        _ => Err(bad("send either {assignment, synergy, n_s} or {script_phase}")),
    }
}

async fn set_phase(
    State(app): State<Arc<AppState>>,
    Path(id): Path<u64>,
    body: Bytes,
) -> Result<Json<PhaseStarted>, ApiError> {
    let session = app.session(id)?;
    let req: PhaseRequest = parse_body(&body)?;
    let mut s = session.lock().expect("session lock");
    let phase = requested_phase(req, &s)?;
    s.state.begin_phase(&phase, &app.db).map_err(ApiError::bad_request)?;
    let frozen = s.state.frozen_values();
    Ok(Json(PhaseStarted {
        frozen: frozen.keys().copied().collect(),
        frozen_values: frozen.values().copied().collect(),
        phase: phase_view(&app, &s.state).expect("phase just started"),
        coefficients: s
            .state
            .coefficients()
            .map(|z| z.iter().copied().collect())
            .unwrap_or_default(),
        posture: s.state.current_posture().to_vec(),
    }))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Snapshot {
    pub id: u64,
    #[serde(flatten)]
    pub hand: Reply,
    pub phase: Option<PhaseView>,
    pub streaming: bool,
}

async fn get_session(State(app): State<Arc<AppState>>, Path(id): Path<u64>) -> Result<Json<Snapshot>, ApiError> {
    let session = app.session(id)?;
    let s = session.lock().expect("session lock");
    Ok(Json(Snapshot {
        id,
        hand: wire::view(&s.state),
        phase: phase_view(&app, &s.state),
        streaming: s.streaming,
    }))
}

/// Clears the streaming flag when the socket task ends.
struct StreamGuard(Arc<Mutex<Session>>);

impl Drop for StreamGuard {
    fn drop(&mut self) {
        if let Ok(mut s) = self.0.lock() {
            s.streaming = false;
        }
    }
}

async fn stream(
    State(app): State<Arc<AppState>>,
    Path(id): Path<u64>,
    ws: WebSocketUpgrade,
) -> Result<Response, ApiError> {
    let session = app.session(id)?;
    {
        let mut s = session.lock().expect("session lock");
        if s.streaming {
            return Err(ApiError::new(
                StatusCode::CONFLICT,
                "SessionBusy",
                format!("session {id} already has a steering client"),
            ));
        }
        s.streaming = true;
    }
    let guard = StreamGuard(session);
    Ok(ws.on_upgrade(move |socket| run_stream(socket, guard)))
}

async fn run_stream(mut socket: WebSocket, guard: StreamGuard) {
    while let Some(msg) = socket.recv().await {
        let text = match msg {
            Ok(Message::Text(t)) => t.to_string(),
            Ok(Message::Binary(b)) => String::from_utf8_lossy(&b).into_owned(),
            Ok(Message::Close(_)) | Err(_) => break,
            Ok(_) => continue,
        };
        let reply = {
            let mut s = guard.0.lock().expect("session lock");
            wire::handle_frame(&mut s.state, &text)
        };
        if socket.send(Message::Text(reply.into())).await.is_err() {
            break;
        }
    }
}

pub fn router(app: Arc<AppState>, assets: Option<PathBuf>) -> Router {
    let r = Router::new()
        .route("/synergies", get(list_synergies))
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/phase", post(set_phase))
        .route("/sessions/{id}/stream", get(stream))
        .with_state(app);
    match assets {
        Some(dir) => r.fallback_service(ServeDir::new(dir)),
        None => r,
    }
}

/// Serves until the process is stopped.
pub async fn serve(addr: SocketAddr, app: Arc<AppState>, assets: Option<PathBuf>) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    println!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(app, assets)).await
}
