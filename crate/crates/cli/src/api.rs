//! JSON over HTTP for playing against the engine.
//!
//! | method | path | body | reply |
//! |---|---|---|---|
//! | POST | `/sessions` | `{"size": 6, "engine": "white"}` | `201` [`State`] |
//! | GET | `/sessions/{id}` | | [`State`] |
//! | POST | `/sessions/{id}/move` | `{"move": "C4"}` | [`State`] |
//! | POST | `/sessions/{id}/engine` | | [`EngineReply`] |
//! | GET | `/sessions/{id}/analysis?cap=14` | | [`Analysis`] |
//!
//! Errors come back as `{"error": "..."}`: 404 for an unknown session, 422
//! for an illegal move, 409 when it is the other side's turn, the game is
//! over or the position is outside the proof, 400 for a bad request.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use axum::extract::{Path, Query, State as AxumState};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use othello_core::board::BoardError;
use othello_core::player::{Engine, PlayerError, PlaySession};
use othello_core::{Color, Move, Square};
use serde::{Deserialize, Serialize};

/// Engines by board size plus the open sessions.
#[derive(Clone)]
pub struct AppState {
    engines: Arc<HashMap<u8, Arc<Engine>>>,
    sessions: Arc<Mutex<HashMap<u64, Arc<Mutex<PlaySession>>>>>,
    next_id: Arc<AtomicU64>,
}

impl AppState {
    pub fn new(engines: HashMap<u8, Arc<Engine>>) -> Self {
        AppState {
            engines: Arc::new(engines),
            sessions: Arc::default(),
            next_id: Arc::new(AtomicU64::new(1)),
        }
    }

    fn session(&self, id: u64) -> Result<Arc<Mutex<PlaySession>>, ApiError> {
        self.sessions
            .lock()
            .unwrap()
            .get(&id)
            .cloned()
            .ok_or_else(|| ApiError(StatusCode::NOT_FOUND, format!("no session {id}")))
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/sessions", post(create))
        .route("/sessions/{id}", get(show))
        .route("/sessions/{id}/move", post(human_move))
        .route("/sessions/{id}/engine", post(engine_move))
        .route("/sessions/{id}/analysis", get(analysis))
        .with_state(state)
}

pub struct ApiError(StatusCode, String);

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.0, Json(serde_json::json!({ "error": self.1 }))).into_response()
    }
}

impl From<PlayerError> for ApiError {
    fn from(e: PlayerError) -> Self {
        let status = match e {
            PlayerError::Illegal(_) => StatusCode::UNPROCESSABLE_ENTITY,
            PlayerError::Search(_) => StatusCode::INTERNAL_SERVER_ERROR,
            _ => StatusCode::CONFLICT,
        };
        ApiError(status, e.to_string())
    }
}

#[derive(Debug, Deserialize)]
pub struct NewSession {
    pub size: u8,
    /// Colour the engine plays, `black` or `white`.
    pub engine: String,
}

#[derive(Debug, Deserialize)]
pub struct MoveRequest {
    #[serde(rename = "move")]
    pub mv: String,
}

#[derive(Debug, Deserialize)]
pub struct AnalysisQuery {
    pub cap: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct State {
    pub id: u64,
    pub size: u8,
    /// One string per row from the top: `B`, `W` or `.`.
    pub board: Vec<String>,
    pub to_move: String,
    pub engine: String,
    pub legal_moves: Vec<String>,
    pub history: Vec<String>,
    pub black: u32,
    pub white: u32,
    pub over: bool,
    /// Black's final score once the game is over.
    pub score: Option<i32>,
    /// Result the engine is proven to reach or beat, in its favour.
    pub certified_value: Option<i32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EngineReply {
    #[serde(rename = "move")]
    pub mv: String,
    pub state: State,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveValue {
    #[serde(rename = "move")]
    pub mv: String,
    pub lower: Option<i32>,
    pub upper: Option<i32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Analysis {
    pub moves: Vec<MoveValue>,
}

fn color_name(c: Color) -> String {
    c.to_string()
}

pub fn state_of(id: u64, s: &PlaySession) -> State {
    let p = s.position();
    let n = p.size();
    let black_to_move = s.to_move() == Color::Black;
    let (black, white) = if black_to_move { (p.mover(), p.opponent()) } else { (p.opponent(), p.mover()) };
    let board = (0..n)
        .map(|r| {
            (0..n)
                .map(|c| {
                    let bit = Square::new(r, c).bit();
                    if black & bit != 0 {
                        'B'
                    } else if white & bit != 0 {
                        'W'
                    } else {
                        '.'
                    }
                })
                .collect()
        })
        .collect();
    let (b, w) = s.discs();
    State {
        id,
        size: n,
        board,
        to_move: color_name(s.to_move()),
        engine: color_name(s.engine_color()),
        legal_moves: if s.is_over() { Vec::new() } else { p.legal_moves().iter().map(|m| m.to_string()).collect() },
        history: s.history().iter().map(|m| m.to_string()).collect(),
        black: b,
        white: w,
        over: s.is_over(),
        score: s.final_score(Color::Black),
        certified_value: s.certified_value(),
    }
}

fn parse_color(s: &str) -> Result<Color, ApiError> {
    match s.to_ascii_lowercase().as_str() {
        "black" | "b" => Ok(Color::Black),
        "white" | "w" => Ok(Color::White),
        _ => Err(ApiError(StatusCode::BAD_REQUEST, format!("unknown colour {s:?}"))),
    }
}

async fn create(AxumState(app): AxumState<AppState>, Json(req): Json<NewSession>) -> Result<impl IntoResponse, ApiError> {
    let color = parse_color(&req.engine)?;
    let engine = app
        .engines
        .get(&req.size)
        .cloned()
        .ok_or_else(|| ApiError(StatusCode::BAD_REQUEST, format!("no engine for size {}", req.size)))?;
    let session = tokio::task::spawn_blocking(move || PlaySession::new(req.size as usize, color, engine))
        .await
        .map_err(|e| ApiError(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))??;
    let id = app.next_id.fetch_add(1, Ordering::Relaxed);
    let state = state_of(id, &session);
    app.sessions.lock().unwrap().insert(id, Arc::new(Mutex::new(session)));
    Ok((StatusCode::CREATED, Json(state)))
}

async fn show(AxumState(app): AxumState<AppState>, Path(id): Path<u64>) -> Result<Json<State>, ApiError> {
    let session = app.session(id)?;
    let s = session.lock().unwrap();
    Ok(Json(state_of(id, &s)))
}

async fn human_move(
    AxumState(app): AxumState<AppState>,
    Path(id): Path<u64>,
    Json(req): Json<MoveRequest>,
) -> Result<Json<State>, ApiError> {
    let session = app.session(id)?;
    let mut s = session.lock().unwrap();
    let mv = Move::parse(req.mv.trim(), s.position().size())
        .map_err(|e: BoardError| ApiError(StatusCode::UNPROCESSABLE_ENTITY, e.to_string()))?;
    s.play_opponent(mv)?;
    Ok(Json(state_of(id, &s)))
}

async fn engine_move(AxumState(app): AxumState<AppState>, Path(id): Path<u64>) -> Result<Json<EngineReply>, ApiError> {
    let session = app.session(id)?;
    let reply = tokio::task::spawn_blocking(move || -> Result<EngineReply, ApiError> {
        let mut s = session.lock().unwrap();
        let mv = s.engine_move()?;
        Ok(EngineReply {
            mv: mv.to_string(),
            state: state_of(id, &s),
        })
    })
    .await
    .map_err(|e| ApiError(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))??;
    Ok(Json(reply))
}

async fn analysis(
    AxumState(app): AxumState<AppState>,
    Path(id): Path<u64>,
    Query(q): Query<AnalysisQuery>,
) -> Result<Json<Analysis>, ApiError> {
    let session = app.session(id)?;
    let cap = q.cap.unwrap_or(14).min(24);
    let moves = tokio::task::spawn_blocking(move || session.lock().unwrap().analyze(cap))
        .await
        .map_err(|e| ApiError(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))??;
    Ok(Json(Analysis {
        moves: moves
            .into_iter()
            .map(|m| MoveValue {
                mv: m.mv.to_string(),
                lower: m.bounds.map(|b| b.lower),
                upper: m.bounds.map(|b| b.upper),
            })
            .collect(),
    }))
}
