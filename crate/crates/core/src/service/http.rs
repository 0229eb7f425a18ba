use std::net::SocketAddr;
use std::sync::Arc;

use axum::extract::{Path, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use serde::{Deserialize, Serialize};

use super::session::{CreateSession, ServiceError, SessionStore};
use crate::design::Action;
use crate::scenarios;

#[derive(Serialize)]
struct ErrorBody {
    code: &'static str,
    message: String,
}

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        let status = match &self {
            ServiceError::NotFound(_) | ServiceError::UnknownScenario(_) => StatusCode::NOT_FOUND,
            ServiceError::Finished | ServiceError::IllegalMove(_) => StatusCode::CONFLICT,
            ServiceError::Log(_) | ServiceError::Engine(_) => StatusCode::INTERNAL_SERVER_ERROR,
            _ => StatusCode::UNPROCESSABLE_ENTITY,
        };
        let body = ErrorBody {
            code: self.code(),
            message: self.to_string(),
        };
        (status, Json(body)).into_response()
    }
}

#[derive(Deserialize)]
struct MoveRequest {
    action: Action,
}

#[derive(Serialize)]
struct MovesResponse {
    legal: Vec<Action>,
}

type Store = Arc<SessionStore>;

async fn create(
    State(store): State<Store>,
    Json(req): Json<CreateSession>,
) -> Result<Response, ServiceError> {
    let snap = store.create(&req)?;
    Ok((StatusCode::CREATED, Json(snap)).into_response())
}

async fn show(
    State(store): State<Store>,
    Path(id): Path<String>,
) -> Result<Response, ServiceError> {
    Ok(Json(store.snapshot(&id)?).into_response())
}

async fn moves(
    State(store): State<Store>,
    Path(id): Path<String>,
) -> Result<Response, ServiceError> {
    let legal = store.legal_moves(&id)?;
    Ok(Json(MovesResponse { legal }).into_response())
}

async fn play(
    State(store): State<Store>,
    Path(id): Path<String>,
    Json(req): Json<MoveRequest>,
) -> Result<Response, ServiceError> {
    Ok(Json(store.play_move(&id, req.action)?).into_response())
}

async fn trace(
    State(store): State<Store>,
    Path(id): Path<String>,
) -> Result<Response, ServiceError> {
    let snap = store.snapshot(&id)?;
    Ok((
        [(header::CONTENT_TYPE, "text/plain; charset=utf-8")],
        snap.trace_text,
    )
        .into_response())
}

async fn list_scenarios() -> Json<Vec<&'static str>> {
    Json(scenarios::ALL.iter().map(|(n, _)| *n).collect())
}

async fn scenario(Path(name): Path<String>) -> Result<Response, ServiceError> {
    let text = scenarios::get(&name).ok_or(ServiceError::UnknownScenario(name))?;
    Ok(([(header::CONTENT_TYPE, "text/plain; charset=utf-8")], text).into_response())
}

pub fn router(store: Arc<SessionStore>) -> Router {
    Router::new()
        .route("/sessions", axum::routing::post(create))
        .route("/sessions/:id", get(show))
        .route("/sessions/:id/moves", get(moves).post(play))
        .route("/sessions/:id/trace", get(trace))
        .route("/scenarios", get(list_scenarios))
        .route("/scenarios/:name", get(scenario))
        .with_state(store)
}

/// Serves until the process is stopped.
pub async fn serve(addr: SocketAddr, store: Arc<SessionStore>) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(store)).await
}
