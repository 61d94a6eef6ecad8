//! REST endpoints.
//!
//! | route               | verbs     | body                        |
//! |---------------------|-----------|-----------------------------|
//! | `/yap/heb/joint`    | GET, POST | `{"tokens": [..]}` or `{"text": ".."}` |
//! | `/yap/heb/lattice`  | POST      | same                        |
//! | `/admin/lexicon`    | POST      | `{"lines": [..]}`, only with admin enabled |
//! | `/healthz`          | GET       |                             |

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::State;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use morphosyn_core::lexicon::tokenize_raw;
use morphosyn_core::{Error, LineDiagnostic};
use serde::Deserialize;
use serde_json::json;
use tokio::net::TcpListener;

use crate::pipeline::Engine;

#[derive(Debug, thiserror::Error)]
pub enum ApiError {
    #[error("{0}")]
    BadRequest(String),
    #[error("{0}")]
    Unprocessable(String),
    #[error("lexicon lines rejected")]
    BadLexicon(Vec<LineDiagnostic>),
    #[error(transparent)]
    Internal(#[from] Error),
}

static ERROR_IDS: AtomicU64 = AtomicU64::new(1);

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        match self {
            ApiError::BadRequest(m) => {
                (StatusCode::BAD_REQUEST, Json(json!({ "error": m }))).into_response()
            }
            ApiError::Unprocessable(m) => (
                StatusCode::UNPROCESSABLE_ENTITY,
                Json(json!({ "error": m })),
            )
                .into_response(),
            ApiError::BadLexicon(d) => {
                let diagnostics: Vec<_> = d
                    .iter()
                    .map(|d| json!({ "line": d.line, "column": d.column, "message": d.message }))
                    .collect();
                (
                    StatusCode::BAD_REQUEST,
                    Json(json!({ "error": "lexicon lines rejected", "diagnostics": diagnostics })),
                )
                    .into_response()
            }
            ApiError::Internal(e) => {
                let id = format!("{:08x}", ERROR_IDS.fetch_add(1, Ordering::Relaxed));
                log::error!("request failed [{id}]: {e}");
                (
                    StatusCode::INTERNAL_SERVER_ERROR,
                    Json(json!({ "error": "internal error", "id": id })),
                )
                    .into_response()
            }
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ParseRequest {
    text: Option<String>,
    tokens: Option<Vec<String>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LexiconRequest {
    lines: Vec<String>,
}

/// Validates a parse request body and returns its tokens.
fn request_tokens(body: &[u8]) -> Result<Vec<String>, ApiError> {
    let req: ParseRequest = serde_json::from_slice(body)
        .map_err(|e| ApiError::BadRequest(format!("malformed request body: {e}")))?;
    let tokens = match (req.text, req.tokens) {
        (Some(text), None) => tokenize_raw(&text),
        (None, Some(tokens)) => tokens,
        _ => {
            return Err(ApiError::BadRequest(
                "exactly one of 'text' and 'tokens' is required".into(),
            ))
        }
    };
    if tokens.is_empty() {
        return Err(ApiError::Unprocessable("empty sentence".into()));
    }
    if let Some(t) = tokens
        .iter()
        .find(|t| t.is_empty() || t.chars().any(char::is_whitespace))
    {
        return Err(ApiError::BadRequest(format!("invalid token {t:?}")));
    }
    Ok(tokens)
}

async fn blocking<T: Send + 'static>(
    f: impl FnOnce() -> Result<T, ApiError> + Send + 'static,
) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::Internal(Error::Model(format!("worker failed: {e}"))))?
}

async fn joint(State(engine): State<Arc<Engine>>, body: Bytes) -> Result<Response, ApiError> {
    let tokens = request_tokens(&body)?;
    let out = blocking(move || Ok(engine.parse(&tokens)?)).await?;
    Ok(Json(out).into_response())
}

async fn lattice(State(engine): State<Arc<Engine>>, body: Bytes) -> Result<Response, ApiError> {
    let tokens = request_tokens(&body)?;
    let (ma, oov) = blocking(move || Ok(engine.lattice(&tokens)?)).await?;
    Ok(Json(json!({ "ma_lattice": ma, "oov": oov })).into_response())
}

async fn lexicon(State(engine): State<Arc<Engine>>, body: Bytes) -> Result<Response, ApiError> {
    let req: LexiconRequest = serde_json::from_slice(&body)
        .map_err(|e| ApiError::BadRequest(format!("malformed request body: {e}")))?;
    let added = blocking(move || match engine.add_lexicon(&req.lines) {
        Ok(n) => Ok(n),
        Err(Error::LexiconBatch(d)) => Err(ApiError::BadLexicon(d)),
        Err(e) => Err(e.into()),
    })
    .await?;
    Ok(Json(json!({ "added": added })).into_response())
}

async fn healthz() -> &'static str {
    "ok"
}

/// The service routes. `/admin/lexicon` is mounted only when `admin` is set.
pub fn router(engine: Arc<Engine>, admin: bool) -> Router {
    let mut r = Router::new()
        .route("/yap/heb/joint", get(joint).post(joint))
        .route("/yap/heb/lattice", post(lattice))
        .route("/healthz", get(healthz));
    if admin {
        r = r.route("/admin/lexicon", post(lexicon));
    }
    r.with_state(engine)
}

/// Serves until the process is interrupted.
pub async fn serve(listener: TcpListener, engine: Arc<Engine>, admin: bool) -> std::io::Result<()> {
    axum::serve(listener, router(engine, admin))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn request_validation() {
        assert_eq!(
            request_tokens(br#"{"tokens":["a","b"]}"#).unwrap(),
            ["a", "b"]
        );
        assert_eq!(
            request_tokens(br#"{"text":"a b."}"#).unwrap(),
            ["a", "b", "."]
        );
        let status = |b: &[u8]| request_tokens(b).unwrap_err().into_response().status();
        assert_eq!(status(br#"{"text":""}"#), StatusCode::UNPROCESSABLE_ENTITY);
        assert_eq!(
            status(br#"{"tokens":[]}"#),
            StatusCode::UNPROCESSABLE_ENTITY
        );
        assert_eq!(status(b"not json"), StatusCode::BAD_REQUEST);
        assert_eq!(
            status(br#"{"text":"a","tokens":["a"]}"#),
            StatusCode::BAD_REQUEST
        );
        assert_eq!(status(br#"{}"#), StatusCode::BAD_REQUEST);
        assert_eq!(status(br#"{"tokens":["a b"]}"#), StatusCode::BAD_REQUEST);
        assert_eq!(
            status(br#"{"tokens":["a"],"extra":1}"#),
            StatusCode::BAD_REQUEST
        );
    }
}
