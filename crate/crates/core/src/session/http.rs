//! HTTP/JSON facade over the session queue.
//!
//! | route                  | effect                                  |
//! |------------------------|-----------------------------------------|
//! | `GET /session`         | id, revision, counts, canonical world   |
//! | `GET /cells`           | every cell with its outcome             |
//! | `POST /cells`          | append a cell and run it                |
//! | `PUT /cells/{i}`       | replace cell `i`, cascade (streamed)    |
//! | `POST /cells/{i}/run`  | rerun cell `i`, cascade (streamed)      |
//!
//! Streamed responses are newline-delimited JSON: one `{"cell": ...}`
//! line per resubmitted cell, then `{"done": true, ...}`.

use axum::body::Body;
use axum::extract::{Path, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post, put};
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::{json, Value};
use tokio_stream::wrappers::UnboundedReceiverStream;
use tokio_stream::StreamExt;

use super::json::{CellJson, JSON_VERSION};
use super::queue::{Event, Handle, Request};
use super::state::SessionError;

#[derive(Debug, Deserialize)]
pub struct SourceBody {
    pub source: String,
}

pub fn router(handle: Handle) -> Router {
    Router::new()
        .route("/session", get(session))
        .route("/cells", get(cells).post(append))
        .route("/cells/{index}", put(edit))
        .route("/cells/{index}/run", post(run))
        .with_state(handle)
}

async fn session(State(h): State<Handle>) -> Json<Value> {
    let s = h.snapshot();
    Json(json!({
        "version": JSON_VERSION,
        "id": s.id,
        "revision": s.revision,
        "cells": s.cells.len(),
        "accepted": s.accepted,
        "first_rejected": s.cells.iter().position(|c| c.status == super::CellStatus::Rejected),
        "world": s.world_text,
    }))
}

async fn cells(State(h): State<Handle>) -> Json<Value> {
    let s = h.snapshot();
    let cells: Vec<CellJson> = s
        .cells
        .iter()
        .enumerate()
        .map(|(i, c)| CellJson::new(i, c))
        .collect();
    Json(json!({ "version": JSON_VERSION, "revision": s.revision, "cells": cells }))
}

fn refused(e: SessionError) -> Response {
    let status = match e {
        SessionError::NoCell(_) => StatusCode::NOT_FOUND,
        SessionError::Blocked(_) | SessionError::NotReady(..) => StatusCode::CONFLICT,
    };
    (
        status,
        Json(json!({ "version": JSON_VERSION, "error": e.to_string() })),
    )
        .into_response()
}

fn event_json(ev: &Event) -> Option<Value> {
    match ev {
        Event::Cell {
            index,
            cell,
            revision,
        } => Some(json!({
            "version": JSON_VERSION,
            "revision": revision,
            "cell": CellJson::new(*index, cell),
        })),
        Event::Done { revision } => Some(json!({
            "version": JSON_VERSION,
            "done": true,
            "revision": revision,
        })),
        Event::Refused(_) => None,
    }
}

async fn append(State(h): State<Handle>, Json(body): Json<SourceBody>) -> Response {
    match h.append(body.source).await {
        Ok((index, cell, revision)) => Json(json!({
            "version": JSON_VERSION,
            "revision": revision,
            "cell": CellJson::new(index, &cell),
        }))
        .into_response(),
        Err(e) => refused(e),
    }
}

async fn edit(
    State(h): State<Handle>,
    Path(index): Path<usize>,
    Json(body): Json<SourceBody>,
) -> Response {
    cascade(
        &h,
        Request::Edit {
            index,
            source: body.source,
        },
    )
    .await
}

async fn run(State(h): State<Handle>, Path(index): Path<usize>) -> Response {
    cascade(&h, Request::Run { index }).await
}

/// Streams the events of a cascading request. A refusal arrives before
/// any cell, so it still gets a proper status code.
async fn cascade(h: &Handle, request: Request) -> Response {
    let mut rx = h.request(request);
    let Some(first) = rx.recv().await else {
        return StatusCode::SERVICE_UNAVAILABLE.into_response();
    };
    if let Event::Refused(e) = first {
        return refused(e);
    }
    let head = tokio_stream::once(first);
    let lines = head
        .chain(UnboundedReceiverStream::new(rx))
        .filter_map(|ev| event_json(&ev))
        .map(|v| Ok::<_, std::convert::Infallible>(format!("{v}\n")));
    Response::builder()
        .header(header::CONTENT_TYPE, "application/x-ndjson")
        .body(Body::from_stream(lines))
        .expect("static response parts")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::OracleConfig;
    use crate::session::Session;
    use axum::http::Request as HttpRequest;
    use tower::ServiceExt;

    async fn call(
        app: &Router,
        method: &str,
        uri: &str,
        body: Option<Value>,
    ) -> (StatusCode, String) {
        let req = HttpRequest::builder()
            .method(method)
            .uri(uri)
            .header(header::CONTENT_TYPE, "application/json")
            .body(match body {
                Some(b) => Body::from(b.to_string()),
                None => Body::empty(),
            })
            .unwrap();
        let resp = app.clone().oneshot(req).await.unwrap();
        let status = resp.status();
        let bytes = axum::body::to_bytes(resp.into_body(), usize::MAX)
            .await
            .unwrap();
        (status, String::from_utf8(bytes.to_vec()).unwrap())
    }

    fn app() -> Router {
        let cfg = OracleConfig {
            trials: 50,
            ..OracleConfig::default()
        };
        router(Handle::spawn(Session::new(cfg), None))
    }

    #[tokio::test]
    async fn append_edit_and_stream() {
        let app = app();
        let (st, body) = call(
            &app,
            "POST",
            "/cells",
            Some(json!({"source": "subtype positive {x: int | x > 0}"})),
        )
        .await;
        assert_eq!(st, StatusCode::OK);
        let v: Value = serde_json::from_str(&body).unwrap();
        assert_eq!(v["cell"]["outcome"]["message"], "positive");
        assert_eq!(
            v["cell"]["outcome"]["transfer"],
            "(SYNTHETO::MAKE-OUTCOME-TYPE-SUCCESS :MESSAGE \"positive\")"
        );
        call(
            &app,
            "POST",
            "/cells",
            Some(json!({"source": "function f(x: positive) returns (y: int) { return x; }"})),
        )
        .await;

        let (st, body) = call(
            &app,
            "PUT",
            "/cells/0",
            Some(json!({"source": "subtype positive {x: int | x >= 1}"})),
        )
        .await;
        assert_eq!(st, StatusCode::OK);
        let lines: Vec<Value> = body
            .lines()
            .map(|l| serde_json::from_str(l).unwrap())
            .collect();
        assert_eq!(lines.len(), 3, "{body}");
        assert_eq!(lines[0]["cell"]["index"], 0);
        assert_eq!(lines[1]["cell"]["index"], 1);
        assert_eq!(lines[2]["done"], true);

        let (_, body) = call(&app, "GET", "/session", None).await;
        let v: Value = serde_json::from_str(&body).unwrap();
        assert_eq!(v["revision"], 3);
        assert_eq!(v["accepted"], 2);
        assert!(v["world"].as_str().unwrap().contains("x >= 1"));
    }

    #[tokio::test]
    async fn refusals_have_status_codes() {
        let app = app();
        let (st, _) = call(&app, "POST", "/cells/4/run", None).await;
        assert_eq!(st, StatusCode::NOT_FOUND);
        call(
            &app,
            "POST",
            "/cells",
            Some(json!({"source": "theorem bad forall (x: int) x > x"})),
        )
        .await;
        let (st, body) = call(
            &app,
            "POST",
            "/cells",
            Some(json!({"source": "subtype p {x: int | x > 0}"})),
        )
        .await;
        assert_eq!(st, StatusCode::CONFLICT);
        assert!(body.contains("blocked"));
        let (_, body) = call(&app, "GET", "/cells", None).await;
        let v: Value = serde_json::from_str(&body).unwrap();
        assert_eq!(v["cells"][0]["status"], "rejected");
        assert_eq!(v["cells"][0]["obligations"][0]["status"], "fail");
    }
}
