//! HTTP API over a shared [`Session`].

use std::collections::{HashMap, VecDeque};
use std::net::SocketAddr;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};
use std::time::Duration;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Serialize;
use serde_json::json;

use crate::corpus;
use crate::engine::{EditMode, EngineError, GraphInfo, Session};
use crate::rules::{render_report, ComplianceReport, ReportFormat};
use crate::turtle::{serialize_turtle, ParseDiagnostic, PrefixMap};
use crate::vocab;

const TURTLE: &str = "text/turtle; charset=utf-8";
const JSON: &str = "application/json";

/// Reports kept per graph in the history buffer.
pub const REPORT_HISTORY: usize = 32;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ServeConfig {
    pub bind: String,
    pub port: u16,
    pub sweep_interval: Option<Duration>,
    pub preload_fixtures: bool,
}

impl Default for ServeConfig {
    fn default() -> Self {
        ServeConfig {
            bind: "127.0.0.1".into(),
            port: 8080,
            sweep_interval: None,
            preload_fixtures: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ApiError {
    #[serde(skip)]
    pub status: StatusCode,
    pub code: &'static str,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub column: Option<usize>,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        ApiError {
            status,
            code,
            message: message.into(),
            line: None,
            column: None,
        }
    }

    fn located(code: &'static str, diag: &ParseDiagnostic) -> Self {
        ApiError {
            line: Some(diag.line),
            column: Some(diag.column),
            ..ApiError::new(StatusCode::BAD_REQUEST, code, diag.to_string())
        }
    }
}

impl From<EngineError> for ApiError {
    fn from(e: EngineError) -> Self {
        match &e {
            EngineError::UnknownGraph(_) | EngineError::UnknownVersion(..) => {
                ApiError::new(StatusCode::NOT_FOUND, "unknown_graph", e.to_string())
            }
            EngineError::UnknownRule(_) => ApiError::new(StatusCode::BAD_REQUEST, "unknown_rule", e.to_string()),
            EngineError::Parse { diag, .. } => ApiError::located("parse_error", diag),
            EngineError::Query(diag) if diag.unsupported_construct().is_some() => {
                ApiError::located("unsupported_query", diag)
            }
            EngineError::Query(diag) => ApiError::located("query_parse_error", diag),
            EngineError::Eval(_) => ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "eval_error", e.to_string()),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(&self)).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

pub struct AppState {
    pub session: Session,
    history: Mutex<HashMap<String, VecDeque<ComplianceReport>>>,
    next_id: AtomicU64,
}

impl Default for AppState {
    fn default() -> Self {
        Self::new(Session::new())
    }
}

impl AppState {
    pub fn new(session: Session) -> Self {
        AppState {
            session,
            history: Mutex::new(HashMap::new()),
            next_id: AtomicU64::new(1),
        }
    }

    fn record(&self, report: &ComplianceReport) {
        let mut history = self.history.lock().expect("history lock");
        let ring = history.entry(report.graph_id.clone()).or_default();
        if ring.len() == REPORT_HISTORY {
            ring.pop_front();
        }
        ring.push_back(report.clone());
    }

    /// Checks every registered graph with all rules and records the reports.
    pub fn sweep(&self) {
        for info in self.session.graph_ids() {
            if let Ok(report) = self.session.run_check(&info.graph_id, None, false) {
                self.record(&report);
            }
        }
    }

    pub fn preload_fixtures(&self) -> Result<(), EngineError> {
        for f in &corpus::FIXTURES {
            self.session.load_contracts(f.name, &[f.source])?;
        }
        Ok(())
    }
}

fn utf8(body: &Bytes) -> ApiResult<&str> {
    std::str::from_utf8(body).map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "parse_error", format!("body is not UTF-8: {e}")))
}

fn flag(params: &HashMap<String, String>, name: &str) -> ApiResult<bool> {
    match params.get(name).map(String::as_str) {
        None | Some("false") | Some("0") => Ok(false),
        Some("true") | Some("1") | Some("") => Ok(true),
        Some(other) => Err(ApiError::new(
            StatusCode::BAD_REQUEST,
            "invalid_parameter",
            format!("`{name}` must be true or false, got `{other}`"),
        )),
    }
}

fn turtle_response(body: String) -> Response {
    ([(header::CONTENT_TYPE, TURTLE)], body).into_response()
}

async fn create_graph(
    State(state): State<Arc<AppState>>,
    Query(params): Query<HashMap<String, String>>,
    body: Bytes,
) -> ApiResult<(StatusCode, Json<GraphInfo>)> {
    let text = utf8(&body)?;
    let id = match params.get("id").filter(|s| !s.is_empty()) {
        Some(id) => id.clone(),
        None => loop {
            let candidate = format!("graph-{}", state.next_id.fetch_add(1, Ordering::Relaxed));
            if state.session.info(&candidate).is_err() {
                break candidate;
            }
        },
    };
    state.session.load_contracts(&id, &[text])?;
    Ok((StatusCode::CREATED, Json(state.session.info(&id)?)))
}

async fn list_graphs(State(state): State<Arc<AppState>>) -> Json<Vec<GraphInfo>> {
    Json(state.session.graph_ids())
}

async fn get_graph(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Response> {
    let graph = state.session.graph(&id)?;
    let prefixes = state.session.prefixes(&id)?;
    Ok(turtle_response(serialize_turtle(&graph, &prefixes)))
}

async fn check_graph(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(params): Query<HashMap<String, String>>,
) -> ApiResult<Response> {
    let infer = flag(&params, "infer")?;
    let rules: Option<Vec<String>> = params
        .get("rules")
        .filter(|s| !s.is_empty() && s.as_str() != "all")
        .map(|s| s.split(',').map(|r| r.trim().to_string()).filter(|r| !r.is_empty()).collect());
    let report = state.session.run_check(&id, rules.as_deref(), infer)?;
    state.record(&report);
    Ok(([(header::CONTENT_TYPE, JSON)], render_report(&report, ReportFormat::Json)).into_response())
}

async fn apply_facts(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(params): Query<HashMap<String, String>>,
    body: Bytes,
) -> ApiResult<Json<GraphInfo>> {
    let mode: EditMode = params
        .get("mode")
        .map_or(Ok(EditMode::Add), |m| m.parse())
        .map_err(|e: String| ApiError::new(StatusCode::BAD_REQUEST, "invalid_mode", e))?;
    let text = utf8(&body)?;
    state.session.apply_fragment(&id, text, mode)?;
    Ok(Json(state.session.info(&id)?))
}

async fn run_query(State(state): State<Arc<AppState>>, Path(id): Path<String>, body: Bytes) -> ApiResult<Response> {
    let text = utf8(&body)?;
    let solutions = state.session.query(&id, text)?;
    Ok(Json(solutions).into_response())
}

async fn graph_reports(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Response> {
    state.session.info(&id)?;
    let history = state.history.lock().expect("history lock");
    let reports: Vec<&ComplianceReport> = history.get(&id).map(|r| r.iter().collect()).unwrap_or_default();
    Ok(Json(reports).into_response())
}

async fn list_rules(State(state): State<Arc<AppState>>) -> Response {
    Json(state.session.rules()).into_response()
}

async fn list_fixtures() -> Json<serde_json::Value> {
    let items: Vec<_> = corpus::FIXTURES
        .iter()
        .map(|f| {
            let triple_count = f.load().map(|g| g.len()).unwrap_or(0);
            json!({ "name": f.name, "triple_count": triple_count })
        })
        .collect();
    Json(json!(items))
}

async fn get_fixture(Path(name): Path<String>) -> ApiResult<Response> {
    corpus::fixture_source(&name)
        .map(|src| turtle_response(src.to_string()))
        .map_err(|e| ApiError::new(StatusCode::NOT_FOUND, "unknown_fixture", e.to_string()))
}

async fn get_schema() -> Response {
    turtle_response(serialize_turtle(&vocab::schema_graph(), &PrefixMap::well_known()))
}

async fn not_found() -> ApiError {
    ApiError::new(StatusCode::NOT_FOUND, "not_found", "no such endpoint")
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/api/graphs", post(create_graph).get(list_graphs))
        .route("/api/graphs/{id}", get(get_graph))
        .route("/api/graphs/{id}/check", post(check_graph))
        .route("/api/graphs/{id}/facts", post(apply_facts))
        .route("/api/graphs/{id}/query", post(run_query))
        .route("/api/graphs/{id}/reports", get(graph_reports))
        .route("/api/rules", get(list_rules))
        .route("/api/fixtures", get(list_fixtures))
        .route("/api/fixtures/{name}", get(get_fixture))
        .route("/api/schema", get(get_schema))
        .fallback(not_found)
        .with_state(state)
}

/// Binds and serves until the process is stopped.
pub async fn serve(config: ServeConfig) -> std::io::Result<()> {
    let state = Arc::new(AppState::default());
    if config.preload_fixtures {
        state.preload_fixtures().map_err(std::io::Error::other)?;
    }
    if let Some(every) = config.sweep_interval.filter(|d| !d.is_zero()) {
        let state = Arc::clone(&state);
        tokio::spawn(async move {
            let mut ticker = tokio::time::interval(every);
            loop {
                ticker.tick().await;
                state.sweep();
            }
        });
    }
    let addr: SocketAddr = format!("{}:{}", config.bind, config.port)
        .parse()
        .map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidInput, e))?;
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(state)).await
}

#[cfg(test)]
mod tests {
    use super::*;
    use axum::body::Body;
    use axum::http::Request;
    use http_body_util::BodyExt;
    use tower::ServiceExt;

    async fn call(app: &Router, method: &str, uri: &str, body: &str) -> (StatusCode, String) {
        let req = Request::builder().method(method).uri(uri).body(Body::from(body.to_string())).unwrap();
        let resp = app.clone().oneshot(req).await.unwrap();
        let status = resp.status();
        let bytes = resp.into_body().collect().await.unwrap().to_bytes();
        (status, String::from_utf8(bytes.to_vec()).unwrap())
    }

    #[tokio::test]
    async fn create_and_check() {
        let app = router(Arc::new(AppState::default()));
        let src = corpus::fixture_source("b2c-violation").unwrap();
        let (status, body) = call(&app, "POST", "/api/graphs?id=g", src).await;
        assert_eq!(status, StatusCode::CREATED);
        let v: serde_json::Value = serde_json::from_str(&body).unwrap();
        let expected = vocab::schema_graph().len() + corpus::load_fixture("b2c-violation").unwrap().len();
        assert_eq!(v["triple_count"], expected);

        let (status, body) = call(&app, "POST", "/api/graphs/g/check?rules=R-4-1", "").await;
        assert_eq!(status, StatusCode::OK);
        assert!(body.contains("\"overall_status\":\"violated\""));
    }

    #[tokio::test]
    async fn error_codes() {
        let app = router(Arc::new(AppState::default()));
        let (status, body) = call(&app, "POST", "/api/graphs", "ex:a ex:b").await;
        assert_eq!(status, StatusCode::BAD_REQUEST);
        let v: serde_json::Value = serde_json::from_str(&body).unwrap();
        assert_eq!(v["code"], "parse_error");
        assert_eq!(v["line"], 1);

        let (status, body) = call(&app, "POST", "/api/graphs/none/check", "").await;
        assert_eq!(status, StatusCode::NOT_FOUND);
        assert!(body.contains("unknown_graph"));

        call(&app, "POST", "/api/graphs?id=e", "").await;
        let (status, body) = call(&app, "POST", "/api/graphs/e/facts?mode=toggle", "").await;
        assert_eq!(status, StatusCode::BAD_REQUEST);
        assert!(body.contains("invalid_mode"));

        let (status, body) = call(&app, "POST", "/api/graphs/e/check?infer=maybe", "").await;
        assert_eq!(status, StatusCode::BAD_REQUEST);
        assert!(body.contains("invalid_parameter"));

        let (status, body) = call(&app, "GET", "/api/nowhere", "").await;
        assert_eq!(status, StatusCode::NOT_FOUND);
        assert!(body.contains("\"code\""));
    }

    #[tokio::test]
    async fn sweep_fills_history() {
        let state = Arc::new(AppState::default());
        state.preload_fixtures().unwrap();
        state.sweep();
        let app = router(Arc::clone(&state));
        let (status, body) = call(&app, "GET", "/api/graphs/b2g-violation/reports", "").await;
        assert_eq!(status, StatusCode::OK);
        let v: serde_json::Value = serde_json::from_str(&body).unwrap();
        assert_eq!(v.as_array().unwrap().len(), 1);
        assert_eq!(v[0]["overall_status"], "violated");
    }

    #[test]
    fn history_is_bounded() {
        let state = AppState::default();
        state.session.load_contracts::<&str>("g", &[]).unwrap();
        for _ in 0..REPORT_HISTORY + 5 {
            state.sweep();
        }
        assert_eq!(state.history.lock().unwrap()["g"].len(), REPORT_HISTORY);
    }
}
