use std::sync::Arc;

use axum::body::Body;
use axum::http::{header, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::Value;
use tower::ServiceExt;

use daont_core::corpus::{fixture_source, load_fixture, SCENARIOS};
use daont_core::service::{router, AppState};
use daont_core::vocab::schema_graph;

struct Reply {
    status: StatusCode,
    content_type: String,
    body: String,
}

impl Reply {
    fn json(&self) -> Value {
        serde_json::from_str(&self.body).unwrap_or_else(|e| panic!("{e}: {}", self.body))
    }
}

async fn call(app: &Router, method: &str, uri: &str, body: &str) -> Reply {
    let req = Request::builder().method(method).uri(uri).body(Body::from(body.to_string())).unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let content_type = resp
        .headers()
        .get(header::CONTENT_TYPE)
        .map(|v| v.to_str().unwrap().to_string())
        .unwrap_or_default();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    Reply {
        status,
        content_type,
        body: String::from_utf8(bytes.to_vec()).unwrap(),
    }
}

fn app() -> Router {
    router(Arc::new(AppState::default()))
}

fn without_timestamp(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("timestamp");
    v
}

fn violation_count(report: &Value) -> usize {
    report["rules"].as_array().unwrap().iter().map(|r| r["violations"].as_array().unwrap().len()).sum()
}

const PROVISION: &str = "ex:watchManufacturer da:performsLegalAction ex:provisionWhatIf .\nex:provisionWhatIf a da:DataProvision .\n";

#[tokio::test]
async fn post_graph_counts_schema_and_fixture() {
    let app = app();
    let r = call(&app, "POST", "/api/graphs?id=b2c", fixture_source("b2c-violation").unwrap()).await;
    assert_eq!(r.status, StatusCode::CREATED);
    let v = r.json();
    assert_eq!(v["graph_id"], "b2c");
    assert_eq!(v["version"], 1);
    assert_eq!(v["triple_count"], schema_graph().len() + load_fixture("b2c-violation").unwrap().len());

    let r = call(&app, "POST", "/api/graphs", "").await;
    assert_eq!(r.status, StatusCode::CREATED);
    let id = r.json()["graph_id"].as_str().unwrap().to_string();
    let r = call(&app, "GET", &format!("/api/graphs/{id}"), "").await;
    assert!(r.content_type.starts_with("text/turtle"));
    assert_eq!(daont_core::turtle::parse_turtle(&r.body, None).unwrap(), schema_graph());

    let r = call(&app, "GET", "/api/graphs", "").await;
    assert_eq!(r.json().as_array().unwrap().len(), 2);
}

#[tokio::test]
async fn malformed_turtle_is_located() {
    let r = call(&app(), "POST", "/api/graphs?id=x", "@prefix ex: <http://e/> .\n\nex:a ex:b \"open").await;
    assert_eq!(r.status, StatusCode::BAD_REQUEST);
    let v = r.json();
    assert_eq!(v["code"], "parse_error");
    assert_eq!(v["line"], 3);
    assert!(v["column"].is_u64());
    assert!(v["message"].is_string());
}

#[tokio::test]
async fn union_check_and_compliant_check() {
    let app = app();
    let union: Vec<&str> = SCENARIOS.iter().map(|n| fixture_source(n).unwrap()).collect();
    let r = call(&app, "POST", "/api/graphs?id=all", &union.join("\n")).await;
    let expected: usize = SCENARIOS.iter().map(|n| load_fixture(n).unwrap().len()).sum();
    assert_eq!(r.json()["triple_count"], schema_graph().len() + expected);
    let r = call(&app, "POST", "/api/graphs/all/check?rules=R-4-1,R-8-6,R-19-2a", "").await;
    assert_eq!(r.status, StatusCode::OK);
    assert!(r.content_type.starts_with("application/json"));
    let report = r.json();
    assert_eq!(report["overall_status"], "violated");
    assert_eq!(violation_count(&report), 3);

    call(&app, "POST", "/api/graphs?id=g", fixture_source("b2g-compliant").unwrap()).await;
    let r = call(&app, "POST", "/api/graphs/g/check", "").await;
    assert_eq!(r.json()["overall_status"], "compliant");

    let r = call(&app, "POST", "/api/graphs/nope/check", "").await;
    assert_eq!(r.status, StatusCode::NOT_FOUND);
    assert_eq!(r.json()["code"], "unknown_graph");

    let r = call(&app, "POST", "/api/graphs/g/check?rules=R-0", "").await;
    assert_eq!(r.status, StatusCode::BAD_REQUEST);
    assert_eq!(r.json()["code"], "unknown_rule");
}

#[tokio::test]
async fn facts_flip_and_revert() {
    let app = app();
    call(&app, "POST", "/api/graphs?id=g", fixture_source("b2c-violation").unwrap()).await;
    let before = call(&app, "POST", "/api/graphs/g/check?rules=R-4-1", "").await.json();
    assert_eq!(before["rules"][0]["status"], "violated");

    let r = call(&app, "POST", "/api/graphs/g/facts?mode=add", PROVISION).await;
    assert_eq!(r.status, StatusCode::OK);
    assert_eq!(r.json()["version"], 2);
    let after = call(&app, "POST", "/api/graphs/g/check?rules=R-4-1", "").await.json();
    assert_eq!(after["rules"][0]["status"], "compliant");

    let r = call(&app, "POST", "/api/graphs/g/facts?mode=remove", PROVISION).await;
    assert_eq!(r.json()["version"], 3);
    let reverted = call(&app, "POST", "/api/graphs/g/check?rules=R-4-1", "").await.json();
    assert_eq!(reverted["rules"][0]["status"], "violated");
    assert_eq!(reverted["rules"][0]["violations"], before["rules"][0]["violations"]);

    let r = call(&app, "POST", "/api/graphs/g/facts?mode=add", "").await;
    assert_eq!(r.json()["version"], 4);
    assert_eq!(r.json()["triple_count"], schema_graph().len() + load_fixture("b2c-violation").unwrap().len());

    let r = call(&app, "POST", "/api/graphs/g/facts", "ex:a ex:b").await;
    assert_eq!(r.json()["code"], "parse_error");
    let r = call(&app, "POST", "/api/graphs/nope/facts", PROVISION).await;
    assert_eq!(r.status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn repeated_reads_are_identical() {
    let app = app();
    call(&app, "POST", "/api/graphs?id=g", fixture_source("b2b-violation").unwrap()).await;
    let a = call(&app, "POST", "/api/graphs/g/check", "").await.json();
    let b = call(&app, "POST", "/api/graphs/g/check", "").await.json();
    assert_eq!(without_timestamp(a), without_timestamp(b));
    let g1 = call(&app, "GET", "/api/graphs/g", "").await.body;
    let g2 = call(&app, "GET", "/api/graphs/g", "").await.body;
    assert_eq!(g1, g2);
}

#[tokio::test]
async fn versions_strictly_increase() {
    let app = app();
    call(&app, "POST", "/api/graphs?id=g", fixture_source("b2c-violation").unwrap()).await;
    let mut last = 1;
    for mode in ["add", "add", "remove", "remove", "add"] {
        let v = call(&app, "POST", &format!("/api/graphs/g/facts?mode={mode}"), PROVISION).await.json()["version"]
            .as_u64()
            .unwrap();
        assert!(v > last);
        last = v;
    }
}

#[tokio::test]
async fn rules_catalogue_and_query() {
    let app = app();
    let rules = call(&app, "GET", "/api/rules", "").await.json();
    let r86 = rules.as_array().unwrap().iter().find(|r| r["id"] == "R-8-6").unwrap();
    assert_eq!(r86["article"], "8(6)");
    assert_eq!(r86["modality"], "permission-exception");
    assert_eq!(r86["query"], include_str!("../queries/r-8-6.rq"));

    call(&app, "POST", "/api/graphs?id=g", fixture_source("b2g-violation").unwrap()).await;
    let r = call(&app, "POST", "/api/graphs/g/query", include_str!("../queries/r-19-2a.rq")).await;
    assert_eq!(r.status, StatusCode::OK);
    let rows = r.json();
    assert_eq!(rows.as_array().unwrap().len(), 1);
    assert_eq!(rows[0]["action"], "http://example.org/b2g-violation/competitiveProductDevelopment1");

    let r = call(&app, "POST", "/api/graphs/g/query", "SELECT ?x WHERE { ?x ?p ?o } LIMIT 1").await;
    assert_eq!(r.status, StatusCode::BAD_REQUEST);
    assert_eq!(r.json()["code"], "unsupported_query");
    assert!(r.json()["message"].as_str().unwrap().contains("LIMIT"));

    let r = call(&app, "GET", "/api/graphs/nope", "").await;
    assert_eq!(r.status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn fixtures_and_schema_endpoints() {
    let app = app();
    let list = call(&app, "GET", "/api/fixtures", "").await.json();
    assert_eq!(list.as_array().unwrap().len(), 7);
    let r = call(&app, "GET", "/api/fixtures/b2b-violation", "").await;
    assert!(r.content_type.starts_with("text/turtle"));
    assert_eq!(r.body, fixture_source("b2b-violation").unwrap());
    assert_eq!(call(&app, "GET", "/api/fixtures/nope", "").await.status, StatusCode::NOT_FOUND);
    let schema = call(&app, "GET", "/api/schema", "").await.body;
    assert_eq!(daont_core::turtle::parse_turtle(&schema, None).unwrap(), schema_graph());
}

#[tokio::test]
async fn dashboard_loop_through_api() {
    let app = app();
    for name in SCENARIOS {
        let src = call(&app, "GET", &format!("/api/fixtures/{name}"), "").await.body;
        assert_eq!(call(&app, "POST", &format!("/api/graphs?id={name}"), &src).await.status, StatusCode::CREATED);
    }
    let mut total = 0;
    for name in SCENARIOS {
        let report = call(&app, "POST", &format!("/api/graphs/{name}/check?rules=R-4-1,R-8-6,R-19-2a"), "").await.json();
        let n = violation_count(&report);
        assert_eq!(n, usize::from(name.ends_with("violation")), "{name}");
        total += n;
    }
    assert_eq!(total, 3);

    let rows = call(&app, "POST", "/api/graphs/b2b-violation/check?rules=R-4-1", "").await.json();
    assert_eq!(violation_count(&rows), 0);

    let history = call(&app, "GET", "/api/graphs/b2c-violation/reports", "").await.json();
    assert_eq!(history.as_array().unwrap().len(), 1);
}
