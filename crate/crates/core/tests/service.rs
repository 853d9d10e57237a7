mod common;

use std::io::{self, Write};
use std::sync::Arc;

use axum::body::Body;
use axum::http::{header, Request, StatusCode};
use axum::Router;
use common::{fixture, golden, pinned_engine, service_state};
use faregrid::grid::{CellIndex, GridSpec};
use faregrid::savings::read_query_log;
use faregrid::service::{router, AreaMap, HeatmapResponse, QueryLog, StrategiesResponse, LOG_WARNING};
use faregrid::surge::AreaSurgeStats;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

async fn call(app: &Router, method: &str, uri: &str, body: Option<String>) -> (StatusCode, Option<String>, Value) {
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .header(header::CONTENT_TYPE, "application/json")
        .body(body.map(Body::from).unwrap_or_else(Body::empty))
        .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let warning = resp
        .headers()
        .get(header::WARNING)
        .map(|v| v.to_str().unwrap().to_string());
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let v = if bytes.is_empty() {
        Value::Null
    } else {
        serde_json::from_slice(&bytes).unwrap()
    };
    (status, warning, v)
}

fn estimate_body(origin: Value, destination: Value) -> String {
    json!({"origin": origin, "destination": destination, "time": "2015-05-05T13:00:00Z", "user_id": "t"}).to_string()
}

#[tokio::test]
async fn golden_estimate_and_log_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("queries.jsonl");
    let app = router(Arc::new(service_state(QueryLog::open(&path).unwrap())));
    let req = std::fs::read_to_string(fixture("service/golden_request.json")).unwrap();
    let (status, warning, body) = call(&app, "POST", "/v1/estimate", Some(req.clone())).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(warning, None);
    assert_eq!(body, golden("service/golden_response.json"));

    // same request, same answer
    let (_, _, again) = call(&app, "POST", "/v1/estimate", Some(req)).await;
    assert_eq!(again, body);

    let log = read_query_log(&path).unwrap();
    assert_eq!(log.len(), 2);
    assert_eq!(log[0].user_id, "golden");
    assert_eq!(log[0].yellow_price.to_string(), "24.56");
    assert_eq!(log[0].uber_price.to_string(), "26.01");
}

#[tokio::test]
async fn error_codes() {
    let app = router(Arc::new(service_state(QueryLog::in_memory())));
    let inside = json!({"lat": 40.7233, "lon": -74.003});

    let (s, _, b) = call(&app, "POST", "/v1/estimate", Some("{not json".into())).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    assert_eq!(b["code"], "bad_request");

    let (s, _, b) = call(
        &app,
        "POST",
        "/v1/estimate",
        Some(json!({"origin": inside}).to_string()),
    )
    .await;
    assert_eq!(s, StatusCode::BAD_REQUEST, "{b}");

    let far = json!({"lat": 41.5, "lon": -74.003});
    let (s, _, b) = call(&app, "POST", "/v1/estimate", Some(estimate_body(far, inside.clone()))).await;
    assert_eq!(s, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(b["code"], "out_of_grid");

    let (s, _, b) = call(
        &app,
        "POST",
        "/v1/estimate",
        Some(estimate_body(json!({"name": "Atlantis"}), inside.clone())),
    )
    .await;
    assert_eq!(s, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(b["code"], "unknown_place");

    // inside the grid but no history and no fallback model
    let empty = json!({"lat": 40.6990, "lon": -74.0240});
    let (s, _, b) = call(&app, "POST", "/v1/estimate", Some(estimate_body(empty, inside))).await;
    assert_eq!(s, StatusCode::SERVICE_UNAVAILABLE);
    assert_eq!(b["code"], "provider_unavailable");

    let (s, _, b) = call(&app, "GET", "/v1/surge/heatmap", None).await;
    assert_eq!(s, StatusCode::NOT_FOUND);
    assert_eq!(b["code"], "not_found");

    let (s, _, _) = call(&app, "GET", "/v1/nope", None).await;
    assert_eq!(s, StatusCode::NOT_FOUND);
    let (s, _, b) = call(&app, "GET", "/health", None).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(b["status"], "ok");
}

#[tokio::test]
async fn concurrent_requests_log_one_line_each() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("queries.jsonl");
    let app = router(Arc::new(service_state(QueryLog::open(&path).unwrap())));
    let req = std::fs::read_to_string(fixture("service/golden_request.json")).unwrap();
    let handles: Vec<_> = (0..100)
        .map(|_| {
            let (app, req) = (app.clone(), req.clone());
            tokio::spawn(async move { call(&app, "POST", "/v1/estimate", Some(req)).await.0 })
        })
        .collect();
    for h in handles {
        assert_eq!(h.await.unwrap(), StatusCode::OK);
    }
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 100);
    assert_eq!(read_query_log(&path).unwrap().len(), 100);

    let (_, _, stats) = call(&app, "GET", "/v1/stats/queries", None).await;
    assert_eq!(stats["frequency"]["entries"], 100);
    assert_eq!(stats["deltas"]["entries"], 100);
    let (_, _, s) = call(&app, "GET", "/v1/strategies", None).await;
    let s: StrategiesResponse = serde_json::from_value(s).unwrap();
    assert_eq!(s.journeys, 100);
    assert!((s.strategies[0].mean_cost - 24.56).abs() < 1e-9);
}

struct Broken;

impl Write for Broken {
    fn write(&mut self, _: &[u8]) -> io::Result<usize> {
        Err(io::Error::other("disk full"))
    }
    fn flush(&mut self) -> io::Result<()> {
        Ok(())
    }
}

#[tokio::test]
async fn log_failure_still_answers_with_warning() {
    let app = router(Arc::new(service_state(QueryLog::from_writer(Box::new(Broken)))));
    let req = std::fs::read_to_string(fixture("service/golden_request.json")).unwrap();
    let (s, warning, body) = call(&app, "POST", "/v1/estimate", Some(req)).await;
    assert_eq!(s, StatusCode::INTERNAL_SERVER_ERROR);
    assert_eq!(warning.as_deref(), Some(LOG_WARNING));
    assert_eq!(body, golden("service/golden_response.json"));
}

#[tokio::test]
async fn heatmap_top_k_breaks_ties_by_cell() {
    let spec = GridSpec::analysis();
    let stats: Vec<AreaSurgeStats> = (0..20)
        .map(|i| AreaSurgeStats {
            cell: CellIndex::new(100 + i, 50),
            avg_multiplier: if i % 3 == 0 { 1.5 } else { 1.0 + i as f64 / 100.0 },
            route_count: 1,
        })
        .collect();
    let state = service_state(QueryLog::in_memory()).with_areas(AreaMap {
        spec,
        stats: stats.clone(),
    });
    let app = router(Arc::new(state));

    let (_, _, all) = call(&app, "GET", "/v1/surge/heatmap", None).await;
    let all: HeatmapResponse = serde_json::from_value(all).unwrap();
    assert_eq!(all.cells.len(), 20);

    let (_, _, top) = call(&app, "GET", "/v1/surge/heatmap?top=10", None).await;
    let top: HeatmapResponse = serde_json::from_value(top).unwrap();
    let mut oracle = stats;
    oracle.sort_by(|a, b| {
        b.avg_multiplier
            .partial_cmp(&a.avg_multiplier)
            .unwrap()
            .then(a.cell.cmp(&b.cell))
    });
    let got: Vec<(u32, u32)> = top.cells.iter().map(|c| (c.row, c.col)).collect();
    let want: Vec<(u32, u32)> = oracle[..10].iter().map(|s| (s.cell.row, s.cell.col)).collect();
    assert_eq!(got, want);
    assert_eq!(top.areas, 20);

    let (s, _, _) = call(&app, "GET", "/v1/surge/heatmap?top=many", None).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn engine_swap_is_visible_to_later_requests() {
    let state = Arc::new(service_state(QueryLog::in_memory()));
    let app = router(state.clone());
    let req = std::fs::read_to_string(fixture("service/golden_request.json")).unwrap();
    assert_eq!(
        call(&app, "POST", "/v1/estimate", Some(req.clone())).await.0,
        StatusCode::OK
    );

    let empty = faregrid::fare::FareEngine::new(
        faregrid::grid::OdIndex::new(GridSpec::app()),
        Default::default(),
        None,
        pinned_engine_provider(),
    )
    .unwrap();
    let old = state.swap_engine(empty);
    assert!(!old.index().is_empty());
    assert_eq!(
        call(&app, "POST", "/v1/estimate", Some(req)).await.0,
        StatusCode::SERVICE_UNAVAILABLE
    );
    state.swap_engine(pinned_engine());
}

fn pinned_engine_provider() -> Arc<dyn faregrid::fare::PriceProvider> {
    Arc::new(faregrid::surge::SyntheticProvider::new(faregrid::surge::DemandModel::pinned(1.0)).unwrap())
}
