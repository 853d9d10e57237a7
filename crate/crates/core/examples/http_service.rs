// Drive the HTTP API in-process: one estimate by gazetteer name, then the
// analytics endpoints over the query it logged.
//
// To run it as a real server instead:
//
// ```text
// faregrid serve --config service.toml
// ```

use std::path::PathBuf;
use std::sync::Arc;

use axum::body::Body;
use axum::http::{header, Request};
use faregrid::fare::{EngineConfig, FareEngine};
use faregrid::grid::{GridSpec, OdIndex};
use faregrid::ingest::{ingest_files, ColumnMapping};
use faregrid::service::{router, Gazetteer, QueryLog, ServiceState};
use faregrid::surge::{DemandModel, SyntheticProvider};
use http_body_util::BodyExt;
use tower::ServiceExt;

fn fixture(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(rel)
}

async fn send(app: &axum::Router, req: Request<Body>) -> String {
    let resp = app.clone().oneshot(req).await.expect("router is infallible");
    let status = resp.status();
    let body = resp.into_body().collect().await.expect("in-memory body").to_bytes();
    format!("{status} {}", String::from_utf8_lossy(&body))
}

pub fn run() -> faregrid::Result<()> {
    let out = ingest_files(
        fixture("ingest/trips_sample.csv"),
        fixture("ingest/fares_sample.csv"),
        &ColumnMapping::tlc_2013(),
    )?;
    let engine = FareEngine::new(
        OdIndex::build(&out.records, GridSpec::app()),
        EngineConfig::default(),
        None,
        Arc::new(SyntheticProvider::new(DemandModel::default())?),
    )?;
    let state = ServiceState::new(engine, QueryLog::in_memory())
        .with_gazetteer(Gazetteer::from_file(fixture("service/gazetteer.csv"))?);
    let app = router(Arc::new(state));

    let rt = tokio::runtime::Builder::new_current_thread().build().expect("runtime");
    rt.block_on(async {
        let body = r#"{"origin":{"name":"Upper East Side"},"destination":{"lat":40.7233,"lon":-74.003},
                       "time":"2015-05-05T22:00:00Z","user_id":"demo"}"#;
        let req = Request::post("/v1/estimate")
            .header(header::CONTENT_TYPE, "application/json")
            .body(Body::from(body))
            .unwrap();
        println!("POST /v1/estimate\n{}\n", send(&app, req).await);
        for uri in ["/v1/strategies", "/health"] {
            println!(
                "GET {uri}\n{}\n",
                send(&app, Request::get(uri).body(Body::empty()).unwrap()).await
            );
        }
    });
    Ok(())
}

#[allow(dead_code)]
fn main() -> faregrid::Result<()> {
    run()
}
