#![allow(dead_code)]

use std::path::PathBuf;

pub fn fixture(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(rel)
}

pub fn golden(rel: &str) -> serde_json::Value {
    let text = std::fs::read_to_string(fixture(rel)).unwrap();
    serde_json::from_str(&text).unwrap()
}

use std::sync::Arc;

use faregrid::fare::{EngineConfig, FareEngine};
use faregrid::grid::{GridSpec, OdIndex};
use faregrid::ingest::{ingest_files, ColumnMapping};
use faregrid::service::{Gazetteer, QueryLog, ServiceState};
use faregrid::surge::{DemandModel, SyntheticProvider};

/// OD index over the bundled trip sample on the app grid.
pub fn sample_index() -> OdIndex {
    let mapping = ColumnMapping::from_file(fixture("ingest/tlc2013.toml")).unwrap();
    let out = ingest_files(
        fixture("ingest/trips_sample.csv"),
        fixture("ingest/fares_sample.csv"),
        &mapping,
    )
    .unwrap();
    OdIndex::build(&out.records, GridSpec::app())
}

/// Engine over the sample index with the surge-free synthetic provider.
pub fn pinned_engine() -> FareEngine {
    let provider = SyntheticProvider::new(DemandModel::pinned(1.0)).unwrap();
    FareEngine::new(sample_index(), EngineConfig::default(), None, Arc::new(provider)).unwrap()
}

pub fn service_state(log: QueryLog) -> ServiceState {
    ServiceState::new(pinned_engine(), log)
        .with_gazetteer(Gazetteer::from_file(fixture("service/gazetteer.csv")).unwrap())
}
