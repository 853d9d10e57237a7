//! Every example under `examples/` must keep running.

mod ingest_sample {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/ingest_sample.rs"));
}

mod compare_fares {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/compare_fares.rs"));
}

mod replay_quotes {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/replay_quotes.rs"));
}

mod surge_fraction {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/surge_fraction.rs"));
}

mod surge_experiment {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/surge_experiment.rs"));
}

mod surge_heatmap {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/surge_heatmap.rs"));
}

mod synthetic_demand {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/synthetic_demand.rs"));
}

mod savings_report {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/savings_report.rs"));
}

mod rank_surge_areas {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/rank_surge_areas.rs"));
}

mod http_service {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/http_service.rs"));
}

#[test]
fn ingest_sample_runs() {
    ingest_sample::run().unwrap();
}

#[test]
fn compare_fares_runs() {
    compare_fares::run().unwrap();
}

#[test]
fn replay_quotes_runs() {
    replay_quotes::run().unwrap();
}

#[test]
fn surge_fraction_runs() {
    surge_fraction::run().unwrap();
}

#[test]
fn surge_experiment_runs() {
    surge_experiment::run().unwrap();
}

#[test]
fn surge_heatmap_runs() {
    surge_heatmap::run().unwrap();
}

#[test]
fn synthetic_demand_runs() {
    synthetic_demand::run().unwrap();
}

#[test]
fn savings_report_runs() {
    savings_report::run().unwrap();
}

#[test]
fn rank_surge_areas_runs() {
    rank_surge_areas::run().unwrap();
}

#[test]
fn http_service_runs() {
    http_service::run().unwrap();
}
