// Build per-area demand features, then score a depth-20 regression tree
// with leave-one-out Pearson r and NDCG@100.
//
// ```text
// cargo run --release --example rank_surge_areas
// ```

use std::fs::File;
use std::path::PathBuf;

use faregrid::grid::read_snapshot;
use faregrid::predict::{build_features, evaluate, read_checkins, read_venues, EvalConfig, TravelCategories};
use faregrid::surge::{area_surge_stats, read_replay, read_routes, series_from_replay};
use faregrid::Error;

fn fixture(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(rel)
}

pub fn run() -> faregrid::Result<()> {
    let od_path = fixture("predict/areas_od.csv");
    let od = read_snapshot(File::open(&od_path).map_err(|e| Error::io(&od_path, e))?)?;
    let series = series_from_replay(&read_replay(fixture("predict/areas_840.replay.gz"))?)?;
    let surge = area_surge_stats(&series, &read_routes(fixture("predict/routes_areas.csv"))?, od.spec())?;
    let rows = build_features(
        &od,
        &read_venues(fixture("predict/venues.csv"))?,
        &read_checkins(fixture("predict/checkins.csv"))?,
        &surge,
        &TravelCategories::default(),
    )?;
    println!(
        "{} areas, {} with missing inputs\n",
        rows.len(),
        rows.iter().filter(|r| r.missing).count()
    );

    let cfg = EvalConfig {
        baseline_trials: 200,
        ..Default::default()
    };
    evaluate(&rows, &cfg)?.write_tables(std::io::stdout().lock())
}

#[allow(dead_code)]
fn main() -> faregrid::Result<()> {
    run()
}
