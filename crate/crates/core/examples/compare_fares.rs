// Price one journey against the historical yellow-cab index and a
// synthetic surge-priced provider, with a regression fallback for cell
// pairs nobody has driven.
//
// ```text
// cargo run --example compare_fares
// ```

use std::path::PathBuf;
use std::sync::Arc;

use chrono::{TimeZone, Utc};
use faregrid::fare::{EngineConfig, FallbackModel, FareEngine};
use faregrid::geo::LatLon;
use faregrid::grid::{GridSpec, OdIndex};
use faregrid::ingest::{ingest_files, ColumnMapping};
use faregrid::surge::{DemandModel, SyntheticProvider};

fn fixture(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(rel)
}

pub fn run() -> faregrid::Result<()> {
    let out = ingest_files(
        fixture("ingest/trips_sample.csv"),
        fixture("ingest/fares_sample.csv"),
        &ColumnMapping::tlc_2013(),
    )?;
    let index = OdIndex::build(&out.records, GridSpec::app());
    let fallback = FallbackModel::fit(&out.records)?;
    println!(
        "fallback: {:.2} + {:.2}/km + {:.2}/min",
        fallback.intercept, fallback.per_km, fallback.per_minute
    );

    let provider = SyntheticProvider::new(DemandModel::default())?;
    let engine = FareEngine::new(index, EngineConfig::default(), Some(fallback), Arc::new(provider))?;

    let upper_east_side = LatLon::new(40.7736, -73.9566);
    let soho = LatLon::new(40.7233, -74.003);
    let times_square = LatLon::new(40.7580, -73.9855);
    for hour in [8, 13, 18, 23] {
        let t = Utc.with_ymd_and_hms(2015, 5, 5, hour, 0, 0).unwrap();
        for (o, d) in [(upper_east_side, soho), (times_square, soho)] {
            let r = engine.compare(o, d, t)?;
            println!(
                "{hour:02}:00 UTC  yellow {} ({:?})  uber {}..{} x{:.1}  -> {} saves {}",
                r.yellow.mean_cents(),
                r.yellow.source,
                faregrid::money::Cents::from_dollars(r.uber.min),
                faregrid::money::Cents::from_dollars(r.uber.max),
                r.uber.multiplier,
                r.winner,
                r.savings
            );
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> faregrid::Result<()> {
    run()
}
