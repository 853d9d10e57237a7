// Join the bundled trip and fare sample, report rejects, and bucket the
// accepted trips into the 30 m app grid.
//
// ```text
// cargo run --example ingest_sample
// ```

use std::path::PathBuf;

use faregrid::grid::{GridSpec, OdIndex};
use faregrid::ingest::{ingest_files, ColumnMapping};

fn fixture(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(rel)
}

pub fn run() -> faregrid::Result<()> {
    let mapping = ColumnMapping::tlc_2013();
    let out = ingest_files(
        fixture("ingest/trips_sample.csv"),
        fixture("ingest/fares_sample.csv"),
        &mapping,
    )?;
    println!(
        "trips: {} read, {} accepted, {} rejected",
        out.trips.rows_read, out.trips.rows_accepted, out.trips.rows_rejected
    );
    for (reason, n) in &out.trips.rejection_reasons {
        println!("  {reason:<18} {n}");
    }
    println!(
        "fares: {} read, {} matched",
        out.fares.rows_read, out.fares.rows_accepted
    );

    let index = OdIndex::par_build(&out.records, GridSpec::app());
    println!(
        "{} OD buckets from {} trips, {} outside the grid",
        index.len(),
        index.total_trips(),
        index.skipped_out_of_grid()
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> faregrid::Result<()> {
    run()
}
