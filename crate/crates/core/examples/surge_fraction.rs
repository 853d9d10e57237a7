// Share of user-weighted hours in which routes surge, over a week of
// replayed quotes for 800 routes.
//
// ```text
// cargo run --example surge_fraction
// ```

use std::path::PathBuf;

use faregrid::savings::{query_frequency_stats, read_query_log, QueryHistogram};
use faregrid::surge::{read_replay, series_from_replay, surge_fraction, SurgeMatrix};

fn fixture(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(rel)
}

pub fn run() -> faregrid::Result<()> {
    let series = series_from_replay(&read_replay(fixture("surge/weekly_800.replay.gz"))?)?;
    let matrix = SurgeMatrix::weekly(series.values())?;
    let usage = query_frequency_stats(&read_query_log(fixture("savings/queries.jsonl"))?).hour_of_week;

    println!("routes            {}", matrix.n_routes());
    println!("plain fraction    {:.4}", matrix.plain_fraction());
    println!(
        "ST, uniform hours {:.4}",
        surge_fraction(&matrix, QueryHistogram::uniform().as_slice())?
    );
    println!("ST, app usage     {:.4}", surge_fraction(&matrix, usage.as_slice())?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> faregrid::Result<()> {
    run()
}
