// What following the app saves, replayed from a query log.
//
// ```text
// cargo run --example savings_report
// ```

use std::path::PathBuf;

use faregrid::money::Cents;
use faregrid::savings::{
    delta_distribution, evaluate_strategy, hourly_winner_stripes, query_frequency_stats, read_query_log,
    stripes_string, Strategy,
};

fn fixture(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(rel)
}

pub fn run() -> faregrid::Result<()> {
    let log = read_query_log(fixture("savings/queries.jsonl"))?;
    let deltas = delta_distribution(&log, Cents(100))?;
    println!("{} queries, mean saving ${:.2}", deltas.entries, deltas.mean_saving());

    for s in Strategy::ALL {
        let e = evaluate_strategy(&log, s, None)?;
        println!("  {s:<14} mean ${:>6.2}  median ${:>6.2}", e.mean_cost, e.median_cost);
    }

    let freq = query_frequency_stats(&log);
    println!("{} users, {:.2} queries each", freq.users, freq.mean_queries_per_user);
    let stripes = stripes_string(&hourly_winner_stripes(&log));
    for (day, row) in ["Mon", "Tue", "Wed", "Thu", "Fri", "Sat", "Sun"]
        .iter()
        .zip(stripes.as_bytes().chunks(24))
    {
        println!("  {day} {}", std::str::from_utf8(row).unwrap());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> faregrid::Result<()> {
    run()
}
