// Serve recorded provider quotes back through the `PriceProvider` trait,
// looking routes up by the grid cells of their endpoints.
//
// ```text
// cargo run --example replay_quotes
// ```

use std::path::PathBuf;

use chrono::{Duration, TimeZone, Utc};
use faregrid::fare::{PriceProvider, QuoteRequest};
use faregrid::grid::GridSpec;
use faregrid::surge::{read_replay, read_routes, ReplayProvider};

fn fixture(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(rel)
}

pub fn run() -> faregrid::Result<()> {
    let routes = read_routes(fixture("surge/routes_fixed_origin.csv"))?;
    let records = read_replay(fixture("surge/fixed_origin.replay"))?;
    let provider = ReplayProvider::new(records, &routes, GridSpec::analysis()).with_max_staleness(1800);

    let t0 = Utc.with_ymd_and_hms(2015, 5, 4, 22, 0, 0).unwrap();
    for (id, route) in routes.iter().take(3) {
        for step in 0..3 {
            let req = QuoteRequest {
                origin: route.origin,
                destination: route.destination,
                time: t0 + Duration::minutes(20 * step),
                base_price: 0.0,
                route_id: None,
            };
            match provider.quote(&req) {
                Ok(q) => println!("{id} {}  {:.2}..{:.2}  x{:.2}", req.time, q.min, q.max, q.multiplier),
                Err(e) => println!("{id} {}  {e}", req.time),
            }
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> faregrid::Result<()> {
    run()
}
