// The synthetic demand model behind the offline provider: empirical
// multiplier frequencies against the model's stationary distribution.
//
// ```text
// cargo run --example synthetic_demand
// ```

use std::collections::BTreeMap;

use chrono::{Duration, TimeZone, Utc};
use faregrid::grid::CellIndex;
use faregrid::surge::{stationary_distribution, DemandModel};

pub fn run() -> faregrid::Result<()> {
    let model = DemandModel::default();
    model.validate()?;
    let t0 = Utc.with_ymd_and_hms(2015, 5, 4, 0, 0, 0).unwrap();
    let mut seen: BTreeMap<i64, u64> = BTreeMap::new();
    let mut n = 0u64;
    for cell in 0..200 {
        let c = CellIndex::new(200, cell);
        for h in 0..168 {
            let m = model.multiplier(Some(c), None, t0 + Duration::hours(h));
            *seen.entry((m * 10.0).round() as i64).or_insert(0) += 1;
            n += 1;
        }
    }
    println!("multiplier  expected  observed");
    for (m, p) in stationary_distribution(&model, model.surge_probability) {
        let obs = seen.get(&((m * 10.0).round() as i64)).copied().unwrap_or(0) as f64 / n as f64;
        if p > 1e-4 || obs > 0.0 {
            println!("{m:>10.1}  {p:>8.4}  {obs:>8.4}");
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> faregrid::Result<()> {
    run()
}
