// Average surge multiplier per 100 m area and its histogram.
//
// ```text
// cargo run --example surge_heatmap
// ```

use std::path::PathBuf;

use faregrid::grid::GridSpec;
use faregrid::surge::{area_surge_stats, read_replay, read_routes, series_from_replay, surge_heatmap};

fn fixture(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(rel)
}

pub fn run() -> faregrid::Result<()> {
    let spec = GridSpec::analysis();
    let series = series_from_replay(&read_replay(fixture("predict/areas_840.replay.gz"))?)?;
    let stats = area_surge_stats(&series, &read_routes(fixture("predict/routes_areas.csv"))?, &spec)?;
    let map = surge_heatmap(&stats, &spec, 0.1)?;

    println!(
        "{} areas, {:.0}% of them surge on average",
        map.areas,
        100.0 * map.surging_fraction
    );
    for (lo, n) in &map.histogram {
        println!("  [{lo:.1}, {:.1})  {n:>4}  {}", lo + map.bin_width, "#".repeat(n / 10));
    }
    let mut hottest = stats.clone();
    hottest.sort_by(|a, b| b.avg_multiplier.total_cmp(&a.avg_multiplier).then(a.cell.cmp(&b.cell)));
    for s in hottest.iter().take(5) {
        let c = spec.cell_center(s.cell);
        println!("  {} ({:.4}, {:.4})  x{:.2}", s.cell, c.lat, c.lon, s.avg_multiplier);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> faregrid::Result<()> {
    run()
}
