// Controlled experiments: do routes that share an origin (or a destination)
// surge together?
//
// ```text
// cargo run --example surge_experiment
// ```

use std::path::PathBuf;

use faregrid::surge::{controlled_experiment, read_replay, series_from_replay, ExperimentMode};

fn fixture(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(rel)
}

pub fn run() -> faregrid::Result<()> {
    for (file, mode) in [
        ("surge/fixed_origin.replay", ExperimentMode::FixedOrigin),
        ("surge/fixed_destination.replay", ExperimentMode::FixedDestination),
    ] {
        let series: Vec<_> = series_from_replay(&read_replay(fixture(file))?)?
            .into_values()
            .collect();
        let r = controlled_experiment(&series, mode)?;
        println!(
            "{mode:?}: {} routes, {} samples every {} s, mean pairwise r = {:.3}",
            r.route_ids.len(),
            r.grid_len,
            r.step_s,
            r.mean_r
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> faregrid::Result<()> {
    run()
}
