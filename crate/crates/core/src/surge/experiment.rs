use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, Duration, Utc};
use serde::{Deserialize, Serialize};

use super::{multiplier_series, SurgeSeries};
use crate::error::{Error, Result};
use crate::stats::pearson;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentMode {
    /// Routes share an origin and differ in destination.
    FixedOrigin,
    /// Routes share a destination and differ in origin.
    FixedDestination,
}

impl FromStr for ExperimentMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "origin" | "fixed_origin" => Ok(ExperimentMode::FixedOrigin),
            "destination" | "fixed_destination" => Ok(ExperimentMode::FixedDestination),
            other => Err(Error::InvalidArgument(format!("unknown experiment mode `{other}`"))),
        }
    }
}

impl fmt::Display for ExperimentMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExperimentMode::FixedOrigin => "fixed_origin",
            ExperimentMode::FixedDestination => "fixed_destination",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentResult {
    pub mode: ExperimentMode,
    pub route_ids: Vec<String>,
    /// Spacing of the common time grid, seconds.
    pub step_s: i64,
    pub grid_len: usize,
    /// Symmetric pairwise correlations, unit diagonal.
    pub pair_r: Vec<Vec<f64>>,
    pub mean_r: f64,
}

/// Values of a series at each grid time, carrying the last observation forward.
/// Grid times before the first sample take the first sample.
pub fn resample_locf(times: &[DateTime<Utc>], values: &[f64], grid: &[DateTime<Utc>]) -> Vec<f64> {
    let mut out = Vec::with_capacity(grid.len());
    let mut j = 0;
    for &t in grid {
        while j + 1 < times.len() && times[j + 1] <= t {
            j += 1;
        }
        out.push(values[j]);
    }
    out
}

/// Mean pairwise Pearson correlation of multiplier series on a shared grid.
///
/// The grid spans the overlap of all series with the coarsest of their
/// typical sampling intervals, so no series is upsampled beyond its cadence.
pub fn controlled_experiment(series: &[SurgeSeries], mode: ExperimentMode) -> Result<ExperimentResult> {
    if series.len() < 2 {
        return Err(Error::InvalidArgument("an experiment needs at least two routes".into()));
    }
    let mut sorted: Vec<&SurgeSeries> = series.iter().collect();
    sorted.sort_by(|a, b| a.route_id.cmp(&b.route_id));

    let mut step = 0;
    for s in &sorted {
        let iv = s
            .sampling_interval_s()
            .ok_or_else(|| Error::Alignment(format!("route {} has fewer than two samples", s.route_id)))?;
        step = step.max(iv);
    }
    if step <= 0 {
        return Err(Error::Alignment("sampling interval is zero".into()));
    }
    let start = sorted.iter().map(|s| s.samples[0].0).max().expect("nonempty");
    let end = sorted
        .iter()
        .map(|s| s.samples[s.samples.len() - 1].0)
        .min()
        .expect("nonempty");
    if start > end {
        return Err(Error::Alignment("series do not overlap in time".into()));
    }
    let mut grid = Vec::new();
    let mut t = start;
    while t <= end {
        grid.push(t);
        t += Duration::seconds(step);
    }
    if grid.len() < 2 {
        return Err(Error::Alignment("overlap shorter than one sampling interval".into()));
    }

    let resampled: Vec<Vec<f64>> = sorted
        .iter()
        .map(|s| {
            let times: Vec<_> = s.samples.iter().map(|x| x.0).collect();
            Ok(resample_locf(&times, &multiplier_series(s)?, &grid))
        })
        .collect::<Result<_>>()?;

    let n = resampled.len();
    let mut pair_r = vec![vec![1.0; n]; n];
    let mut sum = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let r = pearson(&resampled[i], &resampled[j])?;
            pair_r[i][j] = r;
            pair_r[j][i] = r;
            sum += r;
        }
    }
    Ok(ExperimentResult {
        mode,
        route_ids: sorted.iter().map(|s| s.route_id.clone()).collect(),
        step_s: step,
        grid_len: grid.len(),
        pair_r,
        mean_r: sum / (n * (n - 1) / 2) as f64,
    })
}
