//! Surge multipliers: series, the surge-time fraction, controlled
//! experiments, per-area aggregates, and price providers that replay or
//! synthesize competitor quotes.

mod area;
mod experiment;
mod matrix;
mod replay;
mod synthetic;

pub use area::{area_surge_stats, surge_heatmap, AreaSurgeStats, Heatmap};
pub use experiment::{controlled_experiment, resample_locf, ExperimentMode, ExperimentResult};
pub use matrix::{surge_fraction, SurgeMatrix};
pub use replay::{
    read_replay, read_replay_from, series_from_replay, write_replay, ReplayProvider, ReplayRecord,
    DEFAULT_MAX_STALENESS_S,
};
pub use synthetic::{stationary_distribution, DemandModel, SyntheticProvider};

use std::collections::BTreeMap;
use std::fs::File;
use std::io::Read;
use std::path::Path;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geo::LatLon;

/// A multiplier above `1 + SURGE_EPSILON` counts as surging.
pub const SURGE_EPSILON: f64 = 1e-6;

pub fn is_surging(multiplier: f64) -> bool {
    multiplier > 1.0 + SURGE_EPSILON
}

/// Time-ordered price observations of one route.
#[derive(Debug, Clone, PartialEq)]
pub struct SurgeSeries {
    pub route_id: String,
    pub base_price: f64,
    pub samples: Vec<(DateTime<Utc>, f64)>,
}

impl SurgeSeries {
    pub fn new(route_id: impl Into<String>, base_price: f64, mut samples: Vec<(DateTime<Utc>, f64)>) -> Result<Self> {
        if !(base_price > 0.0 && base_price.is_finite()) {
            return Err(Error::InvalidBase(base_price));
        }
        samples.sort_by_key(|s| s.0);
        Ok(SurgeSeries {
            route_id: route_id.into(),
            base_price,
            samples,
        })
    }

    /// Lower median of the gaps between consecutive samples, whole seconds.
    pub fn sampling_interval_s(&self) -> Option<i64> {
        let gaps: Vec<i64> = self
            .samples
            .windows(2)
            .map(|w| (w[1].0 - w[0].0).num_seconds())
            .collect();
        crate::stats::lower_median(&gaps)
    }
}

pub fn multiplier_series(s: &SurgeSeries) -> Result<Vec<f64>> {
    if !(s.base_price > 0.0) {
        return Err(Error::InvalidBase(s.base_price));
    }
    Ok(s.samples.iter().map(|(_, p)| p / s.base_price).collect())
}

/// Mean multiplier over all of a route's samples.
pub fn avg_surge_multiplier(s: &SurgeSeries) -> Result<f64> {
    let m = multiplier_series(s)?;
    crate::stats::mean(&m).ok_or(Error::EmptyInput("surge series has no samples"))
}

/// A monitored origin-destination pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Route {
    pub origin: LatLon,
    pub destination: LatLon,
}

#[derive(Deserialize)]
struct RouteRow {
    route_id: String,
    origin_lat: f64,
    origin_lon: f64,
    destination_lat: f64,
    destination_lon: f64,
}

/// `route_id,origin_lat,origin_lon,destination_lat,destination_lon`
pub fn read_routes_from<R: Read>(input: R) -> Result<BTreeMap<String, Route>> {
    let mut out = BTreeMap::new();
    for row in csv::Reader::from_reader(input).deserialize::<RouteRow>() {
        let r = row?;
        let route = Route {
            origin: LatLon::new(r.origin_lat, r.origin_lon),
            destination: LatLon::new(r.destination_lat, r.destination_lon),
        };
        if out.insert(r.route_id.clone(), route).is_some() {
            return Err(Error::Format {
                what: "route table",
                detail: format!("duplicate route id {}", r.route_id),
            });
        }
    }
    Ok(out)
}

pub fn read_routes(path: impl AsRef<Path>) -> Result<BTreeMap<String, Route>> {
    let path = path.as_ref();
    read_routes_from(File::open(path).map_err(|e| Error::io(path, e))?)
}
