//! Line-delimited replay logs of competitor estimates.
//!
//! ```text
//! route_id,timestamp,min,max,base_price
//! w000,2015-05-04T04:00:00Z,33.51,37.03,35.27
//! ```
//! Files ending in `.gz` are read through a gzip decoder.

use std::collections::{BTreeMap, HashMap};
use std::fs::File;
use std::io::{BufReader, Read, Write};
use std::path::Path;

use chrono::{DateTime, Utc};
use flate2::read::GzDecoder;
use serde::{Deserialize, Serialize};

use super::{Route, SurgeSeries};
use crate::error::{Error, Result};
use crate::fare::{PriceProvider, PriceQuote, Provider, QuoteRequest, QuoteSource};
use crate::grid::{CellIndex, GridSpec};

/// Oldest replay entry, in seconds before the requested time, that still counts.
pub const DEFAULT_MAX_STALENESS_S: i64 = 3600;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplayRecord {
    pub route_id: String,
    pub timestamp: DateTime<Utc>,
    pub min: f64,
    pub max: f64,
    pub base_price: f64,
}

impl ReplayRecord {
    pub fn mean(&self) -> f64 {
        (self.min + self.max) / 2.0
    }
}

pub fn read_replay_from<R: Read>(input: R) -> Result<Vec<ReplayRecord>> {
    let mut out = Vec::new();
    for rec in csv::Reader::from_reader(input).deserialize::<ReplayRecord>() {
        let r = rec?;
        if !(r.min.is_finite() && r.max.is_finite() && r.min <= r.max) {
            return Err(Error::Format {
                what: "replay log",
                detail: format!(
                    "route {} at {} has range [{}, {}]",
                    r.route_id, r.timestamp, r.min, r.max
                ),
            });
        }
        out.push(r);
    }
    Ok(out)
}

pub fn read_replay(path: impl AsRef<Path>) -> Result<Vec<ReplayRecord>> {
    let path = path.as_ref();
    let file = BufReader::new(File::open(path).map_err(|e| Error::io(path, e))?);
    if path.extension().is_some_and(|e| e == "gz") {
        read_replay_from(GzDecoder::new(file))
    } else {
        read_replay_from(file)
    }
}

pub fn write_replay<W: Write>(records: &[ReplayRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::io("<replay>", e))
}

/// Group records into per-route series priced at the range midpoint.
pub fn series_from_replay(records: &[ReplayRecord]) -> Result<BTreeMap<String, SurgeSeries>> {
    let mut grouped: BTreeMap<&str, Vec<&ReplayRecord>> = BTreeMap::new();
    for r in records {
        grouped.entry(r.route_id.as_str()).or_default().push(r);
    }
    let mut out = BTreeMap::new();
    for (id, recs) in grouped {
        let base = recs[0].base_price;
        if let Some(bad) = recs.iter().find(|r| (r.base_price - base).abs() > 1e-9 * base.abs()) {
            return Err(Error::Format {
                what: "replay log",
                detail: format!("route {id} changes base price from {base} to {}", bad.base_price),
            });
        }
        let samples = recs.iter().map(|r| (r.timestamp, r.mean())).collect();
        out.insert(id.to_string(), SurgeSeries::new(id, base, samples)?);
    }
    Ok(out)
}

/// Serves logged estimates. A route is found by explicit id, or else by the
/// grid cells of its endpoints; the newest entry not after the requested time
/// and no older than the staleness limit is returned verbatim.
pub struct ReplayProvider {
    by_route: HashMap<String, Vec<ReplayRecord>>,
    by_cells: HashMap<(CellIndex, CellIndex), String>,
    grid: GridSpec,
    max_staleness_s: i64,
}

impl ReplayProvider {
    pub fn new(records: Vec<ReplayRecord>, routes: &BTreeMap<String, Route>, grid: GridSpec) -> Self {
        let mut by_route: HashMap<String, Vec<ReplayRecord>> = HashMap::new();
        for r in records {
            by_route.entry(r.route_id.clone()).or_default().push(r);
        }
        for v in by_route.values_mut() {
            v.sort_by_key(|r| r.timestamp);
        }
        let mut by_cells = HashMap::new();
        for (id, route) in routes {
            if let (Some(o), Some(d)) = (grid.try_cell_of(route.origin), grid.try_cell_of(route.destination)) {
                // first id in sorted order wins when two routes share cells
                by_cells.entry((o, d)).or_insert_with(|| id.clone());
            }
        }
        ReplayProvider {
            by_route,
            by_cells,
            grid,
            max_staleness_s: DEFAULT_MAX_STALENESS_S,
        }
    }

    pub fn with_max_staleness(mut self, seconds: i64) -> Self {
        self.max_staleness_s = seconds;
        self
    }

    fn route_for<'a>(&'a self, req: &'a QuoteRequest) -> Result<&'a str> {
        if let Some(id) = &req.route_id {
            return Ok(id);
        }
        let o = self.grid.try_cell_of(req.origin);
        let d = self.grid.try_cell_of(req.destination);
        o.zip(d)
            .and_then(|k| self.by_cells.get(&k))
            .map(String::as_str)
            .ok_or_else(|| Error::QuoteUnavailable("no replayed route between these cells".into()))
    }

    pub fn lookup(&self, route_id: &str, t: DateTime<Utc>) -> Option<&ReplayRecord> {
        let recs = self.by_route.get(route_id)?;
        let idx = recs.partition_point(|r| r.timestamp <= t);
        let r = recs.get(idx.checked_sub(1)?)?;
        ((t - r.timestamp).num_seconds() <= self.max_staleness_s).then_some(r)
    }
}

impl PriceProvider for ReplayProvider {
    fn quote(&self, req: &QuoteRequest) -> Result<PriceQuote> {
        let id = self.route_for(req)?;
        let r = self
            .lookup(id, req.time)
            .ok_or_else(|| Error::QuoteUnavailable(format!("no replay entry for route {id} at {}", req.time)))?;
        PriceQuote::range(
            Provider::Uber,
            r.min,
            r.max,
            r.mean() / r.base_price,
            QuoteSource::Replay,
        )
    }
}
