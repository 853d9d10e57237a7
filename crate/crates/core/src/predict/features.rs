use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geo::LatLon;
use crate::grid::{CellIndex, GridSpec, OdIndex};
use crate::surge::AreaSurgeStats;

pub const FEATURE_NAMES: [&str; 4] = ["yellow_trips", "fsq_places", "fsq_checkins", "fsq_travel_spots"];

/// Demand signals and surge ground truth for one area.
#[derive(Debug, Clone, PartialEq)]
pub struct AreaFeatureRow {
    pub cell: CellIndex,
    pub yellow_trip_count: u64,
    pub fsq_places: u64,
    pub fsq_checkins: u64,
    pub fsq_travel_spots: u64,
    /// Average surge multiplier of routes leaving the area.
    pub target: f64,
    /// Some input had no data for this area; its counts were filled with zero.
    pub missing: bool,
}

impl AreaFeatureRow {
    /// Feature vector in [`FEATURE_NAMES`] order.
    pub fn features(&self) -> [f64; 4] {
        [
            self.yellow_trip_count as f64,
            self.fsq_places as f64,
            self.fsq_checkins as f64,
            self.fsq_travel_spots as f64,
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct Venue {
    pub venue_id: String,
    pub lat: f64,
    pub lon: f64,
    pub category: String,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct Checkin {
    pub venue_id: String,
    pub checkins: u64,
}

/// Venue categories counted as travel spots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TravelCategories(pub BTreeSet<String>);

impl Default for TravelCategories {
    fn default() -> Self {
        TravelCategories(
            [
                "Airport",
                "Train Station",
                "Subway",
                "Bus Station",
                "Bus Stop",
                "Hotel",
                "Ferry",
                "Taxi",
                "Travel & Transport",
            ]
            .into_iter()
            .map(String::from)
            .collect(),
        )
    }
}

impl TravelCategories {
    pub fn contains(&self, category: &str) -> bool {
        self.0.contains(category)
    }
}

fn read_csv<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    csv::Reader::from_reader(file)
        .deserialize()
        .map(|r| r.map_err(Error::from))
        .collect()
}

/// `venue_id,lat,lon,category`
pub fn read_venues(path: impl AsRef<Path>) -> Result<Vec<Venue>> {
    read_csv(path.as_ref())
}

/// `venue_id,checkins`
pub fn read_checkins(path: impl AsRef<Path>) -> Result<Vec<Checkin>> {
    read_csv(path.as_ref())
}

/// Join yellow trips, venues and check-ins onto every area with surge ground truth.
///
/// Venues off the grid and check-ins for unknown venues are ignored. An area
/// that is absent from the OD index, has no venues, or has no check-in rows is
/// flagged `missing`.
pub fn build_features(
    od: &OdIndex,
    venues: &[Venue],
    checkins: &[Checkin],
    surge: &[AreaSurgeStats],
    travel: &TravelCategories,
) -> Result<Vec<AreaFeatureRow>> {
    let spec: &GridSpec = od.spec();
    let yellow = od.origin_trip_counts();
    let mut places: HashMap<CellIndex, u64> = HashMap::new();
    let mut spots: HashMap<CellIndex, u64> = HashMap::new();
    let mut venue_cell: HashMap<&str, CellIndex> = HashMap::new();
    for v in venues {
        let Some(c) = spec.try_cell_of(LatLon::new(v.lat, v.lon)) else {
            continue;
        };
        venue_cell.insert(&v.venue_id, c);
        *places.entry(c).or_insert(0) += 1;
        if travel.contains(&v.category) {
            *spots.entry(c).or_insert(0) += 1;
        }
    }
    let mut checkin_sum: HashMap<CellIndex, u64> = HashMap::new();
    for ck in checkins {
        if let Some(&c) = venue_cell.get(ck.venue_id.as_str()) {
            *checkin_sum.entry(c).or_insert(0) += ck.checkins;
        }
    }

    let mut by_cell: BTreeMap<CellIndex, &AreaSurgeStats> = BTreeMap::new();
    for s in surge {
        by_cell.insert(s.cell, s);
    }
    let mut overlap = false;
    let rows: Vec<_> = by_cell
        .into_iter()
        .map(|(c, s)| {
            let y = yellow.get(&c).copied();
            let p = places.get(&c).copied();
            let k = checkin_sum.get(&c).copied();
            overlap |= y.is_some() || p.is_some() || k.is_some();
            AreaFeatureRow {
                cell: c,
                yellow_trip_count: y.unwrap_or(0),
                fsq_places: p.unwrap_or(0),
                fsq_checkins: k.unwrap_or(0),
                fsq_travel_spots: spots.get(&c).copied().unwrap_or(0),
                target: s.avg_multiplier,
                missing: y.is_none() || p.is_none() || k.is_none(),
            }
        })
        .collect();
    if !overlap {
        return Err(Error::EmptyJoin);
    }
    Ok(rows)
}

#[derive(Serialize, Deserialize)]
struct TableRow {
    row: u32,
    col: u32,
    yellow_trips: u64,
    fsq_places: u64,
    fsq_checkins: u64,
    fsq_travel_spots: u64,
    target: f64,
    missing: u8,
}

/// `row,col,yellow_trips,fsq_places,fsq_checkins,fsq_travel_spots,target,missing`
pub fn write_feature_table<W: Write>(rows: &[AreaFeatureRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(TableRow {
            row: r.cell.row,
            col: r.cell.col,
            yellow_trips: r.yellow_trip_count,
            fsq_places: r.fsq_places,
            fsq_checkins: r.fsq_checkins,
            fsq_travel_spots: r.fsq_travel_spots,
            target: r.target,
            missing: r.missing as u8,
        })?;
    }
    w.flush().map_err(|e| Error::io("<feature table>", e))
}

pub fn read_feature_table<R: Read>(input: R) -> Result<Vec<AreaFeatureRow>> {
    let mut out = Vec::new();
    for r in csv::Reader::from_reader(input).deserialize::<TableRow>() {
        let r = r?;
        if !(r.target.is_finite() && r.target >= 1.0 - 1e-9) {
            return Err(Error::Format {
                what: "feature table",
                detail: format!("area {}:{} has target {}", r.row, r.col, r.target),
            });
        }
        out.push(AreaFeatureRow {
            cell: CellIndex::new(r.row, r.col),
            yellow_trip_count: r.yellow_trips,
            fsq_places: r.fsq_places,
            fsq_checkins: r.fsq_checkins,
            fsq_travel_spots: r.fsq_travel_spots,
            target: r.target,
            missing: r.missing != 0,
        });
    }
    Ok(out)
}
