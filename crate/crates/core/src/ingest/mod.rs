//! Streaming ingestion of paired trip and fare exports.
//!
//! Parsing never aborts on a bad row: every row ends up either in the
//! accepted record stream or in the reject stream with a reason code.

mod join;
mod mapping;
mod parse;
mod report;
mod validate;

pub use join::{join, Joined};
pub use mapping::{ColumnMapping, DistanceUnit, ROW_NUMBER_KEY};
pub use parse::{FareRows, ParsedFare, ParsedTrip, TripRows};
pub use report::{write_reject_log, IngestReport, Reject, RejectReason, Side};
pub use validate::validate_record;

use std::fs::File;
use std::io::Read;
use std::path::Path;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geo::LatLon;
use crate::money::Cents;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PaymentType {
    Card,
    Cash,
    Other,
}

/// One validated taxi journey with its fare.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TripRecord {
    pub trip_id: String,
    pub pickup_time: DateTime<Utc>,
    pub dropoff_time: DateTime<Utc>,
    pub pickup: LatLon,
    pub dropoff: LatLon,
    pub trip_distance_km: f64,
    pub fare_amount: Cents,
    pub tip_amount: Cents,
    pub total_amount: Cents,
    pub payment_type: PaymentType,
}

impl TripRecord {
    pub fn duration_s(&self) -> i64 {
        (self.dropoff_time - self.pickup_time).num_seconds()
    }

    pub fn duration_min(&self) -> f64 {
        self.duration_s() as f64 / 60.0
    }
}

#[derive(Debug, Clone)]
pub struct IngestOutput {
    pub records: Vec<TripRecord>,
    pub trips: IngestReport,
    pub fares: IngestReport,
    pub rejects: Vec<Reject>,
}

/// Parse, join and validate one trip file against its fare file.
pub fn ingest<T: Read, F: Read>(trips: T, fares: F, mapping: &ColumnMapping) -> Result<IngestOutput> {
    let mut rejects = Vec::new();
    let mut trip_rows = 0u64;
    let mut parsed_trips = Vec::new();
    for row in TripRows::new(trips, mapping)? {
        trip_rows += 1;
        match row? {
            Ok(t) => parsed_trips.push(t),
            Err(r) => rejects.push(r),
        }
    }
    let mut fare_rows = 0u64;
    let mut parsed_fares = Vec::new();
    for row in FareRows::new(fares, mapping)? {
        fare_rows += 1;
        match row? {
            Ok(f) => parsed_fares.push(f),
            Err(r) => rejects.push(r),
        }
    }

    let joined = join(parsed_trips, parsed_fares);
    rejects.extend(joined.rejects);
    let matched = joined.pairs.len() as u64;

    let bbox = mapping.bounding_box();
    let mut records = Vec::with_capacity(joined.pairs.len());
    for (trip, fare) in joined.pairs {
        let line = trip.line;
        let raw = trip.raw.clone();
        let record = trip.into_record(fare);
        match validate_record(&record, &bbox) {
            Ok(()) => records.push(record),
            Err(reason) => rejects.push(Reject {
                side: Side::Trips,
                line,
                reason,
                raw,
            }),
        }
    }

    let mut trips = IngestReport::default();
    let mut fares = IngestReport::default();
    for r in &rejects {
        match r.side {
            Side::Trips => trips.reject(r.reason),
            Side::Fares => fares.reject(r.reason),
        }
    }
    trips.rows_read = trip_rows;
    trips.rows_accepted = records.len() as u64;
    fares.rows_read = fare_rows;
    fares.rows_accepted = matched;
    rejects.sort_by_key(|r| (r.side, r.line));
    Ok(IngestOutput {
        records,
        trips,
        fares,
        rejects,
    })
}

pub fn ingest_files(trips: impl AsRef<Path>, fares: impl AsRef<Path>, mapping: &ColumnMapping) -> Result<IngestOutput> {
    let open = |p: &Path| File::open(p).map_err(|e| Error::io(p, e));
    ingest(open(trips.as_ref())?, open(fares.as_ref())?, mapping)
}
