use std::collections::HashMap;
use std::io::Read;

use chrono::{DateTime, Duration, NaiveDateTime, Offset, TimeZone, Utc};
use chrono_tz::Tz;
use csv::{ByteRecord, ReaderBuilder};

use super::mapping::{ColumnMapping, DistanceUnit, FARE_FIELDS, TRIP_FIELDS};
use super::{PaymentType, Reject, RejectReason, Side, TripRecord};
use crate::error::{Error, Result};
use crate::geo::LatLon;
use crate::money::Cents;

const KEY_SEP: char = '|';

/// A trip row that parsed cleanly but has not been joined or validated.
#[derive(Debug, Clone)]
pub struct ParsedTrip {
    pub line: u64,
    pub key: String,
    pub pickup_time: DateTime<Utc>,
    pub dropoff_time: DateTime<Utc>,
    pub pickup: LatLon,
    pub dropoff: LatLon,
    pub trip_distance_km: f64,
    pub raw: String,
}

#[derive(Debug, Clone)]
pub struct ParsedFare {
    pub line: u64,
    pub key: String,
    pub payment_type: PaymentType,
    pub fare_amount: Cents,
    pub tip_amount: Cents,
    pub total_amount: Cents,
    pub raw: String,
}

impl ParsedTrip {
    pub fn into_record(self, fare: ParsedFare) -> TripRecord {
        TripRecord {
            trip_id: self.key,
            pickup_time: self.pickup_time,
            dropoff_time: self.dropoff_time,
            pickup: self.pickup,
            dropoff: self.dropoff,
            trip_distance_km: self.trip_distance_km,
            fare_amount: fare.fare_amount,
            tip_amount: fare.tip_amount,
            total_amount: fare.total_amount,
            payment_type: fare.payment_type,
        }
    }
}

type RowResult<T> = Result<std::result::Result<T, Reject>>;

/// Resolved header positions and parsing rules shared by both file kinds.
struct Layout {
    side: Side,
    delimiter: u8,
    cols: HashMap<String, usize>,
    /// Smallest row width that covers every mapped column.
    width: usize,
    key_fields: Vec<String>,
    by_row_number: bool,
    ts_format: String,
    tz: Tz,
}

impl Layout {
    fn new(side: Side, headers: &ByteRecord, mapping: &ColumnMapping) -> Result<Self> {
        let names: Vec<String> = headers
            .iter()
            .map(|h| String::from_utf8_lossy(h).trim().to_string())
            .collect();
        let (columns, required): (_, &[&str]) = match side {
            Side::Trips => (&mapping.trip_columns, &TRIP_FIELDS),
            Side::Fares => (&mapping.fare_columns, &FARE_FIELDS),
        };
        let by_row_number = mapping.joins_by_row_number();
        let mut cols = HashMap::new();
        for (field, column) in columns {
            let needed = required.contains(&field.as_str()) || (!by_row_number && mapping.join_key.contains(field));
            if !needed {
                continue;
            }
            let idx = names
                .iter()
                .position(|n| n == column.trim())
                .ok_or_else(|| Error::MissingColumn {
                    field: field.clone(),
                    column: column.clone(),
                })?;
            cols.insert(field.clone(), idx);
        }
        let width = cols.values().max().map_or(0, |m| m + 1);
        Ok(Layout {
            side,
            delimiter: mapping.delimiter as u8,
            cols,
            width,
            key_fields: if by_row_number {
                Vec::new()
            } else {
                mapping.join_key.clone()
            },
            by_row_number,
            ts_format: mapping.timestamp_format.clone(),
            tz: mapping.tz()?,
        })
    }

    fn field<'r>(&self, rec: &'r ByteRecord, name: &str) -> &'r str {
        let bytes = rec.get(self.cols[name]).unwrap_or_default();
        std::str::from_utf8(bytes).unwrap_or("\u{fffd}").trim()
    }

    fn raw(&self, rec: &ByteRecord) -> String {
        let sep = [self.delimiter];
        let parts: Vec<_> = rec.iter().collect();
        String::from_utf8_lossy(&parts.join(&sep[..])).into_owned()
    }

    fn timestamp(&self, s: &str) -> Option<DateTime<Utc>> {
        if self.ts_format == "rfc3339" {
            return DateTime::parse_from_rfc3339(s).ok().map(|d| d.with_timezone(&Utc));
        }
        let naive = NaiveDateTime::parse_from_str(s, &self.ts_format).ok()?;
        Some(local_to_utc(self.tz, naive))
    }

    /// Key parts in `join_key` order. Timestamp fields are normalized to UTC so
    /// the same instant written differently still joins.
    fn key(&self, rec: &ByteRecord, ordinal: u64) -> std::result::Result<String, RejectReason> {
        if self.by_row_number {
            return Ok(ordinal.to_string());
        }
        let mut parts = Vec::with_capacity(self.key_fields.len());
        for k in &self.key_fields {
            let v = self.field(rec, k);
            if is_time_field(k) {
                let t = self.timestamp(v).ok_or(RejectReason::BadTimestamp)?;
                parts.push(t.format("%Y-%m-%dT%H:%M:%SZ").to_string());
            } else {
                parts.push(v.to_string());
            }
        }
        Ok(parts.join(&KEY_SEP.to_string()))
    }

    fn has_empty_key_field(&self, rec: &ByteRecord) -> bool {
        self.key_fields
            .iter()
            .any(|k| !is_time_field(k) && self.field(rec, k).is_empty())
    }
}

fn is_time_field(name: &str) -> bool {
    matches!(name, "pickup_time" | "dropoff_time")
}

/// Naive local wall-clock time to UTC. Ambiguous times (autumn fold) take the
/// earlier instant; times in the spring gap are read with the pre-transition offset.
fn local_to_utc(tz: Tz, naive: NaiveDateTime) -> DateTime<Utc> {
    match tz.from_local_datetime(&naive).earliest() {
        Some(t) => t.with_timezone(&Utc),
        None => {
            let before = tz
                .from_local_datetime(&(naive - Duration::hours(3)))
                .earliest()
                .map(|t| t.offset().fix())
                .unwrap_or_else(|| Utc.fix());
            (naive - before).and_utc()
        }
    }
}

fn number(s: &str) -> Option<f64> {
    s.parse::<f64>().ok().filter(|v| v.is_finite())
}

struct Rows<R: Read> {
    reader: csv::Reader<R>,
    layout: Layout,
    record: ByteRecord,
    ordinal: u64,
}

impl<R: Read> Rows<R> {
    fn new(input: R, side: Side, mapping: &ColumnMapping) -> Result<Self> {
        let mut reader = ReaderBuilder::new()
            .delimiter(mapping.delimiter as u8)
            .has_headers(true)
            .flexible(true)
            .from_reader(input);
        let headers = reader.byte_headers()?.clone();
        let layout = Layout::new(side, &headers, mapping)?;
        Ok(Rows {
            reader,
            layout,
            record: ByteRecord::new(),
            ordinal: 0,
        })
    }

    /// Advances to the next record; returns the line number and row ordinal.
    fn advance(&mut self) -> Option<Result<(u64, u64)>> {
        match self.reader.read_byte_record(&mut self.record) {
            Ok(false) => None,
            Ok(true) => {
                self.ordinal += 1;
                let line = self.record.position().map_or(self.ordinal + 1, |p| p.line());
                Some(Ok((line, self.ordinal)))
            }
            Err(e) => Some(Err(e.into())),
        }
    }

    fn reject(&self, line: u64, reason: RejectReason) -> Reject {
        Reject {
            side: self.layout.side,
            line,
            reason,
            raw: self.layout.raw(&self.record),
        }
    }
}

/// Streaming trip parser. Each item is either a parsed row or a reject;
/// the outer `Result` carries unrecoverable read errors only.
pub struct TripRows<R: Read> {
    rows: Rows<R>,
    unit: DistanceUnit,
}

impl<R: Read> TripRows<R> {
    pub fn new(input: R, mapping: &ColumnMapping) -> Result<Self> {
        Ok(TripRows {
            rows: Rows::new(input, Side::Trips, mapping)?,
            unit: mapping.distance_unit,
        })
    }

    fn parse(&self, line: u64, ordinal: u64) -> std::result::Result<ParsedTrip, RejectReason> {
        let l = &self.rows.layout;
        let rec = &self.rows.record;
        if rec.len() < l.width || l.has_empty_key_field(rec) {
            return Err(RejectReason::MissingField);
        }
        let pickup_time = l
            .timestamp(l.field(rec, "pickup_time"))
            .ok_or(RejectReason::BadTimestamp)?;
        let dropoff_time = l
            .timestamp(l.field(rec, "dropoff_time"))
            .ok_or(RejectReason::BadTimestamp)?;
        let coord = |name| number(l.field(rec, name)).ok_or(RejectReason::BadCoordinate);
        let pickup = LatLon::new(coord("pickup_lat")?, coord("pickup_lon")?);
        let dropoff = LatLon::new(coord("dropoff_lat")?, coord("dropoff_lon")?);
        let dist = number(l.field(rec, "trip_distance")).ok_or(RejectReason::BadNumber)?;
        let key = l.key(rec, ordinal)?;
        Ok(ParsedTrip {
            line,
            key,
            pickup_time,
            dropoff_time,
            pickup,
            dropoff,
            trip_distance_km: self.unit.to_km(dist),
            raw: l.raw(rec),
        })
    }
}

impl<R: Read> Iterator for TripRows<R> {
    type Item = RowResult<ParsedTrip>;

    fn next(&mut self) -> Option<Self::Item> {
        let (line, ordinal) = match self.rows.advance()? {
            Ok(v) => v,
            Err(e) => return Some(Err(e)),
        };
        Some(Ok(self
            .parse(line, ordinal)
            .map_err(|reason| self.rows.reject(line, reason))))
    }
}

pub struct FareRows<R: Read> {
    rows: Rows<R>,
    mapping: ColumnMapping,
}

impl<R: Read> FareRows<R> {
    pub fn new(input: R, mapping: &ColumnMapping) -> Result<Self> {
        Ok(FareRows {
            rows: Rows::new(input, Side::Fares, mapping)?,
            mapping: mapping.clone(),
        })
    }

    fn parse(&self, line: u64, ordinal: u64) -> std::result::Result<ParsedFare, RejectReason> {
        let l = &self.rows.layout;
        let rec = &self.rows.record;
        if rec.len() < l.width || l.has_empty_key_field(rec) {
            return Err(RejectReason::MissingField);
        }
        let key = l.key(rec, ordinal)?;
        let money = |name| {
            number(l.field(rec, name))
                .map(Cents::from_dollars)
                .ok_or(RejectReason::BadNumber)
        };
        Ok(ParsedFare {
            line,
            key,
            fare_amount: money("fare_amount")?,
            tip_amount: money("tip_amount")?,
            total_amount: money("total_amount")?,
            payment_type: self.mapping.payment_type(l.field(rec, "payment_type")),
            raw: l.raw(rec),
        })
    }
}

impl<R: Read> Iterator for FareRows<R> {
    type Item = RowResult<ParsedFare>;

    fn next(&mut self) -> Option<Self::Item> {
        let (line, ordinal) = match self.rows.advance()? {
            Ok(v) => v,
            Err(e) => return Some(Err(e)),
        };
        Some(Ok(self
            .parse(line, ordinal)
            .map_err(|reason| self.rows.reject(line, reason))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "medallion,hack_license,pickup_datetime,dropoff_datetime,trip_distance,pickup_longitude,pickup_latitude,dropoff_longitude,dropoff_latitude\n";

    fn parse_one(row: &str) -> std::result::Result<ParsedTrip, Reject> {
        let text = format!("{HEADER}{row}\n");
        let mut rows = TripRows::new(text.as_bytes(), &ColumnMapping::tlc_2013()).unwrap();
        rows.next().unwrap().unwrap()
    }

    fn reason(row: &str) -> RejectReason {
        parse_one(row).unwrap_err().reason
    }

    #[test]
    fn reject_precedence() {
        assert_eq!(reason("M,H,2013-05-01 08:00:00"), RejectReason::MissingField);
        assert_eq!(
            reason(",H,2013-05-01 08:00:00,2013-05-01 08:10:00,1,-73.9,40.7,-73.9,40.7"),
            RejectReason::MissingField
        );
        assert_eq!(
            reason("M,H,2013-13-01 08:00:00,2013-05-01 08:10:00,x,y,40.7,-73.9,40.7"),
            RejectReason::BadTimestamp
        );
        assert_eq!(
            reason("M,H,2013-05-01 08:00:00,2013-05-01 08:10:00,x,,40.7,-73.9,40.7"),
            RejectReason::BadCoordinate
        );
        assert_eq!(
            reason("M,H,2013-05-01 08:00:00,2013-05-01 08:10:00,x,-73.9,NaN,-73.9,40.7"),
            RejectReason::BadCoordinate
        );
        assert_eq!(
            reason("M,H,2013-05-01 08:00:00,2013-05-01 08:10:00,x,-73.9,40.7,-73.9,40.7"),
            RejectReason::BadNumber
        );
    }

    #[test]
    fn reject_keeps_line_and_raw_text() {
        let r = parse_one("M,H,bad,bad,1,1,1,1,1").unwrap_err();
        assert_eq!(r.line, 2);
        assert_eq!(r.raw, "M,H,bad,bad,1,1,1,1,1");
        assert_eq!(r.side, Side::Trips);
    }

    #[test]
    fn timestamps_are_local_new_york() {
        let t = parse_one("M,H,2013-05-01 08:00:00,2013-05-01 08:10:00,1,-73.9,40.7,-73.9,40.7").unwrap();
        assert_eq!(t.pickup_time.to_rfc3339(), "2013-05-01T12:00:00+00:00");
        assert_eq!(t.key, "M|H|2013-05-01T12:00:00Z");
        let winter = parse_one("M,H,2013-01-01 08:00:00,2013-01-01 08:10:00,1,-73.9,40.7,-73.9,40.7").unwrap();
        assert_eq!(winter.pickup_time.to_rfc3339(), "2013-01-01T13:00:00+00:00");
    }

    #[test]
    fn dst_edges_do_not_reject() {
        // spring gap and autumn fold
        let gap = parse_one("M,H,2013-03-10 02:30:00,2013-03-10 03:10:00,1,-73.9,40.7,-73.9,40.7").unwrap();
        assert_eq!(gap.pickup_time.to_rfc3339(), "2013-03-10T07:30:00+00:00");
        let fold = parse_one("M,H,2013-11-03 01:30:00,2013-11-03 01:50:00,1,-73.9,40.7,-73.9,40.7").unwrap();
        assert_eq!(fold.pickup_time.to_rfc3339(), "2013-11-03T05:30:00+00:00");
    }

    #[test]
    fn missing_header_column_is_an_error() {
        let text = "medallion,hack_license\nM,H\n";
        assert!(matches!(
            TripRows::new(text.as_bytes(), &ColumnMapping::tlc_2013()),
            Err(Error::MissingColumn { .. })
        ));
    }

    #[test]
    fn fare_rows_parse_money_and_payment() {
        let text = " medallion , hack_license, pickup_datetime, payment_type, fare_amount, tip_amount, total_amount\n\
                    M,H,2013-05-01 08:00:00,CSH,9.5,0,10.005\n\
                    M,H,2013-05-01 08:00:00,CSH,9.5,abc,10\n";
        let rows: Vec<_> = FareRows::new(text.as_bytes(), &ColumnMapping::tlc_2013())
            .unwrap()
            .map(|r| r.unwrap())
            .collect();
        let f = rows[0].as_ref().unwrap();
        assert_eq!(f.fare_amount, Cents(950));
        assert_eq!(f.payment_type, PaymentType::Cash);
        assert_eq!(rows[1].as_ref().unwrap_err().reason, RejectReason::BadNumber);
        assert_eq!(rows[1].as_ref().unwrap_err().line, 3);
    }
}
