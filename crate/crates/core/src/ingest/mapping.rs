use std::collections::BTreeMap;
use std::path::Path;

use chrono_tz::Tz;
use serde::Deserialize;

use super::PaymentType;
use crate::error::{Error, Result};
use crate::geo::BoundingBox;

/// Canonical field a join can key on by position instead of by value.
pub const ROW_NUMBER_KEY: &str = "row_number";

pub(crate) const TRIP_FIELDS: [&str; 7] = [
    "pickup_time",
    "dropoff_time",
    "trip_distance",
    "pickup_lat",
    "pickup_lon",
    "dropoff_lat",
    "dropoff_lon",
];
pub(crate) const FARE_FIELDS: [&str; 4] = ["payment_type", "fare_amount", "tip_amount", "total_amount"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum DistanceUnit {
    #[default]
    Miles,
    Km,
    Meters,
}

impl DistanceUnit {
    pub fn to_km(self, v: f64) -> f64 {
        match self {
            DistanceUnit::Miles => v * 1.609344,
            DistanceUnit::Km => v,
            DistanceUnit::Meters => v / 1000.0,
        }
    }
}

/// Declarative description of a city's trip and fare exports.
///
/// Keys of `trip_columns` / `fare_columns` are canonical field names, values
/// are the source header names. Header names are compared after trimming.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ColumnMapping {
    #[serde(default = "default_delimiter")]
    pub delimiter: char,
    /// chrono format string, or `rfc3339`.
    #[serde(default = "default_timestamp_format")]
    pub timestamp_format: String,
    /// Zone the naive source timestamps are expressed in.
    #[serde(default = "default_timezone")]
    pub timezone: String,
    #[serde(default)]
    pub distance_unit: DistanceUnit,
    #[serde(default = "default_join_key")]
    pub join_key: Vec<String>,
    pub trip_columns: BTreeMap<String, String>,
    pub fare_columns: BTreeMap<String, String>,
    #[serde(default)]
    pub payment_codes: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    pub bounding_box: Option<BoundingBox>,
}

fn default_delimiter() -> char {
    ','
}

fn default_timestamp_format() -> String {
    "%Y-%m-%d %H:%M:%S".into()
}

fn default_timezone() -> String {
    "America/New_York".into()
}

fn default_join_key() -> Vec<String> {
    vec!["medallion".into(), "hack_license".into(), "pickup_time".into()]
}

impl ColumnMapping {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let m: ColumnMapping = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        m.validate()?;
        Ok(m)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    /// 2013 NYC TLC `trip_data` / `trip_fare` layout.
    pub fn tlc_2013() -> Self {
        Self::from_toml_str(include_str!("../../fixtures/ingest/tlc2013.toml")).expect("bundled mapping is valid")
    }

    fn validate(&self) -> Result<()> {
        if !self.delimiter.is_ascii() {
            return Err(Error::Config("delimiter must be a single ASCII character".into()));
        }
        self.tz()?;
        if self.join_key.is_empty() {
            return Err(Error::Config("join_key must name at least one field".into()));
        }
        for f in TRIP_FIELDS {
            if !self.trip_columns.contains_key(f) {
                return Err(Error::Config(format!("trip_columns lacks `{f}`")));
            }
        }
        for f in FARE_FIELDS {
            if !self.fare_columns.contains_key(f) {
                return Err(Error::Config(format!("fare_columns lacks `{f}`")));
            }
        }
        if !self.joins_by_row_number() {
            for k in &self.join_key {
                if !self.trip_columns.contains_key(k) || !self.fare_columns.contains_key(k) {
                    return Err(Error::Config(format!(
                        "join key `{k}` must be mapped in both trip_columns and fare_columns"
                    )));
                }
            }
        }
        for kind in self.payment_codes.keys() {
            if !matches!(kind.as_str(), "card" | "cash" | "other") {
                return Err(Error::Config(format!("unknown payment kind `{kind}`")));
            }
        }
        Ok(())
    }

    pub fn joins_by_row_number(&self) -> bool {
        self.join_key.len() == 1 && self.join_key[0] == ROW_NUMBER_KEY
    }

    pub fn tz(&self) -> Result<Tz> {
        self.timezone
            .parse()
            .map_err(|_| Error::Config(format!("unknown timezone `{}`", self.timezone)))
    }

    pub fn payment_type(&self, code: &str) -> PaymentType {
        let code = code.trim();
        for (kind, codes) in &self.payment_codes {
            if codes.iter().any(|c| c.eq_ignore_ascii_case(code)) {
                return match kind.as_str() {
                    "card" => PaymentType::Card,
                    "cash" => PaymentType::Cash,
                    _ => PaymentType::Other,
                };
            }
        }
        PaymentType::Other
    }

    pub fn bounding_box(&self) -> BoundingBox {
        self.bounding_box.unwrap_or_default()
    }
}
