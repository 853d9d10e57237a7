use std::collections::HashMap;
use std::io::Read;
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::geo::LatLon;

/// Local place-name lookup used instead of an external geocoder.
///
/// Names match case-insensitively after trimming.
#[derive(Debug, Clone, Default)]
pub struct Gazetteer {
    places: HashMap<String, LatLon>,
}

#[derive(Deserialize)]
struct Row {
    name: String,
    lat: f64,
    lon: f64,
}

fn key(name: &str) -> String {
    name.trim().to_lowercase()
}

impl Gazetteer {
    /// `name,lat,lon`
    pub fn from_reader<R: Read>(input: R) -> Result<Self> {
        let mut places = HashMap::new();
        for row in csv::Reader::from_reader(input).deserialize::<Row>() {
            let row = row?;
            let p = LatLon::new(row.lat, row.lon);
            if !p.is_finite() {
                return Err(Error::Format {
                    what: "gazetteer",
                    detail: format!("{} has no usable coordinates", row.name),
                });
            }
            places.insert(key(&row.name), p);
        }
        Ok(Gazetteer { places })
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Self::from_reader(std::fs::File::open(path).map_err(|e| Error::io(path, e))?)
    }

    pub fn lookup(&self, name: &str) -> Option<LatLon> {
        self.places.get(&key(name)).copied()
    }

    pub fn len(&self) -> usize {
        self.places.len()
    }

    pub fn is_empty(&self) -> bool {
        self.places.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn case_insensitive() {
        let g = Gazetteer::from_reader("name,lat,lon\nTimes Square,40.758,-73.9855\n".as_bytes()).unwrap();
        assert_eq!(g.lookup("  times square "), Some(LatLon::new(40.758, -73.9855)));
        assert_eq!(g.lookup("Nowhere"), None);
    }
}
