//! Coordinates, bounding boxes and the two distance models used by the grid.

use serde::{Deserialize, Serialize};

/// Mean Earth radius in meters.
pub const EARTH_RADIUS_M: f64 = 6_371_000.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatLon {
    pub lat: f64,
    pub lon: f64,
}

impl LatLon {
    pub const fn new(lat: f64, lon: f64) -> Self {
        LatLon { lat, lon }
    }

    pub fn is_finite(&self) -> bool {
        self.lat.is_finite() && self.lon.is_finite()
    }
}

/// Axis-aligned box in degrees, inclusive on every edge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub south: f64,
    pub west: f64,
    pub north: f64,
    pub east: f64,
}

impl BoundingBox {
    /// Five-borough New York City extent.
    pub const NYC: BoundingBox = BoundingBox {
        south: 40.4774,
        west: -74.2591,
        north: 40.9176,
        east: -73.7004,
    };

    pub fn contains(&self, p: LatLon) -> bool {
        p.lat >= self.south && p.lat <= self.north && p.lon >= self.west && p.lon <= self.east
    }

    pub fn south_west(&self) -> LatLon {
        LatLon::new(self.south, self.west)
    }
}

impl Default for BoundingBox {
    fn default() -> Self {
        BoundingBox::NYC
    }
}

/// Great-circle distance in meters.
pub fn haversine_m(a: LatLon, b: LatLon) -> f64 {
    let p1 = a.lat.to_radians();
    let p2 = b.lat.to_radians();
    let dp = p2 - p1;
    let dl = (b.lon - a.lon).to_radians();
    let h = (dp / 2.0).sin().powi(2) + p1.cos() * p2.cos() * (dl / 2.0).sin().powi(2);
    2.0 * EARTH_RADIUS_M * h.sqrt().asin()
}

/// Local equirectangular offset of `p` from `anchor`, as `(north_m, east_m)`.
///
/// The east component is scaled by the cosine of the anchor latitude only, so
/// the mapping is affine in (lat, lon) and cheap to invert.
pub fn equirectangular_offset(anchor: LatLon, p: LatLon) -> (f64, f64) {
    let north = EARTH_RADIUS_M * (p.lat - anchor.lat).to_radians();
    let east = EARTH_RADIUS_M * (p.lon - anchor.lon).to_radians() * anchor.lat.to_radians().cos();
    (north, east)
}

/// Inverse of [`equirectangular_offset`].
pub fn offset_to_latlon(anchor: LatLon, north_m: f64, east_m: f64) -> LatLon {
    let lat = anchor.lat + (north_m / EARTH_RADIUS_M).to_degrees();
    let lon = anchor.lon + (east_m / (EARTH_RADIUS_M * anchor.lat.to_radians().cos())).to_degrees();
    LatLon::new(lat, lon)
}
