//! Parametric square-cell grid over a local equirectangular projection, and
//! origin-destination aggregation of trips on top of it.

mod od;
mod snapshot;

pub use od::{AreaSummary, OdAccumulator, OdIndex, OdKey, OdStats};
pub use snapshot::{read_snapshot, write_snapshot, SNAPSHOT_MAGIC};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geo::{equirectangular_offset, offset_to_latlon, BoundingBox, LatLon};

/// Zero-based `(row, col)`; rows grow northward, columns eastward.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CellIndex {
    pub row: u32,
    pub col: u32,
}

impl CellIndex {
    pub const fn new(row: u32, col: u32) -> Self {
        CellIndex { row, col }
    }
}

impl fmt::Display for CellIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.row, self.col)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// South-west corner of cell (0, 0).
    pub anchor: LatLon,
    pub cell_size_m: f64,
    pub n_rows: u32,
    pub n_cols: u32,
}

/// Named grid resolutions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridPreset {
    /// 400 x 400 cells of 30 m covering lower and midtown Manhattan; used for fare lookup.
    App,
    /// 100 m cells covering the whole NYC bounding box; used for area statistics.
    Analysis,
}

impl FromStr for GridPreset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "app" => Ok(GridPreset::App),
            "analysis" => Ok(GridPreset::Analysis),
            other => Err(Error::InvalidArgument(format!("unknown grid preset `{other}`"))),
        }
    }
}

impl GridPreset {
    pub fn spec(self) -> GridSpec {
        match self {
            GridPreset::App => GridSpec::app(),
            GridPreset::Analysis => GridSpec::analysis(),
        }
    }
}

impl GridSpec {
    pub fn new(anchor: LatLon, cell_size_m: f64, n_rows: u32, n_cols: u32) -> Result<Self> {
        if !(cell_size_m > 0.0 && cell_size_m.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "cell size must be positive, got {cell_size_m}"
            )));
        }
        if n_rows == 0 || n_cols == 0 {
            return Err(Error::InvalidArgument("grid needs at least one row and column".into()));
        }
        if !anchor.is_finite() {
            return Err(Error::InvalidArgument("grid anchor must be finite".into()));
        }
        Ok(GridSpec {
            anchor,
            cell_size_m,
            n_rows,
            n_cols,
        })
    }

    pub fn app() -> Self {
        GridSpec {
            anchor: LatLon::new(40.6980, -74.0250),
            cell_size_m: 30.0,
            n_rows: 400,
            n_cols: 400,
        }
    }

    pub fn analysis() -> Self {
        GridSpec {
            anchor: BoundingBox::NYC.south_west(),
            cell_size_m: 100.0,
            n_rows: 490,
            n_cols: 475,
        }
    }

    pub fn cell_count(&self) -> usize {
        self.n_rows as usize * self.n_cols as usize
    }

    /// Unbounded cell coordinates; may be negative or beyond the grid.
    pub fn raw_cell(&self, p: LatLon) -> (i64, i64) {
        let (north, east) = equirectangular_offset(self.anchor, p);
        self.cell_from_offset(north, east)
    }

    /// Floor of the offset in cell units; an offset exactly on an edge picks the higher index.
    pub fn cell_from_offset(&self, north_m: f64, east_m: f64) -> (i64, i64) {
        let row = (north_m / self.cell_size_m).floor();
        let col = (east_m / self.cell_size_m).floor();
        (saturating_i64(row), saturating_i64(col))
    }

    /// Cell containing `p`. Points exactly on an edge belong to the higher-index cell.
    pub fn cell_of(&self, p: LatLon) -> Result<CellIndex> {
        let (row, col) = self.raw_cell(p);
        self.checked_cell(row, col).ok_or(Error::OutOfGrid {
            lat: p.lat,
            lon: p.lon,
            row,
            col,
        })
    }

    pub fn try_cell_of(&self, p: LatLon) -> Option<CellIndex> {
        let (row, col) = self.raw_cell(p);
        self.checked_cell(row, col)
    }

    pub fn checked_cell(&self, row: i64, col: i64) -> Option<CellIndex> {
        if row >= 0 && col >= 0 && row < self.n_rows as i64 && col < self.n_cols as i64 {
            Some(CellIndex::new(row as u32, col as u32))
        } else {
            None
        }
    }

    pub fn contains_cell(&self, c: CellIndex) -> bool {
        c.row < self.n_rows && c.col < self.n_cols
    }

    pub fn cell_center(&self, c: CellIndex) -> LatLon {
        let s = self.cell_size_m;
        offset_to_latlon(self.anchor, (c.row as f64 + 0.5) * s, (c.col as f64 + 0.5) * s)
    }

    /// `[south-west, north-east]` corners of a cell.
    pub fn cell_bounds(&self, c: CellIndex) -> [LatLon; 2] {
        let s = self.cell_size_m;
        let sw = offset_to_latlon(self.anchor, c.row as f64 * s, c.col as f64 * s);
        let ne = offset_to_latlon(self.anchor, (c.row + 1) as f64 * s, (c.col + 1) as f64 * s);
        [sw, ne]
    }

    /// Row-major position of a cell, for dense rasters.
    pub fn linear_index(&self, c: CellIndex) -> usize {
        c.row as usize * self.n_cols as usize + c.col as usize
    }
}

fn saturating_i64(v: f64) -> i64 {
    if v.is_nan() {
        i64::MIN
    } else {
        v.clamp(i64::MIN as f64, i64::MAX as f64) as i64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geo::haversine_m;
    use proptest::prelude::*;

    fn grid30() -> GridSpec {
        GridSpec::app()
    }

    #[test]
    fn anchor_maps_to_origin_cell() {
        let g = grid30();
        assert_eq!(g.cell_of(g.anchor).unwrap(), CellIndex::new(0, 0));
    }

    #[test]
    fn offsets_45_east_75_north() {
        let g = grid30();
        let p = offset_to_latlon(g.anchor, 75.0, 45.0);
        assert_eq!(g.cell_of(p).unwrap(), CellIndex::new(2, 1));
    }

    #[test]
    fn boundary_goes_to_higher_cell() {
        let g = grid30();
        assert_eq!(g.cell_from_offset(60.0, 30.0), (2, 1));
        assert_eq!(g.cell_from_offset(59.999, 29.999), (1, 0));
        assert_eq!(g.cell_from_offset(0.0, 0.0), (0, 0));
        assert_eq!(g.cell_from_offset(-0.001, 0.0), (-1, 0));
    }

    #[test]
    fn outside_points_are_errors() {
        let g = grid30();
        assert!(matches!(g.cell_of(LatLon::new(0.0, 0.0)), Err(Error::OutOfGrid { .. })));
        let beyond = offset_to_latlon(g.anchor, 12_000.0 + 1.0, 10.0);
        assert!(g.cell_of(beyond).is_err());
        let south = offset_to_latlon(g.anchor, -1.0, 10.0);
        assert!(g.cell_of(south).is_err());
        assert!(g.cell_of(LatLon::new(f64::NAN, -74.0)).is_err());
    }

    #[test]
    fn rejects_degenerate_specs() {
        assert!(GridSpec::new(LatLon::new(40.0, -74.0), 0.0, 1, 1).is_err());
        assert!(GridSpec::new(LatLon::new(40.0, -74.0), 30.0, 0, 1).is_err());
        assert!(GridSpec::new(LatLon::new(40.0, -74.0), -5.0, 1, 1).is_err());
    }

    #[test]
    fn presets_parse() {
        assert_eq!("app".parse::<GridPreset>().unwrap().spec(), GridSpec::app());
        assert_eq!("analysis".parse::<GridPreset>().unwrap().spec(), GridSpec::analysis());
        assert!("coarse".parse::<GridPreset>().is_err());
    }

    #[test]
    fn analysis_grid_covers_nyc_box() {
        let g = GridSpec::analysis();
        let b = BoundingBox::NYC;
        assert!(g.cell_of(LatLon::new(b.north, b.east)).is_ok());
        assert!(g.cell_of(LatLon::new(b.north - 1e-6, b.west)).is_ok());
    }

    // Haversine oracle: along the edges of a 12 km extent at NYC latitudes the
    // projected distance and great-circle distance agree to < 0.1 %, so a point
    // placed by either metric resolves to the same 30 m cell.
    #[test]
    fn projection_agrees_with_haversine_oracle() {
        let g = grid30();
        for &(n, e) in &[(11_985.0, 15.0), (15.0, 11_985.0), (6_015.0, 9_015.0)] {
            let p = offset_to_latlon(g.anchor, n, e);
            let flat = (n * n + e * e).sqrt();
            let great = haversine_m(g.anchor, p);
            assert!((flat - great).abs() / great < 1e-3);
            // place the point again by scaling its great-circle distance along the same bearing
            let scale = great / flat;
            let q = offset_to_latlon(g.anchor, n * scale, e * scale);
            assert_eq!(g.cell_of(p).unwrap(), g.cell_of(q).unwrap());
        }
    }

    proptest! {
        #[test]
        fn center_reprojection_is_idempotent(row in 0u32..400, col in 0u32..400) {
            let g = grid30();
            let c = CellIndex::new(row, col);
            prop_assert_eq!(g.cell_of(g.cell_center(c)).unwrap(), c);
        }

        #[test]
        fn stepping_one_cell_east_increments_col(row in 0u32..400, col in 0u32..399, frac in 0.05f64..0.95) {
            let g = grid30();
            let s = g.cell_size_m;
            let north = (row as f64 + 0.5) * s;
            let east = (col as f64 + frac) * s;
            let p = offset_to_latlon(g.anchor, north, east);
            let q = offset_to_latlon(g.anchor, north, east + s);
            let a = g.cell_of(p).unwrap();
            let b = g.cell_of(q).unwrap();
            prop_assert_eq!(b.col, a.col + 1);
            prop_assert_eq!(b.row, a.row);
        }
    }
}
