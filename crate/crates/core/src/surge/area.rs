use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;

use super::{avg_surge_multiplier, is_surging, Route, SurgeSeries};
use crate::error::{Error, Result};
use crate::grid::{CellIndex, GridSpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AreaSurgeStats {
    pub cell: CellIndex,
    /// Mean over routes leaving the cell of each route's average multiplier.
    pub avg_multiplier: f64,
    pub route_count: usize,
}

/// Aggregate route averages by origin cell. Routes whose origin is off the
/// grid are ignored; a series without a route entry is an error.
pub fn area_surge_stats(
    series: &BTreeMap<String, SurgeSeries>,
    routes: &BTreeMap<String, Route>,
    spec: &GridSpec,
) -> Result<Vec<AreaSurgeStats>> {
    let mut per_cell: BTreeMap<CellIndex, Vec<f64>> = BTreeMap::new();
    for (id, s) in series {
        let route = routes.get(id).ok_or_else(|| Error::Format {
            what: "route table",
            detail: format!("no coordinates for route {id}"),
        })?;
        if let Some(c) = spec.try_cell_of(route.origin) {
            per_cell.entry(c).or_default().push(avg_surge_multiplier(s)?);
        }
    }
    Ok(per_cell
        .into_iter()
        .map(|(cell, v)| AreaSurgeStats {
            cell,
            avg_multiplier: v.iter().sum::<f64>() / v.len() as f64,
            route_count: v.len(),
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Heatmap {
    pub spec: GridSpec,
    /// Row-major raster; `None` where no route leaves the cell.
    pub values: Vec<Option<f64>>,
    pub bin_width: f64,
    /// `(lower edge, count)` of area averages, ascending.
    pub histogram: Vec<(f64, usize)>,
    pub areas: usize,
    pub surging_fraction: f64,
}

impl Heatmap {
    pub fn get(&self, c: CellIndex) -> Option<f64> {
        self.spec
            .contains_cell(c)
            .then(|| self.values[self.spec.linear_index(c)])
            .flatten()
    }

    /// `row,col,lat,lon,avg_multiplier` for every populated cell.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["row", "col", "lat", "lon", "avg_multiplier"])?;
        for row in 0..self.spec.n_rows {
            for col in 0..self.spec.n_cols {
                let c = CellIndex::new(row, col);
                if let Some(v) = self.get(c) {
                    let p = self.spec.cell_center(c);
                    w.write_record([
                        row.to_string(),
                        col.to_string(),
                        format!("{:.6}", p.lat),
                        format!("{:.6}", p.lon),
                        v.to_string(),
                    ])?;
                }
            }
        }
        w.flush().map_err(|e| Error::io("<heatmap>", e))
    }
}

pub fn surge_heatmap(stats: &[AreaSurgeStats], spec: &GridSpec, bin_width: f64) -> Result<Heatmap> {
    if !(bin_width > 0.0 && bin_width.is_finite()) {
        return Err(Error::InvalidArgument("histogram bin width must be positive".into()));
    }
    let mut values = vec![None; spec.cell_count()];
    let mut bins: BTreeMap<i64, usize> = BTreeMap::new();
    let mut surging = 0;
    for s in stats {
        if !spec.contains_cell(s.cell) {
            return Err(Error::UnknownCell(s.cell));
        }
        values[spec.linear_index(s.cell)] = Some(s.avg_multiplier);
        // small slack so exact bin edges are not split by representation error
        let b = ((s.avg_multiplier - 1.0) / bin_width + 1e-9).floor() as i64;
        *bins.entry(b).or_insert(0) += 1;
        surging += is_surging(s.avg_multiplier) as usize;
    }
    Ok(Heatmap {
        spec: *spec,
        values,
        bin_width,
        histogram: bins.into_iter().map(|(b, n)| (1.0 + b as f64 * bin_width, n)).collect(),
        areas: stats.len(),
        surging_fraction: if stats.is_empty() {
            0.0
        } else {
            surging as f64 / stats.len() as f64
        },
    })
}
