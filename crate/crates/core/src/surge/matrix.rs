use chrono::{DateTime, Utc};

use super::{is_surging, SurgeSeries};
use crate::error::{Error, Result};
use crate::time::{hour_of_week, HOURS_PER_WEEK};

/// Binary route-by-slot surge indicators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurgeMatrix {
    route_ids: Vec<String>,
    slots: usize,
    cells: Vec<bool>,
}

impl SurgeMatrix {
    pub fn from_rows(route_ids: Vec<String>, rows: Vec<Vec<bool>>) -> Result<Self> {
        if route_ids.len() != rows.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} route ids for {} rows",
                route_ids.len(),
                rows.len()
            )));
        }
        let slots = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != slots) {
            return Err(Error::DimensionMismatch("surge rows have unequal lengths".into()));
        }
        Ok(SurgeMatrix {
            route_ids,
            slots,
            cells: rows.concat(),
        })
    }

    /// Hour-of-week matrix: a slot is surging if any sample in it is.
    pub fn weekly<'a>(series: impl IntoIterator<Item = &'a SurgeSeries>) -> Result<Self> {
        Self::from_series(series, HOURS_PER_WEEK, hour_of_week)
    }

    pub fn from_series<'a>(
        series: impl IntoIterator<Item = &'a SurgeSeries>,
        slots: usize,
        slot_of: impl Fn(DateTime<Utc>) -> usize,
    ) -> Result<Self> {
        let mut ids = Vec::new();
        let mut cells = Vec::new();
        for s in series {
            if !(s.base_price > 0.0) {
                return Err(Error::InvalidBase(s.base_price));
            }
            let mut row = vec![false; slots];
            for &(t, price) in &s.samples {
                let slot = slot_of(t);
                if slot >= slots {
                    return Err(Error::DimensionMismatch(format!("slot {slot} beyond {slots}")));
                }
                row[slot] |= is_surging(price / s.base_price);
            }
            ids.push(s.route_id.clone());
            cells.extend(row);
        }
        Ok(SurgeMatrix {
            route_ids: ids,
            slots,
            cells,
        })
    }

    pub fn route_ids(&self) -> &[String] {
        &self.route_ids
    }

    pub fn n_routes(&self) -> usize {
        self.route_ids.len()
    }

    pub fn n_slots(&self) -> usize {
        self.slots
    }

    pub fn get(&self, route: usize, slot: usize) -> bool {
        self.cells[route * self.slots + slot]
    }

    pub fn set(&mut self, route: usize, slot: usize, v: bool) {
        self.cells[route * self.slots + slot] = v;
    }

    /// Unweighted share of surging (route, slot) pairs.
    pub fn plain_fraction(&self) -> f64 {
        if self.cells.is_empty() {
            return 0.0;
        }
        self.cells.iter().filter(|&&c| c).count() as f64 / self.cells.len() as f64
    }
}

/// Share of trips bought at surge, weighting each slot by its purchase proxy `p`.
pub fn surge_fraction(s: &SurgeMatrix, p: &[f64]) -> Result<f64> {
    if p.len() != s.n_slots() {
        return Err(Error::DimensionMismatch(format!(
            "matrix has {} slots but histogram has {}",
            s.n_slots(),
            p.len()
        )));
    }
    if p.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
        return Err(Error::InvalidArgument(
            "slot weights must be finite and non-negative".into(),
        ));
    }
    let total: f64 = p.iter().sum();
    if total <= 0.0 {
        return Err(Error::DegenerateWeights);
    }
    if s.n_routes() == 0 {
        return Err(Error::EmptyInput("surge matrix has no routes"));
    }
    let mut num = 0.0;
    for i in 0..s.n_routes() {
        for (t, w) in p.iter().enumerate() {
            if s.get(i, t) {
                num += w;
            }
        }
    }
    Ok(num / (s.n_routes() as f64 * total))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[u8]]) -> SurgeMatrix {
        SurgeMatrix::from_rows(
            (0..rows.len()).map(|i| i.to_string()).collect(),
            rows.iter().map(|r| r.iter().map(|&v| v == 1).collect()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn hand_example() {
        assert_eq!(surge_fraction(&m(&[&[1, 0], &[0, 1]]), &[1.0, 3.0]).unwrap(), 0.5);
    }

    #[test]
    fn bounds() {
        assert_eq!(surge_fraction(&m(&[&[0, 0, 0]]), &[1.0, 2.0, 3.0]).unwrap(), 0.0);
        assert_eq!(surge_fraction(&m(&[&[1, 1, 1]]), &[1.0, 2.0, 3.0]).unwrap(), 1.0);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            surge_fraction(&m(&[&[1, 0]]), &[0.0, 0.0]),
            Err(Error::DegenerateWeights)
        ));
        assert!(matches!(
            surge_fraction(&m(&[&[1, 0]]), &[1.0]),
            Err(Error::DimensionMismatch(_))
        ));
    }
}
