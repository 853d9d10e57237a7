use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::TripRecord;

/// Linear yellow-fare model `total = intercept + per_km * km + per_minute * min`
/// for routes with no history.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FallbackModel {
    pub intercept: f64,
    pub per_km: f64,
    pub per_minute: f64,
}

impl FallbackModel {
    /// Ordinary least squares over every record.
    pub fn fit(records: &[TripRecord]) -> Result<Self> {
        let rows: Vec<_> = records
            .iter()
            .map(|r| (r.trip_distance_km, r.duration_min(), r.total_amount.dollars()))
            .collect();
        Self::fit_rows(&rows)
    }

    /// Fit on `(km, minutes, total dollars)` triples.
    pub fn fit_rows(rows: &[(f64, f64, f64)]) -> Result<Self> {
        if rows.len() < 3 {
            return Err(Error::InsufficientData(format!(
                "fallback fit needs at least 3 trips, got {}",
                rows.len()
            )));
        }
        let x = DMatrix::from_fn(rows.len(), 3, |i, j| match j {
            0 => 1.0,
            1 => rows[i].0,
            _ => rows[i].1,
        });
        let y = DVector::from_iterator(rows.len(), rows.iter().map(|r| r.2));
        let coef = x
            .svd(true, true)
            .solve(&y, 1e-12)
            .map_err(|e| Error::InsufficientData(format!("fallback fit failed: {e}")))?;
        let m = FallbackModel {
            intercept: coef[0],
            per_km: coef[1],
            per_minute: coef[2],
        };
        if ![m.intercept, m.per_km, m.per_minute].iter().all(|c| c.is_finite()) {
            return Err(Error::InsufficientData("fallback fit is degenerate".into()));
        }
        Ok(m)
    }

    pub fn predict(&self, km: f64, minutes: f64) -> f64 {
        self.intercept + self.per_km * km + self.per_minute * minutes
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_plane() {
        let truth = FallbackModel {
            intercept: 2.5,
            per_km: 1.6,
            per_minute: 0.3,
        };
        let rows: Vec<_> = (0..50)
            .map(|i| {
                let km = i as f64 * 0.37;
                let min = (i * 7 % 13) as f64 + 1.0;
                (km, min, truth.predict(km, min))
            })
            .collect();
        let fit = FallbackModel::fit_rows(&rows).unwrap();
        assert!((fit.intercept - 2.5).abs() < 1e-9);
        assert!((fit.per_km - 1.6).abs() < 1e-9);
        assert!((fit.per_minute - 0.3).abs() < 1e-9);
    }

    #[test]
    fn too_few_rows() {
        assert!(FallbackModel::fit_rows(&[(1.0, 1.0, 1.0)]).is_err());
    }
}
