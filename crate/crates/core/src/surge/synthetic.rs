//! Synthetic competitor quotes driven by a per-area demand process.
//!
//! Every (cell, hour) pair gets an independent surge state, seeded from the
//! model seed and the pair itself, so quotes are reproducible without any
//! shared mutable state. A pair surges with probability
//! `surge_probability * cell_weight * hourly_profile[local hour]`; a surging
//! pair draws an exponential excess demand that is floored to the multiplier
//! step and capped.

use std::collections::HashMap;

use chrono::{DateTime, Timelike, Utc};
use chrono_tz::America::New_York;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fare::{PriceProvider, PriceQuote, Provider, QuoteRequest, QuoteSource};
use crate::grid::{CellIndex, GridSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DemandModel {
    pub seed: u64,
    /// Chance that an area surges in a given hour, before weighting.
    pub surge_probability: f64,
    /// Rate of the exponential excess demand; larger means milder surges.
    pub excess_rate: f64,
    pub step: f64,
    pub cap: f64,
    /// Relative width of the returned `[min, max]` range.
    pub spread: f64,
    /// 24 weights by local hour; empty means flat.
    pub hourly_profile: Vec<f64>,
    /// Share of the destination area's demand in the multiplier; 0 prices on origin demand only.
    pub destination_weight: f64,
    /// Skip the demand process and always use this multiplier.
    pub pinned_multiplier: Option<f64>,
    pub grid: GridSpec,
    #[serde(skip)]
    pub cell_weights: HashMap<CellIndex, f64>,
}

impl Default for DemandModel {
    fn default() -> Self {
        DemandModel {
            seed: 0x5eed,
            surge_probability: 0.25,
            excess_rate: 2.5,
            step: 0.1,
            cap: 3.0,
            spread: 0.1,
            hourly_profile: Vec::new(),
            destination_weight: 0.0,
            pinned_multiplier: None,
            grid: GridSpec::analysis(),
            cell_weights: HashMap::new(),
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl DemandModel {
    /// A model that never surges.
    pub fn quiet() -> Self {
        DemandModel {
            surge_probability: 0.0,
            ..Default::default()
        }
    }

    pub fn pinned(multiplier: f64) -> Self {
        DemandModel {
            pinned_multiplier: Some(multiplier),
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(format!("demand model: {m}")));
        if !(0.0..=1.0).contains(&self.surge_probability) {
            return bad("surge_probability must be in [0, 1]");
        }
        if !(self.excess_rate > 0.0 && self.excess_rate.is_finite()) {
            return bad("excess_rate must be positive");
        }
        if !(self.step > 0.0 && self.step.is_finite()) {
            return bad("step must be positive");
        }
        if !(self.cap >= 1.0 && self.cap.is_finite()) {
            return bad("cap must be at least 1");
        }
        if !(0.0..2.0).contains(&self.spread) {
            return bad("spread must be in [0, 2)");
        }
        if !self.hourly_profile.is_empty() && self.hourly_profile.len() != 24 {
            return bad("hourly_profile needs 24 entries");
        }
        if self
            .hourly_profile
            .iter()
            .chain(self.cell_weights.values())
            .any(|w| !(*w >= 0.0))
        {
            return bad("weights must be non-negative");
        }
        if !(0.0..=1.0).contains(&self.destination_weight) {
            return bad("destination_weight must be in [0, 1]");
        }
        if let Some(m) = self.pinned_multiplier {
            if !(m >= 1.0 && m.is_finite()) {
                return bad("pinned_multiplier must be at least 1");
            }
        }
        Ok(())
    }

    /// Number of multiplier steps up to the cap.
    pub fn levels(&self) -> u32 {
        ((self.cap - 1.0) / self.step + 1e-9).floor() as u32
    }

    /// Surge probability for an area in a given hour.
    pub fn surge_chance(&self, cell: CellIndex, t: DateTime<Utc>) -> f64 {
        let w = self.cell_weights.get(&cell).copied().unwrap_or(1.0);
        let h = if self.hourly_profile.is_empty() {
            1.0
        } else {
            self.hourly_profile[t.with_timezone(&New_York).hour() as usize]
        };
        (self.surge_probability * w * h).clamp(0.0, 1.0)
    }

    /// Excess demand of an area for the hour containing `t`; zero when calm.
    pub fn excess(&self, cell: CellIndex, t: DateTime<Utc>) -> f64 {
        let hour = t.timestamp().div_euclid(3600) as u64;
        let key = splitmix64(splitmix64(splitmix64(self.seed) ^ ((cell.row as u64) << 32 | cell.col as u64)) ^ hour);
        let mut rng = ChaCha8Rng::seed_from_u64(key);
        let u: f64 = rng.random();
        let v: f64 = rng.random();
        if u < self.surge_chance(cell, t) {
            -(1.0 - v).ln() / self.excess_rate
        } else {
            0.0
        }
    }

    /// Multiplier step index (0 = no surge) for a journey between two areas.
    pub fn level(&self, origin: Option<CellIndex>, destination: Option<CellIndex>, t: DateTime<Utc>) -> u32 {
        let e = |c: Option<CellIndex>| c.map_or(0.0, |c| self.excess(c, t));
        let w = self.destination_weight;
        let x = if w > 0.0 {
            (1.0 - w) * e(origin) + w * e(destination)
        } else {
            e(origin)
        };
        ((x / self.step).floor() as u32).min(self.levels())
    }

    pub fn multiplier(&self, origin: Option<CellIndex>, destination: Option<CellIndex>, t: DateTime<Utc>) -> f64 {
        if let Some(m) = self.pinned_multiplier {
            return m.min(self.cap);
        }
        let k = self.level(origin, destination, t);
        if k == self.levels() {
            self.cap
        } else {
            1.0 + k as f64 * self.step
        }
    }
}

/// Long-run probability of each multiplier level, as `(multiplier, probability)`,
/// for an area with surge chance `q` and no destination term.
pub fn stationary_distribution(model: &DemandModel, q: f64) -> Vec<(f64, f64)> {
    let k_max = model.levels();
    let s = model.step;
    let tail = |k: u32| (-model.excess_rate * k as f64 * s).exp();
    (0..=k_max)
        .map(|k| {
            let m = if k == k_max { model.cap } else { 1.0 + k as f64 * s };
            let p = if k_max == 0 {
                1.0
            } else if k == 0 {
                1.0 - q + q * (1.0 - tail(1))
            } else if k == k_max {
                q * tail(k)
            } else {
                q * (tail(k) - tail(k + 1))
            };
            (m, p)
        })
        .collect()
}

/// [`PriceProvider`] backed by a [`DemandModel`].
#[derive(Debug, Clone)]
pub struct SyntheticProvider {
    model: DemandModel,
}

impl SyntheticProvider {
    pub fn new(model: DemandModel) -> Result<Self> {
        model.validate()?;
        Ok(SyntheticProvider { model })
    }

    pub fn model(&self) -> &DemandModel {
        &self.model
    }
}

impl PriceProvider for SyntheticProvider {
    fn quote(&self, req: &QuoteRequest) -> Result<PriceQuote> {
        if !(req.base_price >= 0.0 && req.base_price.is_finite()) {
            return Err(Error::QuoteUnavailable(format!(
                "invalid base price {}",
                req.base_price
            )));
        }
        let g = &self.model.grid;
        let m = self
            .model
            .multiplier(g.try_cell_of(req.origin), g.try_cell_of(req.destination), req.time);
        let price = m * req.base_price;
        let half = price * self.model.spread / 2.0;
        PriceQuote::range(Provider::Uber, price - half, price + half, m, QuoteSource::Synthetic)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geo::LatLon;
    use chrono::TimeZone;

    fn req(base: f64, hour: u32) -> QuoteRequest {
        QuoteRequest {
            origin: LatLon::new(40.75, -73.99),
            destination: LatLon::new(40.70, -74.0),
            time: Utc.with_ymd_and_hms(2015, 5, 5, hour, 0, 0).unwrap(),
            base_price: base,
            route_id: None,
        }
    }

    #[test]
    fn quiet_model_returns_base() {
        let p = SyntheticProvider::new(DemandModel::quiet()).unwrap();
        for h in 0..24 {
            let q = p.quote(&req(8.30, h)).unwrap();
            assert_eq!(q.multiplier, 1.0);
            assert!((q.mean - 8.30).abs() < 1e-12);
        }
    }

    #[test]
    fn pinned_multiplier_and_spread() {
        let p = SyntheticProvider::new(DemandModel::pinned(1.0)).unwrap();
        let q = p.quote(&req(10.0, 3)).unwrap();
        assert_eq!((q.min, q.max, q.mean), (9.5, 10.5, 10.0));
    }

    #[test]
    fn deterministic() {
        let p = SyntheticProvider::new(DemandModel::default()).unwrap();
        for h in 0..24 {
            assert_eq!(p.quote(&req(12.0, h)).unwrap(), p.quote(&req(12.0, h)).unwrap());
        }
    }

    #[test]
    fn multipliers_stay_in_range() {
        let model = DemandModel {
            surge_probability: 1.0,
            excess_rate: 0.3,
            ..Default::default()
        };
        let t0 = Utc.with_ymd_and_hms(2015, 5, 4, 0, 0, 0).unwrap();
        let mut hit_cap = false;
        for i in 0..2000 {
            let m = model.multiplier(
                Some(CellIndex::new(i % 50, i / 50)),
                None,
                t0 + chrono::Duration::hours(i as i64),
            );
            assert!((1.0..=3.0).contains(&m));
            hit_cap |= m == 3.0;
        }
        assert!(hit_cap);
    }

    #[test]
    fn stationary_mass_sums_to_one() {
        let d = stationary_distribution(&DemandModel::default(), 0.25);
        assert_eq!(d.len(), 21);
        assert!((d.iter().map(|x| x.1).sum::<f64>() - 1.0).abs() < 1e-12);
        assert_eq!(d[20].0, 3.0);
    }

    #[test]
    fn config_is_validated() {
        let bad = DemandModel {
            hourly_profile: vec![1.0; 5],
            ..Default::default()
        };
        assert!(SyntheticProvider::new(bad).is_err());
        let bad = DemandModel {
            surge_probability: 1.5,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }
}
