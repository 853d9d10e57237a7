use std::path::Path;
use std::sync::Arc;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use super::{
    decide, estimate_uber_base, quote_uber, ComparisonResult, Endpoint, FallbackModel, PriceProvider, PriceQuote,
    Provider, QuoteRequest, QuoteSource, RateCard,
};
use crate::error::{Error, Result};
use crate::geo::{haversine_m, LatLon};
use crate::grid::{CellIndex, OdIndex};

/// Rate card plus the parameters used for routes without history.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EngineConfig {
    pub rate_card: RateCard,
    /// Trips a bucket needs before its mean is trusted over the fallback.
    pub min_samples: u64,
    /// Road distance over straight-line distance.
    pub circuity: f64,
    pub speed_kmh: f64,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            rate_card: RateCard::uberx_nyc(),
            min_samples: 1,
            circuity: 1.3,
            speed_kmh: 18.0,
        }
    }
}

impl EngineConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let c: EngineConfig = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Self::from_toml_str(&std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?)
    }

    pub fn validate(&self) -> Result<()> {
        self.rate_card.validate()?;
        if self.min_samples == 0 {
            return Err(Error::Config("min_samples must be at least 1".into()));
        }
        if !(self.circuity >= 1.0 && self.circuity.is_finite()) {
            return Err(Error::Config("circuity must be at least 1".into()));
        }
        if !(self.speed_kmh > 0.0 && self.speed_kmh.is_finite()) {
            return Err(Error::Config("speed_kmh must be positive".into()));
        }
        Ok(())
    }
}

/// Yellow quote plus the route length and time it was priced on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct YellowEstimate {
    pub quote: PriceQuote,
    pub origin_cell: CellIndex,
    pub destination_cell: CellIndex,
    pub distance_km: f64,
    pub duration_min: f64,
}

/// Read-only comparison engine over a frozen OD index.
pub struct FareEngine {
    index: OdIndex,
    config: EngineConfig,
    fallback: Option<FallbackModel>,
    provider: Arc<dyn PriceProvider>,
}

impl FareEngine {
    pub fn new(
        index: OdIndex,
        config: EngineConfig,
        fallback: Option<FallbackModel>,
        provider: Arc<dyn PriceProvider>,
    ) -> Result<Self> {
        config.validate()?;
        Ok(FareEngine {
            index,
            config,
            fallback,
            provider,
        })
    }

    pub fn index(&self) -> &OdIndex {
        &self.index
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    pub fn fallback(&self) -> Option<&FallbackModel> {
        self.fallback.as_ref()
    }

    pub fn estimate_yellow(&self, origin: LatLon, destination: LatLon) -> Result<YellowEstimate> {
        let spec = self.index.spec();
        let o = spec.cell_of(origin)?;
        let d = spec.cell_of(destination)?;
        if let Some(s) = self.index.get(o, d).filter(|s| s.trip_count >= self.config.min_samples) {
            return Ok(YellowEstimate {
                quote: PriceQuote::point(Provider::Yellow, s.mean_total, QuoteSource::Historical),
                origin_cell: o,
                destination_cell: d,
                distance_km: s.mean_distance_km,
                duration_min: s.mean_duration_min,
            });
        }
        let model = self
            .fallback
            .ok_or_else(|| Error::QuoteUnavailable(format!("no history for {o} -> {d} and no fallback model")))?;
        let km = haversine_m(origin, destination) / 1000.0 * self.config.circuity;
        let minutes = km / self.config.speed_kmh * 60.0;
        Ok(YellowEstimate {
            quote: PriceQuote::point(Provider::Yellow, model.predict(km, minutes), QuoteSource::Fallback),
            origin_cell: o,
            destination_cell: d,
            distance_km: km,
            duration_min: minutes,
        })
    }

    pub fn compare(&self, origin: LatLon, destination: LatLon, time: DateTime<Utc>) -> Result<ComparisonResult> {
        let y = self.estimate_yellow(origin, destination)?;
        let req = QuoteRequest {
            origin,
            destination,
            time,
            base_price: estimate_uber_base(y.distance_km, y.duration_min, &self.config.rate_card),
            route_id: None,
        };
        let uber = quote_uber(self.provider.as_ref(), &req)?;
        let (winner, delta) = decide(&y.quote, &uber);
        Ok(ComparisonResult {
            origin: Endpoint {
                lat: origin.lat,
                lon: origin.lon,
                cell: y.origin_cell,
            },
            destination: Endpoint {
                lat: destination.lat,
                lon: destination.lon,
                cell: y.destination_cell,
            },
            yellow: y.quote,
            uber,
            winner,
            delta,
            savings: delta.abs(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fare::{FixedRangeProvider, Winner};
    use crate::grid::GridSpec;
    use crate::ingest::{PaymentType, TripRecord};
    use crate::money::Cents;
    use chrono::{Duration, TimeZone};

    fn trip(spec: &GridSpec, o: CellIndex, d: CellIndex, total: i64, km: f64, secs: i64) -> TripRecord {
        let t0 = Utc.with_ymd_and_hms(2013, 5, 1, 12, 0, 0).unwrap();
        TripRecord {
            trip_id: String::new(),
            pickup_time: t0,
            dropoff_time: t0 + Duration::seconds(secs),
            pickup: spec.cell_center(o),
            dropoff: spec.cell_center(d),
            trip_distance_km: km,
            fare_amount: Cents(total),
            tip_amount: Cents(0),
            total_amount: Cents(total),
            payment_type: PaymentType::Card,
        }
    }

    fn engine(trips: &[TripRecord], fallback: Option<FallbackModel>, min_samples: u64) -> FareEngine {
        let g = GridSpec::app();
        FareEngine::new(
            OdIndex::build(trips, g),
            EngineConfig {
                min_samples,
                ..Default::default()
            },
            fallback,
            Arc::new(FixedRangeProvider { min: 8.0, max: 10.0 }),
        )
        .unwrap()
    }

    const O: CellIndex = CellIndex::new(10, 10);
    const D: CellIndex = CellIndex::new(50, 60);

    #[test]
    fn historical_mean() {
        let g = GridSpec::app();
        let e = engine(
            &[trip(&g, O, D, 800, 2.0, 600), trip(&g, O, D, 1200, 2.0, 600)],
            None,
            1,
        );
        let y = e.estimate_yellow(g.cell_center(O), g.cell_center(D)).unwrap();
        assert_eq!(y.quote.mean, 10.0);
        assert_eq!(y.quote.source, QuoteSource::Historical);
        assert_eq!((y.distance_km, y.duration_min), (2.0, 10.0));
    }

    #[test]
    fn falls_back_below_min_samples() {
        let g = GridSpec::app();
        let model = FallbackModel {
            intercept: 3.0,
            per_km: 1.5,
            per_minute: 0.2,
        };
        let e = engine(&[trip(&g, O, D, 1000, 2.0, 600)], Some(model), 2);
        let (a, b) = (g.cell_center(O), g.cell_center(D));
        let y = e.estimate_yellow(a, b).unwrap();
        assert_eq!(y.quote.source, QuoteSource::Fallback);
        let km = haversine_m(a, b) / 1000.0 * 1.3;
        assert!((y.quote.mean - model.predict(km, km / 18.0 * 60.0)).abs() < 1e-12);

        let none = engine(&[], None, 1);
        assert!(matches!(none.estimate_yellow(a, b), Err(Error::QuoteUnavailable(_))));
    }

    #[test]
    fn history_generated_by_fallback_matches_it() {
        let g = GridSpec::app();
        let model = FallbackModel {
            intercept: 2.5,
            per_km: 1.7,
            per_minute: 0.2,
        };
        let (km, secs) = (3.0, 900);
        let total = Cents::from_dollars(model.predict(km, secs as f64 / 60.0));
        let e = engine(&[trip(&g, O, D, total.0, km, secs)], Some(model), 1);
        let y = e.estimate_yellow(g.cell_center(O), g.cell_center(D)).unwrap();
        assert!((y.quote.mean - model.predict(km, 15.0)).abs() < 0.005);
    }

    #[test]
    fn compare_uses_provider_midpoint() {
        let g = GridSpec::app();
        let e = engine(&[trip(&g, O, D, 1000, 2.0, 600)], None, 1);
        let t = Utc.with_ymd_and_hms(2015, 5, 5, 13, 0, 0).unwrap();
        let r = e.compare(g.cell_center(O), g.cell_center(D), t).unwrap();
        assert_eq!(r.uber.mean, 9.0);
        assert_eq!(r.winner, Winner::Uber);
        assert_eq!(r.delta, Cents(100));
        assert_eq!(r.savings, Cents(100));
    }

    #[test]
    fn out_of_grid_is_reported() {
        let e = engine(&[], None, 1);
        let t = Utc::now();
        assert!(matches!(
            e.compare(LatLon::new(40.0, -74.0), LatLon::new(40.75, -73.99), t),
            Err(Error::OutOfGrid { .. })
        ));
    }

    #[test]
    fn config_toml() {
        let c = EngineConfig::from_toml_str("min_samples = 3\n[rate_card]\nper_km = 1.0\nper_minute = 0.5\n").unwrap();
        assert_eq!(c.min_samples, 3);
        assert_eq!(c.rate_card.multiplier_cap, 3.0);
        assert!(EngineConfig::from_toml_str("circuity = 0.5").is_err());
    }
}
