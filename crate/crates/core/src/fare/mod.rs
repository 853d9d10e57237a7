//! Per-journey price estimates for both providers and the winner decision.

mod engine;
mod fallback;

pub use engine::{EngineConfig, FareEngine, YellowEstimate};
pub use fallback::FallbackModel;

use std::fmt;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::geo::LatLon;
use crate::grid::CellIndex;
use crate::money::Cents;

const KM_PER_MILE: f64 = 1.609344;

/// Competitor tariff. Rates are stored per kilometre.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RateCard {
    pub per_km: f64,
    pub per_minute: f64,
    #[serde(default)]
    pub minimum_fare: f64,
    #[serde(default = "default_cap")]
    pub multiplier_cap: f64,
}

fn default_cap() -> f64 {
    3.0
}

impl RateCard {
    /// UberX New York: $2.15 per mile plus $0.40 per minute.
    pub fn uberx_nyc() -> Self {
        RateCard {
            per_km: 2.15 / KM_PER_MILE,
            per_minute: 0.40,
            minimum_fare: 0.0,
            multiplier_cap: 3.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let rates = [self.per_km, self.per_minute, self.minimum_fare];
        if rates.iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
            return Err(Error::Config("rate card rates must be finite and non-negative".into()));
        }
        if !(self.multiplier_cap >= 1.0 && self.multiplier_cap.is_finite()) {
            return Err(Error::Config("multiplier_cap must be at least 1".into()));
        }
        Ok(())
    }
}

impl Default for RateCard {
    fn default() -> Self {
        RateCard::uberx_nyc()
    }
}

/// Unsurged competitor price in dollars.
pub fn estimate_uber_base(distance_km: f64, duration_min: f64, card: &RateCard) -> f64 {
    let metered = card.per_km * distance_km.max(0.0) + card.per_minute * duration_min.max(0.0);
    metered.max(card.minimum_fare)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provider {
    Yellow,
    Uber,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QuoteSource {
    Historical,
    Synthetic,
    Replay,
    Fallback,
}

/// A price range in dollars. Serialized amounts are rounded to cents.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PriceQuote {
    pub provider: Provider,
    #[serde(serialize_with = "as_cents")]
    pub min: f64,
    #[serde(serialize_with = "as_cents")]
    pub max: f64,
    #[serde(serialize_with = "as_cents")]
    pub mean: f64,
    pub multiplier: f64,
    pub source: QuoteSource,
}

fn as_cents<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    Cents::from_dollars(*v).serialize(s)
}

impl PriceQuote {
    pub fn point(provider: Provider, price: f64, source: QuoteSource) -> Self {
        PriceQuote {
            provider,
            min: price,
            max: price,
            mean: price,
            multiplier: 1.0,
            source,
        }
    }

    /// Quote from a `[min, max]` estimate; the point price is the midpoint.
    pub fn range(provider: Provider, min: f64, max: f64, multiplier: f64, source: QuoteSource) -> Result<Self> {
        if !(min.is_finite() && max.is_finite() && min <= max) {
            return Err(Error::QuoteUnavailable(format!("invalid price range [{min}, {max}]")));
        }
        let mean = if min == max { min } else { (min + max) / 2.0 };
        Ok(PriceQuote {
            provider,
            min,
            max,
            mean: mean.clamp(min, max),
            multiplier,
            source,
        })
    }

    pub fn mean_cents(&self) -> Cents {
        Cents::from_dollars(self.mean)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Winner {
    Yellow,
    Uber,
    Tie,
}

impl Winner {
    /// Decision on `delta = yellow - uber` at cent precision.
    pub fn from_delta(delta: Cents) -> Winner {
        match delta.0.signum() {
            -1 => Winner::Yellow,
            1 => Winner::Uber,
            _ => Winner::Tie,
        }
    }

    /// One-letter code used in hourly stripes.
    pub fn letter(self) -> char {
        match self {
            Winner::Yellow => 'Y',
            Winner::Uber => 'B',
            Winner::Tie => 'T',
        }
    }
}

impl fmt::Display for Winner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Winner::Yellow => "yellow",
            Winner::Uber => "uber",
            Winner::Tie => "tie",
        })
    }
}

/// Cent-rounded `yellow - uber` and the resulting winner.
pub fn decide(yellow: &PriceQuote, uber: &PriceQuote) -> (Winner, Cents) {
    let delta = yellow.mean_cents() - uber.mean_cents();
    (Winner::from_delta(delta), delta)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WinnerTally {
    pub yellow: u64,
    pub uber: u64,
    pub tie: u64,
}

impl WinnerTally {
    pub fn add(&mut self, w: Winner) {
        match w {
            Winner::Yellow => self.yellow += 1,
            Winner::Uber => self.uber += 1,
            Winner::Tie => self.tie += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.yellow + self.uber + self.tie
    }

    /// Strict majority between the two providers; `None` when nothing was counted.
    pub fn majority(&self) -> Option<Winner> {
        if self.total() == 0 {
            return None;
        }
        Some(match self.yellow.cmp(&self.uber) {
            std::cmp::Ordering::Greater => Winner::Yellow,
            std::cmp::Ordering::Less => Winner::Uber,
            std::cmp::Ordering::Equal => Winner::Tie,
        })
    }
}

/// Everything a competitor price source may need to produce a quote.
#[derive(Debug, Clone, PartialEq)]
pub struct QuoteRequest {
    pub origin: LatLon,
    pub destination: LatLon,
    pub time: DateTime<Utc>,
    /// Unsurged route price from the rate card.
    pub base_price: f64,
    /// Explicit route identifier for replay lookups, when the caller knows it.
    pub route_id: Option<String>,
}

/// Source of competitor `[min, max]` estimates.
pub trait PriceProvider: Send + Sync {
    fn quote(&self, req: &QuoteRequest) -> Result<PriceQuote>;
}

/// Always returns the same range, scaled by nothing. Useful as a stand-in.
#[derive(Debug, Clone, Copy)]
pub struct FixedRangeProvider {
    pub min: f64,
    pub max: f64,
}

impl PriceProvider for FixedRangeProvider {
    fn quote(&self, _req: &QuoteRequest) -> Result<PriceQuote> {
        PriceQuote::range(Provider::Uber, self.min, self.max, 1.0, QuoteSource::Synthetic)
    }
}

pub fn quote_uber(provider: &dyn PriceProvider, req: &QuoteRequest) -> Result<PriceQuote> {
    let q = provider.quote(req)?;
    PriceQuote::range(Provider::Uber, q.min, q.max, q.multiplier, q.source)
}

/// A journey endpoint with the grid cell it resolved to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Endpoint {
    pub lat: f64,
    pub lon: f64,
    pub cell: CellIndex,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonResult {
    pub origin: Endpoint,
    pub destination: Endpoint,
    pub yellow: PriceQuote,
    pub uber: PriceQuote,
    pub winner: Winner,
    /// `yellow - uber`, cents.
    pub delta: Cents,
    /// What the user saves by following the winner.
    pub savings: Cents,
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn two_miles_ten_minutes_costs_830() {
        let base = estimate_uber_base(2.0 * KM_PER_MILE, 10.0, &RateCard::uberx_nyc());
        assert_eq!(Cents::from_dollars(base), Cents(830));
        assert!((base - 8.30).abs() < 1e-12);
    }

    #[test]
    fn base_fare_edges() {
        let card = RateCard::uberx_nyc();
        assert_eq!(estimate_uber_base(0.0, 0.0, &card), 0.0);
        let hand = RateCard { per_km: 1.3360, ..card };
        assert!((estimate_uber_base(5.0, 12.0, &hand) - 11.48).abs() < 1e-9);
        let floored = RateCard {
            minimum_fare: 8.0,
            ..card
        };
        assert_eq!(estimate_uber_base(0.1, 0.1, &floored), 8.0);
    }

    #[test]
    fn range_mean_is_midpoint() {
        let q = PriceQuote::range(Provider::Uber, 8.0, 10.0, 1.0, QuoteSource::Replay).unwrap();
        assert_eq!(q.mean, 9.0);
        assert!(PriceQuote::range(Provider::Uber, 10.0, 8.0, 1.0, QuoteSource::Replay).is_err());
    }

    #[test]
    fn winner_follows_delta_sign() {
        let y = PriceQuote::point(Provider::Yellow, 10.0, QuoteSource::Historical);
        let u = PriceQuote::point(Provider::Uber, 8.0, QuoteSource::Synthetic);
        assert_eq!(decide(&y, &u), (Winner::Uber, Cents(200)));
        let u = PriceQuote::point(Provider::Uber, 9.0, QuoteSource::Synthetic);
        let y = PriceQuote::point(Provider::Yellow, 9.0, QuoteSource::Historical);
        assert_eq!(decide(&y, &u), (Winner::Tie, Cents(0)));
    }

    #[test]
    fn quote_serializes_as_decimal_strings() {
        let q = PriceQuote::range(Provider::Uber, 24.705, 27.3105, 1.0, QuoteSource::Synthetic).unwrap();
        let v = serde_json::to_value(q).unwrap();
        assert_eq!(v["min"], "24.71");
        assert_eq!(v["max"], "27.31");
        assert_eq!(v["provider"], "uber");
        assert_eq!(v["source"], "synthetic");
    }

    #[test]
    fn tally_majority() {
        let mut t = WinnerTally::default();
        assert_eq!(t.majority(), None);
        t.add(Winner::Tie);
        assert_eq!(t.majority(), Some(Winner::Tie));
        t.add(Winner::Uber);
        assert_eq!(t.majority(), Some(Winner::Uber));
        t.add(Winner::Yellow);
        t.add(Winner::Yellow);
        assert_eq!(t.majority(), Some(Winner::Yellow));
    }

    proptest! {
        #[test]
        fn range_invariant_holds(a in 0.0f64..1e6, b in 0.0f64..1e6) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let q = PriceQuote::range(Provider::Uber, lo, hi, 1.0, QuoteSource::Synthetic).unwrap();
            prop_assert!(q.min <= q.mean && q.mean <= q.max);
        }

        #[test]
        fn winner_is_shift_invariant(y in 0i64..100_000, u in 0i64..100_000, c in -5_000i64..5_000) {
            let q = |p: Provider, cents: i64| PriceQuote::point(p, cents as f64 / 100.0, QuoteSource::Historical);
            let (w0, d0) = decide(&q(Provider::Yellow, y), &q(Provider::Uber, u));
            let (w1, d1) = decide(&q(Provider::Yellow, y + c), &q(Provider::Uber, u + c));
            prop_assert_eq!(w0, w1);
            prop_assert_eq!(d0, d1);
        }

        #[test]
        fn base_is_monotone(
            d in 0.0f64..100.0, t in 0.0f64..200.0, dd in 0.0f64..10.0, dt in 0.0f64..30.0,
            k in 0.0f64..5.0, m in 0.0f64..2.0, dk in 0.0f64..1.0, dm in 0.0f64..1.0,
        ) {
            let c = RateCard { per_km: k, per_minute: m, minimum_fare: 0.0, multiplier_cap: 3.0 };
            let c2 = RateCard { per_km: k + dk, per_minute: m + dm, ..c };
            let p = estimate_uber_base(d, t, &c);
            prop_assert!(estimate_uber_base(d + dd, t, &c) >= p);
            prop_assert!(estimate_uber_base(d, t + dt, &c) >= p);
            prop_assert!(estimate_uber_base(d, t, &c2) >= p);
        }
    }
}
