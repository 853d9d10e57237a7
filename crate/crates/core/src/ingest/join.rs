use std::collections::HashMap;

use super::parse::{ParsedFare, ParsedTrip};
use super::{Reject, RejectReason, Side};

#[derive(Debug, Default)]
pub struct Joined {
    pub pairs: Vec<(ParsedTrip, ParsedFare)>,
    pub rejects: Vec<Reject>,
}

/// One-to-one join on the composite key.
///
/// A key that occurs more than once on either side is never guessed at: every
/// trip and fare row carrying it is rejected as ambiguous.
pub fn join(trips: Vec<ParsedTrip>, fares: Vec<ParsedFare>) -> Joined {
    let mut trip_counts: HashMap<&str, u32> = HashMap::with_capacity(trips.len());
    for t in &trips {
        *trip_counts.entry(t.key.as_str()).or_insert(0) += 1;
    }
    let mut fare_counts: HashMap<&str, u32> = HashMap::with_capacity(fares.len());
    for f in &fares {
        *fare_counts.entry(f.key.as_str()).or_insert(0) += 1;
    }
    let classify = |key: &str, own: &HashMap<&str, u32>, other: &HashMap<&str, u32>| {
        let other_n = other.get(key).copied().unwrap_or(0);
        if own[key] > 1 || other_n > 1 {
            Some(RejectReason::AmbiguousJoin)
        } else if other_n == 0 {
            Some(RejectReason::Unmatched)
        } else {
            None
        }
    };

    let trip_verdict: Vec<_> = trips
        .iter()
        .map(|t| classify(&t.key, &trip_counts, &fare_counts))
        .collect();
    let fare_verdict: Vec<_> = fares
        .iter()
        .map(|f| classify(&f.key, &fare_counts, &trip_counts))
        .collect();
    drop(trip_counts);
    drop(fare_counts);

    let mut out = Joined::default();
    let mut matched_fares: HashMap<String, ParsedFare> = HashMap::new();
    for (f, verdict) in fares.into_iter().zip(fare_verdict) {
        match verdict {
            Some(reason) => out.rejects.push(Reject {
                side: Side::Fares,
                line: f.line,
                reason,
                raw: f.raw,
            }),
            None => {
                matched_fares.insert(f.key.clone(), f);
            }
        }
    }
    for (t, verdict) in trips.into_iter().zip(trip_verdict) {
        match verdict {
            Some(reason) => out.rejects.push(Reject {
                side: Side::Trips,
                line: t.line,
                reason,
                raw: t.raw,
            }),
            None => {
                let f = matched_fares
                    .remove(&t.key)
                    .expect("unique key on both sides has a fare");
                out.pairs.push((t, f));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geo::LatLon;
    use crate::ingest::PaymentType;
    use crate::money::Cents;
    use chrono::Utc;

    fn t(key: &str, line: u64) -> ParsedTrip {
        ParsedTrip {
            line,
            key: key.into(),
            pickup_time: Utc::now(),
            dropoff_time: Utc::now(),
            pickup: LatLon::new(40.7, -73.9),
            dropoff: LatLon::new(40.7, -73.9),
            trip_distance_km: 1.0,
            raw: String::new(),
        }
    }

    fn f(key: &str, line: u64) -> ParsedFare {
        ParsedFare {
            line,
            key: key.into(),
            payment_type: PaymentType::Card,
            fare_amount: Cents(500),
            tip_amount: Cents(0),
            total_amount: Cents(550),
            raw: String::new(),
        }
    }

    #[test]
    fn duplicates_are_ambiguous_on_both_sides() {
        let trips = vec![t("a", 2), t("b", 3), t("b", 4), t("c", 5), t("d", 6)];
        let fares = vec![f("a", 2), f("b", 3), f("c", 4), f("c", 5), f("e", 6)];
        let j = join(trips, fares);
        assert_eq!(j.pairs.len(), 1);
        assert_eq!(j.pairs[0].0.key, "a");
        let count = |side, reason| {
            j.rejects
                .iter()
                .filter(|r| r.side == side && r.reason == reason)
                .count()
        };
        assert_eq!(count(Side::Trips, RejectReason::AmbiguousJoin), 3);
        assert_eq!(count(Side::Fares, RejectReason::AmbiguousJoin), 3);
        assert_eq!(count(Side::Trips, RejectReason::Unmatched), 1);
        assert_eq!(count(Side::Fares, RejectReason::Unmatched), 1);
    }
}
