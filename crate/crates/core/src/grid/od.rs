use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{CellIndex, GridSpec};
use crate::error::{Error, Result};
use crate::fare::WinnerTally;
use crate::ingest::TripRecord;
use crate::money::Cents;

pub type OdKey = (CellIndex, CellIndex);

/// Exact running sums for one origin-destination bucket.
///
/// Everything is integral so merging partial indexes is associative and the
/// result does not depend on trip order.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OdAccumulator {
    pub trip_count: u64,
    pub total_cents: i64,
    pub distance_m: i64,
    pub duration_s: i64,
}

impl OdAccumulator {
    pub fn add(&mut self, r: &TripRecord) {
        self.trip_count += 1;
        self.total_cents += r.total_amount.0;
        self.distance_m += (r.trip_distance_km * 1000.0).round() as i64;
        self.duration_s += r.duration_s();
    }

    pub fn merge(&mut self, other: &OdAccumulator) {
        self.trip_count += other.trip_count;
        self.total_cents += other.total_cents;
        self.distance_m += other.distance_m;
        self.duration_s += other.duration_s;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OdStats {
    pub origin: CellIndex,
    pub destination: CellIndex,
    pub trip_count: u64,
    /// Mean of `total_amount` (fare plus tip and extras), dollars.
    pub mean_total: f64,
    pub mean_distance_km: f64,
    pub mean_duration_min: f64,
}

impl OdStats {
    fn from_acc(key: OdKey, acc: &OdAccumulator) -> Self {
        let n = acc.trip_count as f64;
        OdStats {
            origin: key.0,
            destination: key.1,
            trip_count: acc.trip_count,
            mean_total: acc.total_cents as f64 / n / 100.0,
            mean_distance_km: acc.distance_m as f64 / n / 1000.0,
            mean_duration_min: acc.duration_s as f64 / n / 60.0,
        }
    }
}

/// Everything leaving one origin cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AreaSummary {
    pub origin: CellIndex,
    pub trip_count: u64,
    /// `None` when the origin has no trips.
    pub mean_total: Option<f64>,
    pub destinations: usize,
    /// Filled in by comparison passes that attribute a winner to each journey.
    pub winners: WinnerTally,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OdIndex {
    spec: GridSpec,
    buckets: HashMap<OdKey, OdAccumulator>,
    skipped_out_of_grid: u64,
}

impl OdIndex {
    pub fn new(spec: GridSpec) -> Self {
        OdIndex {
            spec,
            buckets: HashMap::new(),
            skipped_out_of_grid: 0,
        }
    }

    pub(crate) fn from_parts(spec: GridSpec, buckets: HashMap<OdKey, OdAccumulator>, skipped_out_of_grid: u64) -> Self {
        OdIndex {
            spec,
            buckets,
            skipped_out_of_grid,
        }
    }

    pub fn build<'a>(records: impl IntoIterator<Item = &'a TripRecord>, spec: GridSpec) -> Self {
        let mut idx = OdIndex::new(spec);
        for r in records {
            idx.insert(r);
        }
        idx
    }

    /// Partition-and-merge build over a slice; identical to [`OdIndex::build`].
    pub fn par_build(records: &[TripRecord], spec: GridSpec) -> Self {
        records
            .par_chunks(4096)
            .map(|chunk| OdIndex::build(chunk, spec))
            .reduce(
                || OdIndex::new(spec),
                |mut a, b| {
                    a.merge_unchecked(b);
                    a
                },
            )
    }

    /// Returns false when either endpoint is off the grid; the trip is counted as skipped.
    pub fn insert(&mut self, r: &TripRecord) -> bool {
        match (self.spec.try_cell_of(r.pickup), self.spec.try_cell_of(r.dropoff)) {
            (Some(o), Some(d)) => {
                self.buckets.entry((o, d)).or_default().add(r);
                true
            }
            _ => {
                self.skipped_out_of_grid += 1;
                false
            }
        }
    }

    pub fn merge(&mut self, other: OdIndex) -> Result<()> {
        if other.spec != self.spec {
            return Err(Error::InvalidArgument(
                "cannot merge OD indexes built on different grids".into(),
            ));
        }
        self.merge_unchecked(other);
        Ok(())
    }

    fn merge_unchecked(&mut self, other: OdIndex) {
        self.skipped_out_of_grid += other.skipped_out_of_grid;
        for (k, v) in other.buckets {
            self.buckets.entry(k).or_default().merge(&v);
        }
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn skipped_out_of_grid(&self) -> u64 {
        self.skipped_out_of_grid
    }

    pub fn len(&self) -> usize {
        self.buckets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.buckets.is_empty()
    }

    pub fn total_trips(&self) -> u64 {
        self.buckets.values().map(|a| a.trip_count).sum()
    }

    pub fn accumulator(&self, origin: CellIndex, destination: CellIndex) -> Option<&OdAccumulator> {
        self.buckets.get(&(origin, destination))
    }

    pub fn get(&self, origin: CellIndex, destination: CellIndex) -> Option<OdStats> {
        let key = (origin, destination);
        self.buckets.get(&key).map(|acc| OdStats::from_acc(key, acc))
    }

    /// All buckets in `(origin, destination)` order.
    pub fn stats(&self) -> Vec<OdStats> {
        self.sorted_accumulators()
            .into_iter()
            .map(|(k, a)| OdStats::from_acc(k, a))
            .collect()
    }

    pub fn sorted_accumulators(&self) -> Vec<(OdKey, &OdAccumulator)> {
        let mut v: Vec<_> = self.buckets.iter().map(|(k, a)| (*k, a)).collect();
        v.sort_unstable_by_key(|(k, _)| *k);
        v
    }

    pub fn area_outgoing_stats(&self, origin: CellIndex) -> AreaSummary {
        let mut acc = OdAccumulator::default();
        let mut destinations = 0;
        for ((o, _), a) in &self.buckets {
            if *o == origin {
                acc.merge(a);
                destinations += 1;
            }
        }
        AreaSummary {
            origin,
            trip_count: acc.trip_count,
            mean_total: (acc.trip_count > 0).then(|| acc.total_cents as f64 / acc.trip_count as f64 / 100.0),
            destinations,
            winners: WinnerTally::default(),
        }
    }

    /// Outgoing trip count per origin cell.
    pub fn origin_trip_counts(&self) -> BTreeMap<CellIndex, u64> {
        let mut out = BTreeMap::new();
        for ((o, _), a) in &self.buckets {
            *out.entry(*o).or_insert(0) += a.trip_count;
        }
        out
    }

    /// Mean total over every bucket, weighted by trips.
    pub fn overall_mean_total(&self) -> Option<Cents> {
        let mut acc = OdAccumulator::default();
        for a in self.buckets.values() {
            acc.merge(a);
        }
        (acc.trip_count > 0).then(|| Cents::from_dollars(acc.total_cents as f64 / acc.trip_count as f64 / 100.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geo::{offset_to_latlon, LatLon};
    use crate::ingest::PaymentType;
    use chrono::{TimeZone, Utc};
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn trip(spec: &GridSpec, o: (u32, u32), d: (u32, u32), total: i64) -> TripRecord {
        let t0 = Utc.with_ymd_and_hms(2013, 5, 1, 12, 0, 0).unwrap();
        TripRecord {
            trip_id: format!("{o:?}-{d:?}-{total}"),
            pickup_time: t0,
            dropoff_time: t0 + chrono::Duration::seconds(600),
            pickup: spec.cell_center(CellIndex::new(o.0, o.1)),
            dropoff: spec.cell_center(CellIndex::new(d.0, d.1)),
            trip_distance_km: 2.0,
            fare_amount: Cents(total),
            tip_amount: Cents(0),
            total_amount: Cents(total),
            payment_type: PaymentType::Cash,
        }
    }

    #[test]
    fn single_trip_bucket() {
        let g = GridSpec::app();
        let idx = OdIndex::build([&trip(&g, (1, 2), (3, 4), 1000)], g);
        let s = idx.get(CellIndex::new(1, 2), CellIndex::new(3, 4)).unwrap();
        assert_eq!(s.trip_count, 1);
        assert_eq!(s.mean_total, 10.0);
        assert_eq!(s.mean_duration_min, 10.0);
        assert_eq!(s.mean_distance_km, 2.0);
    }

    #[test]
    fn two_trips_average() {
        let g = GridSpec::app();
        let trips = [trip(&g, (1, 2), (3, 4), 800), trip(&g, (1, 2), (3, 4), 1200)];
        let idx = OdIndex::build(&trips, g);
        let s = idx.get(CellIndex::new(1, 2), CellIndex::new(3, 4)).unwrap();
        assert_eq!(s.trip_count, 2);
        assert_eq!(s.mean_total, 10.0);
    }

    #[test]
    fn out_of_grid_trips_are_counted() {
        let g = GridSpec::app();
        let mut t = trip(&g, (1, 2), (3, 4), 800);
        t.dropoff = LatLon::new(40.0, -74.0);
        let idx = OdIndex::build([&t, &trip(&g, (0, 0), (0, 0), 500)], g);
        assert_eq!(idx.skipped_out_of_grid(), 1);
        assert_eq!(idx.total_trips() + idx.skipped_out_of_grid(), 2);
    }

    #[test]
    fn outgoing_summary() {
        let g = GridSpec::app();
        let mut trips = Vec::new();
        for _ in 0..2 {
            trips.push(trip(&g, (5, 5), (6, 6), 1000));
        }
        for _ in 0..3 {
            trips.push(trip(&g, (5, 5), (7, 7), 2000));
        }
        trips.push(trip(&g, (8, 8), (5, 5), 999));
        let idx = OdIndex::build(&trips, g);
        let s = idx.area_outgoing_stats(CellIndex::new(5, 5));
        assert_eq!(s.trip_count, 5);
        assert_eq!(s.destinations, 2);
        assert_eq!(s.mean_total, Some(16.0));
        let empty = idx.area_outgoing_stats(CellIndex::new(100, 100));
        assert_eq!(empty.trip_count, 0);
        assert_eq!(empty.mean_total, None);
    }

    #[test]
    fn merge_rejects_other_grid() {
        let mut a = OdIndex::new(GridSpec::app());
        assert!(a.merge(OdIndex::new(GridSpec::analysis())).is_err());
    }

    #[test]
    fn partitioned_build_matches_sequential() {
        let g = GridSpec::app();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let trips: Vec<_> = (0..10_000)
            .map(|_| {
                trip(
                    &g,
                    (rng.random_range(0..20), rng.random_range(0..20)),
                    (rng.random_range(0..20), rng.random_range(0..20)),
                    rng.random_range(250..9000),
                )
            })
            .collect();
        let seq = OdIndex::build(&trips, g);
        let par = OdIndex::par_build(&trips, g);
        assert_eq!(seq, par);

        let mut shuffled = trips.clone();
        shuffled.shuffle(&mut rng);
        let (left, right) = shuffled.split_at(3333);
        let mut merged = OdIndex::build(left, g);
        merged.merge(OdIndex::build(right, g)).unwrap();
        assert_eq!(seq, merged);
    }

    #[test]
    fn edge_offsets_land_in_expected_bucket() {
        let g = GridSpec::app();
        let mut t = trip(&g, (0, 0), (0, 0), 100);
        t.pickup = offset_to_latlon(g.anchor, 75.0, 45.0);
        let idx = OdIndex::build([&t], g);
        assert!(idx.get(CellIndex::new(2, 1), CellIndex::new(0, 0)).is_some());
    }
}
