use super::{RejectReason, TripRecord};
use crate::geo::BoundingBox;

/// Semantic checks on a joined record, first failure wins.
pub fn validate_record(r: &TripRecord, bbox: &BoundingBox) -> Result<(), RejectReason> {
    if r.dropoff_time < r.pickup_time {
        return Err(RejectReason::TimeOrder);
    }
    if r.trip_distance_km < 0.0 {
        return Err(RejectReason::NegativeDistance);
    }
    if r.fare_amount.is_negative() || r.tip_amount.is_negative() {
        return Err(RejectReason::NegativeAmount);
    }
    if r.total_amount < r.fare_amount {
        return Err(RejectReason::AmountOrder);
    }
    if !bbox.contains(r.pickup) || !bbox.contains(r.dropoff) {
        return Err(RejectReason::OutOfBox);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geo::LatLon;
    use crate::ingest::PaymentType;
    use crate::money::Cents;
    use chrono::{Duration, TimeZone, Utc};

    fn ok_record() -> TripRecord {
        let t0 = Utc.with_ymd_and_hms(2013, 5, 1, 12, 0, 0).unwrap();
        TripRecord {
            trip_id: "x".into(),
            pickup_time: t0,
            dropoff_time: t0 + Duration::minutes(10),
            pickup: LatLon::new(40.75, -73.99),
            dropoff: LatLon::new(40.76, -73.98),
            trip_distance_km: 2.0,
            fare_amount: Cents(900),
            tip_amount: Cents(100),
            total_amount: Cents(1050),
            payment_type: PaymentType::Card,
        }
    }

    #[test]
    fn each_rule_fires() {
        let b = BoundingBox::NYC;
        assert_eq!(validate_record(&ok_record(), &b), Ok(()));

        let mut r = ok_record();
        r.dropoff_time = r.pickup_time - Duration::seconds(1);
        r.trip_distance_km = -1.0;
        assert_eq!(validate_record(&r, &b), Err(RejectReason::TimeOrder));

        let mut r = ok_record();
        r.trip_distance_km = -0.1;
        assert_eq!(validate_record(&r, &b), Err(RejectReason::NegativeDistance));

        let mut r = ok_record();
        r.tip_amount = Cents(-1);
        assert_eq!(validate_record(&r, &b), Err(RejectReason::NegativeAmount));

        let mut r = ok_record();
        r.total_amount = Cents(899);
        assert_eq!(validate_record(&r, &b), Err(RejectReason::AmountOrder));

        let mut r = ok_record();
        r.dropoff = LatLon::new(0.0, 0.0);
        assert_eq!(validate_record(&r, &b), Err(RejectReason::OutOfBox));
    }

    #[test]
    fn zero_length_trip_is_valid() {
        let mut r = ok_record();
        r.dropoff_time = r.pickup_time;
        r.trip_distance_km = 0.0;
        assert_eq!(validate_record(&r, &BoundingBox::NYC), Ok(()));
    }
}
