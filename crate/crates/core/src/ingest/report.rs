use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RejectReason {
    /// Row too short for the mapped columns, or an empty key field.
    MissingField,
    BadTimestamp,
    BadCoordinate,
    BadNumber,
    /// The join key occurs more than once on either side.
    AmbiguousJoin,
    Unmatched,
    TimeOrder,
    NegativeDistance,
    NegativeAmount,
    AmountOrder,
    OutOfBox,
}

impl RejectReason {
    pub const ALL: [RejectReason; 11] = [
        RejectReason::MissingField,
        RejectReason::BadTimestamp,
        RejectReason::BadCoordinate,
        RejectReason::BadNumber,
        RejectReason::AmbiguousJoin,
        RejectReason::Unmatched,
        RejectReason::TimeOrder,
        RejectReason::NegativeDistance,
        RejectReason::NegativeAmount,
        RejectReason::AmountOrder,
        RejectReason::OutOfBox,
    ];

    pub fn code(self) -> &'static str {
        match self {
            RejectReason::MissingField => "missing_field",
            RejectReason::BadTimestamp => "bad_timestamp",
            RejectReason::BadCoordinate => "bad_coordinate",
            RejectReason::BadNumber => "bad_number",
            RejectReason::AmbiguousJoin => "ambiguous_join",
            RejectReason::Unmatched => "unmatched",
            RejectReason::TimeOrder => "time_order",
            RejectReason::NegativeDistance => "negative_distance",
            RejectReason::NegativeAmount => "negative_amount",
            RejectReason::AmountOrder => "amount_order",
            RejectReason::OutOfBox => "out_of_box",
        }
    }
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Trips,
    Fares,
}

/// A rejected source row. `line` is the physical line number, header = 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reject {
    pub side: Side,
    pub line: u64,
    pub reason: RejectReason,
    pub raw: String,
}

/// Per-file ingestion counts. Reason keys are the snake-case reject codes.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestReport {
    pub rows_read: u64,
    pub rows_accepted: u64,
    pub rows_rejected: u64,
    pub rejection_reasons: BTreeMap<String, u64>,
}

impl IngestReport {
    pub fn accept(&mut self) {
        self.rows_read += 1;
        self.rows_accepted += 1;
    }

    pub fn reject(&mut self, reason: RejectReason) {
        self.rows_read += 1;
        self.rows_rejected += 1;
        *self.rejection_reasons.entry(reason.code().to_string()).or_insert(0) += 1;
    }

    pub fn count(&self, reason: RejectReason) -> u64 {
        self.rejection_reasons.get(reason.code()).copied().unwrap_or(0)
    }

    /// Sum of two partial reports; associative and commutative.
    pub fn merge(&mut self, other: &IngestReport) {
        self.rows_read += other.rows_read;
        self.rows_accepted += other.rows_accepted;
        self.rows_rejected += other.rows_rejected;
        for (k, v) in &other.rejection_reasons {
            *self.rejection_reasons.entry(k.clone()).or_insert(0) += v;
        }
    }

    pub fn is_consistent(&self) -> bool {
        self.rows_read == self.rows_accepted + self.rows_rejected
            && self.rejection_reasons.values().sum::<u64>() == self.rows_rejected
    }
}

/// Tab-separated `line_number, reason, raw_row`. Tabs and newlines inside the
/// raw row are replaced by spaces so each reject stays on one line.
pub fn write_reject_log<'a, W: Write>(rejects: impl IntoIterator<Item = &'a Reject>, mut out: W) -> Result<()> {
    let io = |e| Error::io("<reject log>", e);
    for r in rejects {
        let raw: String = r
            .raw
            .chars()
            .map(|c| if matches!(c, '\t' | '\n' | '\r') { ' ' } else { c })
            .collect();
        writeln!(out, "{}\t{}\t{}", r.line, r.reason, raw).map_err(io)?;
    }
    out.flush().map_err(io)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn report_from(codes: &[u8], accepted: u64) -> IngestReport {
        let mut r = IngestReport::default();
        for _ in 0..accepted {
            r.accept();
        }
        for &c in codes {
            r.reject(RejectReason::ALL[c as usize % RejectReason::ALL.len()]);
        }
        r
    }

    proptest! {
        #[test]
        fn merge_is_associative(
            a in prop::collection::vec(any::<u8>(), 0..20), na in 0u64..50,
            b in prop::collection::vec(any::<u8>(), 0..20), nb in 0u64..50,
            c in prop::collection::vec(any::<u8>(), 0..20), nc in 0u64..50,
        ) {
            let (ra, rb, rc) = (report_from(&a, na), report_from(&b, nb), report_from(&c, nc));
            let mut left = ra.clone();
            left.merge(&rb);
            left.merge(&rc);
            let mut bc = rb.clone();
            bc.merge(&rc);
            let mut right = ra.clone();
            right.merge(&bc);
            prop_assert_eq!(&left, &right);
            prop_assert!(left.is_consistent());
        }
    }

    #[test]
    fn reject_log_is_one_line_per_reject() {
        let rejects = vec![Reject {
            side: Side::Trips,
            line: 7,
            reason: RejectReason::BadTimestamp,
            raw: "a,b\tc".into(),
        }];
        let mut buf = Vec::new();
        write_reject_log(&rejects, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "7\tbad_timestamp\ta,b c\n");
    }

    #[test]
    fn report_serializes_with_reason_codes() {
        let mut r = IngestReport::default();
        r.reject(RejectReason::OutOfBox);
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["rejection_reasons"]["out_of_box"], 1);
    }
}
