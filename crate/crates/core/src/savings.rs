//! What users save by following the comparison: price-difference
//! distributions, pick-up strategies, hourly winner stripes and query
//! frequency.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;
use std::str::FromStr;

use chrono::{DateTime, Utc};
use chrono_tz::Tz;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fare::{Winner, WinnerTally};
use crate::geo::LatLon;
use crate::money::Cents;
use crate::stats::median;
use crate::time::{hour_of_week_in, DEFAULT_TZ, HOURS_PER_WEEK};

/// One answered comparison, as written to the append-only query log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryLogEntry {
    pub user_id: String,
    pub timestamp: DateTime<Utc>,
    pub origin: LatLon,
    pub destination: LatLon,
    pub yellow_price: Cents,
    pub uber_price: Cents,
    pub winner: Winner,
}

impl QueryLogEntry {
    /// `yellow - uber`.
    pub fn delta(&self) -> Cents {
        self.yellow_price - self.uber_price
    }
}

pub fn read_query_log_from<R: Read>(input: R) -> Result<Vec<QueryLogEntry>> {
    let mut out = Vec::new();
    for (i, line) in BufReader::new(input).lines().enumerate() {
        let line = line.map_err(|e| Error::io("<query log>", e))?;
        if line.trim().is_empty() {
            continue;
        }
        let e: QueryLogEntry = serde_json::from_str(&line).map_err(|e| Error::Format {
            what: "query log",
            detail: format!("line {}: {e}", i + 1),
        })?;
        if e.yellow_price.is_negative() || e.uber_price.is_negative() {
            return Err(Error::Format {
                what: "query log",
                detail: format!("line {}: negative price", i + 1),
            });
        }
        out.push(e);
    }
    Ok(out)
}

pub fn read_query_log(path: impl AsRef<Path>) -> Result<Vec<QueryLogEntry>> {
    let path = path.as_ref();
    read_query_log_from(File::open(path).map_err(|e| Error::io(path, e))?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeltaDistribution {
    pub entries: usize,
    pub bin_width: Cents,
    /// Bin index to count; bin `k` is centred on `k * bin_width`.
    pub histogram: BTreeMap<i64, u64>,
    /// Mean of `|delta|`, cents.
    pub mean_saving_cents: f64,
    pub mean_delta_cents: f64,
}

impl DeltaDistribution {
    pub fn mean_saving(&self) -> f64 {
        self.mean_saving_cents / 100.0
    }

    /// `bin_center,count` rows in dollars.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["bin_center", "count"])?;
        for (k, n) in &self.histogram {
            w.write_record([Cents(k * self.bin_width.0).to_string(), n.to_string()])?;
        }
        w.flush().map_err(|e| Error::io("<histogram>", e))
    }
}

/// Round half away from zero of `num / den`, for positive `den`.
fn div_round(num: i64, den: i64) -> i64 {
    let q = num.abs() * 2 + den;
    let k = q / (2 * den);
    if num < 0 {
        -k
    } else {
        k
    }
}

pub fn delta_distribution(log: &[QueryLogEntry], bin_width: Cents) -> Result<DeltaDistribution> {
    if log.is_empty() {
        return Err(Error::EmptyInput("query log"));
    }
    if bin_width.0 <= 0 {
        return Err(Error::InvalidArgument("bin width must be positive".into()));
    }
    let mut histogram = BTreeMap::new();
    let (mut abs_sum, mut sum) = (0i64, 0i64);
    for e in log {
        let d = e.delta().0;
        abs_sum += d.abs();
        sum += d;
        *histogram.entry(div_round(d, bin_width.0)).or_insert(0) += 1;
    }
    let n = log.len() as f64;
    Ok(DeltaDistribution {
        entries: log.len(),
        bin_width,
        histogram,
        mean_saving_cents: abs_sum as f64 / n,
        mean_delta_cents: sum as f64 / n,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Take whichever provider the comparison says is cheaper.
    AppDriven,
    AlwaysYellow,
    AlwaysUber,
    Random,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [
        Strategy::AppDriven,
        Strategy::AlwaysYellow,
        Strategy::AlwaysUber,
        Strategy::Random,
    ];
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::AppDriven => "app_driven",
            Strategy::AlwaysYellow => "always_yellow",
            Strategy::AlwaysUber => "always_uber",
            Strategy::Random => "random",
        })
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Strategy::ALL
            .into_iter()
            .find(|k| k.to_string() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown strategy `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrategyEvaluation {
    pub strategy: Strategy,
    /// Per-journey cost in dollars.
    pub costs: Vec<f64>,
    pub mean_cost: f64,
    pub median_cost: f64,
}

/// Cost of each journey under a strategy. Without a seed the random strategy
/// reports its expectation, the per-journey average of both prices.
pub fn evaluate_strategy(log: &[QueryLogEntry], strategy: Strategy, seed: Option<u64>) -> Result<StrategyEvaluation> {
    if log.is_empty() {
        return Err(Error::EmptyInput("query log"));
    }
    let mut rng = seed.map(ChaCha8Rng::seed_from_u64);
    let costs: Vec<f64> = log
        .iter()
        .map(|e| {
            let (y, u) = (e.yellow_price.0, e.uber_price.0);
            let cents = match strategy {
                Strategy::AppDriven => y.min(u) as f64,
                Strategy::AlwaysYellow => y as f64,
                Strategy::AlwaysUber => u as f64,
                Strategy::Random => match rng.as_mut() {
                    Some(r) => {
                        if r.random::<bool>() {
                            y as f64
                        } else {
                            u as f64
                        }
                    }
                    None => (y + u) as f64 / 2.0,
                },
            };
            cents / 100.0
        })
        .collect();
    Ok(StrategyEvaluation {
        strategy,
        mean_cost: costs.iter().sum::<f64>() / costs.len() as f64,
        median_cost: median(&costs).expect("nonempty"),
        costs,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlotWinner {
    Yellow,
    Uber,
    Tie,
    NoData,
}

impl SlotWinner {
    pub fn letter(self) -> char {
        match self {
            SlotWinner::Yellow => 'Y',
            SlotWinner::Uber => 'B',
            SlotWinner::Tie => 'T',
            SlotWinner::NoData => 'N',
        }
    }
}

/// Majority logged winner per hour-of-week slot.
pub fn hourly_winner_stripes(log: &[QueryLogEntry]) -> Vec<SlotWinner> {
    hourly_winner_stripes_in(log, DEFAULT_TZ)
}

pub fn hourly_winner_stripes_in(log: &[QueryLogEntry], tz: Tz) -> Vec<SlotWinner> {
    let mut tallies = vec![WinnerTally::default(); HOURS_PER_WEEK];
    for e in log {
        tallies[hour_of_week_in(e.timestamp, tz)].add(e.winner);
    }
    tallies
        .iter()
        .map(|t| match t.majority() {
            None => SlotWinner::NoData,
            Some(Winner::Yellow) => SlotWinner::Yellow,
            Some(Winner::Uber) => SlotWinner::Uber,
            Some(Winner::Tie) => SlotWinner::Tie,
        })
        .collect()
}

/// 168-character `Y`/`B`/`T`/`N` rendering.
pub fn stripes_string(stripes: &[SlotWinner]) -> String {
    stripes.iter().map(|s| s.letter()).collect()
}

/// Queries per hour-of-week slot, the proxy for trips purchased.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QueryHistogram(Vec<f64>);

impl QueryHistogram {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.len() != HOURS_PER_WEEK {
            return Err(Error::DimensionMismatch(format!(
                "histogram needs 168 slots, got {}",
                p.len()
            )));
        }
        if p.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
            return Err(Error::InvalidArgument(
                "histogram values must be finite and non-negative".into(),
            ));
        }
        Ok(QueryHistogram(p))
    }

    pub fn uniform() -> Self {
        QueryHistogram(vec![1.0; HOURS_PER_WEEK])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QueryFrequency {
    pub entries: usize,
    pub users: usize,
    pub mean_queries_per_user: f64,
    /// `(queries per user, share of users with at most that many)`.
    pub cdf: Vec<(u64, f64)>,
    pub hour_of_week: QueryHistogram,
    /// Mean queries per local hour of day, averaged over the seven weekdays.
    pub daily_profile: Vec<f64>,
}

pub fn query_frequency_stats(log: &[QueryLogEntry]) -> QueryFrequency {
    query_frequency_stats_in(log, DEFAULT_TZ)
}

pub fn query_frequency_stats_in(log: &[QueryLogEntry], tz: Tz) -> QueryFrequency {
    let mut per_user: HashMap<&str, u64> = HashMap::new();
    let mut p = vec![0.0; HOURS_PER_WEEK];
    for e in log {
        *per_user.entry(&e.user_id).or_insert(0) += 1;
        p[hour_of_week_in(e.timestamp, tz)] += 1.0;
    }
    let mut by_count: BTreeMap<u64, u64> = BTreeMap::new();
    for &n in per_user.values() {
        *by_count.entry(n).or_insert(0) += 1;
    }
    let users = per_user.len();
    let mut acc = 0;
    let cdf = by_count
        .into_iter()
        .map(|(k, n)| {
            acc += n;
            (k, acc as f64 / users as f64)
        })
        .collect();
    let daily_profile = (0..24)
        .map(|h| (0..7).map(|d| p[d * 24 + h]).sum::<f64>() / 7.0)
        .collect();
    QueryFrequency {
        entries: log.len(),
        users,
        mean_queries_per_user: if users == 0 {
            0.0
        } else {
            log.len() as f64 / users as f64
        },
        cdf,
        hour_of_week: QueryHistogram(p),
        daily_profile,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::TimeZone;

    fn entry(user: &str, y: i64, u: i64, hour: u32) -> QueryLogEntry {
        let d = Cents(y - u);
        QueryLogEntry {
            user_id: user.into(),
            // Monday 2015-05-04 in New York
            timestamp: Utc.with_ymd_and_hms(2015, 5, 4, 4 + hour, 15, 0).unwrap(),
            origin: LatLon::new(40.75, -73.99),
            destination: LatLon::new(40.70, -74.0),
            yellow_price: Cents(y),
            uber_price: Cents(u),
            winner: Winner::from_delta(d),
        }
    }

    #[test]
    fn symmetric_deltas() {
        let log = [entry("a", 1200, 1000, 0), entry("b", 1000, 1200, 0)];
        let d = delta_distribution(&log, Cents(100)).unwrap();
        assert_eq!(d.mean_saving(), 2.0);
        assert_eq!(d.mean_delta_cents, 0.0);
        assert_eq!(d.histogram.get(&2), Some(&1));
        assert_eq!(d.histogram.get(&-2), Some(&1));
        let zero = delta_distribution(&[entry("a", 1000, 1000, 0)], Cents(100)).unwrap();
        assert_eq!(zero.mean_saving_cents, 0.0);
        assert!(matches!(delta_distribution(&[], Cents(100)), Err(Error::EmptyInput(_))));
    }

    #[test]
    fn bins_are_centred_and_round_half_away() {
        assert_eq!(div_round(150, 100), 2);
        assert_eq!(div_round(149, 100), 1);
        assert_eq!(div_round(-150, 100), -2);
        assert_eq!(div_round(-49, 100), 0);
    }

    #[test]
    fn strategies_hand_example() {
        let log = [entry("a", 1000, 1200, 0), entry("a", 2000, 1500, 1)];
        let mean = |s| evaluate_strategy(&log, s, None).unwrap().mean_cost;
        assert!((mean(Strategy::AppDriven) - 12.50).abs() < 1e-12);
        assert!((mean(Strategy::AlwaysYellow) - 15.00).abs() < 1e-12);
        assert!((mean(Strategy::AlwaysUber) - 13.50).abs() < 1e-12);
        assert!((mean(Strategy::Random) - 14.25).abs() < 1e-12);
    }

    #[test]
    fn seeded_random_picks_one_column() {
        let log: Vec<_> = (0..50).map(|i| entry("a", 1000 + i, 2000 + i, 0)).collect();
        let e = evaluate_strategy(&log, Strategy::Random, Some(3)).unwrap();
        for (c, x) in e.costs.iter().zip(&log) {
            let cents = (c * 100.0).round() as i64;
            assert!(cents == x.yellow_price.0 || cents == x.uber_price.0);
        }
        assert_eq!(e, evaluate_strategy(&log, Strategy::Random, Some(3)).unwrap());
    }

    #[test]
    fn identical_prices_make_strategies_equal() {
        let log = [entry("a", 1000, 1000, 0), entry("b", 700, 700, 2)];
        let means: Vec<_> = Strategy::ALL
            .iter()
            .map(|&s| evaluate_strategy(&log, s, None).unwrap().mean_cost)
            .collect();
        assert!(means.windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn stripes() {
        let log = [
            entry("a", 900, 1000, 0),
            entry("a", 900, 1000, 0),
            entry("a", 900, 1000, 1),
            entry("b", 1100, 1000, 1),
        ];
        let s = hourly_winner_stripes(&log);
        assert_eq!(s[0], SlotWinner::Yellow);
        assert_eq!(s[1], SlotWinner::Tie);
        assert_eq!(s[2], SlotWinner::NoData);
        let text = stripes_string(&s);
        assert_eq!(text.len(), 168);
        assert!(text.starts_with("YTN"));
    }

    #[test]
    fn frequency() {
        let one = query_frequency_stats(&[entry("a", 1, 1, 0)]);
        assert_eq!(one.mean_queries_per_user, 1.0);
        assert_eq!(one.cdf, vec![(1, 1.0)]);

        let log: Vec<_> = ["a", "b", "c", "c", "c", "c"]
            .iter()
            .map(|u| entry(u, 1, 1, 3))
            .collect();
        let f = query_frequency_stats(&log);
        assert_eq!(f.mean_queries_per_user, 2.0);
        assert_eq!(f.cdf, vec![(1, 2.0 / 3.0), (4, 1.0)]);
        assert_eq!(f.hour_of_week.as_slice()[3], 6.0);
        assert!((f.daily_profile[3] - 6.0 / 7.0).abs() < 1e-12);
    }

    #[test]
    fn log_round_trips_as_jsonl() {
        let e = entry("u1", 2143, 3982, 5);
        let line = serde_json::to_string(&e).unwrap();
        assert!(line.contains("\"yellow_price\":\"21.43\""));
        let back = read_query_log_from(format!("{line}\n\n").as_bytes()).unwrap();
        assert_eq!(back, vec![e]);
    }
}
