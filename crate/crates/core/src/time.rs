//! Hour-of-week slots in local time.

use chrono::{DateTime, Datelike, Timelike, Utc};
use chrono_tz::America::New_York;
use chrono_tz::Tz;

pub const HOURS_PER_WEEK: usize = 168;

/// Default zone for hour-of-week bucketing.
pub const DEFAULT_TZ: Tz = New_York;

/// `weekday * 24 + hour` in New York time, Monday 00:00 is slot 0.
pub fn hour_of_week(t: DateTime<Utc>) -> usize {
    hour_of_week_in(t, DEFAULT_TZ)
}

pub fn hour_of_week_in(t: DateTime<Utc>, tz: Tz) -> usize {
    let local = t.with_timezone(&tz);
    local.weekday().num_days_from_monday() as usize * 24 + local.hour() as usize
}
