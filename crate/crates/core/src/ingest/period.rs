use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const SECS_PER_DAY: i64 = 86_400;

/// Time-period label of a link table. `Work` and `Leisure` partition `Full`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Period {
    Full,
    Work,
    Leisure,
}

impl Period {
    pub const ALL: [Period; 3] = [Period::Full, Period::Work, Period::Leisure];

    pub fn as_str(self) -> &'static str {
        match self {
            Period::Full => "full",
            Period::Work => "work",
            Period::Leisure => "leisure",
        }
    }
}

impl fmt::Display for Period {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Period {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(Period::Full),
            "work" => Ok(Period::Work),
            "leisure" => Ok(Period::Leisure),
            _ => Err(Error::InvalidConfig(format!("unknown period {s:?}"))),
        }
    }
}

/// Set of weekdays, bit 0 = Monday .. bit 6 = Sunday.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct WeekdaySet(u8);

impl WeekdaySet {
    pub const MONDAY_TO_FRIDAY: WeekdaySet = WeekdaySet(0b001_1111);
    pub const EVERY_DAY: WeekdaySet = WeekdaySet(0b111_1111);

    pub fn empty() -> Self {
        WeekdaySet(0)
    }

    /// `days_from_monday` in `0..7`.
    pub fn with(self, days_from_monday: u32) -> Self {
        assert!(days_from_monday < 7);
        WeekdaySet(self.0 | 1 << days_from_monday)
    }

    pub fn contains(self, days_from_monday: u32) -> bool {
        days_from_monday < 7 && self.0 & (1 << days_from_monday) != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    fn is_valid(self) -> bool {
        !self.is_empty() && self.0 & !Self::EVERY_DAY.0 == 0
    }
}

/// Work/leisure split rule plus the self-call policy of aggregation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodConfig {
    pub work_start_hour: u32,
    /// Exclusive: a call at exactly this hour is leisure.
    pub work_end_hour: u32,
    pub work_days: WeekdaySet,
    /// Fixed offset of local time from UTC. No DST transitions.
    pub utc_offset_minutes: i32,
    /// Keep caller == callee calls in the link table (dropped by default).
    pub keep_self_calls: bool,
}

impl Default for PeriodConfig {
    /// 08:00-18:00 Monday to Friday, UTC+01:00 (British Summer Time).
    fn default() -> Self {
        PeriodConfig {
            work_start_hour: 8,
            work_end_hour: 18,
            work_days: WeekdaySet::MONDAY_TO_FRIDAY,
            utc_offset_minutes: 60,
            keep_self_calls: false,
        }
    }
}

impl PeriodConfig {
    pub fn validate(&self) -> Result<()> {
        if self.work_start_hour >= self.work_end_hour || self.work_end_hour > 24 {
            return Err(Error::InvalidConfig(format!(
                "work hours must satisfy 0 <= start < end <= 24, got [{}, {})",
                self.work_start_hour, self.work_end_hour
            )));
        }
        if !self.work_days.is_valid() {
            return Err(Error::InvalidConfig("work_days must be a non-empty set of weekdays".into()));
        }
        Ok(())
    }

    /// Seconds since the epoch shifted into local time.
    pub fn local_seconds(&self, t: i64) -> i64 {
        t + i64::from(self.utc_offset_minutes) * 60
    }

    pub(crate) fn work_window_secs(&self) -> (i64, i64) {
        (
            i64::from(self.work_start_hour) * 3600,
            i64::from(self.work_end_hour) * 3600,
        )
    }
}

/// Local day number (days since 1970-01-01 in local time) and second of day.
pub(crate) fn split_local(local: i64) -> (i64, i64) {
    (local.div_euclid(SECS_PER_DAY), local.rem_euclid(SECS_PER_DAY))
}

/// Weekday of a day number, 0 = Monday. 1970-01-01 was a Thursday.
pub(crate) fn weekday_of_day(day: i64) -> u32 {
    (day + 3).rem_euclid(7) as u32
}

/// Work iff the local origination time falls on a work day inside the
/// half-open window `[work_start_hour, work_end_hour)`.
pub fn classify_period(t: i64, cfg: &PeriodConfig) -> Period {
    let (day, sec) = split_local(cfg.local_seconds(t));
    let (start, end) = cfg.work_window_secs();
    if cfg.work_days.contains(weekday_of_day(day)) && sec >= start && sec < end {
        Period::Work
    } else {
        Period::Leisure
    }
}
