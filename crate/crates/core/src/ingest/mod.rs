//! Call-log parsing, ID interning, period classification and link aggregation.

mod interner;
pub mod io;
mod period;
mod table;

use std::borrow::Borrow;
use std::collections::BTreeMap;
use std::io::BufRead;

use chrono::NaiveDate;

pub use interner::NodeInterner;
pub use period::{classify_period, Period, PeriodConfig, WeekdaySet};
pub use table::{LinkStats, LinkTable};

use crate::NodeId;

/// One directed call event.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CallRecord {
    pub caller: String,
    pub callee: String,
    /// Origination time, epoch seconds UTC.
    pub timestamp: i64,
    /// Seconds.
    pub duration: u64,
}

impl CallRecord {
    /// Parses `caller,callee,epoch_seconds,duration_seconds`.
    pub fn parse(line: &str) -> Option<CallRecord> {
        let line = line.strip_suffix('\r').unwrap_or(line);
        let mut fields = line.split(',');
        let caller = fields.next()?;
        let callee = fields.next()?;
        let timestamp = fields.next()?.parse().ok()?;
        let duration = fields.next()?.parse().ok()?;
        if fields.next().is_some() || caller.is_empty() || callee.is_empty() {
            return None;
        }
        Some(CallRecord {
            caller: caller.to_owned(),
            callee: callee.to_owned(),
            timestamp,
            duration,
        })
    }

    /// The record as one log line, without the trailing newline.
    pub fn to_line(&self) -> String {
        format!("{},{},{},{}", self.caller, self.callee, self.timestamp, self.duration)
    }
}

/// Streaming reader over a call log. Malformed lines are skipped and counted;
/// read failures are yielded as errors.
pub struct LogReader<R> {
    reader: R,
    buf: String,
    line_no: usize,
    skipped: usize,
}

impl<R: BufRead> LogReader<R> {
    pub fn new(reader: R) -> Self {
        LogReader {
            reader,
            buf: String::new(),
            line_no: 0,
            skipped: 0,
        }
    }

    /// Malformed lines seen so far.
    pub fn skipped(&self) -> usize {
        self.skipped
    }

    pub fn lines_read(&self) -> usize {
        self.line_no
    }
}

impl<R: BufRead> Iterator for LogReader<R> {
    type Item = std::io::Result<CallRecord>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            self.buf.clear();
            match self.reader.read_line(&mut self.buf) {
                Ok(0) => return None,
                Ok(_) => {}
                Err(e) => return Some(Err(e)),
            }
            self.line_no += 1;
            let line = self.buf.strip_suffix('\n').unwrap_or(&self.buf);
            match CallRecord::parse(line) {
                Some(rec) => return Some(Ok(rec)),
                None => {
                    log::debug!("skipping malformed line {}: {:?}", self.line_no, line);
                    self.skipped += 1;
                }
            }
        }
    }
}

pub fn parse_log<R: BufRead>(reader: R) -> LogReader<R> {
    LogReader::new(reader)
}

/// Incremental aggregation: feed records one at a time, then [`finish`](Self::finish).
pub struct Aggregator<'a> {
    cfg: &'a PeriodConfig,
    interner: &'a mut NodeInterner,
    table: LinkTable,
    self_calls_dropped: u64,
}

impl<'a> Aggregator<'a> {
    pub fn new(cfg: &'a PeriodConfig, interner: &'a mut NodeInterner) -> Self {
        let table = LinkTable::new(interner.len());
        Aggregator {
            cfg,
            interner,
            table,
            self_calls_dropped: 0,
        }
    }

    pub fn push(&mut self, rec: &CallRecord) {
        if rec.caller == rec.callee && !self.cfg.keep_self_calls {
            self.self_calls_dropped += 1;
            return;
        }
        let src = self.interner.intern(&rec.caller);
        let dst = self.interner.intern(&rec.callee);
        self.table.set_node_count(self.interner.len());
        let period = classify_period(rec.timestamp, self.cfg);
        self.table.record_call(src, dst, period, rec.duration);
    }

    pub fn self_calls_dropped(&self) -> u64 {
        self.self_calls_dropped
    }

    pub fn finish(mut self) -> LinkTable {
        self.table.set_node_count(self.interner.len());
        self.table
    }
}

/// Aggregates calls into directed links. The interner grows with first-seen IDs.
pub fn aggregate<I>(records: I, cfg: &PeriodConfig, interner: &mut NodeInterner) -> LinkTable
where
    I: IntoIterator,
    I::Item: Borrow<CallRecord>,
{
    let mut agg = Aggregator::new(cfg, interner);
    for rec in records {
        agg.push(rec.borrow());
    }
    agg.finish()
}

/// Calls per local calendar date.
#[derive(Debug, Clone, Default)]
pub struct DailyVolume {
    by_day: BTreeMap<i64, u64>,
}

impl DailyVolume {
    pub fn push(&mut self, rec: &CallRecord, cfg: &PeriodConfig) {
        let (day, _) = period::split_local(cfg.local_seconds(rec.timestamp));
        *self.by_day.entry(day).or_default() += 1;
    }

    pub fn finish(self) -> Vec<(NaiveDate, u64)> {
        self.by_day
            .into_iter()
            .map(|(day, n)| {
                let date = i32::try_from(day + 719_163)
                    .ok()
                    .and_then(NaiveDate::from_num_days_from_ce_opt)
                    .expect("timestamp outside the calendar range");
                (date, n)
            })
            .collect()
    }
}

pub fn daily_volume<I>(records: I, cfg: &PeriodConfig) -> Vec<(NaiveDate, u64)>
where
    I: IntoIterator,
    I::Item: Borrow<CallRecord>,
{
    let mut vol = DailyVolume::default();
    for rec in records {
        vol.push(rec.borrow(), cfg);
    }
    vol.finish()
}

/// Keeps links whose source and destination IDs both start with `prefix`.
/// Surviving nodes are re-indexed densely, preserving their relative order.
pub fn filter_prefix(
    table: &LinkTable,
    interner: &NodeInterner,
    prefix: &str,
) -> (LinkTable, NodeInterner) {
    let keep: Vec<bool> = interner.ids().map(|id| id.starts_with(prefix)).collect();
    let mut used = vec![false; interner.len()];
    let mut pairs: Vec<(NodeId, NodeId)> = table
        .iter(Period::Full)
        .map(|(k, _)| k)
        .filter(|&(s, d)| keep[s as usize] && keep[d as usize])
        .collect();
    pairs.sort_unstable();
    for &(s, d) in &pairs {
        used[s as usize] = true;
        used[d as usize] = true;
    }

    let mut out_interner = NodeInterner::new();
    let mut remap = vec![NodeId::MAX; interner.len()];
    for (old, _) in used.iter().enumerate().filter(|(_, &u)| u) {
        remap[old] = out_interner.intern(interner.id(old as NodeId));
    }

    let mut out = LinkTable::new(out_interner.len());
    for (s, d) in pairs {
        let (ns, nd) = (remap[s as usize], remap[d as usize]);
        for period in [Period::Work, Period::Leisure] {
            if let Some(stats) = table.get(period, s, d) {
                out.add(ns, nd, period, stats);
            }
        }
    }
    (out, out_interner)
}
