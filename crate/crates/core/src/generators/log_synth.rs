//! Synthetic call logs with a known link table.
//!
//! Contacts come from a preferential-attachment graph over `node_count`
//! subscribers. Each contact is oriented at random and marked reciprocated
//! with `reciprocation_probability`. The call stream first places one call on
//! every contact (plus the return call of reciprocated ones), then spreads the
//! remaining calls uniformly over contacts; one-way contacts only ever carry
//! calls in their own direction. Every call decides its period first and then
//! draws a local timestamp inside that period, so the ground truth never
//! consults the period classifier.

use chrono::{Datelike, NaiveDate};
use rustc_hash::FxHashMap;

use super::pa::{generate_pa, PAParams};
use crate::error::{Error, Result};
use crate::ingest::{CallRecord, LinkStats, LinkTable, NodeInterner, Period, PeriodConfig};
use crate::rng::{stream, DetRng};
use crate::NodeId;

/// ID prefixes assigned round-robin by subscriber index.
pub const REGIONS: [&str; 4] = ["PnLa", "QrSt", "KmWx", "BdFh"];

const SECS_PER_DAY: i64 = 86_400;
const MAX_DURATION: u64 = 1200;

#[derive(Debug, Clone, PartialEq)]
pub struct LogSynthParams {
    pub node_count: usize,
    pub total_calls: u64,
    pub work_call_fraction: f64,
    pub reciprocation_probability: f64,
    /// Relative call volume, Monday first.
    pub weekday_weights: [f64; 7],
    /// Contacts brought by each subscriber in the contact graph.
    pub links_per_node: usize,
    /// Internal-link rate of the contact graph.
    pub contact_beta: f64,
    /// First local date of the log.
    pub start: NaiveDate,
    pub days: u32,
    /// Rule used to place work and leisure timestamps.
    pub period: PeriodConfig,
    pub seed: u64,
}

impl Default for LogSynthParams {
    /// 10k subscribers, 100k calls over August 2005, volume falling from
    /// Monday through the weekend.
    fn default() -> Self {
        LogSynthParams {
            node_count: 10_000,
            total_calls: 100_000,
            work_call_fraction: 0.6,
            reciprocation_probability: 0.5,
            weekday_weights: [1.0, 0.9, 0.85, 0.85, 0.75, 0.5, 0.45],
            links_per_node: 3,
            contact_beta: 0.3,
            start: NaiveDate::from_ymd_opt(2005, 8, 1).unwrap(),
            days: 31,
            period: PeriodConfig::default(),
            seed: 1,
        }
    }
}

impl LogSynthParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        self.period.validate()?;
        for (name, p) in [
            ("work_call_fraction", self.work_call_fraction),
            ("reciprocation_probability", self.reciprocation_probability),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("{name} = {p} must lie in [0, 1]"));
            }
        }
        if self.weekday_weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return bad("weekday weights must be finite and non-negative".into());
        }
        if self.days == 0 {
            return bad("days must be positive".into());
        }
        if self.total_calls == 0 {
            return Ok(());
        }
        PAParams {
            n: self.node_count,
            m: self.links_per_node,
            beta: self.contact_beta,
            seed: self.seed,
        }
        .validate()?;
        let calendar = Calendar::new(self);
        if self.work_call_fraction > 0.0 && calendar.work_total <= 0.0 {
            return bad("work calls requested but no weighted work day in range".into());
        }
        if self.work_call_fraction < 1.0 && calendar.leisure_total <= 0.0 {
            return bad("leisure calls requested but no weighted leisure time in range".into());
        }
        Ok(())
    }
}

/// Cumulative day weights for drawing work and leisure days.
#[derive(Debug, Clone)]
struct Calendar {
    work_days: Vec<(i64, f64)>,
    work_total: f64,
    leisure_days: Vec<(i64, f64, bool)>,
    leisure_total: f64,
}

impl Calendar {
    fn new(p: &LogSynthParams) -> Self {
        let first_day = i64::from(p.start.num_days_from_ce()) - 719_163;
        let (start, end) = (p.period.work_start_hour, p.period.work_end_hour);
        let has_off_hours = start > 0 || end < 24;
        let mut cal = Calendar {
            work_days: Vec::new(),
            work_total: 0.0,
            leisure_days: Vec::new(),
            leisure_total: 0.0,
        };
        for i in 0..i64::from(p.days) {
            let day = first_day + i;
            // 1970-01-01 was a Thursday.
            let wd = (day + 3).rem_euclid(7) as u32;
            let w = p.weekday_weights[wd as usize];
            if w <= 0.0 {
                continue;
            }
            let is_work_day = p.period.work_days.contains(wd);
            if is_work_day {
                cal.work_total += w;
                cal.work_days.push((day, cal.work_total));
            }
            if !is_work_day || has_off_hours {
                cal.leisure_total += w;
                cal.leisure_days.push((day, cal.leisure_total, is_work_day));
            }
        }
        cal
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Contact {
    src: NodeId,
    dst: NodeId,
    reciprocated: bool,
}

/// One generated call over subscriber indices, with the period it was placed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SynthCall {
    pub caller: NodeId,
    pub callee: NodeId,
    pub timestamp: i64,
    pub duration: u64,
    pub period: Period,
}

/// A planned log. Records and ground truth are replayed from the seed, so
/// neither needs the other in memory.
#[derive(Debug, Clone)]
pub struct SyntheticLog {
    params: LogSynthParams,
    calendar: Calendar,
    contacts: Vec<Contact>,
    seeded_calls: u64,
}

pub fn synthesize_log(params: &LogSynthParams) -> Result<SyntheticLog> {
    params.validate()?;
    let calendar = Calendar::new(params);
    let mut contacts = Vec::new();
    let mut seeded_calls = 0u64;
    if params.total_calls > 0 {
        let graph = generate_pa(&PAParams {
            n: params.node_count,
            m: params.links_per_node,
            beta: params.contact_beta,
            seed: params.seed,
        })?;
        let mut rng = DetRng::new(params.seed ^ stream::PLAN);
        for (u, v, _) in graph.edges() {
            let (src, dst) = if rng.bernoulli(0.5) { (v, u) } else { (u, v) };
            let reciprocated = rng.bernoulli(params.reciprocation_probability);
            let needed = 1 + u64::from(reciprocated);
            if seeded_calls + needed > params.total_calls {
                continue;
            }
            seeded_calls += needed;
            contacts.push(Contact { src, dst, reciprocated });
        }
        if contacts.is_empty() {
            return Err(Error::InvalidParams(format!(
                "total_calls = {} cannot cover a single contact",
                params.total_calls
            )));
        }
    }
    Ok(SyntheticLog {
        params: params.clone(),
        calendar,
        contacts,
        seeded_calls,
    })
}

/// Opaque subscriber ID: region prefix plus a 40-bit scrambled index.
pub fn subscriber_id(index: NodeId) -> String {
    let region = REGIONS[index as usize % REGIONS.len()];
    let scrambled = u64::from(index).wrapping_mul(0x9e37_79b9_7f4a_7c15) & ((1 << 40) - 1);
    format!("{region}{scrambled:010x}")
}

impl SyntheticLog {
    pub fn params(&self) -> &LogSynthParams {
        &self.params
    }

    /// Number of distinct directed pairs the log contains.
    pub fn directed_pairs(&self) -> usize {
        self.contacts.iter().map(|c| 1 + usize::from(c.reciprocated)).sum()
    }

    pub fn events(&self) -> impl Iterator<Item = SynthCall> + '_ {
        let mut rng = DetRng::new(self.params.seed ^ stream::EVENTS);
        let mut seeded = self.contacts.iter().flat_map(|c| {
            let back = c.reciprocated.then_some((c.dst, c.src));
            std::iter::once((c.src, c.dst)).chain(back)
        });
        (0..self.params.total_calls).map(move |i| {
            let (caller, callee) = if i < self.seeded_calls {
                seeded.next().expect("seeded calls match contacts")
            } else {
                let c = self.contacts[rng.index(self.contacts.len())];
                if c.reciprocated && rng.bernoulli(0.5) {
                    (c.dst, c.src)
                } else {
                    (c.src, c.dst)
                }
            };
            let period = if rng.bernoulli(self.params.work_call_fraction) {
                Period::Work
            } else {
                Period::Leisure
            };
            let timestamp = self.draw_time(&mut rng, period);
            let duration = 1 + rng.below(MAX_DURATION);
            SynthCall { caller, callee, timestamp, duration, period }
        })
    }

    fn draw_time(&self, rng: &mut DetRng, period: Period) -> i64 {
        let cal = &self.calendar;
        let (start, end) = self.params.period.work_window_secs();
        let local = match period {
            Period::Work => {
                let x = rng.unit() * cal.work_total;
                let i = cal.work_days.partition_point(|&(_, c)| c <= x).min(cal.work_days.len() - 1);
                let sec = start + rng.below((end - start) as u64) as i64;
                cal.work_days[i].0 * SECS_PER_DAY + sec
            }
            _ => {
                let x = rng.unit() * cal.leisure_total;
                let i = cal.leisure_days.partition_point(|&(_, c, _)| c <= x).min(cal.leisure_days.len() - 1);
                let (day, _, is_work_day) = cal.leisure_days[i];
                let sec = if is_work_day {
                    let off = rng.below((SECS_PER_DAY - (end - start)) as u64) as i64;
                    if off < start { off } else { off + (end - start) }
                } else {
                    rng.below(SECS_PER_DAY as u64) as i64
                };
                day * SECS_PER_DAY + sec
            }
        };
        local - i64::from(self.params.period.utc_offset_minutes) * 60
    }

    pub fn records(&self) -> impl Iterator<Item = CallRecord> + '_ {
        self.events().map(|e| CallRecord {
            caller: subscriber_id(e.caller),
            callee: subscriber_id(e.callee),
            timestamp: e.timestamp,
            duration: e.duration,
        })
    }

    /// The link table and interner that aggregating [`records`](Self::records)
    /// must reproduce: nodes indexed by first appearance (caller before
    /// callee), counts keyed by the period each call was placed in.
    pub fn ground_truth(&self) -> (LinkTable, NodeInterner) {
        let mut index = vec![NodeId::MAX; self.params.node_count];
        let mut order: Vec<NodeId> = Vec::new();
        let mut counts: FxHashMap<(NodeId, NodeId), [LinkStats; 2]> = FxHashMap::default();
        for e in self.events() {
            let mut dense = |v: NodeId| {
                let slot = &mut index[v as usize];
                if *slot == NodeId::MAX {
                    *slot = order.len() as NodeId;
                    order.push(v);
                }
                *slot
            };
            let (s, d) = (dense(e.caller), dense(e.callee));
            let slot = &mut counts.entry((s, d)).or_default()[usize::from(e.period == Period::Leisure)];
            slot.calls += 1;
            slot.duration += e.duration;
        }
        let mut interner = NodeInterner::new();
        for &v in &order {
            interner.intern(&subscriber_id(v));
        }
        let mut table = LinkTable::new(order.len());
        for ((s, d), [work, leisure]) in counts {
            table.add(s, d, Period::Work, work);
            table.add(s, d, Period::Leisure, leisure);
        }
        (table, interner)
    }
}
