use rustc_hash::FxHashMap;

use super::Period;
use crate::NodeId;

/// Call count and summed duration of one directed pair in one period.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct LinkStats {
    pub calls: u64,
    pub duration: u64,
}

impl LinkStats {
    fn add(&mut self, other: LinkStats) {
        self.calls += other.calls;
        self.duration += other.duration;
    }
}

/// Work and leisure counters of a directed pair. The full-period entry is
/// their sum, so the partition law holds by construction.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct PairCounts {
    work: LinkStats,
    leisure: LinkStats,
}

impl PairCounts {
    fn get(&self, period: Period) -> LinkStats {
        match period {
            Period::Work => self.work,
            Period::Leisure => self.leisure,
            Period::Full => LinkStats {
                calls: self.work.calls + self.leisure.calls,
                duration: self.work.duration + self.leisure.duration,
            },
        }
    }
}

/// Aggregated directed links for the full, work and leisure periods.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LinkTable {
    pairs: FxHashMap<(NodeId, NodeId), PairCounts>,
    node_count: usize,
}

impl LinkTable {
    pub fn new(node_count: usize) -> Self {
        LinkTable {
            pairs: FxHashMap::default(),
            node_count,
        }
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub(crate) fn set_node_count(&mut self, n: usize) {
        debug_assert!(n >= self.node_count);
        self.node_count = n;
    }

    /// Adds `stats` to pair `(src, dst)` in `period`, which must be `Work` or `Leisure`.
    pub fn add(&mut self, src: NodeId, dst: NodeId, period: Period, stats: LinkStats) {
        debug_assert!((src as usize) < self.node_count && (dst as usize) < self.node_count);
        if stats.calls == 0 {
            return;
        }
        let entry = self.pairs.entry((src, dst)).or_default();
        match period {
            Period::Work => entry.work.add(stats),
            Period::Leisure => entry.leisure.add(stats),
            Period::Full => panic!("calls are recorded in the work or leisure period"),
        }
    }

    pub fn record_call(&mut self, src: NodeId, dst: NodeId, period: Period, duration: u64) {
        self.add(src, dst, period, LinkStats { calls: 1, duration });
    }

    /// Stats for a pair, `None` when it has no calls in `period`.
    pub fn get(&self, period: Period, src: NodeId, dst: NodeId) -> Option<LinkStats> {
        self.pairs
            .get(&(src, dst))
            .map(|c| c.get(period))
            .filter(|s| s.calls > 0)
    }

    /// Call count of a pair in `period`, 0 when absent.
    pub fn calls(&self, period: Period, src: NodeId, dst: NodeId) -> u64 {
        self.get(period, src, dst).map_or(0, |s| s.calls)
    }

    /// Pairs with at least one call in `period`, in unspecified order.
    pub fn iter(&self, period: Period) -> impl Iterator<Item = ((NodeId, NodeId), LinkStats)> + '_ {
        self.pairs
            .iter()
            .map(move |(&k, c)| (k, c.get(period)))
            .filter(|(_, s)| s.calls > 0)
    }

    /// Same as [`iter`](Self::iter), sorted by `(src, dst)`.
    pub fn sorted(&self, period: Period) -> Vec<((NodeId, NodeId), LinkStats)> {
        let mut v: Vec<_> = self.iter(period).collect();
        v.sort_unstable_by_key(|&(k, _)| k);
        v
    }

    pub fn len(&self, period: Period) -> usize {
        match period {
            Period::Full => self.pairs.len(),
            _ => self.iter(period).count(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Checks stored counters: every pair has a call, and nodes are in range.
    pub fn check(&self) -> Result<(), String> {
        for (&(s, d), c) in &self.pairs {
            if c.work.calls + c.leisure.calls == 0 {
                return Err(format!("pair ({s},{d}) has no calls"));
            }
            if s as usize >= self.node_count || d as usize >= self.node_count {
                return Err(format!("pair ({s},{d}) out of range for {} nodes", self.node_count));
            }
        }
        Ok(())
    }
}
