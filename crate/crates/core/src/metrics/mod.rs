//! Shell-level structure of a decomposed graph.

pub mod report;

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::UndirectedGraph;
use crate::kcore::CoreDecomposition;
use crate::NodeId;

/// Per-shell counts. `links` counts each edge once for every distinct shell
/// it touches, so an intra-shell edge counts once.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ShellStats {
    pub size: u64,
    pub links: u64,
    pub recip_links: u64,
}

impl ShellStats {
    /// Reciprocated share of incident links; `None` without links.
    pub fn recip_fraction(&self) -> Option<f64> {
        fraction(self.recip_links, self.links)
    }
}

fn fraction(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShellReport {
    /// Non-empty shells, shell 0 included when present.
    pub shells: BTreeMap<u32, ShellStats>,
    pub k_max: u32,
}

impl ShellReport {
    pub fn node_count(&self) -> u64 {
        self.shells.values().map(|s| s.size).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.shells.is_empty()
    }
}

pub fn shell_report(g: &UndirectedGraph, d: &CoreDecomposition) -> ShellReport {
    let mut shells: BTreeMap<u32, ShellStats> = d
        .shells()
        .map(|(k, nodes)| (k, ShellStats { size: nodes.len() as u64, ..Default::default() }))
        .collect();
    let mut touch = |k: u32, recip: bool| {
        let s = shells.get_mut(&k).expect("edge endpoint in an empty shell");
        s.links += 1;
        s.recip_links += u64::from(recip);
    };
    for (u, v, f) in g.edges() {
        let (a, b) = (d.core_number(u), d.core_number(v));
        touch(a, f);
        if a != b {
            touch(b, f);
        }
    }
    ShellReport { shells, k_max: d.k_max() }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct PairCount {
    pub total: u64,
    pub recip: u64,
}

impl PairCount {
    pub fn fraction(&self) -> Option<f64> {
        fraction(self.recip, self.total)
    }
}

/// Links between one source shell and every other shell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShellPairMatrix {
    pub source: u32,
    /// Target shell -> counts; only shells with at least one link appear.
    pub targets: BTreeMap<u32, PairCount>,
}

impl ShellPairMatrix {
    pub fn total_links(&self) -> u64 {
        self.targets.values().map(|c| c.total).sum()
    }
}

pub fn shell_pair_matrix(g: &UndirectedGraph, d: &CoreDecomposition, s: u32) -> Result<ShellPairMatrix> {
    let nodes = d.shell(s);
    if nodes.is_empty() {
        return Err(Error::EmptyShell(s));
    }
    let mut targets: BTreeMap<u32, PairCount> = BTreeMap::new();
    for &u in nodes {
        for (v, f) in g.neighbor_edges(u) {
            let k = d.core_number(v);
            // Intra-shell edges are met from both ends; count them once.
            if k == s && v < u {
                continue;
            }
            let c = targets.entry(k).or_default();
            c.total += 1;
            c.recip += u64::from(f);
        }
    }
    Ok(ShellPairMatrix { source: s, targets })
}

/// Matrices for several source shells, computed in parallel. Results follow
/// the order of `sources`.
pub fn shell_pair_matrices(
    g: &UndirectedGraph,
    d: &CoreDecomposition,
    sources: &[u32],
) -> Result<Vec<ShellPairMatrix>> {
    sources.par_iter().map(|&s| shell_pair_matrix(g, d, s)).collect()
}

/// A run of consecutive non-empty shells set apart by empty shells.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NucleusCandidate {
    pub k_lo: u32,
    pub k_hi: u32,
    pub node_count: u64,
    /// Edges with both endpoints in `[k_lo, k_hi]`.
    pub internal_link_count: u64,
    /// Edges from the run to nodes with core number below `k_lo`.
    pub links_below_range: u64,
    pub is_deepest: bool,
}

/// Splits the non-empty shells `k >= 1` into maximal runs wherever at least
/// `gap_threshold` consecutive shell indices are empty, and reports every run.
/// A connected, gap-free profile gives a single candidate: the deepest core.
/// Returns nothing when the graph has no edges.
pub fn detect_nuclei(g: &UndirectedGraph, d: &CoreDecomposition, gap_threshold: u32) -> Vec<NucleusCandidate> {
    assert!(gap_threshold >= 1, "gap_threshold must be positive");
    let present: Vec<u32> = d.shells().map(|(k, _)| k).filter(|&k| k >= 1).collect();
    let mut runs: Vec<(u32, u32)> = Vec::new();
    for k in present {
        match runs.last_mut() {
            Some((_, hi)) if k - *hi - 1 < gap_threshold => *hi = k,
            _ => runs.push((k, k)),
        }
    }
    let deepest = runs.len().saturating_sub(1);
    runs.iter()
        .enumerate()
        .map(|(i, &(lo, hi))| {
            let mut c = NucleusCandidate {
                k_lo: lo,
                k_hi: hi,
                node_count: 0,
                internal_link_count: 0,
                links_below_range: 0,
                is_deepest: i == deepest,
            };
            for k in lo..=hi {
                for &u in d.shell(k) {
                    c.node_count += 1;
                    for &v in g.neighbors(u) {
                        let kv = d.core_number(v);
                        if kv < lo {
                            c.links_below_range += 1;
                        } else if kv <= hi && u < v {
                            c.internal_link_count += 1;
                        }
                    }
                }
            }
            c
        })
        .collect()
}

/// Which per-shell series [`population_spikes`] scans.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SpikeSeries {
    Size,
    Links,
}

/// Shells whose value exceeds `factor` times the median of their neighbors.
///
/// The series runs over `k = 1..=k_max` with absent shells as 0. For shell
/// `k` the window takes `w = min(window, k - 1, k_max - k)` shells on each
/// side; shells with `w = 0` (the ends, including `k_max`) are not tested.
/// With equal counts on both sides a monotone profile never reaches
/// twice its window median, so it yields no spikes for `factor >= 2`.
pub fn population_spikes(report: &ShellReport, series: SpikeSeries, window: u32, factor: f64) -> Vec<u32> {
    assert!(window >= 1 && factor > 1.0, "window >= 1 and factor > 1 required");
    let k_max = report.k_max;
    let value = |k: u32| {
        report.shells.get(&k).map_or(0, |s| match series {
            SpikeSeries::Size => s.size,
            SpikeSeries::Links => s.links,
        }) as f64
    };
    let mut spikes = Vec::new();
    for k in 2..k_max {
        let w = window.min(k - 1).min(k_max - k);
        let mut around: Vec<f64> = (k - w..k).chain(k + 1..=k + w).map(value).collect();
        around.sort_by(f64::total_cmp);
        let mid = around.len() / 2;
        let median = (around[mid - 1] + around[mid]) / 2.0;
        if value(k) > factor * median {
            spikes.push(k);
        }
    }
    spikes
}

/// Mean neighbor degree averaged over the nodes of each degree.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegreeCorrelation {
    /// Degree -> (knn, number of nodes with that degree).
    pub by_degree: BTreeMap<u32, (f64, u64)>,
}

impl DegreeCorrelation {
    pub fn knn(&self, degree: u32) -> Option<f64> {
        self.by_degree.get(&degree).map(|&(k, _)| k)
    }
}

/// Degree-0 nodes are excluded. Sums run in ascending node order.
pub fn avg_neighbor_degree(g: &UndirectedGraph) -> DegreeCorrelation {
    let mut acc: BTreeMap<u32, (f64, u64)> = BTreeMap::new();
    for u in 0..g.node_count() as NodeId {
        let nbrs = g.neighbors(u);
        if nbrs.is_empty() {
            continue;
        }
        let sum: usize = nbrs.iter().map(|&v| g.degree(v)).sum();
        let e = acc.entry(nbrs.len() as u32).or_default();
        e.0 += sum as f64 / nbrs.len() as f64;
        e.1 += 1;
    }
    for (sum, count) in acc.values_mut() {
        *sum /= *count as f64;
    }
    DegreeCorrelation { by_degree: acc }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ShellDegreeMax {
    pub max_degree: u64,
    pub node: NodeId,
}

/// Largest original degree in each non-empty shell, lowest index on ties.
pub fn degree_core_profile(g: &UndirectedGraph, d: &CoreDecomposition) -> BTreeMap<u32, ShellDegreeMax> {
    d.shells()
        .map(|(k, nodes)| {
            // Shell members are ascending, so the first maximum wins ties.
            let mut best = ShellDegreeMax { max_degree: 0, node: nodes[0] };
            for &v in nodes {
                let deg = g.degree(v) as u64;
                if deg > best.max_degree {
                    best = ShellDegreeMax { max_degree: deg, node: v };
                }
            }
            (k, best)
        })
        .collect()
}
