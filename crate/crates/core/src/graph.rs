//! Immutable undirected graphs in compressed sparse row form.

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ingest::{LinkTable, Period};
use crate::NodeId;

/// Which directed pairs become undirected edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LinkFilter {
    /// Edge iff calls flow in at least one direction.
    All,
    /// Edge iff `min(count(i->j), count(j->i)) >= r`, `r >= 1`.
    Reciprocated(u64),
}

impl LinkFilter {
    pub fn validate(self) -> Result<()> {
        match self {
            LinkFilter::Reciprocated(0) => Err(Error::InvalidConfig("reciprocity threshold must be >= 1".into())),
            _ => Ok(()),
        }
    }

    fn admits(self, forward: u64, backward: u64) -> bool {
        match self {
            LinkFilter::All => forward > 0 || backward > 0,
            LinkFilter::Reciprocated(r) => forward.min(backward) >= r,
        }
    }
}

impl fmt::Display for LinkFilter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LinkFilter::All => f.write_str("all"),
            LinkFilter::Reciprocated(r) => write!(f, "recip{r}"),
        }
    }
}

impl FromStr for LinkFilter {
    type Err = Error;

    /// `all` or `recip<r>`, e.g. `recip1`, `recip4`.
    fn from_str(s: &str) -> Result<Self> {
        let filter = match s {
            "all" => LinkFilter::All,
            _ => s
                .strip_prefix("recip")
                .and_then(|r| r.parse().ok())
                .map(LinkFilter::Reciprocated)
                .ok_or_else(|| Error::InvalidConfig(format!("unknown link filter {s:?}")))?,
        };
        filter.validate()?;
        Ok(filter)
    }
}

impl Serialize for LinkFilter {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Simple undirected graph with sorted adjacency and a per-edge reciprocity flag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UndirectedGraph {
    offsets: Vec<usize>,
    targets: Vec<NodeId>,
    reciprocated: Vec<bool>,
}

impl UndirectedGraph {
    pub fn empty(node_count: usize) -> Self {
        UndirectedGraph {
            offsets: vec![0; node_count + 1],
            targets: Vec::new(),
            reciprocated: Vec::new(),
        }
    }

    /// Builds a graph from `(u, v, reciprocated)` triples. Self-loops are
    /// dropped; duplicate edges are merged and their flags OR-ed.
    ///
    /// Panics if an endpoint is `>= node_count`.
    pub fn from_edges<I>(node_count: usize, edges: I) -> Self
    where
        I: IntoIterator<Item = (NodeId, NodeId, bool)>,
    {
        let mut list: Vec<(NodeId, NodeId, bool)> = edges
            .into_iter()
            .filter(|&(u, v, _)| u != v)
            .map(|(u, v, f)| (u.min(v), u.max(v), f))
            .collect();
        list.sort_unstable();
        list.dedup_by(|later, kept| {
            if (later.0, later.1) == (kept.0, kept.1) {
                kept.2 |= later.2;
                true
            } else {
                false
            }
        });

        let mut degree = vec![0usize; node_count];
        for &(u, v, _) in &list {
            assert!((v as usize) < node_count, "edge ({u},{v}) out of range for {node_count} nodes");
            degree[u as usize] += 1;
            degree[v as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(node_count + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        // Sorted (u, v) order fills every row in ascending neighbor order.
        let mut fill = offsets[..node_count].to_vec();
        let mut targets = vec![0; 2 * list.len()];
        let mut reciprocated = vec![false; 2 * list.len()];
        for (u, v, f) in list {
            for (a, b) in [(u, v), (v, u)] {
                let slot = &mut fill[a as usize];
                targets[*slot] = b;
                reciprocated[*slot] = f;
                *slot += 1;
            }
        }
        UndirectedGraph {
            offsets,
            targets,
            reciprocated,
        }
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn degree(&self, node: NodeId) -> usize {
        let i = node as usize;
        self.offsets[i + 1] - self.offsets[i]
    }

    /// Sorted neighbors of `node`.
    pub fn neighbors(&self, node: NodeId) -> &[NodeId] {
        let i = node as usize;
        &self.targets[self.offsets[i]..self.offsets[i + 1]]
    }

    /// Neighbors of `node` paired with the reciprocity flag of each edge.
    pub fn neighbor_edges(&self, node: NodeId) -> impl Iterator<Item = (NodeId, bool)> + '_ {
        let i = node as usize;
        let range = self.offsets[i]..self.offsets[i + 1];
        self.targets[range.clone()]
            .iter()
            .copied()
            .zip(self.reciprocated[range].iter().copied())
    }

    pub fn degrees(&self) -> impl ExactSizeIterator<Item = usize> + '_ {
        self.offsets.windows(2).map(|w| w[1] - w[0])
    }

    pub fn max_degree(&self) -> usize {
        self.degrees().max().unwrap_or(0)
    }

    /// Every edge once as `(u, v, reciprocated)` with `u < v`, sorted.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId, bool)> + '_ {
        (0..self.node_count() as NodeId).flat_map(move |u| {
            self.neighbor_edges(u)
                .filter(move |&(v, _)| v > u)
                .map(move |(v, f)| (u, v, f))
        })
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    /// Writes `i j reciprocated_flag` lines (flag 0/1), `i < j`, sorted,
    /// preceded by a `# nodes <n>` header so isolated nodes survive a round trip.
    pub fn write_edge_list<W: Write>(&self, out: &mut W) -> Result<()> {
        writeln!(out, "# nodes {}", self.node_count())?;
        for (u, v, f) in self.edges() {
            writeln!(out, "{u} {v} {}", u8::from(f))?;
        }
        Ok(())
    }

    /// Reads an edge list. Lines starting with `#` are comments, except
    /// `# nodes <n>`, which fixes the node count; without it the count is
    /// one past the largest index. The flag column defaults to 0.
    pub fn read_edge_list<R: BufRead>(reader: R, path: &str) -> Result<Self> {
        let mut declared: Option<usize> = None;
        let mut edges = Vec::new();
        let mut max_index: Option<NodeId> = None;
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            let no = i + 1;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                if let Some(n) = comment.trim().strip_prefix("nodes") {
                    let n = n.trim().parse().map_err(|_| Error::format(path, no, "bad node count"))?;
                    declared = Some(n);
                }
                continue;
            }
            let mut f = line.split_whitespace();
            let mut node = || -> Result<NodeId> {
                f.next()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| Error::format(path, no, "expected `i j [flag]`"))
            };
            let (u, v) = (node()?, node()?);
            let flag = match f.next() {
                None | Some("0") => false,
                Some("1") => true,
                Some(other) => return Err(Error::format(path, no, format!("bad flag {other:?}"))),
            };
            if f.next().is_some() {
                return Err(Error::format(path, no, "trailing fields"));
            }
            max_index = max_index.max(Some(u.max(v)));
            edges.push((u, v, flag));
        }
        let needed = max_index.map_or(0, |m| m as usize + 1);
        let n = match declared {
            Some(n) if n < needed => {
                return Err(Error::format(path, 0, format!("edge index {} exceeds declared {n} nodes", needed - 1)))
            }
            Some(n) => n,
            None => needed,
        };
        Ok(UndirectedGraph::from_edges(n, edges))
    }

    /// Full adjacency scan: symmetric, sorted, no self-loops or duplicates,
    /// flags agree in both directions.
    pub fn check(&self) -> std::result::Result<(), String> {
        for u in 0..self.node_count() as NodeId {
            let nbrs = self.neighbors(u);
            if nbrs.windows(2).any(|w| w[0] >= w[1]) {
                return Err(format!("neighbors of {u} not strictly sorted"));
            }
            for (v, f) in self.neighbor_edges(u) {
                if v == u {
                    return Err(format!("self-loop at {u}"));
                }
                let back = self
                    .neighbors(v)
                    .binary_search(&u)
                    .ok()
                    .map(|i| self.reciprocated[self.offsets[v as usize] + i]);
                if back != Some(f) {
                    return Err(format!("edge {u}-{v} not mirrored"));
                }
            }
        }
        Ok(())
    }
}

/// Undirected graph of one period's links under `filter`. Every node of the
/// table is kept, including those left without edges. Each edge carries the
/// flag `min(count(i->j), count(j->i)) >= 1` regardless of the filter.
pub fn build_graph(table: &LinkTable, period: Period, filter: LinkFilter) -> UndirectedGraph {
    let edges = table.iter(period).filter_map(|((a, b), stats)| {
        if a == b {
            return None;
        }
        let backward = table.calls(period, b, a);
        // Each unordered pair is handled once: from its smaller endpoint when
        // both directions exist, otherwise from the only direction present.
        if a > b && backward > 0 {
            return None;
        }
        let forward = stats.calls;
        filter
            .admits(forward, backward)
            .then_some((a, b, forward.min(backward) >= 1))
    });
    UndirectedGraph::from_edges(table.node_count(), edges)
}

#[cfg(test)]
mod tests {
    use std::io::Cursor;

    use proptest::prelude::*;

    use super::*;
    use crate::ingest::LinkStats;

    fn table(pairs: &[(NodeId, NodeId, u64, Period)], n: usize) -> LinkTable {
        let mut t = LinkTable::new(n);
        for &(s, d, c, p) in pairs {
            t.add(s, d, p, LinkStats { calls: c, duration: 0 });
        }
        t
    }

    #[test]
    fn reciprocated_thresholds() {
        let t = table(&[(0, 1, 3, Period::Work), (1, 0, 1, Period::Work)], 2);
        let g1 = build_graph(&t, Period::Full, LinkFilter::Reciprocated(1));
        assert_eq!(g1.edges().collect::<Vec<_>>(), [(0, 1, true)]);
        let g4 = build_graph(&t, Period::Full, LinkFilter::Reciprocated(4));
        assert_eq!(g4.edge_count(), 0);
        assert_eq!(g4.node_count(), 2);
    }

    #[test]
    fn one_way_link_under_all() {
        let t = table(&[(1, 0, 5, Period::Leisure)], 3);
        let g = build_graph(&t, Period::Full, LinkFilter::All);
        assert_eq!(g.edges().collect::<Vec<_>>(), [(0, 1, false)]);
        assert_eq!(g.degree(2), 0);
        assert_eq!(build_graph(&t, Period::Work, LinkFilter::All).edge_count(), 0);
    }

    #[test]
    fn self_pairs_never_become_edges() {
        let t = table(&[(0, 0, 5, Period::Work), (0, 1, 1, Period::Work)], 2);
        let g = build_graph(&t, Period::Full, LinkFilter::All);
        assert_eq!(g.edge_count(), 1);
        assert!(g.check().is_ok());
    }

    #[test]
    fn degrees_of_small_graphs() {
        let star = UndirectedGraph::from_edges(6, (1..5).map(|i| (0, i, false)));
        assert_eq!(star.degree(0), 4);
        assert_eq!(star.degree(5), 0);
        let tri = UndirectedGraph::from_edges(3, [(0, 1, true), (1, 2, true), (2, 0, true)]);
        assert!((0..3).all(|i| tri.degree(i) == 2));
        assert_eq!(tri.max_degree(), 2);
    }

    #[test]
    fn from_edges_merges_duplicates() {
        let g = UndirectedGraph::from_edges(3, [(1, 0, false), (0, 1, true), (2, 2, true), (1, 2, false)]);
        assert_eq!(g.edges().collect::<Vec<_>>(), [(0, 1, true), (1, 2, false)]);
        assert_eq!(g.neighbors(1), [0, 2]);
        assert!(g.has_edge(2, 1) && !g.has_edge(0, 2));
    }

    #[test]
    fn edge_list_round_trip() {
        let g = UndirectedGraph::from_edges(5, [(3, 1, true), (0, 1, false)]);
        let mut buf = Vec::new();
        g.write_edge_list(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "# nodes 5\n0 1 0\n1 3 1\n");
        assert_eq!(UndirectedGraph::read_edge_list(Cursor::new(buf), "g").unwrap(), g);

        let bare = UndirectedGraph::read_edge_list(Cursor::new("0 1\n1 2\n2 0\n"), "g").unwrap();
        assert_eq!(bare.node_count(), 3);
        assert_eq!(bare.edge_count(), 3);
        assert!(UndirectedGraph::read_edge_list(Cursor::new("0 x\n"), "g").is_err());
        assert!(UndirectedGraph::read_edge_list(Cursor::new("# nodes 2\n0 5\n"), "g").is_err());
    }

    #[test]
    fn filter_parsing() {
        assert_eq!("all".parse::<LinkFilter>().unwrap(), LinkFilter::All);
        assert_eq!("recip4".parse::<LinkFilter>().unwrap(), LinkFilter::Reciprocated(4));
        assert!("recip0".parse::<LinkFilter>().is_err());
        assert!("some".parse::<LinkFilter>().is_err());
        assert_eq!(LinkFilter::Reciprocated(1).to_string(), "recip1");
    }

    fn arb_table() -> impl Strategy<Value = LinkTable> {
        proptest::collection::vec((0u32..12, 0u32..12, 1u64..7, any::<bool>()), 0..80).prop_map(|rows| {
            let mut t = LinkTable::new(12);
            for (s, d, c, work) in rows {
                let p = if work { Period::Work } else { Period::Leisure };
                t.add(s, d, p, LinkStats { calls: c, duration: c });
            }
            t
        })
    }

    fn edge_set(g: &UndirectedGraph) -> std::collections::BTreeSet<(NodeId, NodeId)> {
        g.edges().map(|(u, v, _)| (u, v)).collect()
    }

    proptest! {
        #[test]
        fn graphs_are_well_formed(t in arb_table()) {
            for period in Period::ALL {
                for filter in [LinkFilter::All, LinkFilter::Reciprocated(1), LinkFilter::Reciprocated(3)] {
                    let g = build_graph(&t, period, filter);
                    prop_assert!(g.check().is_ok());
                    prop_assert_eq!(g.degrees().sum::<usize>(), 2 * g.edge_count());
                    for (u, v, f) in g.edges() {
                        let (a, b) = (t.calls(period, u, v), t.calls(period, v, u));
                        prop_assert_eq!(f, a.min(b) >= 1);
                        prop_assert!(filter.admits(a, b));
                    }
                }
            }
        }

        #[test]
        fn reciprocity_filter_is_monotone(t in arb_table(), r in 1u64..6) {
            let loose = edge_set(&build_graph(&t, Period::Full, LinkFilter::Reciprocated(r)));
            let tight = edge_set(&build_graph(&t, Period::Full, LinkFilter::Reciprocated(r + 1)));
            prop_assert!(tight.is_subset(&loose));
        }

        #[test]
        fn periods_cover_full(t in arb_table()) {
            let work = edge_set(&build_graph(&t, Period::Work, LinkFilter::All));
            let leisure = edge_set(&build_graph(&t, Period::Leisure, LinkFilter::All));
            let full = edge_set(&build_graph(&t, Period::Full, LinkFilter::All));
            prop_assert_eq!(work.union(&leisure).copied().collect::<std::collections::BTreeSet<_>>(), full);
        }
    }
}
