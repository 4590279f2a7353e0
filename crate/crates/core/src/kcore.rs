//! k-core decomposition.
//!
//! [`decompose`] is the O(V + E) bucket algorithm of Batagelj and Zaversnik:
//! nodes sit in an array sorted by current degree with `bin[d]` marking where
//! degree `d` starts; peeling the lowest-degree node moves each neighbor with a
//! larger degree one bin down by swapping it with the first node of its bin.
//! [`naive_decompose`] is the literal recursive pruning and serves as an oracle.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::graph::UndirectedGraph;
use crate::NodeId;

/// Core number of every node plus the shell partition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoreDecomposition {
    core: Vec<u32>,
    /// Nodes grouped by core number, ascending by index within a shell.
    order: Vec<NodeId>,
    /// `order[shell_start[k]..shell_start[k + 1]]` is shell `k`.
    shell_start: Vec<usize>,
}

impl CoreDecomposition {
    pub fn from_core_numbers(core: Vec<u32>) -> Self {
        let k_max = core.iter().copied().max().unwrap_or(0) as usize;
        let shells = if core.is_empty() { 0 } else { k_max + 1 };
        let mut shell_start = vec![0usize; shells + 1];
        for &c in &core {
            shell_start[c as usize + 1] += 1;
        }
        for k in 1..shell_start.len() {
            shell_start[k] += shell_start[k - 1];
        }
        let mut fill = shell_start.clone();
        let mut order = vec![0; core.len()];
        for (i, &c) in core.iter().enumerate() {
            order[fill[c as usize]] = i as NodeId;
            fill[c as usize] += 1;
        }
        CoreDecomposition {
            core,
            order,
            shell_start,
        }
    }

    pub fn node_count(&self) -> usize {
        self.core.len()
    }

    pub fn is_empty(&self) -> bool {
        self.core.is_empty()
    }

    pub fn core_number(&self, node: NodeId) -> u32 {
        self.core[node as usize]
    }

    pub fn core_numbers(&self) -> &[u32] {
        &self.core
    }

    /// Deepest non-empty shell; 0 for an empty graph.
    pub fn k_max(&self) -> u32 {
        self.shell_start.len().saturating_sub(2) as u32
    }

    /// Nodes with core number exactly `k`, ascending.
    pub fn shell(&self, k: u32) -> &[NodeId] {
        let k = k as usize;
        if k + 1 >= self.shell_start.len() {
            return &[];
        }
        &self.order[self.shell_start[k]..self.shell_start[k + 1]]
    }

    /// Non-empty shells in ascending `k`.
    pub fn shells(&self) -> impl Iterator<Item = (u32, &[NodeId])> + '_ {
        (0..self.shell_start.len().saturating_sub(1) as u32)
            .map(|k| (k, self.shell(k)))
            .filter(|(_, s)| !s.is_empty())
    }

    /// Nodes with core number `>= k`, ascending by core number then index.
    pub fn core_nodes(&self, k: u32) -> &[NodeId] {
        let k = (k as usize).min(self.shell_start.len().saturating_sub(1));
        &self.order[self.shell_start.get(k).copied().unwrap_or(0)..]
    }

    /// Writes `node_index core_number` lines in index order.
    pub fn write_core_numbers<W: Write>(&self, out: &mut W) -> Result<()> {
        for (i, c) in self.core.iter().enumerate() {
            writeln!(out, "{i} {c}")?;
        }
        Ok(())
    }

    pub fn read_core_numbers<R: BufRead>(reader: R, path: &str) -> Result<Self> {
        let mut core = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let bad = || Error::format(path, i + 1, "expected `node_index core_number` in index order");
            let (node, c) = line.trim().split_once(' ').ok_or_else(bad)?;
            let node: usize = node.parse().map_err(|_| bad())?;
            let c: u32 = c.trim().parse().map_err(|_| bad())?;
            if node != core.len() {
                return Err(bad());
            }
            core.push(c);
        }
        Ok(Self::from_core_numbers(core))
    }
}

/// Linear-time core decomposition.
pub fn decompose(g: &UndirectedGraph) -> CoreDecomposition {
    let n = g.node_count();
    if n == 0 {
        return CoreDecomposition::from_core_numbers(Vec::new());
    }
    let mut deg: Vec<usize> = g.degrees().collect();
    let max_deg = g.max_degree();

    let mut bin = vec![0usize; max_deg + 1];
    for &d in &deg {
        bin[d] += 1;
    }
    let mut start = 0;
    for b in bin.iter_mut() {
        let count = *b;
        *b = start;
        start += count;
    }

    let mut pos = vec![0usize; n];
    let mut vert = vec![0 as NodeId; n];
    for v in 0..n {
        pos[v] = bin[deg[v]];
        vert[pos[v]] = v as NodeId;
        bin[deg[v]] += 1;
    }
    for d in (1..=max_deg).rev() {
        bin[d] = bin[d - 1];
    }
    bin[0] = 0;

    for i in 0..n {
        let v = vert[i] as usize;
        for &u in g.neighbors(v as NodeId) {
            let u = u as usize;
            if deg[u] > deg[v] {
                let du = deg[u];
                let pu = pos[u];
                let pw = bin[du];
                let w = vert[pw] as usize;
                if u != w {
                    vert.swap(pu, pw);
                    pos[u] = pw;
                    pos[w] = pu;
                }
                bin[du] += 1;
                deg[u] -= 1;
            }
        }
    }
    CoreDecomposition::from_core_numbers(deg.into_iter().map(|d| d as u32).collect())
}

/// Literal recursive pruning: for k = 1, 2, ... repeatedly delete every
/// remaining node with fewer than k remaining neighbors; nodes deleted while
/// pruning to the k-core get core number k - 1. Quadratic; for testing.
pub fn naive_decompose(g: &UndirectedGraph) -> CoreDecomposition {
    let n = g.node_count();
    let mut alive = vec![true; n];
    let mut remaining = n;
    let mut core = vec![0u32; n];
    let mut k = 1u32;
    while remaining > 0 {
        loop {
            let doomed: Vec<usize> = (0..n)
                .filter(|&v| alive[v])
                .filter(|&v| {
                    let live = g.neighbors(v as NodeId).iter().filter(|&&u| alive[u as usize]).count();
                    live < k as usize
                })
                .collect();
            if doomed.is_empty() {
                break;
            }
            for v in doomed {
                alive[v] = false;
                core[v] = k - 1;
                remaining -= 1;
            }
        }
        k += 1;
    }
    CoreDecomposition::from_core_numbers(core)
}

/// Induced subgraph on the k-core together with, for each new index, the
/// original node index. Nodes keep their relative order, so `k = 0` returns
/// the graph unchanged.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subgraph {
    pub graph: UndirectedGraph,
    pub original: Vec<NodeId>,
}

pub fn kcore_subgraph(g: &UndirectedGraph, d: &CoreDecomposition, k: u32) -> Subgraph {
    let mut remap = vec![NodeId::MAX; g.node_count()];
    let mut original = Vec::new();
    for v in 0..g.node_count() as NodeId {
        if d.core_number(v) >= k {
            remap[v as usize] = original.len() as NodeId;
            original.push(v);
        }
    }
    let edges = g
        .edges()
        .filter(|&(u, v, _)| remap[u as usize] != NodeId::MAX && remap[v as usize] != NodeId::MAX)
        .map(|(u, v, f)| (remap[u as usize], remap[v as usize], f));
    Subgraph {
        graph: UndirectedGraph::from_edges(original.len(), edges),
        original,
    }
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    fn graph(n: usize, edges: &[(NodeId, NodeId)]) -> UndirectedGraph {
        UndirectedGraph::from_edges(n, edges.iter().map(|&(u, v)| (u, v, false)))
    }

    fn clique(nodes: std::ops::Range<NodeId>) -> Vec<(NodeId, NodeId)> {
        let mut e = Vec::new();
        for u in nodes.clone() {
            for v in u + 1..nodes.end {
                e.push((u, v));
            }
        }
        e
    }

    fn both(g: &UndirectedGraph) -> CoreDecomposition {
        let fast = decompose(g);
        assert_eq!(fast, naive_decompose(g));
        fast
    }

    #[test]
    fn triangle() {
        let d = both(&graph(3, &[(0, 1), (1, 2), (2, 0)]));
        assert_eq!(d.core_numbers(), [2, 2, 2]);
        assert_eq!(d.k_max(), 2);
        assert_eq!(d.shell(2), [0, 1, 2]);
        assert!(d.shell(1).is_empty());
    }

    #[test]
    fn star_is_one_core() {
        let d = both(&graph(6, &[(0, 1), (0, 2), (0, 3), (0, 4), (0, 5)]));
        assert_eq!(d.core_numbers(), [1; 6]);
    }

    #[test]
    fn k4_with_pendant() {
        let mut e = clique(0..4);
        e.push((0, 4));
        let d = both(&graph(5, &e));
        assert_eq!(d.core_numbers(), [3, 3, 3, 3, 1]);
        assert_eq!(d.shells().map(|(k, s)| (k, s.len())).collect::<Vec<_>>(), [(1, 1), (3, 4)]);
    }

    #[test]
    fn disjoint_k4_and_triangle() {
        let mut e = clique(0..4);
        e.extend(clique(4..7));
        let d = both(&graph(7, &e));
        assert_eq!(d.core_numbers(), [3, 3, 3, 3, 2, 2, 2]);
        assert_eq!(d.k_max(), 3);
    }

    #[test]
    fn degenerate_graphs() {
        let empty = both(&graph(0, &[]));
        assert!(empty.is_empty());
        assert_eq!(empty.k_max(), 0);
        assert_eq!(empty.shells().count(), 0);
        let edge = both(&graph(2, &[(0, 1)]));
        assert_eq!(edge.core_numbers(), [1, 1]);
        let isolated = both(&graph(3, &[(0, 1)]));
        assert_eq!(isolated.core_numbers(), [1, 1, 0]);
        assert_eq!(isolated.shell(0), [2]);
    }

    #[test]
    fn subgraphs() {
        let mut e = clique(0..4);
        e.extend(clique(4..7));
        let g = graph(7, &e);
        let d = decompose(&g);
        let k3 = kcore_subgraph(&g, &d, 3);
        assert_eq!(k3.graph, graph(4, &clique(0..4)));
        assert_eq!(k3.original, [0, 1, 2, 3]);
        assert_eq!(kcore_subgraph(&g, &d, 0).graph, g);
        assert_eq!(kcore_subgraph(&g, &d, 9).graph.node_count(), 0);

        let tri = graph(3, &clique(0..3));
        assert_eq!(kcore_subgraph(&tri, &decompose(&tri), 3).graph.node_count(), 0);
    }

    #[test]
    fn core_numbers_file_round_trip() {
        let g = graph(4, &clique(0..3));
        let d = decompose(&g);
        let mut buf = Vec::new();
        d.write_core_numbers(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "0 2\n1 2\n2 2\n3 0\n");
        assert_eq!(CoreDecomposition::read_core_numbers(std::io::Cursor::new(buf), "c").unwrap(), d);
        assert!(CoreDecomposition::read_core_numbers(std::io::Cursor::new("1 2\n"), "c").is_err());
    }

    /// All graphs on up to 6 nodes.
    #[test]
    fn exhaustive_small_graphs_match_oracle() {
        for n in 0..=6u32 {
            let pairs: Vec<(NodeId, NodeId)> = clique(0..n);
            for mask in 0u32..1 << pairs.len() {
                let e: Vec<_> = pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &p)| p).collect();
                both(&graph(n as usize, &e));
            }
        }
    }

    fn arb_graph() -> impl Strategy<Value = UndirectedGraph> {
        (1usize..24).prop_flat_map(|n| {
            proptest::collection::vec((0..n as NodeId, 0..n as NodeId), 0..n * 3)
                .prop_map(move |e| graph(n, &e))
        })
    }

    proptest! {
        #[test]
        fn matches_oracle(g in arb_graph()) {
            prop_assert_eq!(decompose(&g), naive_decompose(&g));
        }

        #[test]
        fn core_properties(g in arb_graph()) {
            let d = decompose(&g);
            let n = g.node_count() as NodeId;
            prop_assert_eq!(d.shells().map(|(_, s)| s.len()).sum::<usize>(), g.node_count());
            for v in 0..n {
                prop_assert!(d.core_number(v) as usize <= g.degree(v));
                prop_assert!(d.shell(d.core_number(v)).contains(&v));
            }
            for k in 0..=d.k_max() + 1 {
                let in_core = |v: NodeId| d.core_number(v) >= k;
                let internal = |v: NodeId, member: &dyn Fn(NodeId) -> bool| {
                    g.neighbors(v).iter().filter(|&&u| member(u)).count()
                };
                // Minimum-degree witness.
                for v in (0..n).filter(|&v| in_core(v)) {
                    prop_assert!(internal(v, &in_core) >= k as usize);
                }
                // Maximality under single-node additions.
                for x in (0..n).filter(|&v| !in_core(v)) {
                    let grown = |v: NodeId| in_core(v) || v == x;
                    let ok = (0..n).filter(|&v| grown(v)).all(|v| internal(v, &grown) >= k as usize);
                    prop_assert!(!ok, "node {} could join the {}-core", x, k);
                }
                let sub = kcore_subgraph(&g, &d, k);
                for v in 0..sub.graph.node_count() as NodeId {
                    prop_assert!(sub.graph.degree(v) >= k as usize);
                }
            }
            prop_assert!((0..n).all(|v| d.core_number(v) <= d.k_max()));
        }

        #[test]
        fn relabeling_permutes_core_numbers(g in arb_graph(), seed in any::<u64>()) {
            let n = g.node_count();
            let mut perm: Vec<NodeId> = (0..n as NodeId).collect();
            let mut rng = crate::rng::DetRng::new(seed);
            for i in (1..n).rev() {
                perm.swap(i, rng.index(i + 1));
            }
            let h = UndirectedGraph::from_edges(n, g.edges().map(|(u, v, f)| (perm[u as usize], perm[v as usize], f)));
            let (dg, dh) = (decompose(&g), decompose(&h));
            for (v, &pv) in perm.iter().enumerate() {
                prop_assert_eq!(dg.core_number(v as NodeId), dh.core_number(pv));
            }
        }
    }
}
