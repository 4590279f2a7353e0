use rustc_hash::FxHashSet;

use crate::error::{Error, Result};
use crate::graph::UndirectedGraph;
use crate::rng::DetRng;
use crate::NodeId;

/// Uniform random simple graph with exactly `edge_count` edges.
///
/// Sparse requests (at most half of all pairs) draw pairs by rejection;
/// denser ones shuffle the full pair list partially and keep a prefix.
pub fn generate_uniform(n: usize, edge_count: usize, seed: u64) -> Result<UndirectedGraph> {
    if NodeId::try_from(n).is_err() {
        return Err(Error::InvalidParams("n exceeds the node index range".into()));
    }
    let max = (n as u128) * (n.saturating_sub(1) as u128) / 2;
    if edge_count as u128 > max {
        return Err(Error::InvalidParams(format!(
            "{edge_count} edges do not fit in a simple graph on {n} nodes (max {max})"
        )));
    }
    let mut rng = DetRng::new(seed);
    let edges: Vec<(NodeId, NodeId)> = if (edge_count as u128) * 2 <= max {
        let mut seen = FxHashSet::default();
        let mut out = Vec::with_capacity(edge_count);
        while out.len() < edge_count {
            let a = rng.index(n) as NodeId;
            let b = rng.index(n) as NodeId;
            let key = (a.min(b), a.max(b));
            if a != b && seen.insert(key) {
                out.push(key);
            }
        }
        out
    } else {
        let mut all = Vec::with_capacity(max as usize);
        for u in 0..n as NodeId {
            for v in u + 1..n as NodeId {
                all.push((u, v));
            }
        }
        for i in 0..edge_count {
            let j = i + rng.index(all.len() - i);
            all.swap(i, j);
        }
        all.truncate(edge_count);
        all
    };
    Ok(UndirectedGraph::from_edges(n, edges.into_iter().map(|(u, v)| (u, v, false))))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_edges_gives_clique() {
        let g = generate_uniform(4, 6, 1).unwrap();
        assert_eq!(g.edge_count(), 6);
        assert!(g.degrees().all(|d| d == 3));
    }

    #[test]
    fn zero_edges() {
        let g = generate_uniform(10, 0, 1).unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (10, 0));
        assert_eq!(generate_uniform(0, 0, 1).unwrap().node_count(), 0);
    }

    #[test]
    fn deterministic_and_exact() {
        let a = generate_uniform(1000, 2000, 5).unwrap();
        assert_eq!(a, generate_uniform(1000, 2000, 5).unwrap());
        assert_eq!(a.edge_count(), 2000);
        assert!(a.check().is_ok());
        let dense = generate_uniform(30, 400, 5).unwrap();
        assert_eq!(dense.edge_count(), 400);
        assert_eq!(dense, generate_uniform(30, 400, 5).unwrap());
    }

    #[test]
    fn infeasible() {
        assert!(generate_uniform(4, 7, 1).is_err());
        assert!(generate_uniform(1, 1, 1).is_err());
    }
}
