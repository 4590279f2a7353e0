use rustc_hash::FxHashSet;

use crate::error::{Error, Result};
use crate::graph::UndirectedGraph;
use crate::rng::DetRng;
use crate::NodeId;

/// Preferential-attachment growth with internal links.
#[derive(Debug, Clone, PartialEq)]
pub struct PAParams {
    /// Final node count.
    pub n: usize,
    /// Edges brought by each new node.
    pub m: usize,
    /// Probability that a growth step adds an internal link instead of a node.
    pub beta: f64,
    pub seed: u64,
}

impl PAParams {
    pub fn validate(&self) -> Result<()> {
        if self.m < 1 {
            return Err(Error::InvalidParams("m must be at least 1".into()));
        }
        if self.n < self.m + 1 {
            return Err(Error::InvalidParams(format!("n = {} must be at least m + 1 = {}", self.n, self.m + 1)));
        }
        if !(0.0..1.0).contains(&self.beta) {
            return Err(Error::InvalidParams(format!("beta = {} must lie in [0, 1)", self.beta)));
        }
        if NodeId::try_from(self.n).is_err() {
            return Err(Error::InvalidParams("n exceeds the node index range".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PAStats {
    pub internal_links: u64,
    /// Internal-link steps abandoned after [`MAX_LINK_ATTEMPTS`] collisions.
    pub skipped_links: u64,
}

pub const MAX_LINK_ATTEMPTS: u32 = 100;

pub fn generate_pa(params: &PAParams) -> Result<UndirectedGraph> {
    generate_pa_with_stats(params).map(|(g, _)| g)
}

/// Grows a graph from a clique on `m + 1` nodes. Each step, with probability
/// `beta`, joins two distinct existing nodes drawn proportionally to degree
/// (redrawing on self-loops and duplicates); otherwise adds a node linked to
/// `m` distinct existing nodes drawn proportionally to degree.
///
/// Degree-proportional draws pick a uniform entry of the endpoint pool, which
/// holds every edge endpoint once.
pub fn generate_pa_with_stats(params: &PAParams) -> Result<(UndirectedGraph, PAStats)> {
    params.validate()?;
    let PAParams { n, m, beta, seed } = *params;
    let mut rng = DetRng::new(seed);
    let mut stats = PAStats::default();

    let seed_nodes = m + 1;
    let mut edges: Vec<(NodeId, NodeId)> = Vec::with_capacity(n * m);
    let mut pool: Vec<NodeId> = Vec::with_capacity(2 * n * m);
    for u in 0..seed_nodes as NodeId {
        for v in u + 1..seed_nodes as NodeId {
            edges.push((u, v));
            pool.extend([u, v]);
        }
    }
    // Only internal links can collide with existing edges.
    let mut present: Option<FxHashSet<(NodeId, NodeId)>> = (beta > 0.0).then(|| edges.iter().copied().collect());

    let mut nodes = seed_nodes;
    let mut targets: Vec<NodeId> = Vec::with_capacity(m);
    while nodes < n {
        if beta > 0.0 && rng.bernoulli(beta) {
            let present = present.as_mut().expect("edge set kept when beta > 0");
            let mut added = false;
            for _ in 0..MAX_LINK_ATTEMPTS {
                let a = pool[rng.index(pool.len())];
                let b = pool[rng.index(pool.len())];
                let key = (a.min(b), a.max(b));
                if a != b && present.insert(key) {
                    edges.push(key);
                    pool.extend([a, b]);
                    added = true;
                    break;
                }
            }
            if added {
                stats.internal_links += 1;
            } else {
                stats.skipped_links += 1;
            }
            continue;
        }
        let new = nodes as NodeId;
        targets.clear();
        while targets.len() < m {
            let t = pool[rng.index(pool.len())];
            if !targets.contains(&t) {
                targets.push(t);
            }
        }
        for &t in &targets {
            edges.push((t, new));
            pool.extend([t, new]);
            if let Some(p) = present.as_mut() {
                p.insert((t, new));
            }
        }
        nodes += 1;
    }
    let graph = UndirectedGraph::from_edges(n, edges.into_iter().map(|(u, v)| (u, v, false)));
    Ok((graph, stats))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n: usize, m: usize, beta: f64, seed: u64) -> PAParams {
        PAParams { n, m, beta, seed }
    }

    #[test]
    fn tree_when_m_is_one() {
        let g = generate_pa(&params(5, 1, 0.0, 3)).unwrap();
        assert_eq!(g.node_count(), 5);
        assert_eq!(g.edge_count(), 4);
        assert!(g.degrees().all(|d| d >= 1));
    }

    #[test]
    fn edge_count_without_internal_links() {
        let g = generate_pa(&params(1000, 3, 0.0, 9)).unwrap();
        // Seed clique K4 plus 3 edges per later node.
        assert_eq!(g.edge_count(), 6 + 3 * 996);
    }

    #[test]
    fn deterministic() {
        let p = params(2000, 2, 0.3, 77);
        let (a, sa) = generate_pa_with_stats(&p).unwrap();
        let (b, sb) = generate_pa_with_stats(&p).unwrap();
        assert_eq!(a, b);
        assert_eq!(sa, sb);
        assert!(sa.internal_links > 0);
        assert_ne!(a, generate_pa(&params(2000, 2, 0.3, 78)).unwrap());
    }

    #[test]
    fn always_simple() {
        for seed in 0..20 {
            for (m, beta) in [(1, 0.0), (2, 0.5), (3, 0.9)] {
                let (g, stats) = generate_pa_with_stats(&params(300, m, beta, seed)).unwrap();
                assert!(g.check().is_ok());
                let expected = m * (m + 1) / 2 + m * (300 - m - 1) + stats.internal_links as usize;
                assert_eq!(g.edge_count(), expected);
            }
        }
    }

    #[test]
    fn minimal_graph_is_the_seed_clique() {
        let g = generate_pa(&params(3, 2, 0.0, 0)).unwrap();
        assert_eq!(g.edge_count(), 3);
    }

    #[test]
    fn invalid_params() {
        assert!(generate_pa(&params(2, 2, 0.0, 0)).is_err());
        assert!(generate_pa(&params(10, 0, 0.0, 0)).is_err());
        assert!(generate_pa(&params(10, 2, 1.0, 0)).is_err());
        assert!(generate_pa(&params(10, 2, -0.1, 0)).is_err());
        assert!(generate_pa(&params(10, 2, f64::NAN, 0)).is_err());
    }
}
