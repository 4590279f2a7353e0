use std::collections::{BTreeMap, HashMap};

use chrono::Datelike;
use kshell::generators::{generate_pa, generate_uniform, synthesize_log, LogSynthParams, PAParams};
use kshell::ingest::{aggregate, daily_volume, filter_prefix, NodeInterner, Period};
use kshell::metrics::{avg_neighbor_degree, detect_nuclei, shell_pair_matrix, shell_report};
use kshell::{build_graph, decompose, LinkFilter, NodeId, UndirectedGraph};

fn ba(n: usize, m: usize, beta: f64, seed: u64) -> UndirectedGraph {
    generate_pa(&PAParams { n, m, beta, seed }).unwrap()
}

#[test]
fn pa_degrees_are_heavy_tailed() {
    let g = ba(100_000, 2, 0.0, 5);
    let mut degrees: Vec<usize> = g.degrees().collect();
    degrees.sort_unstable();
    let median = degrees[degrees.len() / 2];
    let top = *degrees.last().unwrap();
    assert!(top > 10 * median, "max degree {top}, median {median}");
    let small = ba(10_000, 2, 0.0, 5);
    assert!(small.max_degree() < top);
}

#[test]
fn knn_matches_per_node_oracle() {
    let g = ba(1000, 2, 0.2, 3);
    // Oracle: neighbor degrees read off the edge list, grouped in a HashMap.
    let edges: Vec<(NodeId, NodeId)> = g.edges().map(|(u, v, _)| (u, v)).collect();
    let mut adj: HashMap<NodeId, Vec<NodeId>> = HashMap::new();
    for &(u, v) in &edges {
        adj.entry(u).or_default().push(v);
        adj.entry(v).or_default().push(u);
    }
    let mut per_degree: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for u in 0..g.node_count() as NodeId {
        let Some(nbrs) = adj.get(&u) else { continue };
        let mean = nbrs.iter().map(|v| adj[v].len()).sum::<usize>() as f64 / nbrs.len() as f64;
        per_degree.entry(nbrs.len()).or_default().push(mean);
    }
    let got = avg_neighbor_degree(&g);
    assert_eq!(got.by_degree.len(), per_degree.len());
    for (d, means) in per_degree {
        let want = means.iter().sum::<f64>() / means.len() as f64;
        assert_eq!(got.by_degree[&(d as u32)], (want, means.len() as u64), "degree {d}");
    }
}

#[test]
fn knn_per_node_and_per_edge_sums_agree() {
    for seed in 0..5 {
        let g = generate_uniform(500, 1500 + 100 * seed as usize, seed).unwrap();
        let c = avg_neighbor_degree(&g);
        let per_node: f64 = c.by_degree.iter().map(|(&d, &(knn, n))| n as f64 * d as f64 * knn).sum();
        let per_edge: usize = g.edges().map(|(u, v, _)| g.degree(u) + g.degree(v)).sum();
        assert!((per_node - per_edge as f64).abs() < 1e-6 * per_edge as f64);
    }
}

#[test]
fn connected_ba_graph_has_a_nucleus() {
    for beta in [0.0, 0.3] {
        let g = ba(5000, 2, beta, 8);
        let d = decompose(&g);
        let nuclei = detect_nuclei(&g, &d, 1);
        assert!(!nuclei.is_empty());
        let deepest = nuclei.last().unwrap();
        assert!(deepest.is_deepest);
        assert_eq!(deepest.k_hi, d.k_max());
    }
}

#[test]
fn pair_matrices_are_consistent_on_uniform_graphs() {
    let g = generate_uniform(400, 1600, 2).unwrap();
    let d = decompose(&g);
    let report = shell_report(&g, &d);
    for (&s, stats) in &report.shells {
        let row = shell_pair_matrix(&g, &d, s).unwrap();
        assert_eq!(row.total_links(), stats.links);
        for (&k, c) in &row.targets {
            assert_eq!(shell_pair_matrix(&g, &d, k).unwrap().targets[&s].total, c.total);
        }
    }
}

#[test]
fn daily_volume_shows_planted_weekly_pattern() {
    let params = LogSynthParams {
        node_count: 2000,
        total_calls: 60_000,
        weekday_weights: [1.0, 1.0, 1.0, 1.0, 1.0, 0.3, 0.3],
        ..LogSynthParams::default()
    };
    let log = synthesize_log(&params).unwrap();
    let records: Vec<_> = log.records().collect();
    let volume = daily_volume(&records, &params.period);
    assert_eq!(volume.iter().map(|&(_, n)| n).sum::<u64>(), records.len() as u64);

    // Recount by local date straight from the timestamps.
    let mut oracle: BTreeMap<chrono::NaiveDate, u64> = BTreeMap::new();
    for r in &records {
        let local = chrono::DateTime::from_timestamp(r.timestamp + 3600, 0).unwrap().date_naive();
        *oracle.entry(local).or_default() += 1;
    }
    assert_eq!(volume, oracle.into_iter().collect::<Vec<_>>());

    let mean = |weekend: bool| {
        let days: Vec<u64> = volume
            .iter()
            .filter(|(d, _)| (d.weekday().num_days_from_monday() >= 5) == weekend)
            .map(|&(_, n)| n)
            .collect();
        days.iter().sum::<u64>() as f64 / days.len() as f64
    };
    assert!(mean(false) > mean(true), "weekday {} weekend {}", mean(false), mean(true));
}

#[test]
fn prefix_filter_keeps_exactly_incident_nodes() {
    let log = synthesize_log(&LogSynthParams { node_count: 3000, total_calls: 40_000, ..Default::default() }).unwrap();
    let mut interner = NodeInterner::new();
    let table = aggregate(log.records(), &log.params().period, &mut interner);
    let (sub, sub_ids) = filter_prefix(&table, &interner, "PnLa");
    assert!(!sub.is_empty());
    let mut incident = vec![false; sub_ids.len()];
    for ((s, d), stats) in sub.iter(Period::Full) {
        incident[s as usize] = true;
        incident[d as usize] = true;
        let (os, od) = (interner.get(sub_ids.id(s)).unwrap(), interner.get(sub_ids.id(d)).unwrap());
        assert_eq!(table.get(Period::Full, os, od), Some(stats));
        assert_eq!(sub.get(Period::Work, s, d), table.get(Period::Work, os, od));
    }
    assert!(incident.iter().all(|&b| b));
    assert!(sub_ids.ids().all(|id| id.starts_with("PnLa")));
    let expected = table
        .iter(Period::Full)
        .filter(|((s, d), _)| interner.id(*s).starts_with("PnLa") && interner.id(*d).starts_with("PnLa"))
        .count();
    assert_eq!(sub.len(Period::Full), expected);
}

#[test]
fn ingest_is_deterministic() {
    let log = synthesize_log(&LogSynthParams { node_count: 1000, total_calls: 20_000, ..Default::default() }).unwrap();
    let run = || {
        let mut interner = NodeInterner::new();
        let table = aggregate(log.records(), &log.params().period, &mut interner);
        (table.sorted(Period::Full), table.sorted(Period::Work), interner)
    };
    assert_eq!(run(), run());
}

#[test]
fn reciprocated_graphs_are_fully_reciprocated() {
    let log = synthesize_log(&LogSynthParams { node_count: 2000, total_calls: 50_000, ..Default::default() }).unwrap();
    let (table, _) = log.ground_truth();
    for period in Period::ALL {
        let g = build_graph(&table, period, LinkFilter::Reciprocated(1));
        let r = shell_report(&g, &decompose(&g));
        for (k, s) in &r.shells {
            if s.links > 0 {
                assert_eq!(s.recip_fraction(), Some(1.0), "shell {k}");
            }
        }
    }
}
