//! Plot-ready serialization of the metrics: one CSV per quantity and a single
//! JSON document per (period, filter) graph.

use std::io::Write;

use serde::Serialize;

use super::{
    avg_neighbor_degree, degree_core_profile, detect_nuclei, population_spikes, shell_pair_matrices,
    shell_report, DegreeCorrelation, NucleusCandidate, ShellPairMatrix, ShellReport, SpikeSeries,
};
use crate::error::Result;
use crate::graph::{LinkFilter, UndirectedGraph};
use crate::ingest::Period;
use crate::kcore::CoreDecomposition;
use crate::NodeId;

#[derive(Debug, Clone, Serialize)]
pub struct ReportOptions {
    pub gap_threshold: u32,
    pub spike_window: u32,
    pub spike_factor: f64,
    /// Emit shell 0 (isolated nodes) in the per-shell tables.
    pub include_shell_zero: bool,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions {
            gap_threshold: 1,
            spike_window: 5,
            spike_factor: 3.0,
            include_shell_zero: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShellRow {
    pub k: u32,
    pub size: u64,
    pub links: u64,
    pub recip_links: u64,
    pub recip_fraction: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairRow {
    pub s: u32,
    pub k: u32,
    pub total: u64,
    pub recip: u64,
    pub fraction: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KnnRow {
    pub d: u32,
    pub knn: f64,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegreeMaxRow {
    pub k: u32,
    pub max_degree: u64,
    pub node: NodeId,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spikes {
    pub size: Vec<u32>,
    pub links: Vec<u32>,
}

/// Everything needed to redraw shell-size, links-per-shell, reciprocity,
/// shell-pair and degree-correlation plots for one graph.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub period: Option<Period>,
    pub filter: Option<LinkFilter>,
    pub node_count: usize,
    pub edge_count: usize,
    pub k_max: u32,
    pub gap_threshold: u32,
    pub spike_window: u32,
    pub spike_factor: f64,
    pub shells: Vec<ShellRow>,
    pub shell_pairs: Vec<PairRow>,
    pub nuclei: Vec<NucleusCandidate>,
    pub spikes: Spikes,
    pub degree_correlation: Vec<KnnRow>,
    pub degree_core_profile: Vec<DegreeMaxRow>,
}

impl Report {
    pub fn compute(
        g: &UndirectedGraph,
        d: &CoreDecomposition,
        period: Option<Period>,
        filter: Option<LinkFilter>,
        opts: &ReportOptions,
    ) -> Result<Report> {
        let shells = shell_report(g, d);
        let visible = |k: u32| opts.include_shell_zero || k > 0;
        let sources: Vec<u32> = shells.shells.keys().copied().filter(|&k| visible(k)).collect();
        let matrices = shell_pair_matrices(g, d, &sources)?;
        let (size, links) = if shells.is_empty() {
            (Vec::new(), Vec::new())
        } else {
            (
                population_spikes(&shells, SpikeSeries::Size, opts.spike_window, opts.spike_factor),
                population_spikes(&shells, SpikeSeries::Links, opts.spike_window, opts.spike_factor),
            )
        };
        Ok(Report {
            period,
            filter,
            node_count: g.node_count(),
            edge_count: g.edge_count(),
            k_max: d.k_max(),
            gap_threshold: opts.gap_threshold,
            spike_window: opts.spike_window,
            spike_factor: opts.spike_factor,
            shells: shell_rows(&shells, opts.include_shell_zero),
            shell_pairs: pair_rows(&matrices),
            nuclei: detect_nuclei(g, d, opts.gap_threshold),
            spikes: Spikes { size, links },
            degree_correlation: knn_rows(&avg_neighbor_degree(g)),
            degree_core_profile: degree_core_profile(g, d)
                .into_iter()
                .filter(|&(k, _)| visible(k))
                .map(|(k, m)| DegreeMaxRow { k, max_degree: m.max_degree, node: m.node })
                .collect(),
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

pub fn shell_rows(report: &ShellReport, include_shell_zero: bool) -> Vec<ShellRow> {
    report
        .shells
        .iter()
        .filter(|&(&k, _)| include_shell_zero || k > 0)
        .map(|(&k, s)| ShellRow {
            k,
            size: s.size,
            links: s.links,
            recip_links: s.recip_links,
            recip_fraction: s.recip_fraction(),
        })
        .collect()
}

pub fn pair_rows(matrices: &[ShellPairMatrix]) -> Vec<PairRow> {
    matrices
        .iter()
        .flat_map(|m| {
            m.targets.iter().map(move |(&k, c)| PairRow {
                s: m.source,
                k,
                total: c.total,
                recip: c.recip,
                fraction: c.fraction(),
            })
        })
        .collect()
}

pub fn knn_rows(c: &DegreeCorrelation) -> Vec<KnnRow> {
    c.by_degree
        .iter()
        .map(|(&d, &(knn, count))| KnnRow { d, knn, count })
        .collect()
}

fn opt(f: Option<f64>) -> String {
    f.map(|x| x.to_string()).unwrap_or_default()
}

/// `k,size`
pub fn write_sizes_csv<W: Write>(out: &mut W, rows: &[ShellRow]) -> Result<()> {
    writeln!(out, "k,size")?;
    for r in rows {
        writeln!(out, "{},{}", r.k, r.size)?;
    }
    Ok(())
}

/// `k,links,recip_links,recip_fraction`; the fraction is blank for shells without links.
pub fn write_links_csv<W: Write>(out: &mut W, rows: &[ShellRow]) -> Result<()> {
    writeln!(out, "k,links,recip_links,recip_fraction")?;
    for r in rows {
        writeln!(out, "{},{},{},{}", r.k, r.links, r.recip_links, opt(r.recip_fraction))?;
    }
    Ok(())
}

/// `s,k,total,recip,fraction`
pub fn write_pairs_csv<W: Write>(out: &mut W, rows: &[PairRow]) -> Result<()> {
    writeln!(out, "s,k,total,recip,fraction")?;
    for r in rows {
        writeln!(out, "{},{},{},{},{}", r.s, r.k, r.total, r.recip, opt(r.fraction))?;
    }
    Ok(())
}

/// `d,knn,count`
pub fn write_knn_csv<W: Write>(out: &mut W, rows: &[KnnRow]) -> Result<()> {
    writeln!(out, "d,knn,count")?;
    for r in rows {
        writeln!(out, "{},{},{}", r.d, r.knn, r.count)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kcore::decompose;

    #[test]
    fn csv_columns() {
        let g = UndirectedGraph::from_edges(5, [(0, 1, true), (1, 2, true), (0, 2, false), (0, 3, false)]);
        let d = decompose(&g);
        let r = Report::compute(&g, &d, Some(Period::Work), Some(LinkFilter::All), &ReportOptions::default()).unwrap();
        let csv = |f: &dyn Fn(&mut Vec<u8>) -> Result<()>| {
            let mut buf = Vec::new();
            f(&mut buf).unwrap();
            String::from_utf8(buf).unwrap()
        };
        assert_eq!(csv(&|b| write_sizes_csv(b, &r.shells)), "k,size\n1,1\n2,3\n");
        assert_eq!(
            csv(&|b| write_links_csv(b, &r.shells)),
            "k,links,recip_links,recip_fraction\n1,1,0,0\n2,4,2,0.5\n"
        );
        assert_eq!(
            csv(&|b| write_pairs_csv(b, &r.shell_pairs)),
            "s,k,total,recip,fraction\n1,2,1,0,0\n2,1,1,0,0\n2,2,3,2,0.6666666666666666\n"
        );
        assert_eq!(csv(&|b| write_knn_csv(b, &r.degree_correlation)), "d,knn,count\n1,3,1\n2,2.5,2\n3,1.6666666666666667,1\n");

        let zero = ReportOptions { include_shell_zero: true, ..Default::default() };
        let r0 = Report::compute(&g, &d, None, None, &zero).unwrap();
        assert_eq!(r0.shells[0], ShellRow { k: 0, size: 1, links: 0, recip_links: 0, recip_fraction: None });
        assert_eq!(csv(&|b| write_links_csv(b, &r0.shells[..1])), "k,links,recip_links,recip_fraction\n0,0,0,\n");
    }

    #[test]
    fn json_has_labels() {
        let g = UndirectedGraph::from_edges(3, [(0, 1, true), (1, 2, true), (0, 2, true)]);
        let r = Report::compute(&g, &decompose(&g), Some(Period::Leisure), Some(LinkFilter::Reciprocated(1)), &ReportOptions::default())
            .unwrap();
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["period"], "leisure");
        assert_eq!(v["filter"], "recip1");
        assert_eq!(v["shells"][0]["recip_fraction"], 1.0);
        assert_eq!(v["nuclei"][0]["is_deepest"], true);
    }
}
