//! Call-graph analysis toolkit.
//!
//! The pipeline runs from timestamped call logs to shell-level structure:
//!
//! 1. [`ingest`] parses `caller,callee,epoch,duration` lines, interns IDs and
//!    aggregates calls into directed link counts split into work and leisure
//!    periods.
//! 2. [`graph`] turns a link table into an immutable undirected graph under a
//!    link filter (all links, or links reciprocated at least `r` times).
//! 3. [`kcore`] computes core numbers with the linear-time bucket algorithm.
//! 4. [`metrics`] derives shell sizes, links per shell, reciprocity fractions,
//!    shell-pair matrices, nucleus candidates and degree correlations.
//!
//! [`generators`] produces preferential-attachment and uniform graphs plus
//! synthetic call logs with a known ground truth.

pub mod cli;
pub mod error;
pub mod generators;
pub mod graph;
pub mod ingest;
pub mod kcore;
pub mod metrics;
pub mod rng;

pub use error::{Error, Result};
pub use graph::{build_graph, LinkFilter, UndirectedGraph};
pub use ingest::{
    aggregate, classify_period, daily_volume, filter_prefix, parse_log, CallRecord, LinkStats,
    LinkTable, NodeInterner, Period, PeriodConfig,
};
pub use kcore::{decompose, kcore_subgraph, naive_decompose, CoreDecomposition};

/// Dense node index assigned by the interner.
pub type NodeId = u32;
