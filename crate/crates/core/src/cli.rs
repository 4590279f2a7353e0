//! Command-line front end. Every subcommand reads its declared inputs, calls
//! the library, and writes plot-ready files; nothing is computed here that the
//! library does not compute.
//!
//! Exit status: 0 success, 1 usage or parameter error, 2 input I/O or format
//! error, 3 internal invariant violation.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand};

use crate::error::Error;
use crate::generators::{generate_pa_with_stats, generate_uniform, synthesize_log, LogSynthParams, PAParams};
use crate::graph::{build_graph, LinkFilter, UndirectedGraph};
use crate::ingest::{self, io as table_io, Aggregator, DailyVolume, LinkTable, NodeInterner, Period, PeriodConfig, WeekdaySet};
use crate::kcore::{decompose, CoreDecomposition};
use crate::metrics::report::{self, Report, ReportOptions};

pub const LOG_FILE: &str = "calls.log";
pub const TRUTH_LINKS_FILE: &str = "truth_links.csv";
pub const TRUTH_NODES_FILE: &str = "truth_nodes.csv";
pub const LINKS_FILE: &str = "links.csv";
pub const NODES_FILE: &str = "nodes.csv";
pub const DAILY_VOLUME_FILE: &str = "daily_volume.csv";
pub const SIZES_FILE: &str = "shell_sizes.csv";
pub const SHELL_LINKS_FILE: &str = "shell_links.csv";
pub const PAIRS_FILE: &str = "shell_pairs.csv";
pub const KNN_FILE: &str = "knn.csv";

#[derive(Debug, Parser)]
#[command(name = "kshell", version, about = "Call-graph k-shell analysis")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Preferential-attachment graph as an edge list
    GeneratePa {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, default_value_t = 0.0)]
        beta: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Edge-list file to write
        #[arg(long)]
        out: PathBuf,
    },
    /// Uniform random simple graph as an edge list
    GenerateUniform {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        edges: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Synthetic call log plus its ground-truth link table
    GenerateLog(GenerateLogArgs),
    /// Aggregate a call log into a link table and interner manifest
    Ingest {
        /// Call log: caller,callee,epoch_seconds,duration_seconds
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        period: PeriodArgs,
        /// Keep only links whose endpoints both start with this ID prefix
        #[arg(long)]
        prefix: Option<String>,
        /// Output directory
        #[arg(long)]
        out: PathBuf,
    },
    /// Build the undirected graph of one period under a link filter
    Build {
        /// Directory written by `ingest`
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        select: SelectArgs,
        /// Edge-list file to write
        #[arg(long)]
        out: PathBuf,
    },
    /// Core number of every node
    Decompose {
        #[arg(long)]
        graph: PathBuf,
        /// Core-number file to write
        #[arg(long)]
        out: PathBuf,
    },
    /// Per-shell CSV tables
    Metrics {
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        knobs: KnobArgs,
        /// Output directory
        #[arg(long)]
        out: PathBuf,
    },
    /// One JSON document with every metric
    Report {
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        knobs: KnobArgs,
        /// JSON file to write
        #[arg(long)]
        out: PathBuf,
    },
    /// Ingest, then report every requested (period, filter) variant in memory
    Pipeline {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        period: PeriodArgs,
        #[arg(long)]
        prefix: Option<String>,
        /// Periods to report (default: all three)
        #[arg(long = "period", value_delimiter = ',')]
        periods: Vec<Period>,
        /// Filters to report (default: all, recip1, recip4)
        #[arg(long = "filter", value_delimiter = ',')]
        filters: Vec<LinkFilter>,
        #[command(flatten)]
        knobs: KnobArgs,
        /// Output directory
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct GenerateLogArgs {
    #[arg(long, default_value_t = 10_000)]
    pub nodes: usize,
    #[arg(long, default_value_t = 100_000)]
    pub calls: u64,
    #[arg(long, default_value_t = 0.6)]
    pub work_fraction: f64,
    #[arg(long, default_value_t = 0.5)]
    pub recip: f64,
    /// Seven comma-separated relative volumes, Monday first
    #[arg(long, value_delimiter = ',', num_args = 7)]
    pub weekday_weights: Option<Vec<f64>>,
    #[arg(long, default_value_t = 3)]
    pub links_per_node: usize,
    #[arg(long, default_value_t = 0.3)]
    pub contact_beta: f64,
    /// First local date, YYYY-MM-DD
    #[arg(long, default_value = "2005-08-01")]
    pub start: NaiveDate,
    #[arg(long, default_value_t = 31)]
    pub days: u32,
    #[command(flatten)]
    pub period: PeriodArgs,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Output directory
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct PeriodArgs {
    #[arg(long, default_value_t = 8)]
    pub work_start: u32,
    /// Exclusive
    #[arg(long, default_value_t = 18)]
    pub work_end: u32,
    /// Comma-separated: mon,tue,wed,thu,fri,sat,sun
    #[arg(long, value_delimiter = ',', default_value = "mon,tue,wed,thu,fri")]
    pub work_days: Vec<String>,
    #[arg(long, default_value_t = 60, allow_negative_numbers = true)]
    pub utc_offset_minutes: i32,
    #[arg(long)]
    pub keep_self_calls: bool,
}

impl PeriodArgs {
    pub fn to_config(&self) -> Result<PeriodConfig, Error> {
        const NAMES: [&str; 7] = ["mon", "tue", "wed", "thu", "fri", "sat", "sun"];
        let mut days = WeekdaySet::empty();
        for d in &self.work_days {
            let i = NAMES
                .iter()
                .position(|n| n.eq_ignore_ascii_case(d.trim()))
                .ok_or_else(|| Error::InvalidConfig(format!("unknown weekday {d:?}")))?;
            days = days.with(i as u32);
        }
        let cfg = PeriodConfig {
            work_start_hour: self.work_start,
            work_end_hour: self.work_end,
            work_days: days,
            utc_offset_minutes: self.utc_offset_minutes,
            keep_self_calls: self.keep_self_calls,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Args)]
pub struct SelectArgs {
    #[arg(long, default_value = "full")]
    pub period: Period,
    /// all, recip1, recip4 (any recipN)
    #[arg(long, default_value = "all")]
    pub filter: LinkFilter,
}

/// Graph input: an edge list, or an ingest directory plus period and filter.
#[derive(Debug, Clone, Args)]
pub struct SourceArgs {
    #[arg(long, conflicts_with = "input", required_unless_present = "input")]
    pub graph: Option<PathBuf>,
    /// Directory written by `ingest`
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[command(flatten)]
    pub select: SelectArgs,
    /// Core numbers from `decompose`; recomputed when absent
    #[arg(long)]
    pub cores: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct KnobArgs {
    #[arg(long, default_value_t = 1)]
    pub gap_threshold: u32,
    #[arg(long, default_value_t = 5)]
    pub spike_window: u32,
    #[arg(long, default_value_t = 3.0)]
    pub spike_factor: f64,
    #[arg(long)]
    pub include_shell_zero: bool,
}

impl KnobArgs {
    pub fn to_options(&self) -> Result<ReportOptions, Error> {
        if self.gap_threshold < 1 || self.spike_window < 1 || self.spike_factor.is_nan() || self.spike_factor <= 1.0 {
            return Err(Error::InvalidConfig(
                "gap threshold and spike window must be >= 1, spike factor > 1".into(),
            ));
        }
        Ok(ReportOptions {
            gap_threshold: self.gap_threshold,
            spike_window: self.spike_window,
            spike_factor: self.spike_factor,
            include_shell_zero: self.include_shell_zero,
        })
    }
}

/// Parses `args` (program name first) and runs the command. Returns the exit status.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidConfig(_) | Error::InvalidParams(_) | Error::EmptyShell(_) => 1,
        Error::Io(_) | Error::Format { .. } => 2,
        Error::Invariant(_) => 3,
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, Error> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| io::Error::new(e.kind(), format!("{}: {e}", path.display())).into())
}

fn write_file(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> Result<(), Error>) -> Result<(), Error> {
    let mut w = create(path)?;
    f(&mut w)?;
    w.flush()?;
    log::info!("wrote {}", path.display());
    Ok(())
}

fn open(path: &Path) -> Result<BufReader<File>, Error> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| io::Error::new(e.kind(), format!("{}: {e}", path.display())).into())
}

fn invariant(r: Result<(), String>) -> Result<(), Error> {
    r.map_err(Error::Invariant)
}

/// Result of reading and aggregating a call log.
pub struct Ingested {
    pub table: LinkTable,
    pub interner: NodeInterner,
    pub daily_volume: Vec<(NaiveDate, u64)>,
    pub records: u64,
    pub skipped_lines: usize,
}

/// Streams a log file through aggregation and the daily-volume tally, then
/// applies the optional prefix filter.
pub fn ingest_file(path: &Path, cfg: &PeriodConfig, prefix: Option<&str>) -> Result<Ingested, Error> {
    let start = Instant::now();
    let mut reader = ingest::parse_log(open(path)?);
    let mut interner = NodeInterner::new();
    let mut volume = DailyVolume::default();
    let mut records = 0u64;
    let mut agg = Aggregator::new(cfg, &mut interner);
    for rec in reader.by_ref() {
        let rec = rec?;
        volume.push(&rec, cfg);
        agg.push(&rec);
        records += 1;
    }
    let dropped = agg.self_calls_dropped();
    let mut table = agg.finish();
    let skipped_lines = reader.skipped();
    log::info!(
        "ingested {records} calls ({skipped_lines} malformed lines, {dropped} self-calls dropped) into {} links over {} nodes in {:.1?}",
        table.len(Period::Full),
        interner.len(),
        start.elapsed()
    );
    invariant(table.check())?;
    if let Some(prefix) = prefix {
        let (t, i) = ingest::filter_prefix(&table, &interner, prefix);
        log::info!("prefix {prefix:?} keeps {} links over {} nodes", t.len(Period::Full), i.len());
        table = t;
        interner = i;
    }
    Ok(Ingested {
        table,
        interner,
        daily_volume: volume.finish(),
        records,
        skipped_lines,
    })
}

pub fn load_ingested(dir: &Path) -> Result<(LinkTable, NodeInterner), Error> {
    let nodes = dir.join(NODES_FILE);
    let links = dir.join(LINKS_FILE);
    let interner = table_io::read_nodes(open(&nodes)?, &nodes.display().to_string())?;
    let table = table_io::read_links(open(&links)?, &interner, &links.display().to_string())?;
    Ok((table, interner))
}

fn load_graph(source: &SourceArgs) -> Result<(UndirectedGraph, Option<Period>, Option<LinkFilter>), Error> {
    match (&source.graph, &source.input) {
        (Some(path), _) => {
            let g = UndirectedGraph::read_edge_list(open(path)?, &path.display().to_string())?;
            Ok((g, None, None))
        }
        (None, Some(dir)) => {
            let (table, _) = load_ingested(dir)?;
            let (period, filter) = (source.select.period, source.select.filter);
            Ok((build_graph(&table, period, filter), Some(period), Some(filter)))
        }
        (None, None) => Err(Error::InvalidConfig("either --graph or --input is required".into())),
    }
}

fn load_cores(path: Option<&PathBuf>, g: &UndirectedGraph) -> Result<CoreDecomposition, Error> {
    let Some(path) = path else {
        return Ok(decompose(g));
    };
    let d = CoreDecomposition::read_core_numbers(open(path)?, &path.display().to_string())?;
    if d.node_count() != g.node_count() {
        return Err(Error::format(
            path.display().to_string(),
            0,
            format!("{} core numbers for a graph of {} nodes", d.node_count(), g.node_count()),
        ));
    }
    Ok(d)
}

fn default_filters() -> Vec<LinkFilter> {
    vec![LinkFilter::All, LinkFilter::Reciprocated(1), LinkFilter::Reciprocated(4)]
}

/// File name of a pipeline report, e.g. `report_work_recip1.json`.
pub fn report_file_name(period: Period, filter: LinkFilter) -> String {
    format!("report_{period}_{filter}.json")
}

fn execute(command: Command) -> Result<(), Error> {
    match command {
        Command::GeneratePa { n, m, beta, seed, out } => {
            let (g, stats) = generate_pa_with_stats(&PAParams { n, m, beta, seed })?;
            log::info!(
                "{} nodes, {} edges, {} internal links, {} skipped after collisions",
                g.node_count(),
                g.edge_count(),
                stats.internal_links,
                stats.skipped_links
            );
            write_file(&out, |w| g.write_edge_list(w))
        }
        Command::GenerateUniform { n, edges, seed, out } => {
            let g = generate_uniform(n, edges, seed)?;
            write_file(&out, |w| g.write_edge_list(w))
        }
        Command::GenerateLog(args) => generate_log(args),
        Command::Ingest { input, period, prefix, out } => {
            let cfg = period.to_config()?;
            let ing = ingest_file(&input, &cfg, prefix.as_deref())?;
            write_file(&out.join(LINKS_FILE), |w| table_io::write_links(w, &ing.table, &ing.interner))?;
            write_file(&out.join(NODES_FILE), |w| table_io::write_nodes(w, &ing.interner))?;
            write_file(&out.join(DAILY_VOLUME_FILE), |w| table_io::write_daily_volume(w, &ing.daily_volume))
        }
        Command::Build { input, select, out } => {
            let (table, _) = load_ingested(&input)?;
            let g = build_graph(&table, select.period, select.filter);
            log::info!("{} {}: {} nodes, {} edges", select.period, select.filter, g.node_count(), g.edge_count());
            write_file(&out, |w| g.write_edge_list(w))
        }
        Command::Decompose { graph, out } => {
            let g = UndirectedGraph::read_edge_list(open(&graph)?, &graph.display().to_string())?;
            let start = Instant::now();
            let d = decompose(&g);
            log::info!("k_max = {} over {} nodes in {:.1?}", d.k_max(), g.node_count(), start.elapsed());
            write_file(&out, |w| d.write_core_numbers(w))
        }
        Command::Metrics { source, knobs, out } => {
            let opts = knobs.to_options()?;
            let (g, period, filter) = load_graph(&source)?;
            let d = load_cores(source.cores.as_ref(), &g)?;
            let r = Report::compute(&g, &d, period, filter, &opts)?;
            write_file(&out.join(SIZES_FILE), |w| report::write_sizes_csv(w, &r.shells))?;
            write_file(&out.join(SHELL_LINKS_FILE), |w| report::write_links_csv(w, &r.shells))?;
            write_file(&out.join(PAIRS_FILE), |w| report::write_pairs_csv(w, &r.shell_pairs))?;
            write_file(&out.join(KNN_FILE), |w| report::write_knn_csv(w, &r.degree_correlation))
        }
        Command::Report { source, knobs, out } => {
            let opts = knobs.to_options()?;
            let (g, period, filter) = load_graph(&source)?;
            let d = load_cores(source.cores.as_ref(), &g)?;
            let r = Report::compute(&g, &d, period, filter, &opts)?;
            write_file(&out, |w| Ok(w.write_all(r.to_json().as_bytes())?))
        }
        Command::Pipeline { input, period, prefix, periods, filters, knobs, out } => {
            let opts = knobs.to_options()?;
            let cfg = period.to_config()?;
            let periods = if periods.is_empty() { Period::ALL.to_vec() } else { periods };
            let filters = if filters.is_empty() { default_filters() } else { filters };
            let ing = ingest_file(&input, &cfg, prefix.as_deref())?;
            write_file(&out.join(LINKS_FILE), |w| table_io::write_links(w, &ing.table, &ing.interner))?;
            write_file(&out.join(NODES_FILE), |w| table_io::write_nodes(w, &ing.interner))?;
            write_file(&out.join(DAILY_VOLUME_FILE), |w| table_io::write_daily_volume(w, &ing.daily_volume))?;
            for &p in &periods {
                for &f in &filters {
                    let start = Instant::now();
                    let g = build_graph(&ing.table, p, f);
                    let d = decompose(&g);
                    let r = Report::compute(&g, &d, Some(p), Some(f), &opts)?;
                    log::info!("{p} {f}: {} edges, k_max {} in {:.1?}", g.edge_count(), d.k_max(), start.elapsed());
                    write_file(&out.join(report_file_name(p, f)), |w| Ok(w.write_all(r.to_json().as_bytes())?))?;
                }
            }
            Ok(())
        }
    }
}

fn generate_log(args: GenerateLogArgs) -> Result<(), Error> {
    let defaults = LogSynthParams::default();
    let weekday_weights = match args.weekday_weights {
        Some(w) => w.try_into().map_err(|_| Error::InvalidConfig("expected 7 weekday weights".into()))?,
        None => defaults.weekday_weights,
    };
    let params = LogSynthParams {
        node_count: args.nodes,
        total_calls: args.calls,
        work_call_fraction: args.work_fraction,
        reciprocation_probability: args.recip,
        weekday_weights,
        links_per_node: args.links_per_node,
        contact_beta: args.contact_beta,
        start: args.start,
        days: args.days,
        period: args.period.to_config()?,
        seed: args.seed,
    };
    let log = synthesize_log(&params)?;
    write_file(&args.out.join(LOG_FILE), |w| {
        for rec in log.records() {
            writeln!(w, "{}", rec.to_line())?;
        }
        Ok(())
    })?;
    let (truth, interner) = log.ground_truth();
    write_file(&args.out.join(TRUTH_LINKS_FILE), |w| table_io::write_links(w, &truth, &interner))?;
    write_file(&args.out.join(TRUTH_NODES_FILE), |w| table_io::write_nodes(w, &interner))
}
