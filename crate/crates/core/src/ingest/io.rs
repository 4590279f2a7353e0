//! Text formats for call logs, link tables and interner manifests.
//!
//! * call log: `caller,callee,epoch_seconds,duration_seconds`, no header;
//! * links: `src_id,dst_id,period,call_count,total_duration`, rows sorted by
//!   node index then period (`full`, `work`, `leisure`);
//! * nodes: `id_string,node_index`, in index order;
//! * daily volume: `date,calls`.

use std::io::{BufRead, Write};

use chrono::NaiveDate;

use super::{CallRecord, LinkStats, LinkTable, NodeInterner, Period};
use crate::error::{Error, Result};
use crate::NodeId;

pub const LINKS_HEADER: &str = "src_id,dst_id,period,call_count,total_duration";
pub const NODES_HEADER: &str = "id_string,node_index";

pub fn write_log<'a, W: Write>(out: &mut W, records: impl IntoIterator<Item = &'a CallRecord>) -> Result<()> {
    for r in records {
        writeln!(out, "{},{},{},{}", r.caller, r.callee, r.timestamp, r.duration)?;
    }
    Ok(())
}

pub fn write_links<W: Write>(out: &mut W, table: &LinkTable, interner: &NodeInterner) -> Result<()> {
    writeln!(out, "{LINKS_HEADER}")?;
    for ((s, d), full) in table.sorted(Period::Full) {
        let (sid, did) = (interner.id(s), interner.id(d));
        writeln!(out, "{sid},{did},full,{},{}", full.calls, full.duration)?;
        for period in [Period::Work, Period::Leisure] {
            if let Some(st) = table.get(period, s, d) {
                writeln!(out, "{sid},{did},{period},{},{}", st.calls, st.duration)?;
            }
        }
    }
    Ok(())
}

pub fn write_nodes<W: Write>(out: &mut W, interner: &NodeInterner) -> Result<()> {
    writeln!(out, "{NODES_HEADER}")?;
    for (i, id) in interner.ids().enumerate() {
        writeln!(out, "{id},{i}")?;
    }
    Ok(())
}

pub fn write_daily_volume<W: Write>(out: &mut W, volume: &[(NaiveDate, u64)]) -> Result<()> {
    writeln!(out, "date,calls")?;
    for (date, n) in volume {
        writeln!(out, "{date},{n}")?;
    }
    Ok(())
}

fn lines<R: BufRead>(reader: R, header: &str, path: &str) -> Result<impl Iterator<Item = Result<(usize, String)>>> {
    let mut it = reader.lines().enumerate();
    match it.next() {
        Some((_, Ok(h))) if h == header => {}
        Some((_, Err(e))) => return Err(e.into()),
        _ => return Err(Error::format(path, 1, format!("expected header {header:?}"))),
    }
    Ok(it.map(|(i, l)| l.map(|l| (i + 1, l)).map_err(Error::from)))
}

/// Reads an interner manifest; indices must be `0..n` in order.
pub fn read_nodes<R: BufRead>(reader: R, path: &str) -> Result<NodeInterner> {
    let mut interner = NodeInterner::new();
    for line in lines(reader, NODES_HEADER, path)? {
        let (no, line) = line?;
        let (id, idx) = line
            .rsplit_once(',')
            .ok_or_else(|| Error::format(path, no, "expected id_string,node_index"))?;
        let idx: usize = idx.parse().map_err(|_| Error::format(path, no, "bad node index"))?;
        if id.is_empty() || idx != interner.len() || interner.get(id).is_some() {
            return Err(Error::format(path, no, format!("node {id:?} out of order or duplicated")));
        }
        interner.intern(id);
    }
    Ok(interner)
}

/// Reads a link table written by [`write_links`]. `full` rows must equal the
/// sum of the pair's `work` and `leisure` rows.
pub fn read_links<R: BufRead>(reader: R, interner: &NodeInterner, path: &str) -> Result<LinkTable> {
    let mut table = LinkTable::new(interner.len());
    let mut full_rows: Vec<((NodeId, NodeId), LinkStats, usize)> = Vec::new();
    for line in lines(reader, LINKS_HEADER, path)? {
        let (no, line) = line?;
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 5 {
            return Err(Error::format(path, no, "expected 5 fields"));
        }
        let node = |id: &str| {
            interner
                .get(id)
                .ok_or_else(|| Error::format(path, no, format!("unknown node {id:?}")))
        };
        let key = (node(f[0])?, node(f[1])?);
        let period: Period = f[2].parse().map_err(|_| Error::format(path, no, "bad period"))?;
        let num = |s: &str| s.parse::<u64>().map_err(|_| Error::format(path, no, "bad count"));
        let stats = LinkStats {
            calls: num(f[3])?,
            duration: num(f[4])?,
        };
        if stats.calls == 0 {
            return Err(Error::format(path, no, "call_count must be positive"));
        }
        match period {
            Period::Full => full_rows.push((key, stats, no)),
            p => {
                if table.get(p, key.0, key.1).is_some() {
                    return Err(Error::format(path, no, "duplicate row"));
                }
                table.add(key.0, key.1, p, stats);
            }
        }
    }
    if full_rows.len() != table.len(Period::Full) {
        return Err(Error::format(path, 0, "full rows do not match work/leisure rows"));
    }
    for (key, stats, no) in full_rows {
        if table.get(Period::Full, key.0, key.1) != Some(stats) {
            return Err(Error::format(path, no, "full row is not work + leisure"));
        }
    }
    Ok(table)
}
