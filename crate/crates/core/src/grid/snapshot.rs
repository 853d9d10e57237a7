//! Delimited-text OD index snapshot.
//!
//! ```text
//! # faregrid od-index v1
//! # anchor_lat=40.698 anchor_lon=-74.025 cell_size_m=30 n_rows=400 n_cols=400 skipped=12
//! o_row,o_col,d_row,d_col,trip_count,total_cents,distance_m,duration_s
//! 10,12,40,41,3,4150,9120,2710
//! ```
//!
//! Rows hold raw sums, not means, so a loaded snapshot merges exactly with a fresh build.

use std::collections::HashMap;
use std::io::{BufRead, BufReader, Read, Write};

use super::{CellIndex, GridSpec, OdAccumulator, OdIndex};
use crate::error::{Error, Result};
use crate::geo::LatLon;

pub const SNAPSHOT_MAGIC: &str = "# faregrid od-index v1";
const COLUMNS: &str = "o_row,o_col,d_row,d_col,trip_count,total_cents,distance_m,duration_s";

pub fn write_snapshot<W: Write>(index: &OdIndex, mut out: W) -> Result<()> {
    let g = index.spec();
    let io = |e| Error::io("<snapshot>", e);
    writeln!(out, "{SNAPSHOT_MAGIC}").map_err(io)?;
    writeln!(
        out,
        "# anchor_lat={} anchor_lon={} cell_size_m={} n_rows={} n_cols={} skipped={}",
        g.anchor.lat,
        g.anchor.lon,
        g.cell_size_m,
        g.n_rows,
        g.n_cols,
        index.skipped_out_of_grid()
    )
    .map_err(io)?;
    writeln!(out, "{COLUMNS}").map_err(io)?;
    for ((o, d), a) in index.sorted_accumulators() {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            o.row, o.col, d.row, d.col, a.trip_count, a.total_cents, a.distance_m, a.duration_s
        )
        .map_err(io)?;
    }
    out.flush().map_err(io)
}

fn bad(detail: impl Into<String>) -> Error {
    Error::Format {
        what: "OD snapshot",
        detail: detail.into(),
    }
}

pub fn read_snapshot<R: Read>(input: R) -> Result<OdIndex> {
    let mut lines = BufReader::new(input).lines();
    let mut next = |what: &str| -> Result<String> {
        lines
            .next()
            .ok_or_else(|| bad(format!("missing {what}")))?
            .map_err(|e| Error::io("<snapshot>", e))
    };
    let magic = next("version header")?;
    if magic.trim() != SNAPSHOT_MAGIC {
        return Err(bad(format!("unsupported version header {magic:?}")));
    }
    let meta = next("grid header")?;
    let meta = meta
        .trim()
        .strip_prefix('#')
        .ok_or_else(|| bad("grid header must start with '#'"))?;
    let mut fields: HashMap<&str, &str> = HashMap::new();
    for kv in meta.split_whitespace() {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| bad(format!("bad header field {kv:?}")))?;
        fields.insert(k, v);
    }
    let get = |k: &str| -> Result<f64> {
        fields
            .get(k)
            .ok_or_else(|| bad(format!("grid header lacks `{k}`")))?
            .parse::<f64>()
            .map_err(|_| bad(format!("grid header `{k}` is not numeric")))
    };
    let spec = GridSpec::new(
        LatLon::new(get("anchor_lat")?, get("anchor_lon")?),
        get("cell_size_m")?,
        get("n_rows")? as u32,
        get("n_cols")? as u32,
    )?;
    let skipped = get("skipped").unwrap_or(0.0) as u64;
    let columns = next("column header")?;
    if columns.trim() != COLUMNS {
        return Err(bad(format!("unexpected columns {columns:?}")));
    }

    let mut buckets = HashMap::new();
    for (i, line) in lines.enumerate() {
        let line = line.map_err(|e| Error::io("<snapshot>", e))?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let v: Vec<i64> = line
            .split(',')
            .map(|f| f.trim().parse::<i64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| bad(format!("data line {} is not integral: {line:?}", i + 4)))?;
        if v.len() != 8 || v[..5].iter().any(|&x| x < 0) || v[4] == 0 {
            return Err(bad(format!("data line {} is malformed: {line:?}", i + 4)));
        }
        let o = CellIndex::new(v[0] as u32, v[1] as u32);
        let d = CellIndex::new(v[2] as u32, v[3] as u32);
        if !spec.contains_cell(o) || !spec.contains_cell(d) {
            return Err(bad(format!("data line {} references a cell outside the grid", i + 4)));
        }
        let acc = OdAccumulator {
            trip_count: v[4] as u64,
            total_cents: v[5],
            distance_m: v[6],
            duration_s: v[7],
        };
        if buckets.insert((o, d), acc).is_some() {
            return Err(bad(format!("duplicate bucket {o} -> {d}")));
        }
    }
    Ok(OdIndex::from_parts(spec, buckets, skipped))
}
