//! Serialization of tables and snapshots, and atomic file writes.
//!
//! Numbers are written in shortest round-trip form, so outputs are
//! byte-identical across runs of the same configuration. Rate columns carry
//! two decimals, matching how convergence tables are usually quoted; the JSON
//! form keeps full precision.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use logkg_core::analysis::ConvergenceTable;
use logkg_core::{Field, Grid1D};
use tempfile::NamedTempFile;

use crate::error::{CliError, Result};

pub const TABLE_HEADER: [&str; 10] =
    ["level", "h", "tau", "epsilon", "err_l2", "err_linf", "err_h1", "rate_l2", "rate_linf", "rate_h1"];

pub fn fmt_num(x: f64) -> String {
    ryu::Buffer::new().format(x).to_owned()
}

pub fn fmt_rate(r: Option<f64>) -> String {
    r.map(|v| format!("{v:.2}")).unwrap_or_default()
}

fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

/// One CSV with the rows of every table in order.
pub fn tables_csv(tables: &[ConvergenceTable]) -> Vec<u8> {
    let rows = tables.iter().flat_map(|t| &t.rows).map(|r| {
        vec![
            r.level.to_string(),
            fmt_num(r.h),
            fmt_num(r.tau),
            fmt_num(r.epsilon),
            fmt_num(r.l2),
            fmt_num(r.linf),
            fmt_num(r.h1),
            fmt_rate(r.rate_l2),
            fmt_rate(r.rate_linf),
            fmt_rate(r.rate_h1),
        ]
    });
    csv_bytes(&TABLE_HEADER, rows)
}

pub fn snapshot_csv(grid: &Grid1D, u: &Field) -> Vec<u8> {
    let rows = grid.points().zip(u.iter()).map(|(x, &v)| vec![fmt_num(x), fmt_num(v)]);
    csv_bytes(&["x", "u"], rows)
}

/// `<prefix>_t<time>.csv`, with `time` in plain shortest form (`1`, `0.5`).
pub fn snapshot_path(prefix: &Path, time: f64) -> PathBuf {
    let mut name = OsString::from(prefix.as_os_str());
    name.push(format!("_t{time}.csv"));
    PathBuf::from(name)
}

pub fn json_bytes(value: &serde_json::Value) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("JSON values always serialize");
    out.push(b'\n');
    out
}

/// Writes `bytes` to a temporary file next to `path` and renames it into
/// place, so `path` is either absent, the old content, or complete.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let io = |source| CliError::Io { path: path.to_path_buf(), source };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

/// Writes to `path` atomically, or to standard output when no path is set.
pub fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) => write_atomic(p, bytes),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)
                .and_then(|_| out.flush())
                .map_err(|source| CliError::Io { path: PathBuf::from("<stdout>"), source })
        }
    }
}
