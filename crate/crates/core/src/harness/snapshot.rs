//! Field snapshots as CSV with a `#`-prefixed TOML metadata header.
//!
//! ```text
//! # model = "skyrme"
//! # alpha = 1.0
//! # t = 20.0
//! # cells = 4096
//! # r_max = 40.0
//! r,u,ut
//! 4.8828125000000000e-3,...
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{build_grid, RadialGrid};
use crate::model::{ModelKind, ModelParams};
use crate::state::FieldState;

pub const SNAPSHOT_HEADER: &str = "r,u,ut";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SnapshotMeta {
    model: ModelKind,
    alpha: f64,
    t: f64,
    cells: usize,
    r_max: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub state: FieldState,
    pub grid: RadialGrid,
    pub params: ModelParams,
}

/// Renders a snapshot; values carry 17 significant digits so parsing them
/// back is exact.
pub fn format_snapshot(state: &FieldState, grid: &RadialGrid, params: &ModelParams) -> Result<String> {
    state.validate(grid)?;
    let meta = SnapshotMeta {
        model: params.kind,
        alpha: params.alpha,
        t: state.t,
        cells: grid.cell_count(),
        r_max: grid.r_max(),
    };
    let meta = toml::to_string(&meta).expect("metadata serializes");
    let mut out = String::with_capacity(64 * (grid.len() + 8));
    for line in meta.lines() {
        out.push_str("# ");
        out.push_str(line);
        out.push('\n');
    }
    let mut w = csv::Writer::from_writer(out.into_bytes());
    w.write_record(SNAPSHOT_HEADER.split(',')).expect("in-memory write");
    for (i, r) in grid.nodes().enumerate() {
        w.write_record([
            format!("{r:.16e}"),
            format!("{:.16e}", state.u[i]),
            format!("{:.16e}", state.ut[i]),
        ])
        .expect("in-memory write");
    }
    Ok(String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output"))
}

pub fn save_snapshot(state: &FieldState, grid: &RadialGrid, params: &ModelParams, path: &Path) -> Result<()> {
    let text = format_snapshot(state, grid, params)?;
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn parse_snapshot(text: &str, path: &Path) -> Result<Snapshot> {
    let malformed = |message: String| Error::MalformedSnapshot {
        path: PathBuf::from(path),
        message,
    };
    let meta_text: String = text
        .lines()
        .take_while(|l| l.starts_with('#'))
        .map(|l| format!("{}\n", l[1..].trim_start()))
        .collect();
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| malformed(e.to_string()))?
        .iter()
        .collect::<Vec<_>>()
        .join(",");
    if header != SNAPSHOT_HEADER {
        return Err(malformed(format!("header is {header:?}, expected {SNAPSHOT_HEADER:?}")));
    }
    let meta: SnapshotMeta = toml::from_str(&meta_text).map_err(|e| malformed(format!("metadata: {}", e.message())))?;
    let grid = build_grid(meta.cells, meta.r_max).map_err(|e| malformed(e.to_string()))?;
    let params = ModelParams::new(meta.model, meta.alpha).map_err(|e| malformed(e.to_string()))?;
    let mut u = Vec::with_capacity(grid.len());
    let mut ut = Vec::with_capacity(grid.len());
    for (k, record) in reader.records().enumerate() {
        let record = record.map_err(|e| malformed(e.to_string()))?;
        if record.len() != 3 {
            return Err(malformed(format!("row {} has {} fields", k + 1, record.len())));
        }
        let parse = |s: &str| {
            s.parse::<f64>()
                .map_err(|e| malformed(format!("row {}: {s:?}: {e}", k + 1)))
        };
        u.push(parse(&record[1])?);
        ut.push(parse(&record[2])?);
    }
    if u.len() != grid.len() {
        return Err(Error::GridMismatch {
            expected: grid.len(),
            found: u.len(),
        });
    }
    let state = FieldState::new(meta.t, u, ut);
    state.validate(&grid).map_err(|e| malformed(e.to_string()))?;
    Ok(Snapshot { state, grid, params })
}

pub fn load_snapshot(path: &Path) -> Result<Snapshot> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_snapshot(&text, path)
}
