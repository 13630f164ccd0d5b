use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde_json::{json, Value};

use crate::error::Result;

/// Tabular CSV output, assembled in grid order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self { header: header.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.join(","));
            out.push('\n');
        }
        out
    }
}

pub struct Artifacts {
    pub csv: PathBuf,
    pub json: PathBuf,
}

fn stamp() -> String {
    let d = SystemTime::now().duration_since(UNIX_EPOCH).unwrap_or_default();
    format!("{}{:03}", d.as_secs(), d.subsec_millis())
}

/// Writes `<outdir>/<subcommand>-<timestamp>.csv` and its `.json` sidecar.
pub fn write_artifacts(
    outdir: &Path,
    subcommand: &str,
    table: &Table,
    config: Value,
    summary: &str,
    wall_time_s: f64,
) -> Result<Artifacts> {
    fs::create_dir_all(outdir)?;
    let base = format!("{subcommand}-{}", stamp());
    let csv = outdir.join(format!("{base}.csv"));
    let json_path = outdir.join(format!("{base}.json"));
    fs::write(&csv, table.to_csv())?;
    let meta = json!({
        "subcommand": subcommand,
        "config": config,
        "version": env!("CARGO_PKG_VERSION"),
        "wall_time_s": wall_time_s,
        "rows": table.rows.len(),
        "csv": csv.file_name().map(|f| f.to_string_lossy().into_owned()),
        "summary": summary,
    });
    let mut f = fs::File::create(&json_path)?;
    f.write_all(serde_json::to_string_pretty(&meta).expect("json value").as_bytes())?;
    f.write_all(b"\n")?;
    Ok(Artifacts { csv, json: json_path })
}
