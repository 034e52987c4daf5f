//! Result tables and atomic file output.
//!
//! CSV floats use fixed 17-significant-digit scientific notation; JSON floats
//! use the shortest representation that round-trips.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectrum::FloquetSpectrum;

pub const SPECTRUM_HEADER: &str = "index,re_eps,im_eps,I_j";

pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Per-state table with columns `index, re_eps, im_eps, I_j`.
pub fn spectrum_csv(spectrum: &FloquetSpectrum, localization: &[f64]) -> String {
    let mut out = String::from(SPECTRUM_HEADER);
    out.push('\n');
    for (j, e) in spectrum.quasienergies.iter().enumerate() {
        let i = localization.get(j).copied().unwrap_or(f64::NAN);
        out.push_str(&format!("{j},{},{},{}\n", format_float(e.re), format_float(e.im), format_float(i)));
    }
    out
}

/// CSV with arbitrary leading key columns, e.g. `mu0` or `phi`.
pub struct CsvTable {
    header: Vec<String>,
    rows: Vec<String>,
}

impl CsvTable {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            header: columns.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, cells: &[CsvCell]) {
        debug_assert_eq!(cells.len(), self.header.len());
        let line: Vec<String> = cells
            .iter()
            .map(|c| match c {
                CsvCell::Int(i) => i.to_string(),
                CsvCell::Float(x) => format_float(*x),
                CsvCell::Bool(b) => (if *b { "1" } else { "0" }).to_string(),
                CsvCell::Text(s) => s.clone(),
            })
            .collect();
        self.rows.push(line.join(","));
    }

    pub fn render(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for r in &self.rows {
            out.push_str(r);
            out.push('\n');
        }
        out
    }
}

pub enum CsvCell {
    Int(i64),
    Float(f64),
    Bool(bool),
    Text(String),
}

/// One parsed row of a spectrum table.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectrumRow {
    pub index: usize,
    pub re_eps: f64,
    pub im_eps: f64,
    pub localization: f64,
}

pub fn parse_spectrum_csv(text: &str) -> Result<Vec<SpectrumRow>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == SPECTRUM_HEADER => {}
        other => {
            return Err(Error::InvalidInput(format!("unexpected spectrum header {other:?}")));
        }
    }
    let bad = |line: &str| Error::InvalidInput(format!("malformed spectrum row {line:?}"));
    lines
        .filter(|l| !l.trim().is_empty())
        .map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 4 {
                return Err(bad(line));
            }
            Ok(SpectrumRow {
                index: f[0].parse().map_err(|_| bad(line))?,
                re_eps: f[1].parse().map_err(|_| bad(line))?,
                im_eps: f[2].parse().map_err(|_| bad(line))?,
                localization: f[3].parse().map_err(|_| bad(line))?,
            })
        })
        .collect()
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// Writes through a sibling temporary file and renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => std::path::PathBuf::from("."),
    };
    let name = path
        .file_name()
        .ok_or_else(|| Error::Config(format!("output path {} has no file name", path.display())))?
        .to_string_lossy()
        .into_owned();
    let tmp = dir.join(format!(".{name}.tmp-{}", std::process::id()));
    let result = (|| -> std::io::Result<()> {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result.map_err(Error::from)
}
