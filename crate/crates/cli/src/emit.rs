//! Deterministic CSV emission: one comment line with provenance, a header
//! row, then data rows in a fixed order.

use std::io::Write;
use std::path::Path;

pub struct Table {
    name: &'static str,
    header: &'static str,
    rows: Vec<String>,
}

impl Table {
    pub fn new(name: &'static str, header: &'static str) -> Self {
        Table { name, header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: String) {
        self.rows.push(row);
    }

    pub fn write(&self, dir: &Path, provenance: &str) -> std::io::Result<std::path::PathBuf> {
        std::fs::create_dir_all(dir)?;
        let path = dir.join(self.name);
        let mut out = std::io::BufWriter::new(std::fs::File::create(&path)?);
        writeln!(out, "# {provenance}")?;
        writeln!(out, "{}", self.header)?;
        for row in &self.rows {
            writeln!(out, "{row}")?;
        }
        out.flush()?;
        Ok(path)
    }
}

/// Fixed decimal rendering: 17 significant digits, scientific notation.
pub fn dec(v: f64) -> String {
    format!("{v:.16e}")
}

/// Quote a CSV field if it contains separators or quotes.
pub fn field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
