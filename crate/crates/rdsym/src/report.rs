//! Plain-text reports and CSV emission.
//!
//! CSV: comma separated, `.` decimal point, 17 significant digits, mandatory
//! header row, t-major row order. The same number formatter feeds the report
//! lines, so identical runs produce byte-identical artifacts.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::Result;

/// 17-significant-digit decimal formatting; falls back to exponent notation
/// outside a readable magnitude window.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if (-4..=16).contains(&exp) {
        let decimals = (16 - exp).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.16e}")
    }
}

/// Accumulated report lines, printed and/or written to a file.
#[derive(Default, Debug)]
pub struct Report {
    lines: Vec<String>,
}

impl Report {
    pub fn new() -> Report {
        Report::default()
    }

    pub fn line(&mut self, s: impl Into<String>) {
        self.lines.push(s.into());
    }

    pub fn kv(&mut self, key: &str, value: f64) {
        self.lines.push(format!("{key} = {}", fmt_sig(value)));
    }

    pub fn kv_str(&mut self, key: &str, value: impl std::fmt::Display) {
        self.lines.push(format!("{key} = {value}"));
    }

    pub fn lines(&self) -> &[String] {
        &self.lines
    }

    pub fn text(&self) -> String {
        let mut s = self.lines.join("\n");
        s.push('\n');
        s
    }

    pub fn print(&self) {
        print!("{}", self.text());
    }

    pub fn write_to(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir)?;
        }
        fs::write(path, self.text())?;
        Ok(())
    }
}

/// CSV file writer with the crate's number format.
pub struct CsvWriter {
    file: fs::File,
    path: PathBuf,
    columns: usize,
}

impl CsvWriter {
    pub fn create(path: PathBuf, header: &[&str]) -> Result<CsvWriter> {
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir)?;
        }
        let mut file = fs::File::create(&path)?;
        writeln!(file, "{}", header.join(","))?;
        Ok(CsvWriter {
            file,
            path,
            columns: header.len(),
        })
    }

    pub fn row(&mut self, values: &[f64]) -> Result<()> {
        debug_assert_eq!(values.len(), self.columns);
        let cells: Vec<String> = values.iter().map(|&v| fmt_sig(v)).collect();
        writeln!(self.file, "{}", cells.join(","))?;
        Ok(())
    }

    pub fn path(&self) -> &Path {
        &self.path
    }
}
