use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::Value;

use crate::config::{Format, Resolved};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Twelve significant digits, trailing zeros trimmed (like C's `%.12g`).
pub fn num(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        let s = if s.contains('.') { s.trim_end_matches('0').trim_end_matches('.').to_string() } else { s };
        // rounding may carry into a new digit; re-check in scientific form
        if s.trim_start_matches('-').replace('.', "").trim_start_matches('0').len() <= 12 {
            return if s == "-0" { "0".into() } else { s };
        }
    }
    let s = format!("{x:.11e}");
    let (mantissa, exponent) = s.split_once('e').expect("scientific format");
    let mantissa = mantissa.trim_end_matches('0').trim_end_matches('.');
    format!("{mantissa}e{exponent}")
}

/// Rows of already formatted cells under a fixed header.
#[derive(Clone, Debug)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self { header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

/// Collects artifacts of one run and writes the sidecar at the end.
pub struct Run<'a> {
    pub command: &'static str,
    pub cfg: &'a Resolved,
    artifacts: Vec<String>,
}

impl<'a> Run<'a> {
    pub fn new(command: &'static str, cfg: &'a Resolved) -> Result<Self> {
        fs::create_dir_all(&cfg.out).with_context(|| format!("creating {}", cfg.out.display()))?;
        Ok(Self { command, cfg, artifacts: Vec::new() })
    }

    fn path(&mut self, name: &str) -> PathBuf {
        self.artifacts.push(name.to_string());
        self.cfg.out.join(name)
    }

    pub fn csv(&mut self, name: &str, table: &Table) -> Result<()> {
        if !self.cfg.wants(Format::Csv) {
            return Ok(());
        }
        let path = self.path(name);
        let mut w = csv::Writer::from_path(&path).with_context(|| format!("writing {}", path.display()))?;
        w.write_record(&table.header)?;
        for row in &table.rows {
            w.write_record(row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        if !self.cfg.wants(Format::Json) {
            return Ok(());
        }
        let path = self.path(name);
        write_json(&path, value)
    }

    pub fn svg(&mut self, name: &str, body: String) -> Result<()> {
        if !self.cfg.wants(Format::Svg) {
            return Ok(());
        }
        let path = self.path(name);
        fs::write(&path, body).with_context(|| format!("writing {}", path.display()))
    }

    /// `<command>.run.json`: config, sources, seed, version and artifact list.
    /// Always written.
    pub fn finish(self, summary: Value) -> Result<()> {
        let meta = serde_json::json!({
            "tool": "declab",
            "version": VERSION,
            "command": self.command,
            "seed": self.cfg.seed,
            "config": self.cfg,
            "artifacts": self.artifacts,
            "summary": summary,
        });
        write_json(&self.cfg.out.join(format!("{}.run.json", self.command)), &meta)
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}
