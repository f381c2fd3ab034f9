//! File emission helpers: per-format writers with fixed column order and
//! fixed decimal formatting, so identical runs produce byte-identical files.

use std::collections::BTreeSet;
use std::fs::{self, File};
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::ValueEnum;
use edurace::export::markdown_table;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum Format {
    Csv,
    Jsonl,
    Md,
}

pub struct Emitter {
    out_dir: PathBuf,
    formats: BTreeSet<Format>,
}

impl Emitter {
    pub fn new(out_dir: &Path, formats: &[Format]) -> Result<Self> {
        fs::create_dir_all(out_dir)
            .with_context(|| format!("cannot create output dir {}", out_dir.display()))?;
        Ok(Self {
            out_dir: out_dir.to_path_buf(),
            formats: formats.iter().copied().collect(),
        })
    }

    pub fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.out_dir.join(name)
    }

    pub fn write_text(&self, name: &str, text: &str) -> Result<()> {
        let path = self.path(name);
        fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))
    }

    /// CSV table with a header row, comma delimiter, dot decimals.
    pub fn write_csv(&self, name: &str, headers: &[&str], rows: &[Vec<String>]) -> Result<()> {
        if !self.wants(Format::Csv) {
            return Ok(());
        }
        let path = self.path(name);
        let mut w = csv::Writer::from_writer(
            File::create(&path).with_context(|| format!("cannot create {}", path.display()))?,
        );
        w.write_record(headers)?;
        for row in rows {
            w.write_record(row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_md(&self, name: &str, headers: &[&str], rows: &[Vec<String>]) -> Result<()> {
        if !self.wants(Format::Md) {
            return Ok(());
        }
        self.write_text(name, &markdown_table(headers, rows))
    }

    /// One JSON object per line, full precision.
    pub fn write_jsonl<T: serde::Serialize>(&self, name: &str, records: &[T]) -> Result<()> {
        if !self.wants(Format::Jsonl) {
            return Ok(());
        }
        let path = self.path(name);
        let mut f =
            File::create(&path).with_context(|| format!("cannot create {}", path.display()))?;
        for r in records {
            serde_json::to_writer(&mut f, r)?;
            f.write_all(b"\n")?;
        }
        Ok(())
    }
}

/// Utilities print with 4 decimals.
pub fn u4(v: f64) -> String {
    format!("{v:.4}")
}

/// Efforts and thresholds print with 3 decimals.
pub fn t3(v: f64) -> String {
    format!("{v:.3}")
}
