//! Deterministic file output: every artifact starts with a `# key = value`
//! header naming the command, the config hash, truncations, and tolerances, so
//! a result can always be traced to its exact inputs. No timestamps, no
//! environment data — identical configs must produce byte-identical files.

use std::fmt::Display;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use jcps_core::phasespace::{self, PhaseField};

/// Ordered header lines for one output file.
#[derive(Debug, Clone)]
pub struct Metadata {
    entries: Vec<(String, String)>,
}

impl Metadata {
    /// Start a header with the producing command and the config hash.
    pub fn new(command: &str, config_hash: &str) -> Self {
        let mut m = Metadata { entries: Vec::new() };
        m.push("command", command);
        m.push("config_sha256", config_hash);
        m
    }

    /// Append one `key = value` line.
    pub fn push(&mut self, key: &str, value: impl Display) -> &mut Self {
        self.entries.push((key.to_string(), value.to_string()));
        self
    }

    fn write_header(&self, out: &mut impl Write) -> std::io::Result<()> {
        for (k, v) in &self.entries {
            writeln!(out, "# {k} = {v}")?;
        }
        Ok(())
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .with_context(|| format!("cannot create `{}`", parent.display()))?;
        }
    }
    let file = File::create(path).with_context(|| format!("cannot create `{}`", path.display()))?;
    Ok(BufWriter::new(file))
}

/// Write a phase-space field as `x,y,value` CSV under the given header.
pub fn write_field(path: &Path, field: &PhaseField, meta: &Metadata) -> Result<()> {
    let mut out = create(path)?;
    meta.write_header(&mut out)?;
    phasespace::write_csv(field, &mut out)?;
    out.flush()?;
    Ok(())
}

/// Write a two-column trace (full precision, fixed format) under the header.
pub fn write_trace(path: &Path, columns: [&str; 2], rows: &[(f64, f64)], meta: &Metadata) -> Result<()> {
    let mut out = create(path)?;
    meta.write_header(&mut out)?;
    writeln!(out, "{},{}", columns[0], columns[1])?;
    for &(a, b) in rows {
        writeln!(out, "{a:.16e},{b:.16e}")?;
    }
    out.flush()?;
    Ok(())
}

/// Write a report as pretty JSON (keys sorted by the serializer, so the bytes
/// are deterministic).
pub fn write_report(path: &Path, report: &serde_json::Value) -> Result<()> {
    let mut out = create(path)?;
    serde_json::to_writer_pretty(&mut out, report)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

/// Round-trip-exact JSON for an f64 (JSON has no infinities; the commands only
/// report finite numbers).
pub fn json_f64(v: f64) -> serde_json::Value {
    serde_json::Number::from_f64(v).map_or(serde_json::Value::Null, serde_json::Value::Number)
}

/// Files produced by one command invocation, with its summary report.
#[derive(Debug)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub report: serde_json::Value,
}

impl Outcome {
    /// One line per artifact, for the console.
    pub fn describe(&self) -> String {
        let mut lines = Vec::with_capacity(self.files.len());
        for f in &self.files {
            lines.push(format!("wrote {}", f.display()));
        }
        lines.join("\n")
    }
}
