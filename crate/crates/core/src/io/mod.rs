//! On-disk formats. Every CSV starts with a `# schema_version=N` line and a
//! fixed header; loaders reject anything else with the offending line number.
//! Writes go to a temporary file in the target directory and are renamed
//! into place.

mod records;

pub use records::*;

use serde::de::DeserializeOwned;
use serde::Serialize;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use thiserror::Error;

pub const SCHEMA_LINE: &str = "# schema_version=1";

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Schema { path: PathBuf, line: u64, message: String },
}

impl IoError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        IoError::Io { path: path.to_path_buf(), source }
    }

    pub fn schema(path: &Path, line: u64, message: impl Into<String>) -> Self {
        IoError::Schema { path: path.to_path_buf(), line, message: message.into() }
    }

    /// Line number of a schema error.
    pub fn line(&self) -> Option<u64> {
        match self {
            IoError::Schema { line, .. } => Some(*line),
            IoError::Io { .. } => None,
        }
    }
}

pub type Result<T> = std::result::Result<T, IoError>;

/// Write `bytes` to `path` via a sibling temp file and rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(|e| IoError::io(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| IoError::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| IoError::io(path, e))?;
    tmp.persist(path).map_err(|e| IoError::io(path, e.error))?;
    Ok(())
}

/// A row type with a fixed CSV header.
pub trait CsvRecord: Serialize + DeserializeOwned {
    const HEADER: &'static [&'static str];
}

pub fn csv_bytes<T: CsvRecord>(records: &[T]) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(SCHEMA_LINE.as_bytes());
    out.push(b'\n');
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(T::HEADER).expect("write to memory");
    for r in records {
        w.serialize(r).expect("write to memory");
    }
    w.into_inner().expect("flush to memory")
}

pub fn write_records<T: CsvRecord>(path: &Path, records: &[T]) -> Result<()> {
    write_atomic(path, &csv_bytes(records))
}

/// Header and rows written by hand (for tables whose columns are dynamic).
pub fn write_table(path: &Path, header: &[String], rows: &[Vec<String>]) -> Result<()> {
    let mut out = Vec::new();
    out.extend_from_slice(SCHEMA_LINE.as_bytes());
    out.push(b'\n');
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(header).expect("write to memory");
    for r in rows {
        w.write_record(r).expect("write to memory");
    }
    write_atomic(path, &w.into_inner().expect("flush to memory"))
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| IoError::io(path, e))
}

/// Split off and check the schema line; returns the CSV body.
fn check_schema<'a>(path: &Path, text: &'a str) -> Result<&'a str> {
    let (first, rest) = text.split_once('\n').unwrap_or((text, ""));
    if first.trim_end_matches('\r') != SCHEMA_LINE {
        return Err(IoError::schema(path, 1, format!("expected `{SCHEMA_LINE}`")));
    }
    Ok(rest)
}

/// Header plus rows, each row with its 1-based file line number.
pub type Table = (Vec<String>, Vec<(u64, Vec<String>)>);

pub fn read_table(path: &Path) -> Result<Table> {
    let text = read_text(path)?;
    parse_table(path, &text)
}

pub fn parse_table(path: &Path, text: &str) -> Result<Table> {
    let body = check_schema(path, text)?;
    let mut r = csv::ReaderBuilder::new().has_headers(false).flexible(false).from_reader(body.as_bytes());
    let mut header: Option<Vec<String>> = None;
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map(|p| p.line() + 1).unwrap_or(2);
            IoError::schema(path, line, e.to_string())
        })?;
        let line = rec.position().map(|p| p.line() + 1).unwrap_or(0);
        let fields: Vec<String> = rec.iter().map(str::to_string).collect();
        if header.is_none() {
            header = Some(fields);
        } else {
            rows.push((line, fields));
        }
    }
    let header = header.ok_or_else(|| IoError::schema(path, 2, "missing header"))?;
    Ok((header, rows))
}

pub fn read_records<T: CsvRecord>(path: &Path) -> Result<Vec<T>> {
    let text = read_text(path)?;
    parse_records(path, &text)
}

pub fn parse_records<T: CsvRecord>(path: &Path, text: &str) -> Result<Vec<T>> {
    let (header, rows) = parse_table(path, text)?;
    if header != T::HEADER {
        return Err(IoError::schema(path, 2, format!("expected header {}", T::HEADER.join(","))));
    }
    let header = csv::StringRecord::from(header);
    rows.into_iter()
        .map(|(line, fields)| {
            csv::StringRecord::from(fields)
                .deserialize::<T>(Some(&header))
                .map_err(|e| IoError::schema(path, line, e.to_string()))
        })
        .collect()
}

pub fn write_jsonl<T: Serialize>(path: &Path, records: &[T]) -> Result<()> {
    let mut out = Vec::new();
    for r in records {
        serde_json::to_writer(&mut out, r).expect("serialize to memory");
        out.push(b'\n');
    }
    write_atomic(path, &out)
}

/// One JSON object per line; blank lines are skipped.
pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let text = read_text(path)?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).map_err(|e| IoError::schema(path, i as u64 + 1, e.to_string())))
        .collect()
}

/// Paths inside a corpus directory (simulator output or imported data).
#[derive(Debug, Clone)]
pub struct CorpusLayout {
    pub root: PathBuf,
}

impl CorpusLayout {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        CorpusLayout { root: root.into() }
    }

    pub fn manifest(&self) -> PathBuf {
        self.root.join("manifest.csv")
    }
    pub fn token_launch(&self) -> PathBuf {
        self.root.join("token_launch.csv")
    }
    pub fn migrations(&self) -> PathBuf {
        self.root.join("migrations.csv")
    }
    pub fn sol_price(&self) -> PathBuf {
        self.root.join("sol_price.csv")
    }
    pub fn cex_list(&self) -> PathBuf {
        self.root.join("cex.txt")
    }
    pub fn curve_config(&self) -> PathBuf {
        self.root.join("curve.conf")
    }
    pub fn truth_bundles(&self) -> PathBuf {
        self.root.join("truth_bundles.csv")
    }
    pub fn transactions(&self, mint: &str) -> PathBuf {
        self.root.join("transactions").join(format!("{mint}.jsonl"))
    }
    pub fn traces(&self, mint: &str) -> PathBuf {
        self.root.join("traces").join(format!("{mint}.csv"))
    }
    pub fn post(&self, mint: &str) -> PathBuf {
        self.root.join("post").join(format!("{mint}.csv"))
    }
    pub fn truth_events(&self, mint: &str) -> PathBuf {
        self.root.join("truth").join(format!("{mint}.csv"))
    }
}

/// Paths of pipeline outputs.
#[derive(Debug, Clone)]
pub struct OutputLayout {
    pub root: PathBuf,
}

impl OutputLayout {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        OutputLayout { root: root.into() }
    }

    pub fn events(&self, mint: &str) -> PathBuf {
        self.root.join("events").join(format!("{mint}.csv"))
    }
    pub fn breakdown(&self) -> PathBuf {
        self.root.join("breakdown.csv")
    }
    pub fn bundles(&self, mint: &str) -> PathBuf {
        self.root.join("bundles").join(format!("{mint}.csv"))
    }
    pub fn bundle_stats(&self) -> PathBuf {
        self.root.join("bundle_stats.csv")
    }
    pub fn features(&self) -> PathBuf {
        self.root.join("features.csv")
    }
    pub fn features_manifest(&self) -> PathBuf {
        self.root.join("features_manifest.csv")
    }
    pub fn timeseries(&self, mint: &str) -> PathBuf {
        self.root.join("timeseries").join(format!("{mint}.csv"))
    }
    pub fn labels(&self) -> PathBuf {
        self.root.join("labels.csv")
    }
    pub fn ratio_histogram(&self) -> PathBuf {
        self.root.join("ratio_histogram.csv")
    }
    pub fn label_distribution(&self) -> PathBuf {
        self.root.join("label_distribution.csv")
    }
    pub fn task(&self) -> PathBuf {
        self.root.join("task.csv")
    }
    pub fn task_counts(&self) -> PathBuf {
        self.root.join("task_counts.csv")
    }
    pub fn distributions(&self) -> PathBuf {
        self.root.join("distributions.csv")
    }
    pub fn backtest(&self) -> PathBuf {
        self.root.join("backtest.csv")
    }
}

#[cfg(test)]
mod tests;
