//! Report writing: append-only CSV (or a JSON array) plus a JSON-lines
//! sidecar `<out>.meta.jsonl` holding the schema version, library version,
//! resolved configuration and timings of every run.

use std::fs::{self, OpenOptions};
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use super::config::{Format, SCHEMA_VERSION};

/// Rows rendered in both output formats.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: String,
    /// CSV data lines, without trailing newlines.
    pub lines: Vec<String>,
    pub json: Vec<Value>,
}

impl Table {
    pub fn from_rows<R: Serialize>(rows: &[R], empty_header: &str) -> io::Result<Table> {
        let mut w = csv::WriterBuilder::new().has_headers(true).from_writer(Vec::new());
        for r in rows {
            w.serialize(r).map_err(io::Error::other)?;
        }
        let bytes = w.into_inner().map_err(|e| io::Error::other(e.to_string()))?;
        let text = String::from_utf8(bytes).map_err(io::Error::other)?;
        let mut it = text.lines();
        let header = it.next().unwrap_or(empty_header).to_string();
        let lines = it.map(str::to_string).collect();
        let json = rows.iter().map(serde_json::to_value).collect::<Result<_, _>>().map_err(io::Error::other)?;
        Ok(Table { header, lines, json })
    }
}

/// Per-run metadata written to the sidecar.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunMeta {
    pub schema_version: u32,
    pub library_version: &'static str,
    pub command: String,
    /// The configuration after defaults and command-line overrides.
    pub config: Value,
    /// Derived quantities per sweep point (durations, sample counts, `θ`, ...).
    pub derived: Vec<Value>,
    pub seeds: Vec<u64>,
    /// Wall time of each row in milliseconds, in row order.
    pub wall_ms: Vec<f64>,
}

impl RunMeta {
    pub fn new(command: &str, config: Value, derived: Vec<Value>, seeds: Vec<u64>, wall_ms: Vec<f64>) -> Self {
        RunMeta {
            schema_version: SCHEMA_VERSION,
            library_version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            config,
            derived,
            seeds,
            wall_ms,
        }
    }
}

pub fn meta_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".meta.jsonl");
    PathBuf::from(s)
}

fn append_csv(path: &Path, table: &Table) -> io::Result<()> {
    let existing = match fs::File::open(path) {
        Ok(f) => io::BufReader::new(f).lines().next().transpose()?,
        Err(e) if e.kind() == io::ErrorKind::NotFound => None,
        Err(e) => return Err(e),
    };
    let mut f = OpenOptions::new().create(true).append(true).open(path)?;
    match existing {
        Some(h) if h != table.header => {
            return Err(io::Error::new(
                io::ErrorKind::InvalidData,
                format!("{} has header `{h}`, expected `{}`", path.display(), table.header),
            ))
        }
        Some(_) => {}
        None => writeln!(f, "{}", table.header)?,
    }
    for line in &table.lines {
        writeln!(f, "{line}")?;
    }
    Ok(())
}

fn append_json(path: &Path, table: &Table) -> io::Result<()> {
    let mut rows: Vec<Value> = match fs::read_to_string(path) {
        Ok(s) if !s.trim().is_empty() => serde_json::from_str(&s).map_err(io::Error::other)?,
        Ok(_) => Vec::new(),
        Err(e) if e.kind() == io::ErrorKind::NotFound => Vec::new(),
        Err(e) => return Err(e),
    };
    rows.extend(table.json.iter().cloned());
    let mut text = serde_json::to_string_pretty(&rows).map_err(io::Error::other)?;
    text.push('\n');
    fs::write(path, text)
}

/// Appends the rows to `out` (or prints them to stdout) and the metadata to
/// the sidecar (or stderr).
pub fn write_report(table: &Table, meta: &RunMeta, out: Option<&Path>, format: Format) -> io::Result<()> {
    let meta_line = serde_json::to_string(meta).map_err(io::Error::other)?;
    match out {
        Some(path) => {
            match format {
                Format::Csv => append_csv(path, table)?,
                Format::Json => append_json(path, table)?,
            }
            let mut m = OpenOptions::new().create(true).append(true).open(meta_path(path))?;
            writeln!(m, "{meta_line}")
        }
        None => {
            let stdout = io::stdout();
            let mut o = stdout.lock();
            match format {
                Format::Csv => {
                    writeln!(o, "{}", table.header)?;
                    for line in &table.lines {
                        writeln!(o, "{line}")?;
                    }
                }
                Format::Json => {
                    writeln!(o, "{}", serde_json::to_string_pretty(&table.json).map_err(io::Error::other)?)?;
                }
            }
            eprintln!("{meta_line}");
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Row {
        seed: u64,
        err: f64,
    }

    fn table(seeds: &[u64]) -> Table {
        let rows: Vec<Row> = seeds.iter().map(|&seed| Row { seed, err: 0.5 }).collect();
        Table::from_rows(&rows, "seed,err").unwrap()
    }

    #[test]
    fn csv_appends_under_one_header() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("r.csv");
        let meta = RunMeta::new("x", Value::Null, vec![], vec![1], vec![0.0]);
        write_report(&table(&[1]), &meta, Some(&out), Format::Csv).unwrap();
        write_report(&table(&[2, 3]), &meta, Some(&out), Format::Csv).unwrap();
        assert_eq!(fs::read_to_string(&out).unwrap(), "seed,err\n1,0.5\n2,0.5\n3,0.5\n");
        let meta_text = fs::read_to_string(meta_path(&out)).unwrap();
        assert_eq!(meta_text.lines().count(), 2);
        assert!(meta_text.contains("\"schema_version\":1"));
    }

    #[test]
    fn mismatched_header_is_refused() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("r.csv");
        fs::write(&out, "a,b\n").unwrap();
        let meta = RunMeta::new("x", Value::Null, vec![], vec![], vec![]);
        assert!(write_report(&table(&[1]), &meta, Some(&out), Format::Csv).is_err());
    }

    #[test]
    fn json_extends_the_array() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("r.json");
        let meta = RunMeta::new("x", Value::Null, vec![], vec![], vec![]);
        write_report(&table(&[1]), &meta, Some(&out), Format::Json).unwrap();
        write_report(&table(&[2]), &meta, Some(&out), Format::Json).unwrap();
        let v: Vec<Value> = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
        assert_eq!(v.len(), 2);
        assert_eq!(v[1]["seed"], 2);
    }
}
