//! Trace and curve files.
//!
//! A trace is a CSV with header `index,value` and 1-based indices, plus a
//! JSON sidecar at `<data path>.meta.json`:
//!
//! ```json
//! { "format": "scalefit-trace/1", "length": 4, "model": {...}, "created": "..." }
//! ```
//!
//! Values are written in the shortest decimal form that parses back to the
//! same `f64` (never more than 17 significant digits), so a write/read cycle
//! is bit-exact. Data files contain no timestamps; only the sidecar does.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::cumulant::CumulantTable;
use crate::scaling::{HurstCurve, LocalityCurve};
use crate::synth::{ModelSpec, Trace, TraceMeta};
use crate::wavelet::LogscaleDiagram;
use crate::{Error, Result};

pub const FORMAT_VERSION: &str = "scalefit-trace/1";

/// Sidecar location for a trace data file.
pub fn sidecar_path(data: &Path) -> PathBuf {
    let mut name = data.as_os_str().to_owned();
    name.push(".meta.json");
    PathBuf::from(name)
}

/// Round-trip decimal rendering of an `f64`.
pub fn format_f64(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || !x.is_finite() || (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct Sidecar {
    format: String,
    length: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    model: Option<ModelSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    created: Option<String>,
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

fn csv_writer(path: &Path) -> Result<csv::Writer<BufWriter<File>>> {
    Ok(csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(create(path)?))
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Parse {
            path: path.to_path_buf(),
            line,
            message: format!("{other:?}"),
        },
    }
}

pub fn write_trace(trace: &Trace, path: &Path) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["index", "value"])
        .map_err(|e| csv_error(path, e))?;
    for (i, &x) in trace.samples().iter().enumerate() {
        w.write_record([(i + 1).to_string(), format_f64(x)])
            .map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;

    let sidecar = Sidecar {
        format: FORMAT_VERSION.to_string(),
        length: trace.len(),
        model: trace.meta.model.clone(),
        created: trace.meta.created.clone(),
    };
    let side_path = sidecar_path(path);
    let mut out = create(&side_path)?;
    serde_json::to_writer_pretty(&mut out, &sidecar).map_err(|e| Error::Parse {
        path: side_path.clone(),
        line: 0,
        message: e.to_string(),
    })?;
    out.write_all(b"\n")
        .and_then(|_| out.flush())
        .map_err(|e| Error::io(&side_path, e))
}

/// A trace read from disk.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedTrace {
    pub trace: Trace,
    /// No sidecar was found; metadata is empty.
    pub sidecar_missing: bool,
}

pub fn read_trace(path: &Path) -> Result<LoadedTrace> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(file);

    let headers = reader.headers().map_err(|e| csv_error(path, e))?.clone();
    if headers.len() != 2 || &headers[0] != "index" || &headers[1] != "value" {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line: 1,
            message: format!("expected header \"index,value\", found {:?}", headers.iter().collect::<Vec<_>>().join(",")),
        });
    }

    let mut samples = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map_or(0, |p| p.line());
        let parse_err = |message: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            message,
        };
        if record.len() != 2 {
            return Err(parse_err(format!("expected 2 fields, found {}", record.len())));
        }
        let value: f64 = record[1]
            .parse()
            .map_err(|_| parse_err(format!("non-numeric value {:?}", &record[1])))?;
        if !value.is_finite() {
            return Err(parse_err(format!("non-finite value {:?}", &record[1])));
        }
        samples.push(value);
    }

    let side_path = sidecar_path(path);
    let (meta, sidecar_missing) = match std::fs::read_to_string(&side_path) {
        Ok(text) => {
            let value: serde_json::Value =
                serde_json::from_str(&text).map_err(|e| Error::Parse {
                    path: side_path.clone(),
                    line: e.line() as u64,
                    message: e.to_string(),
                })?;
            let format = value.get("format").and_then(|f| f.as_str()).unwrap_or("");
            if format != FORMAT_VERSION {
                return Err(Error::UnknownVersion {
                    path: side_path,
                    found: format.to_string(),
                });
            }
            let sidecar: Sidecar = serde_json::from_value(value).map_err(|e| Error::Parse {
                path: side_path.clone(),
                line: 0,
                message: e.to_string(),
            })?;
            if sidecar.length != samples.len() {
                return Err(Error::LengthMismatch {
                    expected: sidecar.length,
                    actual: samples.len(),
                });
            }
            (
                TraceMeta {
                    model: sidecar.model,
                    created: sidecar.created,
                },
                false,
            )
        }
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => (TraceMeta::default(), true),
        Err(e) => return Err(Error::io(side_path, e)),
    };

    Ok(LoadedTrace {
        trace: Trace::new(samples, meta)?,
        sidecar_missing,
    })
}

/// Anything that renders as a typed, plot-ready CSV table.
pub trait CurveCsv {
    fn header(&self) -> &'static [&'static str];
    fn rows(&self) -> Vec<Vec<String>>;
}

impl CurveCsv for LocalityCurve {
    fn header(&self) -> &'static [&'static str] {
        &["octave", "hurst"]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.points
            .iter()
            .map(|&(j, h)| vec![format_f64(j), format_f64(h)])
            .collect()
    }
}

impl CurveCsv for LogscaleDiagram {
    fn header(&self) -> &'static [&'static str] {
        &["octave", "log2_energy", "count"]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.octaves
            .iter()
            .zip(&self.energy)
            .zip(&self.counts)
            .map(|((j, e), n)| vec![j.to_string(), format_f64(e.log2()), n.to_string()])
            .collect()
    }
}

impl CurveCsv for CumulantTable {
    fn header(&self) -> &'static [&'static str] {
        &["order", "scale", "log2_abs_cumulant", "usable"]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        let mut rows = Vec::new();
        for &m in self.orders() {
            for (n, value, status) in self.row(m).into_iter().flatten() {
                rows.push(vec![
                    m.to_string(),
                    n.to_string(),
                    format_f64(value.abs().log2()),
                    status.is_usable().to_string(),
                ]);
            }
        }
        rows
    }
}

impl CurveCsv for HurstCurve {
    fn header(&self) -> &'static [&'static str] {
        &["order", "hurst", "r_squared"]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.values()
            .map(|(m, h, r2)| vec![m.to_string(), format_f64(h), format_f64(r2)])
            .collect()
    }
}

pub fn write_curve<C: CurveCsv + ?Sized>(curve: &C, path: &Path) -> Result<()> {
    write_rows(path, curve.header(), &curve.rows())
}

/// Header plus rows, newline-terminated.
pub fn write_rows<S: AsRef<str>>(path: &Path, header: &[&str], rows: &[Vec<S>]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(header).map_err(|e| csv_error(path, e))?;
    for row in rows {
        w.write_record(row.iter().map(|s| s.as_ref()))
            .map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}
