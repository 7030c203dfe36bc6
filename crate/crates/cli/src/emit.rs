//! CSV and JSON writers for experiment outputs.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde_json::{Map, Value};

#[derive(Debug, thiserror::Error)]
pub enum EmitError {
    #[error("empty series")]
    EmptySeries,
    #[error("table row {row} has {got} values, expected {expected}")]
    RaggedTable { row: usize, got: usize, expected: usize },
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// One indexed data series.
#[derive(Debug, Clone, PartialEq)]
pub enum Series {
    Complex(Vec<(i64, Complex64)>),
    Real(Vec<(i64, f64)>),
    Table { columns: Vec<String>, rows: Vec<(i64, Vec<f64>)> },
}

impl Series {
    pub fn complex(first: i64, values: &[Complex64]) -> Self {
        Series::Complex(values.iter().enumerate().map(|(i, &z)| (first + i as i64, z)).collect())
    }

    pub fn real(first: i64, values: &[f64]) -> Self {
        Series::Real(values.iter().enumerate().map(|(i, &x)| (first + i as i64, x)).collect())
    }

    pub fn len(&self) -> usize {
        match self {
            Series::Complex(v) => v.len(),
            Series::Real(v) => v.len(),
            Series::Table { rows, .. } => rows.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Everything one command produces.
#[derive(Debug, Clone, Default)]
pub struct Report {
    pub command: String,
    pub scalars: Map<String, Value>,
    pub series: Vec<(String, Series)>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            ..Self::default()
        }
    }

    pub fn scalar(&mut self, name: &str, value: Value) -> &mut Self {
        self.scalars.insert(name.to_string(), value);
        self
    }

    pub fn number(&mut self, name: &str, x: f64) -> &mut Self {
        self.scalar(name, number(x))
    }

    pub fn complex(&mut self, name: &str, z: Complex64) -> &mut Self {
        self.scalar(name, complex_value(z))
    }

    pub fn series(&mut self, name: &str, series: Series) -> &mut Self {
        self.series.push((name.to_string(), series));
        self
    }

    /// Scalars plus the command name.
    pub fn summary(&self) -> Value {
        let mut m = Map::new();
        m.insert("command".into(), Value::String(self.command.clone()));
        m.extend(self.scalars.clone());
        Value::Object(m)
    }

    /// Single JSON object with scalars and column arrays.
    pub fn to_json(&self) -> Result<Value, EmitError> {
        let mut m = Map::new();
        m.insert("command".into(), Value::String(self.command.clone()));
        m.extend(self.scalars.clone());
        for (name, series) in &self.series {
            m.insert(name.clone(), series_json(series)?);
        }
        Ok(Value::Object(m))
    }

    /// Writes `<name>.csv` per series plus `summary.json`, or `<command>.json`.
    /// Returns the written paths.
    pub fn write(&self, dir: &Path, format: Format) -> Result<Vec<PathBuf>, EmitError> {
        fs::create_dir_all(dir).map_err(|source| EmitError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        let mut files = Vec::new();
        match format {
            Format::Csv => {
                for (name, series) in &self.series {
                    files.push((dir.join(format!("{name}.csv")), to_csv(series)?));
                }
                files.push((dir.join("summary.json"), json_text(&self.summary())));
            }
            Format::Json => files.push((dir.join(format!("{}.json", self.command)), json_text(&self.to_json()?))),
        }
        let mut written = Vec::with_capacity(files.len());
        for (path, text) in files {
            fs::write(&path, text).map_err(|source| EmitError::Io {
                path: path.clone(),
                source,
            })?;
            written.push(path);
        }
        Ok(written)
    }
}

pub fn json_text(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("values are always serializable");
    s.push('\n');
    s
}

/// Shortest round-trip decimal; scientific notation outside `[1e-5, 1e16)`,
/// negative zero printed as `0`.
pub fn format_float(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let a = x.abs();
    if a.is_finite() && !(1e-5..1e16).contains(&a) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

pub fn number(x: f64) -> Value {
    if x == 0.0 {
        return Value::from(0.0);
    }
    Value::from(x)
}

fn phase(z: Complex64) -> f64 {
    if z.re == 0.0 && z.im == 0.0 {
        0.0
    } else {
        z.arg()
    }
}

pub fn complex_value(z: Complex64) -> Value {
    let mut m = Map::new();
    m.insert("re".into(), number(z.re));
    m.insert("im".into(), number(z.im));
    m.insert("abs".into(), number(z.norm()));
    m.insert("phase_rad".into(), number(phase(z)));
    Value::Object(m)
}

pub fn to_csv(series: &Series) -> Result<String, EmitError> {
    if series.is_empty() {
        return Err(EmitError::EmptySeries);
    }
    let mut out = String::new();
    match series {
        Series::Complex(points) => {
            out.push_str("k,re,im,abs,phase_rad\n");
            for (k, z) in points {
                let _ = writeln!(
                    out,
                    "{k},{},{},{},{}",
                    format_float(z.re),
                    format_float(z.im),
                    format_float(z.norm()),
                    format_float(phase(*z))
                );
            }
        }
        Series::Real(points) => {
            out.push_str("k,value\n");
            for (k, x) in points {
                let _ = writeln!(out, "{k},{}", format_float(*x));
            }
        }
        Series::Table { columns, rows } => {
            out.push('k');
            for c in columns {
                out.push(',');
                out.push_str(c);
            }
            out.push('\n');
            for (i, (k, row)) in rows.iter().enumerate() {
                if row.len() != columns.len() {
                    return Err(EmitError::RaggedTable {
                        row: i,
                        got: row.len(),
                        expected: columns.len(),
                    });
                }
                out.push_str(&k.to_string());
                for x in row {
                    out.push(',');
                    out.push_str(&format_float(*x));
                }
                out.push('\n');
            }
        }
    }
    Ok(out)
}

fn series_json(series: &Series) -> Result<Value, EmitError> {
    if series.is_empty() {
        return Err(EmitError::EmptySeries);
    }
    let column = |f: &dyn Fn(usize) -> f64, n: usize| Value::Array((0..n).map(|i| number(f(i))).collect());
    let mut m = Map::new();
    match series {
        Series::Complex(points) => {
            let n = points.len();
            m.insert("k".into(), points.iter().map(|p| Value::from(p.0)).collect());
            m.insert("re".into(), column(&|i| points[i].1.re, n));
            m.insert("im".into(), column(&|i| points[i].1.im, n));
            m.insert("abs".into(), column(&|i| points[i].1.norm(), n));
            m.insert("phase_rad".into(), column(&|i| phase(points[i].1), n));
        }
        Series::Real(points) => {
            m.insert("k".into(), points.iter().map(|p| Value::from(p.0)).collect());
            m.insert("value".into(), column(&|i| points[i].1, points.len()));
        }
        Series::Table { columns, rows } => {
            m.insert("k".into(), rows.iter().map(|r| Value::from(r.0)).collect());
            for (j, c) in columns.iter().enumerate() {
                if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.1.len() != columns.len()) {
                    return Err(EmitError::RaggedTable {
                        row: i,
                        got: r.1.len(),
                        expected: columns.len(),
                    });
                }
                m.insert(c.clone(), column(&|i| rows[i].1[j], rows.len()));
            }
        }
    }
    Ok(Value::Object(m))
}
