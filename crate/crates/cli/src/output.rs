//! Tabular output: CSV with a trailing metadata comment, or JSON.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde_json::{json, Map, Value};
use szego_core::zeros::SCHEMA_VERSION;
use szego_core::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(format!("unknown format '{}' (csv or json)", s)),
        }
    }
}

/// Which columns a plot script draws.
#[derive(Debug, Clone)]
pub struct PlotHint {
    pub x: usize,
    pub ys: Vec<usize>,
    pub logx: bool,
    pub logy: bool,
}

#[derive(Debug, Clone)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// Command-specific summary entries.
    pub summary: Vec<(String, String)>,
    /// Run-wide entries (m, tolerances); written last.
    pub meta: Vec<(String, String)>,
    pub plot: Option<PlotHint>,
}

pub fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else if x == 0.0 || (1e-4..1e15).contains(&x.abs()) {
        format!("{}", x)
    } else {
        format!("{:e}", x)
    }
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
            summary: Vec::new(),
            meta: Vec::new(),
            plot: None,
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn note(&mut self, key: &str, value: impl Into<String>) {
        self.summary.push((key.to_string(), value.into()));
    }

    pub fn plot(mut self, x: usize, ys: &[usize], logx: bool, logy: bool) -> Self {
        self.plot = Some(PlotHint {
            x,
            ys: ys.to_vec(),
            logx,
            logy,
        });
        self
    }

    fn meta_line(entries: &[(String, String)]) -> String {
        let parts: Vec<String> = entries.iter().map(|(k, v)| format!("{}={}", k, v)).collect();
        format!("# {}\n", parts.join(" "))
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.columns).map_err(|e| Error::Io(e.to_string()))?;
                for r in &self.rows {
                    w.write_record(r).map_err(|e| Error::Io(e.to_string()))?;
                }
                let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
                let mut s = String::from_utf8(bytes).map_err(|e| Error::Format(e.to_string()))?;
                if !self.summary.is_empty() {
                    s.push_str(&Self::meta_line(&self.summary));
                }
                let mut meta = self.meta.clone();
                meta.push(("schema_version".into(), SCHEMA_VERSION.to_string()));
                s.push_str(&Self::meta_line(&meta));
                Ok(s)
            }
            Format::Json => {
                let cell = |c: &str| -> Value {
                    if let Ok(i) = c.parse::<i64>() {
                        return json!(i);
                    }
                    match c.parse::<f64>() {
                        Ok(x) if x.is_finite() => json!(x),
                        _ => json!(c),
                    }
                };
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|r| {
                        let mut m = Map::new();
                        for (k, v) in self.columns.iter().zip(r) {
                            m.insert(k.clone(), cell(v));
                        }
                        Value::Object(m)
                    })
                    .collect();
                let mut meta = Map::new();
                for (k, v) in self.meta.iter().chain(&self.summary) {
                    meta.insert(k.clone(), cell(v));
                }
                let doc = json!({
                    "schema_version": SCHEMA_VERSION,
                    "meta": meta,
                    "columns": self.columns,
                    "rows": rows,
                });
                Ok(serde_json::to_string_pretty(&doc)? + "\n")
            }
        }
    }
}

pub fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Error::Io(format!("{}: {}", p.display(), e))),
        None => {
            let stdout = std::io::stdout();
            let mut h = stdout.lock();
            h.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

/// A gnuplot script drawing the table stored at `data`.
pub fn plot_script(table: &Table, data: &Path) -> Result<String> {
    let hint = table
        .plot
        .as_ref()
        .ok_or_else(|| Error::InvalidParameter("this command has no plottable output".into()))?;
    let mut s = String::new();
    s.push_str("set datafile separator ','\n");
    s.push_str("set datafile commentschars '#'\n");
    s.push_str("set key autotitle columnhead\n");
    s.push_str(&format!("set xlabel '{}'\n", table.columns[hint.x]));
    if hint.logx {
        s.push_str("set logscale x\n");
    }
    if hint.logy {
        s.push_str("set logscale y\n");
    }
    let parts: Vec<String> = hint
        .ys
        .iter()
        .map(|y| format!("'{}' using {}:{} with linespoints", data.display(), hint.x + 1, y + 1))
        .collect();
    s.push_str(&format!("plot {}\n", parts.join(", \\\n     ")));
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_has_header_and_trailing_meta() {
        let mut t = Table::new(&["a", "b"]);
        t.push(vec![num(1.5), "x,y".into()]);
        t.meta.push(("m".into(), "2".into()));
        let s = t.render(Format::Csv).unwrap();
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], "a,b");
        assert_eq!(lines[1], "1.5,\"x,y\"");
        assert_eq!(*lines.last().unwrap(), "# m=2 schema_version=1");
    }

    #[test]
    fn json_parses_numbers() {
        let mut t = Table::new(&["a"]);
        t.push(vec![num(0.25)]);
        let v: Value = serde_json::from_str(&t.render(Format::Json).unwrap()).unwrap();
        assert_eq!(v["rows"][0]["a"], json!(0.25));
        assert_eq!(v["schema_version"], json!(1));
    }
}
