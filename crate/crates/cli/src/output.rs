//! Artifacts: `report.json`, CSV tables and field dumps.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use fraclame_core::VectorField;
use serde_json::{json, Map, Value};

/// C's `%.17g`.
pub fn g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0" } else { "0" }.into();
    }
    // round to 17 significant digits first; the exponent decides the style
    let sci = format!("{:.16e}", x);
    let (mant, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    if !(-4..17).contains(&exp) {
        let mant = strip_zeros(mant);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mant}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (16 - exp).max(0) as usize;
        strip_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// A named CSV table.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Self {
            name: name.into(),
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for r in &self.rows {
            let cells: Vec<String> = r.iter().map(|v| g17(*v)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// Header `n N L`, then `i [j] u_1 .. u_n` per node.
pub fn field_dump(u: &VectorField) -> String {
    let g = u.grid;
    let mut out = format!("{} {} {}\n", g.dim(), g.points_per_dim(), g17(g.box_length()));
    for node in 0..g.node_count() {
        let idx = g.multi_index(node);
        if g.dim() == 1 {
            write!(out, "{}", idx[0]).unwrap();
        } else {
            write!(out, "{} {}", idx[0], idx[1]).unwrap();
        }
        for v in u.at(node) {
            write!(out, " {}", g17(*v)).unwrap();
        }
        out.push('\n');
    }
    out
}

/// One checked claim; `criterion` is the acceptance item it stands for.
#[derive(Debug, Clone, PartialEq)]
pub struct Assertion {
    pub criterion: u32,
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl Assertion {
    pub fn at_most(criterion: u32, name: &str, value: f64, threshold: f64) -> Self {
        Self {
            criterion,
            name: name.into(),
            value,
            threshold,
            pass: value <= threshold,
        }
    }

    pub fn at_least(criterion: u32, name: &str, value: f64, threshold: f64) -> Self {
        Self {
            criterion,
            name: name.into(),
            value,
            threshold,
            pass: value >= threshold,
        }
    }

    pub fn holds(criterion: u32, name: &str, ok: bool) -> Self {
        Self {
            criterion,
            name: name.into(),
            value: f64::from(u8::from(ok)),
            threshold: 1.0,
            pass: ok,
        }
    }
}

/// Everything an experiment produced.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub headline: Map<String, Value>,
    pub assertions: Vec<Assertion>,
    pub tables: Vec<Table>,
    pub fields: Vec<(String, VectorField)>,
}

impl Outcome {
    pub fn headline(&mut self, key: &str, value: impl Into<Value>) {
        self.headline.insert(key.into(), value.into());
    }

    pub fn passed(&self) -> bool {
        self.assertions.iter().all(|a| a.pass)
    }
}

fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map(Value::Number).unwrap_or_else(|| Value::String(g17(x)))
}

/// Writes tables and fields, then `report.json`; returns the report path.
pub fn write_artifacts(
    dir: &Path,
    parameters: Value,
    outcome: &Outcome,
    status: &str,
    error: Option<&str>,
) -> io::Result<PathBuf> {
    fs::create_dir_all(dir)?;
    for t in &outcome.tables {
        fs::write(dir.join(format!("{}.csv", t.name)), t.to_csv())?;
    }
    for (name, f) in &outcome.fields {
        fs::write(dir.join(format!("{name}.txt")), field_dump(f))?;
    }
    let assertions: Vec<Value> = outcome
        .assertions
        .iter()
        .map(|a| {
            json!({
                "criterion": a.criterion,
                "name": a.name,
                "value": num(a.value),
                "threshold": num(a.threshold),
                "pass": a.pass,
            })
        })
        .collect();
    let headline: Map<String, Value> = outcome
        .headline
        .iter()
        .map(|(k, v)| (k.clone(), if let Some(x) = v.as_f64() { num(x) } else { v.clone() }))
        .collect();
    let mut report = json!({
        "status": status,
        "parameters": parameters,
        "headline": headline,
        "assertions": assertions,
        "tables": outcome.tables.iter().map(|t| format!("{}.csv", t.name)).collect::<Vec<_>>(),
        "fields": outcome.fields.iter().map(|(n, _)| format!("{n}.txt")).collect::<Vec<_>>(),
    });
    if let Some(e) = error {
        report["error"] = Value::String(e.into());
    }
    let path = dir.join("report.json");
    fs::write(&path, serde_json::to_string_pretty(&report)? + "\n")?;
    Ok(path)
}
