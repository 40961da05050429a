//! Report rendering: one JSON document, CSV, or an aligned table.

use serde_json::{json, Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Cell {
        Cell::Num(x)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Cell {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Cell {
        Cell::Text(s)
    }
}

/// Everything a subcommand produces.
#[derive(Clone, Debug, Default)]
pub struct Report {
    pub command: String,
    pub inputs: Map<String, Value>,
    /// Headline number, if the command has one.
    pub value: Option<f64>,
    pub values: Map<String, Value>,
    pub error_estimate: Option<f64>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

/// `x` rounded to 15 significant digits, `null` when not finite.
pub fn num(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    let rounded: f64 = format!("{x:.14e}").parse().expect("formatted float parses");
    json!(rounded)
}

pub fn nums(v: &[f64]) -> Value {
    Value::Array(v.iter().map(|&x| num(x)).collect())
}

/// Six significant digits.
pub fn short(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let mag = x.abs().log10().floor() as i32;
    if (-4..6).contains(&mag) {
        format!("{:.*}", (5 - mag).max(0) as usize, x)
    } else {
        format!("{x:.5e}")
    }
}

impl Report {
    pub fn new(command: &str) -> Report {
        Report { command: command.into(), ..Default::default() }
    }

    pub fn input(&mut self, key: &str, v: impl Into<Value>) -> &mut Self {
        self.inputs.insert(key.into(), v.into());
        self
    }

    pub fn set(&mut self, key: &str, v: impl Into<Value>) -> &mut Self {
        self.values.insert(key.into(), v.into());
        self
    }

    pub fn to_json(&self) -> Value {
        json!({
            "command": self.command,
            "inputs": self.inputs,
            "value": self.value.map_or(Value::Null, num),
            "values": self.values,
            "error_estimate": self.error_estimate.map_or(Value::Null, num),
            "version": env!("CARGO_PKG_VERSION"),
        })
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.to_json()).expect("reports serialize");
                s.push('\n');
                s
            }
            Format::Csv => {
                let mut out = self.header.join(",");
                out.push('\n');
                for row in &self.rows {
                    let cells: Vec<String> = row
                        .iter()
                        .map(|c| match c {
                            Cell::Num(x) => num(*x).to_string(),
                            Cell::Text(t) if t.contains([',', '"']) => format!("\"{}\"", t.replace('"', "\"\"")),
                            Cell::Text(t) => t.clone(),
                        })
                        .collect();
                    out.push_str(&cells.join(","));
                    out.push('\n');
                }
                out
            }
            Format::Table => {
                let text: Vec<Vec<String>> = self
                    .rows
                    .iter()
                    .map(|r| {
                        r.iter()
                            .map(|c| match c {
                                Cell::Num(x) => short(*x),
                                Cell::Text(t) => t.clone(),
                            })
                            .collect()
                    })
                    .collect();
                let mut width: Vec<usize> = self.header.iter().map(|h| h.chars().count()).collect();
                for r in &text {
                    for (w, c) in width.iter_mut().zip(r) {
                        *w = (*w).max(c.chars().count());
                    }
                }
                let line = |cells: &[String]| -> String {
                    let padded: Vec<String> =
                        cells.iter().zip(&width).map(|(c, w)| format!("{c}{}", " ".repeat(w - c.chars().count()))).collect();
                    padded.join("  ").trim_end().to_string() + "\n"
                };
                let mut out = line(&self.header);
                for r in &text {
                    out.push_str(&line(r));
                }
                out
            }
        }
    }
}
