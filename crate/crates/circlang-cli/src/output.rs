//! Tables, number formatting and canonical JSON.

use std::fmt::Write as _;
use std::str::FromStr;

use serde_json::{Map, Number, Value};

/// Significant digits in human-readable tables.
pub const TABLE_DIGITS: usize = 9;

/// Significant digits of floating-point numbers in JSON output.
pub const JSON_DIGITS: usize = 17;

/// One table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn to_json(&self) -> Value {
        match self {
            Cell::Num(x) => float_value(*x),
            Cell::Int(n) => Value::from(*n),
            Cell::Text(s) => Value::from(s.clone()),
            Cell::Bool(b) => Value::from(*b),
        }
    }

    /// Rendering used in human tables.
    pub fn display(&self) -> String {
        match self {
            Cell::Num(x) => sig_digits(*x, TABLE_DIGITS),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    /// Rendering used in CSV files (full round-trip precision).
    pub fn csv_field(&self) -> String {
        match self {
            Cell::Num(x) => sig_digits(*x, JSON_DIGITS),
            other => other.display(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

/// A rectangular table with named columns.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Aligned plain-text rendering.
    pub fn render(&self) -> String {
        let cells: Vec<Vec<String>> = self.rows.iter().map(|r| r.iter().map(Cell::display).collect()).collect();
        let mut widths: Vec<usize> = self.columns.iter().map(|c| c.chars().count()).collect();
        for row in &cells {
            for (w, c) in widths.iter_mut().zip(row) {
                *w = (*w).max(c.chars().count());
            }
        }
        let mut out = String::new();
        let line = |out: &mut String, items: &[String]| {
            let padded: Vec<String> = items.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
            let _ = writeln!(out, "{}", padded.join("  ").trim_end());
        };
        line(&mut out, &self.columns);
        line(&mut out, &widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>());
        for row in &cells {
            line(&mut out, row);
        }
        out
    }

    /// Rows as JSON objects keyed by column name.
    pub fn to_json(&self) -> Value {
        let rows = self
            .rows
            .iter()
            .map(|r| Value::Object(self.columns.iter().cloned().zip(r.iter().map(Cell::to_json)).collect::<Map<_, _>>()))
            .collect();
        Value::Array(rows)
    }
}

/// Formats `x` with `digits` significant digits: positional notation for
/// moderate magnitudes, scientific otherwise.
pub fn sig_digits(x: f64, digits: usize) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let exponent: i32 = sci[sci.find('e').unwrap() + 1..].parse().unwrap();
    if (-4..digits as i32).contains(&exponent) {
        format!("{:.*}", (digits as i32 - 1 - exponent) as usize, x)
    } else {
        sci
    }
}

/// A JSON number carrying exactly [`JSON_DIGITS`] significant digits; `null`
/// for non-finite values.
pub fn float_value(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    let text = format!("{:.*e}", JSON_DIGITS - 1, x);
    Value::Number(Number::from_str(&text).expect("scientific notation is a valid JSON number"))
}

/// Rewrites every floating-point number in `v` to [`JSON_DIGITS`] significant
/// digits; integers are left alone. Object keys are always sorted.
pub fn canonicalize(v: Value) -> Value {
    match v {
        Value::Number(n) if !(n.is_u64() || n.is_i64()) => n.as_f64().map_or(Value::Null, float_value),
        Value::Array(items) => Value::Array(items.into_iter().map(canonicalize).collect()),
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, v)| (k, canonicalize(v))).collect()),
        other => other,
    }
}

/// Pretty, key-sorted, canonical JSON text with a trailing newline.
pub fn to_json_text(v: Value) -> String {
    let mut s = serde_json::to_string_pretty(&canonicalize(v)).expect("JSON values always serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(sig_digits(1.2437697631083844, 9), "1.24376976");
        assert_eq!(sig_digits(-43.640956, 9), "-43.6409560");
        assert_eq!(sig_digits(1.5e-7, 9), "1.50000000e-7");
        assert_eq!(sig_digits(0.0, 9), "0");
        assert_eq!(sig_digits(1.2437697631083844, 17), "1.2437697631083844");
    }

    #[test]
    fn json_floats_round_trip_with_17_digits() {
        for x in [std::f64::consts::PI, 1e-300, -2.5, 0.1 + 0.2, 6.02e23] {
            let text = to_json_text(Value::from(x));
            let digits: String = text.trim().split('e').next().unwrap().chars().filter(char::is_ascii_digit).collect();
            assert_eq!(digits.len(), 17, "{text}");
            let back: f64 = serde_json::from_str(&text).unwrap();
            assert_eq!(back.to_bits(), x.to_bits());
        }
        assert_eq!(float_value(f64::NAN), Value::Null);
    }

    #[test]
    fn keys_are_sorted_and_integers_kept() {
        let v = serde_json::json!({"zeta": 1, "alpha": {"b": 2.0, "a": 7}});
        let text = to_json_text(v);
        assert!(text.find("alpha").unwrap() < text.find("zeta").unwrap());
        assert!(text.find("\"a\": 7").is_some());
        assert!(text.contains("\"b\": 2.0000000000000000e"), "{text}");
    }

    #[test]
    fn table_rendering() {
        let mut t = Table::new(&["name", "value"]);
        t.push(vec!["sigma".into(), 1.2437697631083844.into()]);
        let r = t.render();
        assert!(r.contains("sigma  1.24376976"));
        assert_eq!(t.to_json()[0]["name"], "sigma");
    }
}
