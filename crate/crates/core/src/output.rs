//! Plot-ready tables: CSV with 12 significant digits, or JSON arrays of flat
//! records with the same columns.

use std::fmt::Write as _;

use serde_json::{Map, Value};

use crate::sweep::SweepRecord;

pub const SIGNIFICANT_DIGITS: usize = 12;

/// Formats `x` like C's `%.12g`: fixed notation for exponents in
/// `[-5, 12)`, scientific otherwise, trailing zeros removed.
pub fn format_number(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..SIGNIFICANT_DIGITS as i32).contains(&exp) {
        let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exp) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    } else {
        format!("{}e{exp}", trim_zeros(mantissa))
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Rows of named numeric columns.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        assert_eq!(
            row.len(),
            self.columns.len(),
            "row width does not match header"
        );
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&v| format_number(v)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    /// Array of `{column: value}` objects; values are the CSV-rounded numbers.
    pub fn to_json(&self) -> String {
        let records: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut obj = Map::new();
                for (name, &v) in self.columns.iter().zip(row) {
                    let rounded: f64 = format_number(v).parse().unwrap_or(v);
                    obj.insert(name.clone(), Value::from(rounded));
                }
                Value::Object(obj)
            })
            .collect();
        let mut s = serde_json::to_string_pretty(&Value::Array(records)).expect("finite numbers");
        s.push('\n');
        s
    }

    pub fn parse_csv(text: &str) -> Result<Self, String> {
        let mut lines = text.lines();
        let header = lines.next().ok_or("empty CSV")?;
        let columns: Vec<String> = header.split(',').map(str::to_string).collect();
        let mut rows = Vec::new();
        for (n, line) in lines.enumerate() {
            let row = line
                .split(',')
                .map(|cell| {
                    cell.parse::<f64>()
                        .map_err(|e| format!("line {}: {e}", n + 2))
                })
                .collect::<Result<Vec<_>, _>>()?;
            if row.len() != columns.len() {
                return Err(format!("line {}: expected {} fields", n + 2, columns.len()));
            }
            rows.push(row);
        }
        Ok(Self { columns, rows })
    }

    /// Min and max of every column.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for (k, name) in self.columns.iter().enumerate() {
            let (lo, hi) = self
                .rows
                .iter()
                .map(|r| r[k])
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                    (lo.min(v), hi.max(v))
                });
            let _ = writeln!(
                out,
                "{name:>12}: min {}  max {}",
                format_number(lo),
                format_number(hi)
            );
        }
        out
    }
}

pub fn stationary_table(records: &[SweepRecord]) -> Table {
    let mut table = Table::new(&["gamma_t", "concurrence", "entropy"]);
    for r in records {
        table.push(vec![
            r.gamma_t,
            r.concurrence.unwrap_or(f64::NAN),
            r.entropy.unwrap_or(f64::NAN),
        ]);
    }
    table
}

pub fn eraser_table(records: &[SweepRecord]) -> Table {
    let mut table = Table::new(&["gamma_t", "theta", "c_ave"]);
    for r in records {
        table.push(vec![
            r.gamma_t,
            r.theta.unwrap_or(f64::NAN),
            r.c_ave.unwrap_or(f64::NAN),
        ]);
    }
    table
}
