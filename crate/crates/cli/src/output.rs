//! Rendering of command results as aligned tables, CSV or JSON.

use clap::ValueEnum;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Float(f64),
    Text(String),
    Bool(bool),
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

/// `%.{digits}g`-style formatting.
pub fn format_sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        let m = trim_zeros(mantissa);
        format!("{m}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub const TABLE_DIGITS: usize = 12;

impl Cell {
    fn table_text(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format_sig(*v, TABLE_DIGITS),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    /// Shortest text that parses back to the same value.
    fn csv_text(&self) -> String {
        match self {
            Cell::Float(v) => format!("{v:?}"),
            other => other.table_text(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => Value::from(*v),
            Cell::Float(v) => Value::from(*v),
            Cell::Text(s) => Value::from(s.as_str()),
            Cell::Bool(b) => Value::from(*b),
        }
    }
}

/// One command's result: tabular rows plus an optional JSON shape that differs
/// from the default array of row objects.
#[derive(Debug, Clone, Default)]
pub struct Report {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// Extra lines after the table in `table` format only.
    pub notes: Vec<String>,
    pub json: Option<Value>,
}

impl Report {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Report {
            columns,
            ..Default::default()
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn rows_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    Value::Object(
                        self.columns
                            .iter()
                            .zip(row)
                            .map(|(c, v)| (c.to_string(), v.json()))
                            .collect(),
                    )
                })
                .collect(),
        )
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let v = self.json.clone().unwrap_or_else(|| self.rows_json());
                let mut s = serde_json::to_string_pretty(&v).expect("JSON values serialize");
                s.push('\n');
                s
            }
            Format::Csv => {
                let mut w = csv::WriterBuilder::new()
                    .terminator(csv::Terminator::Any(b'\n'))
                    .from_writer(Vec::new());
                w.write_record(&self.columns).expect("in-memory write");
                for row in &self.rows {
                    w.write_record(row.iter().map(Cell::csv_text)).expect("in-memory write");
                }
                String::from_utf8(w.into_inner().expect("in-memory flush")).expect("UTF-8 fields")
            }
            Format::Table => {
                let cells: Vec<Vec<String>> = self
                    .rows
                    .iter()
                    .map(|r| r.iter().map(Cell::table_text).collect())
                    .collect();
                let widths: Vec<usize> = self
                    .columns
                    .iter()
                    .enumerate()
                    .map(|(i, c)| cells.iter().map(|r| r[i].chars().count()).chain([c.len()]).max().unwrap_or(0))
                    .collect();
                let numeric: Vec<bool> = (0..self.columns.len())
                    .map(|i| {
                        self.rows
                            .first()
                            .is_none_or(|r| matches!(r[i], Cell::Int(_) | Cell::Float(_)))
                    })
                    .collect();
                let line = |fields: Vec<&str>| -> String {
                    let padded: Vec<String> = fields
                        .iter()
                        .zip(&widths)
                        .zip(&numeric)
                        .map(|((f, w), &num)| if num { format!("{f:>w$}") } else { format!("{f:<w$}") })
                        .collect();
                    padded.join("  ").trim_end().to_string() + "\n"
                };
                let mut out = line(self.columns.clone());
                for r in &cells {
                    out += &line(r.iter().map(String::as_str).collect());
                }
                for n in &self.notes {
                    out += n;
                    out.push('\n');
                }
                out
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digit_formatting() {
        assert_eq!(format_sig(0.0, 12), "0");
        assert_eq!(format_sig(1.0, 12), "1");
        assert_eq!(format_sig(std::f64::consts::E.recip(), 12), "0.367879441171");
        assert_eq!(format_sig(2.0 / 3.0, 12), "0.666666666667");
        assert_eq!(format_sig(123_456.789, 12), "123456.789");
        assert_eq!(format_sig(1e-8, 12), "1e-08");
        assert_eq!(format_sig(6.02214076e23, 12), "6.02214076e+23");
        assert_eq!(format_sig(-0.000123, 12), "-0.000123");
        assert_eq!(format_sig(999_999_999_999.7, 12), "1e+12");
        assert_eq!(format_sig(f64::INFINITY, 12), "inf");
    }

    #[test]
    fn csv_round_trips_floats() {
        let mut r = Report::new(vec!["x"]);
        r.push(vec![Cell::Float(0.1 + 0.2)]);
        r.push(vec![Cell::Float(1e-300)]);
        let text = r.render(Format::Csv);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "x");
        assert_eq!(lines[1].parse::<f64>().unwrap(), 0.1 + 0.2);
        assert_eq!(lines[2].parse::<f64>().unwrap(), 1e-300);
    }

    #[test]
    fn json_rows_are_objects() {
        let mut r = Report::new(vec!["r", "pmf"]);
        r.push(vec![Cell::Int(0), Cell::Float(0.5)]);
        let v: Value = serde_json::from_str(&r.render(Format::Json)).unwrap();
        assert_eq!(v[0]["r"], 0);
        assert_eq!(v[0]["pmf"], 0.5);
    }
}
