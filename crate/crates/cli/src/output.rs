//! Tabular results with a summary and a list of pass/fail checks, written
//! as CSV or JSON.
//!
//! CSV output starts with `#` comment lines holding the summary and the
//! checks, followed by a header row whose names carry unit suffixes.

use std::io::Write;

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::config::Format;
use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Num(f64),
    Text(String),
    Flag(bool),
}

impl Cell {
    pub fn text(s: impl Into<String>) -> Cell {
        Cell::Text(s.into())
    }

    fn render(&self) -> String {
        match self {
            Cell::Num(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Flag(b) => b.to_string(),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Cell {
        Cell::Num(v)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Cell {
        Cell::Flag(b)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Check {
        Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: &'static str,
    pub summary: Vec<(String, Cell)>,
    pub checks: Vec<Check>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Report {
    pub fn new(command: &'static str, columns: Vec<&'static str>) -> Report {
        Report {
            command,
            summary: Vec::new(),
            checks: Vec::new(),
            columns,
            rows: Vec::new(),
        }
    }

    pub fn summarize(&mut self, key: impl Into<String>, value: impl Into<Cell>) {
        self.summary.push((key.into(), value.into()));
    }

    pub fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check::new(name, passed, detail));
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// Rejects reports holding NaN or infinite numbers.
    pub fn ensure_finite(&self) -> Result<(), CliError> {
        for row in &self.rows {
            for (cell, column) in row.iter().zip(&self.columns) {
                if matches!(cell, Cell::Num(v) if !v.is_finite()) {
                    return Err(CliError::NonFinite {
                        column: column.to_string(),
                    });
                }
            }
        }
        for (key, cell) in &self.summary {
            if matches!(cell, Cell::Num(v) if !v.is_finite()) {
                return Err(CliError::NonFinite {
                    column: key.clone(),
                });
            }
        }
        Ok(())
    }

    pub fn write(&self, format: Format, out: &mut dyn Write) -> Result<(), CliError> {
        self.ensure_finite()?;
        match format {
            Format::Csv => self.write_csv(out),
            Format::Json => self.write_json(out),
        }
    }

    fn write_csv(&self, out: &mut dyn Write) -> Result<(), CliError> {
        writeln!(out, "# command: {}", self.command)?;
        for (key, value) in &self.summary {
            writeln!(out, "# {key}: {}", value.render())?;
        }
        for c in &self.checks {
            let verdict = if c.passed { "PASS" } else { "FAIL" };
            writeln!(out, "# check {}: {verdict} ({})", c.name, c.detail)?;
        }
        let mut writer = csv::Writer::from_writer(out);
        writer.write_record(&self.columns)?;
        for row in &self.rows {
            writer.write_record(row.iter().map(Cell::render))?;
        }
        writer.flush()?;
        Ok(())
    }

    fn write_json(&self, out: &mut dyn Write) -> Result<(), CliError> {
        let summary: Map<String, Value> = self
            .summary
            .iter()
            .map(|(k, v)| Ok((k.clone(), serde_json::to_value(v)?)))
            .collect::<Result<_, serde_json::Error>>()?;
        let doc = json!({
            "command": self.command,
            "summary": summary,
            "checks": self.checks,
            "columns": self.columns,
            "rows": self.rows,
        });
        serde_json::to_writer_pretty(&mut *out, &doc)?;
        writeln!(out)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let mut r = Report::new("demo", vec!["x_db", "label"]);
        r.summarize("alpha", 0.25);
        r.summarize("state", Cell::text("degenerate"));
        r.check("ok", true, "fine");
        r.rows.push(vec![1.5.into(), Cell::text("a,b")]);
        r
    }

    #[test]
    fn csv_has_comment_preamble_and_quoted_cells() {
        let mut buf = Vec::new();
        sample().write(Format::Csv, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "# command: demo\n# alpha: 0.25\n# state: degenerate\n# check ok: PASS (fine)\nx_db,label\n1.5,\"a,b\"\n"
        );
    }

    #[test]
    fn json_keeps_text_flags_as_strings() {
        let mut buf = Vec::new();
        sample().write(Format::Json, &mut buf).unwrap();
        let v: Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["summary"]["state"], "degenerate");
        assert_eq!(v["summary"]["alpha"], 0.25);
        assert_eq!(v["rows"][0][0], 1.5);
        assert_eq!(v["checks"][0]["passed"], true);
    }

    #[test]
    fn non_finite_cells_are_refused() {
        let mut r = sample();
        r.rows.push(vec![f64::NAN.into(), Cell::text("x")]);
        let err = r.write(Format::Json, &mut Vec::new()).unwrap_err();
        assert!(matches!(err, CliError::NonFinite { .. }));
    }

    #[test]
    fn passed_requires_every_check() {
        let mut r = sample();
        assert!(r.passed());
        r.check("bad", false, "broken");
        assert!(!r.passed());
    }
}
