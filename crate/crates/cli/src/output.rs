//! Rendering of command results as aligned tables, CSV or JSON.

use clap::ValueEnum;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
  Table,
  Csv,
  Json,
}

#[derive(Debug, Clone, Default)]
pub struct Table {
  pub headers: Vec<String>,
  pub rows:    Vec<Vec<String>>,
}

impl Table {
  pub fn new<S: Into<String>>(headers: impl IntoIterator<Item = S>) -> Self {
    Self { headers: headers.into_iter().map(Into::into).collect(), rows: Vec::new() }
  }

  pub fn push<S: ToString>(&mut self, row: impl IntoIterator<Item = S>) {
    self.rows.push(row.into_iter().map(|c| c.to_string()).collect());
  }

  pub fn render_aligned(&self) -> String {
    let mut widths: Vec<usize> = self.headers.iter().map(|h| h.chars().count()).collect();
    for row in &self.rows {
      for (w, cell) in widths.iter_mut().zip(row) {
        *w = (*w).max(cell.chars().count());
      }
    }
    let line = |cells: &[String]| -> String {
      let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
      padded.join("  ").trim_end().to_string()
    };
    let mut out = line(&self.headers);
    out.push('\n');
    out.push_str(&widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().join("  "));
    out.push('\n');
    for row in &self.rows {
      out.push_str(&line(row));
      out.push('\n');
    }
    out
  }

  pub fn render_csv(&self) -> String {
    let escape = |c: &String| {
      if c.contains([',', '"', '\n']) {
        format!("\"{}\"", c.replace('"', "\"\""))
      } else {
        c.clone()
      }
    };
    let mut out = String::new();
    for row in std::iter::once(&self.headers).chain(&self.rows) {
      out.push_str(&row.iter().map(escape).collect::<Vec<_>>().join(","));
      out.push('\n');
    }
    out
  }
}

/// A command result: one primary table, summary lines for the table view,
/// and a JSON document.
#[derive(Debug, Clone)]
pub struct Report {
  pub table:   Table,
  pub summary: Vec<String>,
  pub json:    Value,
  /// Raw CSV body overriding the table (used for trajectories).
  pub csv:     Option<String>,
  pub passed:  bool,
}

impl Report {
  pub fn new(table: Table, json: Value) -> Self { Self { table, summary: Vec::new(), json, csv: None, passed: true } }

  pub fn render(&self, format: Format) -> String {
    match format {
      Format::Table => {
        let mut out = self.table.render_aligned();
        for line in &self.summary {
          out.push_str(line);
          out.push('\n');
        }
        out
      },
      Format::Csv => self.csv.clone().unwrap_or_else(|| self.table.render_csv()),
      Format::Json => {
        let mut s = serde_json::to_string_pretty(&self.json).expect("JSON values serialize");
        s.push('\n');
        s
      },
    }
  }
}
