//! Tabular output: CSV with '#' header lines, or one JSON document.

use serde::Serialize;

use super::config::{Format, RunConfig};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    /// Run-level results (norms, diagnostics) as ordered key/value pairs.
    pub summary: Vec<(String, f64)>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new(), summary: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn note(&mut self, key: impl Into<String>, value: f64) {
        self.summary.push((key.into(), value));
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    pub fn render(&self, cfg: &RunConfig) -> String {
        match cfg.output.format {
            Format::Csv => self.to_csv(cfg),
            Format::Json => self.to_json(cfg),
        }
    }

    fn to_csv(&self, cfg: &RunConfig) -> String {
        let mut out = String::new();
        out.push_str(&format!("# groove {}\n", serde_json::to_string(&cfg.mode).unwrap().trim_matches('"')));
        out.push_str(&format!("# config: {}\n", cfg.to_json()));
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        for (k, v) in &self.summary {
            out.push_str(&format!("# {k} = {v:.16e}\n"));
        }
        out
    }

    fn to_json(&self, cfg: &RunConfig) -> String {
        let summary: serde_json::Map<String, serde_json::Value> =
            self.summary.iter().map(|(k, v)| (k.clone(), serde_json::json!(v))).collect();
        let doc = serde_json::json!({
            "config": cfg,
            "columns": self.columns,
            "rows": self.rows,
            "summary": summary,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("table serializes");
        s.push('\n');
        s
    }
}
