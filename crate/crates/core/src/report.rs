//! Row-per-measure, column-per-language-pair summary tables.

use std::fmt::Write as _;

use crate::lang::LanguagePair;

/// A table with one column per language pair, e.g. candidate counts or
/// F-scores per approach.
#[derive(Debug, Clone, PartialEq)]
pub struct PairTable {
    pub corner: String,
    pub columns: Vec<LanguagePair>,
    pub rows: Vec<(String, Vec<String>)>,
}

impl PairTable {
    pub fn new(corner: impl Into<String>, columns: Vec<LanguagePair>) -> Self {
        PairTable { corner: corner.into(), columns, rows: Vec::new() }
    }

    /// Appends a row; `cells` must have one entry per column.
    pub fn push_row(&mut self, label: impl Into<String>, cells: Vec<String>) {
        assert_eq!(cells.len(), self.columns.len(), "row width must match the columns");
        self.rows.push((label.into(), cells));
    }

    pub fn cell(&self, row: &str, column: LanguagePair) -> Option<&str> {
        let col = self.columns.iter().position(|c| *c == column)?;
        self.rows.iter().find(|(label, _)| label == row).map(|(_, cells)| cells[col].as_str())
    }

    pub fn to_csv(&self) -> String {
        let mut out = Vec::new();
        {
            let mut w = csv::Writer::from_writer(&mut out);
            let header: Vec<String> =
                std::iter::once(self.corner.clone()).chain(self.columns.iter().map(|p| p.label())).collect();
            w.write_record(&header).expect("in-memory write");
            for (label, cells) in &self.rows {
                w.write_record(std::iter::once(label).chain(cells)).expect("in-memory write");
            }
            w.flush().expect("in-memory flush");
        }
        String::from_utf8(out).expect("utf-8 table")
    }

    /// Pipe-separated rendering for terminals.
    pub fn to_text(&self) -> String {
        let mut grid: Vec<Vec<String>> =
            vec![std::iter::once(self.corner.clone()).chain(self.columns.iter().map(|p| p.label())).collect()];
        for (label, cells) in &self.rows {
            grid.push(std::iter::once(label.clone()).chain(cells.iter().cloned()).collect());
        }
        let width = grid[0].len();
        let widths: Vec<usize> =
            (0..width).map(|c| grid.iter().map(|r| r[c].chars().count()).max().unwrap_or(0)).collect();
        let mut out = String::new();
        for row in &grid {
            let line: Vec<String> = row.iter().zip(&widths).map(|(cell, w)| format!("{cell:<w$}", w = *w)).collect();
            writeln!(out, "{}", line.join(" | ").trim_end()).expect("string write");
        }
        out
    }
}

/// Fixed four-decimal rendering used for scores and agreement values.
pub fn fmt4(value: f64) -> String {
    format!("{value:.4}")
}

pub fn fmt2(value: f64) -> String {
    format!("{value:.2}")
}
