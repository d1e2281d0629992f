use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::Deserialize;

use super::{ClassifierModel, ClassifyError, LabeledExample};
use crate::exec::{self, Execution};
use crate::lang::LanguagePair;
use crate::report::{fmt2, PairTable};

pub const EVAL_HEADER: [&str; 11] =
    ["approach", "language_pair", "n_train", "n_test", "tp", "fp", "fn", "tn", "precision", "recall", "f_score"];

const SHARD: usize = 512;

/// Confusion counts for the positive class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EvalReport {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    pub tn: usize,
}

impl EvalReport {
    pub fn total(&self) -> usize {
        self.tp + self.fp + self.fn_ + self.tn
    }

    pub fn precision(&self) -> f64 {
        ratio(self.tp, self.tp + self.fp)
    }

    pub fn recall(&self) -> f64 {
        ratio(self.tp, self.tp + self.fn_)
    }

    /// Harmonic mean of precision and recall, 0 when both are 0.
    pub fn f_score(&self) -> f64 {
        ratio(2 * self.tp, 2 * self.tp + self.fp + self.fn_)
    }

    pub fn accuracy(&self) -> f64 {
        ratio(self.tp + self.tn, self.total())
    }

    fn merge(self, other: EvalReport) -> EvalReport {
        EvalReport { tp: self.tp + other.tp, fp: self.fp + other.fp, fn_: self.fn_ + other.fn_, tn: self.tn + other.tn }
    }

    pub fn csv_row(&self, approach: &str, pair: LanguagePair, n_train: usize) -> Vec<String> {
        vec![
            approach.to_string(),
            pair.to_string(),
            n_train.to_string(),
            self.total().to_string(),
            self.tp.to_string(),
            self.fp.to_string(),
            self.fn_.to_string(),
            self.tn.to_string(),
            format!("{:.4}", self.precision()),
            format!("{:.4}", self.recall()),
            format!("{:.4}", self.f_score()),
        ]
    }
}

/// Writes an evaluation report: [`EVAL_HEADER`] followed by `rows` as
/// produced by [`EvalReport::csv_row`].
pub fn write_eval_report<W: Write>(out: W, rows: &[Vec<String>]) -> Result<(), ClassifyError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(EVAL_HEADER)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Argmax predictions over `examples`, sharded across workers.
pub fn evaluate(
    model: &ClassifierModel,
    examples: &[LabeledExample],
    mode: Execution,
) -> Result<EvalReport, ClassifyError> {
    if examples.is_empty() {
        return Err(ClassifyError::EmptyTestSet);
    }
    let dim = model.network.input;
    if let Some(e) = examples.iter().find(|e| e.features.len() != dim) {
        return Err(ClassifyError::Dimension { expected: dim, got: e.features.len() });
    }
    let shards = exec::map_chunks(mode, examples, SHARD, |chunk| {
        let mut r = EvalReport::default();
        for e in chunk {
            match (model.predict(&e.features), e.positive) {
                (true, true) => r.tp += 1,
                (true, false) => r.fp += 1,
                (false, true) => r.fn_ += 1,
                (false, false) => r.tn += 1,
            }
        }
        r
    });
    Ok(shards.into_iter().fold(EvalReport::default(), EvalReport::merge))
}

/// F-score by approach and language pair. Approaches keep insertion order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ResultsMatrix {
    rows: Vec<(String, BTreeMap<LanguagePair, f64>)>,
}

impl ResultsMatrix {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, approach: &str, pair: LanguagePair, f_score: f64) {
        match self.rows.iter_mut().find(|(a, _)| a == approach) {
            Some((_, cells)) => {
                cells.insert(pair, f_score);
            }
            None => self.rows.push((approach.to_string(), BTreeMap::from([(pair, f_score)]))),
        }
    }

    pub fn get(&self, approach: &str, pair: LanguagePair) -> Option<f64> {
        self.rows.iter().find(|(a, _)| a == approach).and_then(|(_, cells)| cells.get(&pair).copied())
    }

    pub fn approaches(&self) -> impl Iterator<Item = &str> {
        self.rows.iter().map(|(a, _)| a.as_str())
    }

    pub fn pairs(&self) -> Vec<LanguagePair> {
        let mut pairs: Vec<LanguagePair> = self.rows.iter().flat_map(|(_, c)| c.keys().copied()).collect();
        pairs.sort();
        pairs.dedup();
        pairs
    }

    /// Wide table, one column per pair; missing cells render as `-`.
    pub fn to_table(&self) -> PairTable {
        let columns = self.pairs();
        let mut table = PairTable::new("Approaches", columns.clone());
        for (approach, cells) in &self.rows {
            let row = columns.iter().map(|p| cells.get(p).map_or_else(|| "-".to_string(), |&f| fmt2(f))).collect();
            table.push_row(approach.clone(), row);
        }
        table
    }

    /// One `approach | pair | F` line per filled cell.
    pub fn to_lines(&self) -> String {
        let mut out = String::new();
        for (approach, cells) in &self.rows {
            for (pair, f) in cells {
                out.push_str(&format!("{approach} | {} | {}\n", pair.label(), fmt2(*f)));
            }
        }
        out
    }
}

/// A result for a system that is not trained here, supplied from a file.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct ExternalResult {
    pub approach: String,
    pub language_pair: LanguagePair,
    pub f_score: f64,
}

/// Reads `approach,language_pair,f_score` rows.
pub fn read_external_results<R: Read>(input: R) -> Result<Vec<ExternalResult>, ClassifyError> {
    let mut reader = csv::Reader::from_reader(input);
    let mut out = Vec::new();
    for row in reader.deserialize() {
        let r: ExternalResult = row?;
        if !(0.0..=1.0).contains(&r.f_score) {
            return Err(ClassifyError::NonFinite(format!("{} {}", r.approach, r.language_pair)));
        }
        out.push(r);
    }
    Ok(out)
}
