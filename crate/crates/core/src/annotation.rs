//! Annotation records, dual-annotator merging and agreement statistics.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use chrono::{DateTime, SecondsFormat, Utc};
use serde::{Deserialize, Serialize};

use crate::extraction::CandidateRecord;
use crate::lang::LanguagePair;
use crate::report::fmt4;
use crate::wordnet::LinkedWordnet;

pub const ANNOTATION_HEADER: [&str; 4] = ["pair_id", "annotator", "label", "timestamp"];
pub const WORKSHEET_HEADER: [&str; 10] = [
    "pair_id",
    "source_lang",
    "target_lang",
    "source_word",
    "target_word",
    "gloss_src",
    "example_src",
    "gloss_tgt",
    "example_tgt",
    "label",
];
pub const AGREEMENT_HEADER: [&str; 7] =
    ["language_pair", "annotator_a", "annotator_b", "n_items", "percent_agreement", "kappa", "retained"];

#[derive(Debug, thiserror::Error)]
pub enum AnnotationError {
    #[error("the two annotators share no labeled items")]
    NoOverlap,
    #[error("fewer than two annotators have labeled these candidates")]
    InsufficientOverlap,
    #[error("candidate {pair_id} refers to synset {synset} missing from the {language} wordnet")]
    MissingSynset { pair_id: String, synset: u32, language: String },
    #[error("invalid label `{0}` (expected positive, negative or skip)")]
    InvalidLabel(String),
    #[error("invalid timestamp `{0}`")]
    InvalidTimestamp(String),
    #[error("annotation file: {0}")]
    Csv(#[from] csv::Error),
    #[error("annotation file: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Positive,
    Negative,
    Skip,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::Positive => "positive",
            Label::Negative => "negative",
            Label::Skip => "skip",
        }
    }

    /// The opposite binary label; skip stays skip.
    pub fn flipped(self) -> Label {
        match self {
            Label::Positive => Label::Negative,
            Label::Negative => Label::Positive,
            Label::Skip => Label::Skip,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = AnnotationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "positive" => Ok(Label::Positive),
            "negative" => Ok(Label::Negative),
            "skip" => Ok(Label::Skip),
            other => Err(AnnotationError::InvalidLabel(other.to_string())),
        }
    }
}

pub fn format_timestamp(ts: &DateTime<Utc>) -> String {
    ts.to_rfc3339_opts(SecondsFormat::Millis, true)
}

pub fn parse_timestamp(s: &str) -> Result<DateTime<Utc>, AnnotationError> {
    DateTime::parse_from_rfc3339(s)
        .map(|t| t.with_timezone(&Utc))
        .map_err(|_| AnnotationError::InvalidTimestamp(s.to_string()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotationRecord {
    pub pair_id: String,
    pub annotator: String,
    pub label: Label,
    pub timestamp: DateTime<Utc>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Upsert {
    Inserted,
    Replaced,
    /// Same label already stored; the earlier record is kept.
    Unchanged,
}

/// One label per (pair_id, annotator); a later record for the same key
/// replaces the earlier one.
#[derive(Debug, Clone, Default)]
pub struct AnnotationStore {
    records: BTreeMap<(String, String), AnnotationRecord>,
}

/// One annotator's labels keyed by pair id.
pub type AnnotationSet = BTreeMap<String, Label>;

impl AnnotationStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn upsert(&mut self, record: AnnotationRecord) -> Upsert {
        let key = (record.pair_id.clone(), record.annotator.clone());
        match self.records.get(&key) {
            Some(existing) if existing.label == record.label => Upsert::Unchanged,
            Some(_) => {
                self.records.insert(key, record);
                Upsert::Replaced
            }
            None => {
                self.records.insert(key, record);
                Upsert::Inserted
            }
        }
    }

    pub fn get(&self, pair_id: &str, annotator: &str) -> Option<&AnnotationRecord> {
        self.records.get(&(pair_id.to_string(), annotator.to_string()))
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn records(&self) -> impl Iterator<Item = &AnnotationRecord> {
        self.records.values()
    }

    pub fn annotators(&self) -> BTreeSet<&str> {
        self.records.keys().map(|(_, a)| a.as_str()).collect()
    }

    /// Labels of one annotator, optionally restricted to a set of pair ids.
    pub fn labels_for(&self, annotator: &str, within: Option<&BTreeSet<&str>>) -> AnnotationSet {
        self.records
            .values()
            .filter(|r| r.annotator == annotator)
            .filter(|r| within.is_none_or(|ids| ids.contains(r.pair_id.as_str())))
            .map(|r| (r.pair_id.clone(), r.label))
            .collect()
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self, AnnotationError> {
        let mut store = AnnotationStore::new();
        for record in read_annotations(input)? {
            store.upsert(record);
        }
        Ok(store)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), AnnotationError> {
        let records: Vec<&AnnotationRecord> = self.records.values().collect();
        write_annotations(out, records)
    }
}

#[derive(Deserialize)]
struct RawAnnotation {
    pair_id: String,
    annotator: String,
    label: String,
    timestamp: String,
}

/// Records in file order.
pub fn read_annotations<R: Read>(input: R) -> Result<Vec<AnnotationRecord>, AnnotationError> {
    let mut rdr = csv::Reader::from_reader(input);
    let mut out = Vec::new();
    for raw in rdr.deserialize::<RawAnnotation>() {
        let raw = raw?;
        out.push(AnnotationRecord {
            pair_id: raw.pair_id,
            annotator: raw.annotator,
            label: raw.label.parse()?,
            timestamp: parse_timestamp(&raw.timestamp)?,
        });
    }
    Ok(out)
}

pub fn annotation_row(r: &AnnotationRecord) -> [String; 4] {
    [r.pair_id.clone(), r.annotator.clone(), r.label.to_string(), format_timestamp(&r.timestamp)]
}

pub fn write_annotations<'a, W, I>(out: W, records: I) -> Result<(), AnnotationError>
where
    W: Write,
    I: IntoIterator<Item = &'a AnnotationRecord>,
{
    let mut w = csv::Writer::from_writer(out);
    w.write_record(ANNOTATION_HEADER)?;
    for r in records {
        w.write_record(annotation_row(r))?;
    }
    w.flush()?;
    Ok(())
}

/// Binary contingency counts over items both annotators labeled non-skip.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Contingency {
    pub both_positive: u64,
    pub a_positive_b_negative: u64,
    pub a_negative_b_positive: u64,
    pub both_negative: u64,
}

impl Contingency {
    pub fn from_sets(a: &AnnotationSet, b: &AnnotationSet) -> Self {
        let mut c = Contingency::default();
        for (id, la) in a {
            let Some(lb) = b.get(id) else { continue };
            match (la, lb) {
                (Label::Positive, Label::Positive) => c.both_positive += 1,
                (Label::Positive, Label::Negative) => c.a_positive_b_negative += 1,
                (Label::Negative, Label::Positive) => c.a_negative_b_positive += 1,
                (Label::Negative, Label::Negative) => c.both_negative += 1,
                _ => {}
            }
        }
        c
    }

    pub fn total(&self) -> u64 {
        self.both_positive + self.a_positive_b_negative + self.a_negative_b_positive + self.both_negative
    }

    pub fn agreements(&self) -> u64 {
        self.both_positive + self.both_negative
    }

    pub fn percent_agreement(&self) -> Option<f64> {
        let n = self.total();
        (n > 0).then(|| self.agreements() as f64 / n as f64)
    }

    /// κ = (p_o − p_e)/(1 − p_e), evaluated on integer counts as
    /// (n·agree − Σ a_k b_k)/(n² − Σ a_k b_k) so that exact ratios stay exact.
    /// When p_e = 1 the result is 1 if p_o = 1 and 0 otherwise.
    pub fn kappa(&self) -> Option<f64> {
        let n = self.total();
        if n == 0 {
            return None;
        }
        let a_pos = self.both_positive + self.a_positive_b_negative;
        let b_pos = self.both_positive + self.a_negative_b_positive;
        let chance = (a_pos * b_pos + (n - a_pos) * (n - b_pos)) as i128;
        let n2 = (n as i128) * (n as i128);
        let observed = (n as i128) * (self.agreements() as i128);
        if chance == n2 {
            return Some(if self.agreements() == n { 1.0 } else { 0.0 });
        }
        Some((observed - chance) as f64 / (n2 - chance) as f64)
    }
}

pub fn cohens_kappa(a: &AnnotationSet, b: &AnnotationSet) -> Result<f64, AnnotationError> {
    Contingency::from_sets(a, b).kappa().ok_or(AnnotationError::NoOverlap)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AgreementReport {
    pub language_pair: Option<String>,
    pub annotator_a: String,
    pub annotator_b: String,
    pub n_items: u64,
    pub percent_agreement: f64,
    pub kappa: f64,
    pub retained: u64,
}

impl AgreementReport {
    pub fn csv_row(&self) -> [String; 7] {
        [
            self.language_pair.clone().unwrap_or_default(),
            self.annotator_a.clone(),
            self.annotator_b.clone(),
            self.n_items.to_string(),
            fmt4(self.percent_agreement),
            fmt4(self.kappa),
            self.retained.to_string(),
        ]
    }
}

/// Pairs both annotators marked positive, plus agreement over the items both
/// labeled with a non-skip label.
pub fn merge_dual(a: &AnnotationSet, b: &AnnotationSet) -> Result<(BTreeSet<String>, Contingency), AnnotationError> {
    let table = Contingency::from_sets(a, b);
    if table.total() == 0 {
        return Err(AnnotationError::NoOverlap);
    }
    let retained = a
        .iter()
        .filter(|(id, la)| **la == Label::Positive && b.get(*id) == Some(&Label::Positive))
        .map(|(id, _)| id.clone())
        .collect();
    Ok((retained, table))
}

/// Agreement of two annotators over one set of candidates. When `annotators`
/// is `None` the first two annotator names (sorted) with at least one label
/// on these candidates are used.
pub fn agreement_for(
    store: &AnnotationStore,
    candidates: &[CandidateRecord],
    language_pair: Option<LanguagePair>,
    annotators: Option<(&str, &str)>,
) -> Result<(BTreeSet<String>, AgreementReport), AnnotationError> {
    let ids: BTreeSet<&str> = candidates.iter().map(|c| c.pair_id.as_str()).collect();
    let (name_a, name_b) = match annotators {
        Some((a, b)) => (a.to_string(), b.to_string()),
        None => {
            let active: BTreeSet<&str> =
                store.records().filter(|r| ids.contains(r.pair_id.as_str())).map(|r| r.annotator.as_str()).collect();
            let mut it = active.into_iter();
            match (it.next(), it.next()) {
                (Some(a), Some(b)) => (a.to_string(), b.to_string()),
                _ => return Err(AnnotationError::InsufficientOverlap),
            }
        }
    };
    let a = store.labels_for(&name_a, Some(&ids));
    let b = store.labels_for(&name_b, Some(&ids));
    let (retained, table) = merge_dual(&a, &b).map_err(|e| match e {
        AnnotationError::NoOverlap => AnnotationError::InsufficientOverlap,
        other => other,
    })?;
    let report = AgreementReport {
        language_pair: language_pair.map(|p| p.to_string()),
        annotator_a: name_a,
        annotator_b: name_b,
        n_items: table.total(),
        percent_agreement: table.percent_agreement().expect("non-empty table"),
        kappa: table.kappa().expect("non-empty table"),
        retained: retained.len() as u64,
    };
    Ok((retained, report))
}

pub fn write_agreement<W: Write>(out: W, reports: &[AgreementReport]) -> Result<(), AnnotationError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(AGREEMENT_HEADER)?;
    for r in reports {
        w.write_record(r.csv_row())?;
    }
    w.flush()?;
    Ok(())
}

/// Writes the annotator worksheet: one row per candidate with both glosses
/// and examples, and an empty label column.
pub fn export_worksheet<W: Write>(
    out: W,
    candidates: &[CandidateRecord],
    wn: &LinkedWordnet,
) -> Result<(), AnnotationError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(WORKSHEET_HEADER)?;
    for c in candidates {
        let lookup = |lang, id: crate::wordnet::SynsetId| {
            wn.synset(lang, id).ok_or_else(|| AnnotationError::MissingSynset {
                pair_id: c.pair_id.clone(),
                synset: id.get(),
                language: lang.to_string(),
            })
        };
        let src = lookup(c.source_lang, c.synset_src)?;
        let tgt = lookup(c.target_lang, c.synset_tgt)?;
        w.write_record([
            c.pair_id.as_str(),
            c.source_lang.as_str(),
            c.target_lang.as_str(),
            &c.source_word,
            &c.target_word,
            &src.gloss,
            src.example.as_deref().unwrap_or(""),
            &tgt.gloss,
            tgt.example.as_deref().unwrap_or(""),
            "",
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Deserialize)]
struct WorksheetRow {
    pair_id: String,
    label: String,
}

/// Reads a filled-in worksheet; rows with an empty label are ignored.
pub fn read_labeled_worksheet<R: Read>(
    input: R,
    annotator: &str,
    timestamp: DateTime<Utc>,
) -> Result<Vec<AnnotationRecord>, AnnotationError> {
    let mut rdr = csv::Reader::from_reader(input);
    let mut out = Vec::new();
    for row in rdr.deserialize::<WorksheetRow>() {
        let row = row?;
        let label = row.label.trim();
        if label.is_empty() {
            continue;
        }
        out.push(AnnotationRecord {
            pair_id: row.pair_id,
            annotator: annotator.to_string(),
            label: label.parse()?,
            timestamp,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(labels: &[(&str, Label)]) -> AnnotationSet {
        labels.iter().map(|(id, l)| (id.to_string(), *l)).collect()
    }

    fn table_set(counts: [usize; 4]) -> (AnnotationSet, AnnotationSet) {
        use Label::*;
        let cells = [(Positive, Positive), (Positive, Negative), (Negative, Positive), (Negative, Negative)];
        let (mut a, mut b) = (AnnotationSet::new(), AnnotationSet::new());
        let mut i = 0;
        for (count, (la, lb)) in counts.iter().zip(cells) {
            for _ in 0..*count {
                a.insert(format!("p{i:03}"), la);
                b.insert(format!("p{i:03}"), lb);
                i += 1;
            }
        }
        (a, b)
    }

    #[test]
    fn merge_dual_basic() {
        use Label::*;
        let a = set(&[("p1", Positive), ("p2", Positive)]);
        let b = set(&[("p1", Positive), ("p2", Negative)]);
        let (retained, table) = merge_dual(&a, &b).unwrap();
        assert_eq!(retained, BTreeSet::from(["p1".to_string()]));
        assert_eq!(table.percent_agreement(), Some(0.5));
    }

    #[test]
    fn kappa_zero_case() {
        use Label::*;
        let a = set(&[("1", Positive), ("2", Positive), ("3", Negative), ("4", Negative)]);
        let b = set(&[("1", Positive), ("2", Negative), ("3", Positive), ("4", Negative)]);
        let (_, table) = merge_dual(&a, &b).unwrap();
        assert_eq!(table.percent_agreement(), Some(0.5));
        assert_eq!(table.kappa(), Some(0.0));
    }

    #[test]
    fn kappa_two_by_two() {
        let (a, b) = table_set([20, 5, 10, 15]);
        let table = Contingency::from_sets(&a, &b);
        assert_eq!(table.percent_agreement(), Some(0.7));
        assert_eq!(cohens_kappa(&a, &b).unwrap(), 0.4);
    }

    #[test]
    fn kappa_perfect_and_degenerate() {
        let (a, b) = table_set([3, 0, 0, 4]);
        assert_eq!(cohens_kappa(&a, &b).unwrap(), 1.0);
        // Single label on both sides: p_e = 1.
        let (a, b) = table_set([5, 0, 0, 0]);
        assert_eq!(cohens_kappa(&a, &b).unwrap(), 1.0);
        assert!(matches!(cohens_kappa(&AnnotationSet::new(), &b), Err(AnnotationError::NoOverlap)));
    }

    #[test]
    fn label_swap_invariance() {
        let (a, b) = table_set([20, 5, 10, 15]);
        let flip = |s: &AnnotationSet| s.iter().map(|(k, v)| (k.clone(), v.flipped())).collect::<AnnotationSet>();
        assert_eq!(cohens_kappa(&flip(&a), &flip(&b)).unwrap(), cohens_kappa(&a, &b).unwrap());
    }

    #[test]
    fn skips_are_excluded() {
        use Label::*;
        let a = set(&[("1", Positive), ("2", Skip), ("3", Negative)]);
        let b = set(&[("1", Positive), ("2", Positive), ("3", Skip)]);
        let (retained, table) = merge_dual(&a, &b).unwrap();
        assert_eq!(table.total(), 1);
        assert_eq!(retained.len(), 1);
        let only_skips = set(&[("2", Skip)]);
        assert!(matches!(merge_dual(&only_skips, &b), Err(AnnotationError::NoOverlap)));
    }

    #[test]
    fn store_upsert_semantics() {
        let ts = parse_timestamp("2026-01-01T00:00:00Z").unwrap();
        let rec = |label| AnnotationRecord { pair_id: "p".into(), annotator: "a".into(), label, timestamp: ts };
        let mut store = AnnotationStore::new();
        assert_eq!(store.upsert(rec(Label::Positive)), Upsert::Inserted);
        assert_eq!(store.upsert(rec(Label::Positive)), Upsert::Unchanged);
        assert_eq!(store.upsert(rec(Label::Negative)), Upsert::Replaced);
        assert_eq!(store.len(), 1);
        assert_eq!(store.get("p", "a").unwrap().label, Label::Negative);
    }

    #[test]
    fn annotation_csv_round_trip() {
        let text = "pair_id,annotator,label,timestamp\n\
                    p1,ann1,positive,2026-03-01T10:00:00.000Z\n\
                    p1,ann1,negative,2026-03-01T10:05:00.000Z\n\
                    p2,ann2,skip,2026-03-01T10:06:00.000Z\n";
        let store = AnnotationStore::read_csv(text.as_bytes()).unwrap();
        assert_eq!(store.len(), 2);
        assert_eq!(store.get("p1", "ann1").unwrap().label, Label::Negative);
        let mut out = Vec::new();
        store.write_csv(&mut out).unwrap();
        let again = AnnotationStore::read_csv(&out[..]).unwrap();
        assert_eq!(again.records().collect::<Vec<_>>(), store.records().collect::<Vec<_>>());

        let bad = "pair_id,annotator,label,timestamp\np1,a,maybe,2026-03-01T10:00:00Z\n";
        assert!(matches!(AnnotationStore::read_csv(bad.as_bytes()), Err(AnnotationError::InvalidLabel(_))));
    }

    #[test]
    fn kappa_bounded_by_one() {
        for counts in [[1, 2, 3, 4], [0, 5, 5, 0], [9, 1, 0, 0], [0, 0, 0, 3]] {
            let (a, b) = table_set(counts);
            let k = cohens_kappa(&a, &b).unwrap();
            assert!(k <= 1.0 && k >= -1.0, "{counts:?} -> {k}");
        }
    }
}
