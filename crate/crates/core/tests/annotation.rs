mod common;

use std::collections::BTreeSet;

use chrono::{TimeZone, Utc};
use cognate_core::annotation::{
    agreement_for, cohens_kappa, export_worksheet, merge_dual, read_labeled_worksheet, write_agreement,
    AnnotationError, AnnotationRecord, AnnotationSet, AnnotationStore, Contingency, Label, Upsert,
};
use cognate_core::extraction::{read_candidates, CandidateRecord};
use cognate_core::lang::{LanguageCode, LanguagePair};
use common::{assert_golden, golden_dir, mini_wordnet};
use Label::*;

/// Two annotators' labels realizing a 2x2 table given as
/// [both positive, a+ b-, a- b+, both negative].
fn from_table(counts: [usize; 4]) -> (AnnotationSet, AnnotationSet) {
    let cells = [(Positive, Positive), (Positive, Negative), (Negative, Positive), (Negative, Negative)];
    let (mut a, mut b) = (AnnotationSet::new(), AnnotationSet::new());
    let mut i = 0;
    for (n, (la, lb)) in counts.into_iter().zip(cells) {
        for _ in 0..n {
            a.insert(format!("item{i:04}"), la);
            b.insert(format!("item{i:04}"), lb);
            i += 1;
        }
    }
    (a, b)
}

/// κ from first principles in floating point, for cross-checking.
fn oracle_kappa(counts: [usize; 4]) -> f64 {
    let n = counts.iter().sum::<usize>() as f64;
    let po = (counts[0] + counts[3]) as f64 / n;
    let a_pos = (counts[0] + counts[1]) as f64 / n;
    let b_pos = (counts[0] + counts[2]) as f64 / n;
    let pe = a_pos * b_pos + (1.0 - a_pos) * (1.0 - b_pos);
    (po - pe) / (1.0 - pe)
}

#[test]
fn kappa_fixture_is_exact() {
    let (a, b) = from_table([20, 5, 10, 15]);
    let table = Contingency::from_sets(&a, &b);
    assert_eq!(table.total(), 50);
    assert_eq!(table.percent_agreement(), Some(0.7));
    assert_eq!(table.kappa(), Some(0.4));
    assert!((oracle_kappa([20, 5, 10, 15]) - 0.4).abs() < 1e-12);
}

#[test]
fn kappa_agrees_with_float_oracle() {
    for a in 0..6 {
        for b in 0..6 {
            for c in 0..6 {
                for d in 0..6 {
                    let counts = [a, b, c, d];
                    let (x, y) = from_table(counts);
                    let Ok(k) = cohens_kappa(&x, &y) else {
                        assert_eq!(counts.iter().sum::<usize>(), 0);
                        continue;
                    };
                    let expected = oracle_kappa(counts);
                    if expected.is_finite() {
                        assert!((k - expected).abs() < 1e-12, "{counts:?}: {k} vs {expected}");
                    }
                    assert!((-1.0..=1.0).contains(&k));
                }
            }
        }
    }
}

#[test]
fn perfect_agreement_and_symmetries() {
    let (a, b) = from_table([12, 0, 0, 7]);
    assert_eq!(cohens_kappa(&a, &b).unwrap(), 1.0);
    // Every item positive on both sides: chance agreement is total.
    let (a, b) = from_table([9, 0, 0, 0]);
    assert_eq!(cohens_kappa(&a, &b).unwrap(), 1.0);

    let (a, b) = from_table([20, 5, 10, 15]);
    let flip = |s: &AnnotationSet| -> AnnotationSet { s.iter().map(|(k, l)| (k.clone(), l.flipped())).collect() };
    assert_eq!(cohens_kappa(&flip(&a), &flip(&b)).unwrap(), 0.4);
    assert_eq!(cohens_kappa(&b, &a).unwrap(), 0.4);
}

#[test]
fn skips_and_disjoint_coverage() {
    let (mut a, b) = from_table([3, 1, 1, 3]);
    a.insert("extra".into(), Positive);
    a.insert("item0000".into(), Skip);
    let table = Contingency::from_sets(&a, &b);
    assert_eq!(table.total(), 7);
    let left: AnnotationSet = [("x".to_string(), Positive)].into();
    let right: AnnotationSet = [("y".to_string(), Positive)].into();
    assert!(matches!(merge_dual(&left, &right), Err(AnnotationError::NoOverlap)));
}

fn ts(secs: i64) -> chrono::DateTime<Utc> {
    Utc.timestamp_opt(1_700_000_000 + secs, 0).unwrap()
}

fn record(pair_id: &str, annotator: &str, label: Label, secs: i64) -> AnnotationRecord {
    AnnotationRecord { pair_id: pair_id.into(), annotator: annotator.into(), label, timestamp: ts(secs) }
}

#[test]
fn store_upsert_semantics() {
    let mut store = AnnotationStore::new();
    assert_eq!(store.upsert(record("p1", "ann1", Positive, 0)), Upsert::Inserted);
    assert_eq!(store.upsert(record("p1", "ann1", Positive, 5)), Upsert::Unchanged);
    assert_eq!(store.get("p1", "ann1").unwrap().timestamp, ts(0));
    assert_eq!(store.upsert(record("p1", "ann1", Negative, 9)), Upsert::Replaced);
    assert_eq!(store.get("p1", "ann1").unwrap().label, Negative);
    assert_eq!(store.len(), 1);

    let mut buf = Vec::new();
    store.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf.clone()).unwrap();
    assert_eq!(text, "pair_id,annotator,label,timestamp\np1,ann1,negative,2023-11-14T22:13:29.000Z\n");
    let back = AnnotationStore::read_csv(buf.as_slice()).unwrap();
    assert_eq!(back.get("p1", "ann1"), store.get("p1", "ann1"));
}

#[test]
fn invalid_labels_are_rejected() {
    let bad = "pair_id,annotator,label,timestamp\np1,a,maybe,2023-11-14T22:13:29.000Z\n";
    assert!(matches!(AnnotationStore::read_csv(bad.as_bytes()), Err(AnnotationError::InvalidLabel(l)) if l == "maybe"));
    let bad_ts = "pair_id,annotator,label,timestamp\np1,a,positive,yesterday\n";
    assert!(matches!(AnnotationStore::read_csv(bad_ts.as_bytes()), Err(AnnotationError::InvalidTimestamp(_))));
}

fn golden_candidates(pair: &str) -> Vec<CandidateRecord> {
    let path = golden_dir().join(format!("candidates/cognates_{pair}.csv"));
    read_candidates(std::fs::File::open(path).unwrap()).unwrap()
}

#[test]
fn worksheet_matches_golden_and_reads_back() {
    let wn = mini_wordnet();
    let candidates = golden_candidates("hi-bn");
    let mut buf = Vec::new();
    export_worksheet(&mut buf, &candidates, &wn).unwrap();
    let sheet = String::from_utf8(buf).unwrap();
    assert_golden("worksheets/cognates_hi-bn.csv", &sheet);

    // An annotator fills in every other row.
    let mut filled = String::new();
    for (i, line) in sheet.lines().enumerate() {
        filled.push_str(line);
        if i > 0 && i % 2 == 0 {
            filled.push_str("positive");
        }
        filled.push('\n');
    }
    let records = read_labeled_worksheet(filled.as_bytes(), "ann1", ts(0)).unwrap();
    assert_eq!(records.len(), candidates.len() / 2);
    assert!(records.iter().all(|r| r.label == Positive && r.annotator == "ann1"));
}

#[test]
fn worksheet_needs_every_synset() {
    let wn = mini_wordnet();
    let mut candidates = golden_candidates("hi-mr");
    candidates[0].synset_src = cognate_core::wordnet::SynsetId::new(999).unwrap();
    let err = export_worksheet(Vec::new(), &candidates, &wn).unwrap_err();
    assert!(matches!(err, AnnotationError::MissingSynset { synset: 999, .. }));
}

#[test]
fn agreement_over_candidates() {
    let candidates = golden_candidates("hi-mr");
    let mut store = AnnotationStore::new();
    for (i, c) in candidates.iter().enumerate() {
        store.upsert(record(&c.pair_id, "ann1", Positive, i as i64));
        let second = if i % 4 == 0 { Negative } else { Positive };
        store.upsert(record(&c.pair_id, "ann2", second, i as i64));
    }
    let pair = LanguagePair::new(LanguageCode::Hi, LanguageCode::Mr);
    let (retained, report) = agreement_for(&store, &candidates, Some(pair), None).unwrap();
    assert_eq!(report.annotator_a, "ann1");
    assert_eq!(report.annotator_b, "ann2");
    assert_eq!(report.n_items, candidates.len() as u64);
    let disagreements = candidates.len().div_ceil(4);
    assert_eq!(retained.len(), candidates.len() - disagreements);
    assert_eq!(report.retained, retained.len() as u64);
    assert_eq!(report.percent_agreement, retained.len() as f64 / candidates.len() as f64);
    // All of ann1's labels are positive, so chance agreement equals observed.
    assert_eq!(report.kappa, 0.0);

    let mut buf = Vec::new();
    write_agreement(&mut buf, &[report]).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("language_pair,annotator_a,annotator_b,n_items,percent_agreement,kappa,retained\n"));

    let mut single = AnnotationStore::new();
    single.upsert(record(&candidates[0].pair_id, "ann1", Positive, 0));
    assert!(matches!(agreement_for(&single, &candidates, Some(pair), None), Err(AnnotationError::InsufficientOverlap)));
    let ids: BTreeSet<String> = retained;
    assert!(ids.iter().all(|id| candidates.iter().any(|c| &c.pair_id == id)));
}
