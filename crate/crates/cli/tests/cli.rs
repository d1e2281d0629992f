mod common;

use std::path::Path;

use common::{check_golden, core_tests, fixture_wordnet, run_in, synthetic_label, Project, TIMESTAMP};

fn copy_wordnet(to: &Path) {
    std::fs::create_dir_all(to).unwrap();
    for lang in ["hi", "mr", "bn"] {
        let name = format!("{lang}.wordnet.tsv");
        std::fs::copy(fixture_wordnet().join(&name), to.join(&name)).unwrap();
    }
}

fn prepare_worksheets(p: &Project) {
    for cmd in [&["gen-cognates"][..], &["export-worksheet"]] {
        let out = p.run(cmd);
        assert_eq!(out.code, 0, "{}", out.stderr);
    }
}

fn agree_with(p: &Project, pairs: &[&str], labels: [fn(usize) -> Option<&'static str>; 2]) -> common::Output {
    let mut args = vec!["agree".to_string(), "--timestamp".into(), TIMESTAMP.into()];
    for pair in pairs {
        for (i, name) in ["ann1", "ann2"].iter().enumerate() {
            let file = p.fill_worksheet("cognates", pair, name, labels[i]);
            args.push("--labels".into());
            args.push(format!("{name}={}", file.display()));
        }
    }
    let refs: Vec<&str> = args.iter().map(String::as_str).collect();
    p.run(&refs)
}

#[test]
fn ingest_prints_one_row_per_language() {
    let p = Project::new("mr,bn");
    let out = p.run(&["ingest"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let rows: Vec<&str> = out.stdout.lines().skip(1).collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[0].starts_with("hi") && rows[0].contains(" 20 "));
    assert!(rows[2].starts_with("bn") && rows[2].contains(" 19 "));
    assert!(out.stderr.contains("synset 5"));
    let manifest = p.read_out("manifests/ingest.json");
    assert!(manifest.contains("\"sha256\""));
    assert!(manifest.contains("hi.wordnet.tsv"));
}

#[test]
fn missing_wordnet_file_is_named() {
    let p = Project::new("mr,gu");
    let out = p.run(&["ingest"]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("gu.wordnet.tsv"), "{}", out.stderr);
}

#[test]
fn malformed_line_is_reported_with_its_number() {
    let p = Project::with_wordnet(Path::new("wn"), "mr,bn");
    let wn = p.path("wn");
    copy_wordnet(&wn);
    let path = wn.join("mr.wordnet.tsv");
    let mut lines: Vec<String> = std::fs::read_to_string(&path).unwrap().lines().map(String::from).collect();
    while lines.len() < 16 {
        lines.push(String::new());
    }
    lines.insert(16, "21\tnoun\tonly three fields".to_string());
    std::fs::write(&path, lines.join("\n") + "\n").unwrap();
    let out = p.run(&["ingest"]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("mr.wordnet.tsv:17"), "{}", out.stderr);
    // Generation refuses the same data.
    assert_eq!(p.run(&["gen-cognates"]).code, 2);
}

#[test]
fn usage_errors_exit_with_one() {
    let p = Project::new("mr");
    assert_eq!(p.run(&["frobnicate"]).code, 1);
    assert_eq!(p.run(&["ingest", "--threshold", "1.5"]).code, 1);
    assert_eq!(p.run(&["train-eval", "--scheme", "deep"]).code, 1);
    assert_eq!(p.run(&["export-worksheet", "--task", "synonyms"]).code, 1);
    let bare = run_in(p.dir.path(), &["--targets", "mr", "--output-dir", "out", "--wordnet-dir", "x", "ingest"]);
    assert_eq!(bare.code, 1);
    assert!(bare.stderr.contains("seed"), "{}", bare.stderr);
    assert_eq!(run_in(p.dir.path(), &["--version"]).code, 0);
}

#[test]
fn flags_override_the_config_file() {
    let p = Project::new("mr,bn");
    let out = p.run(&["--targets", "bn", "--threshold", "1.0", "gen-cognates"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert!(!p.out("candidates/cognates_hi-mr.csv").exists());
    let mut rdr = csv::Reader::from_path(p.out("candidates/cognates_hi-bn.csv")).unwrap();
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert!(!rows.is_empty());
    // At threshold 1.0 only pairs with identical canonical forms survive.
    assert!(rows.iter().all(|r| &r[7] == "1.0000" && &r[8] == "1.0000"));
    let manifest = p.read_out("manifests/gen-cognates.json");
    assert!(manifest.contains("\"threshold\": 1.0"), "{manifest}");
}

#[test]
fn generation_matches_frozen_files() {
    let p = Project::new("mr,bn");
    let out = p.run(&["gen-falsefriends"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert!(out.stdout.contains("Potential False Friends | 3     | 1"), "{}", out.stdout);
    for pair in ["hi-mr", "hi-bn"] {
        let golden = core_tests().join(format!("golden/candidates/falsefriends_{pair}.csv"));
        assert_eq!(
            p.read_out(&format!("candidates/falsefriends_{pair}.csv")),
            std::fs::read_to_string(golden).unwrap()
        );
    }
    check_golden(&common::golden_dir().join("falsefriends_counts.csv"), &p.read_out("reports/falsefriends_counts.csv"))
        .unwrap();
}

#[test]
fn sequential_and_parallel_runs_write_the_same_files() {
    let a = Project::new("mr,bn");
    let b = Project::new("mr,bn");
    assert_eq!(a.run(&["gen-cognates"]).code, 0);
    assert_eq!(b.run(&["--sequential", "gen-cognates"]).code, 0);
    for pair in ["hi-mr", "hi-bn"] {
        let f = format!("candidates/cognates_{pair}.csv");
        assert_eq!(a.read_out(&f), b.read_out(&f));
    }
    assert!(b.read_out("manifests/gen-cognates.json").contains("\"execution\": \"sequential\""));
}

#[test]
fn perfect_agreement_prints_kappa_one() {
    let p = Project::new("mr,bn");
    prepare_worksheets(&p);
    let same: fn(usize) -> Option<&'static str> = |i| synthetic_label(0, i);
    let out = agree_with(&p, &["hi-mr", "hi-bn"], [same, same]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let hi_mr = out.stdout.lines().find(|l| l.starts_with("hi-mr")).unwrap();
    assert!(hi_mr.ends_with(" 1  1  13"), "{hi_mr}");
    let json: serde_json::Value = serde_json::from_str(&p.read_out("agreement/cognates_hi-mr.json")).unwrap();
    assert_eq!(json["kappa"], 1.0);
}

#[test]
fn disjoint_annotators_fail() {
    let p = Project::new("mr");
    prepare_worksheets(&p);
    let evens: fn(usize) -> Option<&'static str> = |i| (i % 2 == 0).then_some("positive");
    let odds: fn(usize) -> Option<&'static str> = |i| (i % 2 == 1).then_some("positive");
    let out = agree_with(&p, &["hi-mr"], [evens, odds]);
    assert_eq!(out.code, 2, "{}", out.stdout);
    assert!(out.stderr.contains("hi-mr"), "{}", out.stderr);
}

#[test]
fn agree_needs_well_formed_label_specs() {
    let p = Project::new("mr");
    prepare_worksheets(&p);
    assert_eq!(p.run(&["agree", "--labels", "nobody"]).code, 1);
    assert_eq!(p.run(&["agree", "--labels", "ann1=missing.csv"]).code, 2);
}

#[test]
fn import_d1_counts_partial_exclusions() {
    let p = Project::new("mr,bn");
    let d1 = core_tests().join("fixtures/d1_mini.csv");
    let out = p.run(&["import-d1", "--input", d1.to_str().unwrap()]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert!(out.stdout.contains("partial excluded 2"), "{}", out.stdout);
    assert!(out.stdout.contains("gold pairs 12"));
    let broken = p.path("broken.csv");
    std::fs::write(&broken, "synset_id,pos,hi,xx\n1,noun,a,b\n").unwrap();
    assert_eq!(p.run(&["import-d1", "--input", broken.to_str().unwrap()]).code, 2);
}

fn pipeline_to_gold(p: &Project) {
    prepare_worksheets(p);
    let a: fn(usize) -> Option<&'static str> = |i| synthetic_label(0, i);
    let b: fn(usize) -> Option<&'static str> = |i| synthetic_label(1, i);
    let out = agree_with(p, &["hi-mr", "hi-bn"], [a, b]);
    assert_eq!(out.code, 0, "{}", out.stderr);
}

#[test]
fn merge_gold_folds_in_d1() {
    let p = Project::new("mr,bn");
    pipeline_to_gold(&p);
    let d1 = core_tests().join("fixtures/d1_mini.csv");
    assert_eq!(p.run(&["import-d1", "--input", d1.to_str().unwrap()]).code, 0);
    let out = p.run(&["merge-gold"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let merged = p.read_out("gold/cognates.csv");
    assert!(merged.lines().any(|l| l.ends_with(",D1")));
    assert!(merged.lines().any(|l| l.ends_with(",D2")));
    // Merging again changes nothing.
    assert_eq!(p.run(&["merge-gold"]).code, 0);
    assert_eq!(p.read_out("gold/cognates.csv"), merged);
    let pct: f64 = out.stdout.lines().filter_map(|l| l.split_whitespace().nth(2)?.parse::<f64>().ok()).sum();
    assert!((pct - 100.0).abs() <= 0.02, "{}", out.stdout);
}

#[test]
fn train_eval_logs_features_and_is_repeatable() {
    let p = Project::new("mr,bn");
    pipeline_to_gold(&p);
    assert_eq!(p.run(&["merge-gold"]).code, 0);
    let out = p.run(&["train-eval", "--scheme", "combo"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert!(out.stdout.contains("NED + CoS + Jaro-Winkler"));
    let manifest: serde_json::Value = serde_json::from_str(&p.read_out("manifests/train-eval.json")).unwrap();
    let scheme = &manifest["details"]["schemes"][0];
    assert_eq!(scheme["features"].as_array().unwrap().len(), 3);
    assert_eq!(scheme["dimension"], 3);

    let report = p.read_out("reports/cognates_eval.csv");
    let model = p.read_out("models/cognates_combo_hi-mr.model");
    assert_eq!(p.run(&["train-eval", "--scheme", "combo"]).code, 0);
    assert_eq!(p.read_out("reports/cognates_eval.csv"), report);
    assert_eq!(p.read_out("models/cognates_combo_hi-mr.model"), model);
}

#[test]
fn train_eval_reports_failing_pairs_and_continues() {
    let p = Project::new("mr,bn");
    pipeline_to_gold(&p);
    assert_eq!(p.run(&["merge-gold"]).code, 0);
    // Keep a single hi-bn entry: too few examples to split.
    let gold = p.read_out("gold/cognates.csv");
    let mut kept = Vec::new();
    let mut bn = 0;
    for line in gold.lines() {
        if line.contains(",bn,") {
            bn += 1;
            if bn > 1 {
                continue;
            }
        }
        kept.push(line);
    }
    std::fs::write(p.out("gold/cognates.csv"), kept.join("\n") + "\n").unwrap();
    let out = p.run(&["train-eval", "--scheme", "orthographic"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert!(out.stderr.contains("hi-bn"), "{}", out.stderr);
    let report = p.read_out("reports/cognates_eval.csv");
    assert_eq!(report.lines().count(), 2, "{report}");
    assert!(report.contains("hi-mr"));
    let manifest = p.read_out("manifests/train-eval.json");
    assert!(manifest.contains("orthographic hi-bn"));
}

#[test]
fn train_eval_without_gold_is_a_data_error() {
    let p = Project::new("mr");
    let out = p.run(&["train-eval"]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("merge-gold"), "{}", out.stderr);
}

#[test]
fn external_results_join_the_table() {
    let p = Project::new("mr,bn");
    pipeline_to_gold(&p);
    assert_eq!(p.run(&["merge-gold"]).code, 0);
    let ext = p.path("external.csv");
    std::fs::write(&ext, "approach,language_pair,f_score\nSiamese CNN,hi-bn,0.36\n").unwrap();
    let out = p.run(&["train-eval", "--scheme", "orthographic", "--external", ext.to_str().unwrap()]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let table = p.read_out("reports/cognates_fscores.csv");
    assert!(table.lines().any(|l| l == "Siamese CNN,0.36,-"), "{table}");
}

#[test]
fn stats_summarizes_the_project() {
    let p = Project::new("mr,bn");
    pipeline_to_gold(&p);
    assert_eq!(p.run(&["merge-gold"]).code, 0);
    let out = p.run(&["stats"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert!(out.stdout.contains("candidates"));
    assert!(out.stdout.contains("annotator ann1: 34 label(s)"), "{}", out.stdout);
    assert!(p.out("manifests/stats.json").exists());
}
