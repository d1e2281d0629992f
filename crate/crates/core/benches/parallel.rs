use std::hint::black_box;

use cognate_core::classify::{evaluate, train, FeatureScheme, Hyper, LabeledExample};
use cognate_core::exec::Execution;
use cognate_core::extraction::{generate_cognate_candidates, generate_false_friend_candidates, ExtractionConfig};
use cognate_core::lang::LanguageCode::{Hi, Mr};
use cognate_core::seed::stream_rng;
use cognate_core::similarity::WordScorer;
use cognate_core::wordnet::{parse_wordnet, LinkedWordnet};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::Rng;

const LETTERS: &[char] = &['क', 'ख', 'ग', 'च', 'ज', 'त', 'द', 'न', 'प', 'म', 'र', 'ल', 'स', 'ा', 'ि', 'ी'];

fn word<R: Rng>(rng: &mut R) -> String {
    let len = rng.gen_range(3..8);
    (0..len).map(|_| LETTERS[rng.gen_range(0..LETTERS.len())]).collect()
}

/// Two languages over the same synset ids. Most target lemmas are one-letter
/// mutations of a source lemma so the cognate filter has work to do.
fn synthetic_wordnet(synsets: usize) -> LinkedWordnet {
    let mut rng = stream_rng(1, "bench");
    let (mut hi, mut mr) = (String::new(), String::new());
    for id in 1..=synsets {
        let src: Vec<String> = (0..4).map(|_| word(&mut rng)).collect();
        let tgt: Vec<String> = src
            .iter()
            .map(|w| {
                let mut chars: Vec<char> = w.chars().collect();
                let i = rng.gen_range(0..chars.len());
                chars[i] = LETTERS[rng.gen_range(0..LETTERS.len())];
                chars.into_iter().collect()
            })
            .collect();
        hi.push_str(&format!("{id}\tnoun\t{}\tgloss\n", src.join(",")));
        mr.push_str(&format!("{id}\tnoun\t{}\tgloss\n", tgt.join(",")));
    }
    let mut wn = LinkedWordnet::new();
    for (lang, text) in [(Hi, hi), (Mr, mr)] {
        wn.insert(lang, parse_wordnet(text.as_bytes(), lang).unwrap().synsets);
    }
    wn
}

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn extraction(c: &mut Criterion) {
    let wn = synthetic_wordnet(4000);
    let scorer = WordScorer::default();
    let mut group = c.benchmark_group("extraction");
    group.sample_size(10);
    for (name, execution) in MODES {
        let config = ExtractionConfig { execution, ..ExtractionConfig::default() };
        group.bench_function(BenchmarkId::new("cognates", name), |b| {
            b.iter(|| generate_cognate_candidates(black_box(&wn), Hi, Mr, &config, &scorer).unwrap())
        });
        group.bench_function(BenchmarkId::new("false_friends", name), |b| {
            b.iter(|| generate_false_friend_candidates(black_box(&wn), Hi, Mr, &config, &scorer).unwrap())
        });
    }
    group.finish();
}

fn evaluation(c: &mut Criterion) {
    let mut rng = stream_rng(2, "bench-eval");
    let examples: Vec<LabeledExample> = (0..200_000)
        .map(|i| {
            let positive = i % 2 == 0;
            let base = if positive { 0.8 } else { 0.3 };
            LabeledExample {
                features: (0..3).map(|_| base + rng.gen_range(-0.3..0.3)).collect(),
                positive,
                pair_id: i.to_string(),
            }
        })
        .collect();
    let model = train(&examples[..200], FeatureScheme::Combo, Hyper::default()).unwrap().model;
    let mut group = c.benchmark_group("evaluate");
    for (name, execution) in MODES {
        group.bench_function(name, |b| b.iter(|| evaluate(&model, black_box(&examples), execution).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, extraction, evaluation);
criterion_main!(benches);
