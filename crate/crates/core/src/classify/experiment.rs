use super::{
    evaluate, featurize, make_negatives_for_pair, split_dataset, train, ClassifierModel, ClassifyError, EvalReport,
    FeatureScheme, Hyper, LabeledExample, NegativeTask,
};
use crate::exec::Execution;
use crate::extraction::{pair_id, PairContext, ScoredPair};
use crate::gold::GoldDataset;
use crate::lang::LanguagePair;
use crate::seed::{derive_seed, stream_rng};
use crate::similarity::{Scores, WordScorer};
use crate::wordnet::LinkedWordnet;

pub const DEFAULT_TRAIN_RATIO: f64 = 0.8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentConfig {
    /// Hidden size, epochs and learning rate. The seed is replaced by a
    /// per-pair stream.
    pub hyper: Hyper,
    pub train_ratio: f64,
    pub seed: u64,
    pub execution: Execution,
}

impl ExperimentConfig {
    pub fn new(seed: u64) -> Self {
        ExperimentConfig {
            hyper: Hyper::default(),
            train_ratio: DEFAULT_TRAIN_RATIO,
            seed,
            execution: Execution::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairRun {
    pub pair: LanguagePair,
    pub n_train: usize,
    pub n_test: usize,
    pub report: EvalReport,
    pub model: ClassifierModel,
}

fn example(
    pair: LanguagePair,
    source: &str,
    target: &str,
    context: PairContext,
    positive: bool,
    scheme: FeatureScheme,
    scorer: &WordScorer,
) -> Result<LabeledExample, ClassifyError> {
    let scored = ScoredPair::new(
        scorer.normalize(source, pair.source)?,
        scorer.normalize(target, pair.target)?,
        context,
        Scores::default(),
    );
    Ok(LabeledExample {
        features: featurize(&scored, scheme, scorer)?,
        positive,
        pair_id: pair_id(pair, source, target, context),
    })
}

/// Gold positives for `pair` plus the same number of sampled negatives.
/// Negatives depend only on the seed and the pair, so every scheme sees the
/// same examples.
pub fn pair_examples(
    wn: &LinkedWordnet,
    positives: &GoldDataset,
    negatives: NegativeTask<'_>,
    pair: LanguagePair,
    scheme: FeatureScheme,
    seed: u64,
    scorer: &WordScorer,
) -> Result<Vec<LabeledExample>, ClassifyError> {
    let mut rng = stream_rng(seed, &format!("negatives/{pair}"));
    let sampled = make_negatives_for_pair(wn, positives, pair, negatives, &mut rng)?;
    let mut out = Vec::new();
    for e in positives.for_pair(pair) {
        let ctx = PairContext::Cognate(e.synset_id);
        out.push(example(pair, &e.source_word, &e.target_word, ctx, true, scheme, scorer)?);
    }
    for n in &sampled {
        let ctx = PairContext::from_ids(n.synset_src, n.synset_tgt);
        out.push(example(pair, &n.source_word, &n.target_word, ctx, false, scheme, scorer)?);
    }
    Ok(out)
}

/// Splits labeled examples, trains on one side and scores the other.
pub fn fit_and_score(
    pair: LanguagePair,
    examples: Vec<LabeledExample>,
    scheme: FeatureScheme,
    config: &ExperimentConfig,
) -> Result<PairRun, ClassifyError> {
    let (train_set, test_set) =
        split_dataset(examples, config.train_ratio, derive_seed(config.seed, &format!("split/{pair}")))?;
    let hyper = Hyper { seed: derive_seed(config.seed, &format!("init/{pair}")), ..config.hyper };
    let model = train(&train_set, scheme, hyper)?.model;
    let report = evaluate(&model, &test_set, config.execution)?;
    Ok(PairRun { pair, n_train: train_set.len(), n_test: test_set.len(), report, model })
}

/// Trains and evaluates one classifier per language pair in `positives`.
/// A failing pair yields its error and the remaining pairs still run.
pub fn run_experiment(
    wn: &LinkedWordnet,
    positives: &GoldDataset,
    negatives: NegativeTask<'_>,
    scheme: FeatureScheme,
    config: &ExperimentConfig,
    scorer: &WordScorer,
) -> Vec<(LanguagePair, Result<PairRun, ClassifyError>)> {
    positives
        .language_pairs()
        .into_iter()
        .map(|pair| {
            let run = pair_examples(wn, positives, negatives, pair, scheme, config.seed, scorer)
                .and_then(|examples| fit_and_score(pair, examples, scheme, config));
            (pair, run)
        })
        .collect()
}
