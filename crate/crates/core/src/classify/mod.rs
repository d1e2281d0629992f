//! Baseline cognate and false-friend classifiers over similarity features.

mod eval;
mod experiment;
mod features;
mod model;
mod negatives;
mod split;

pub use eval::{
    evaluate, read_external_results, write_eval_report, EvalReport, ExternalResult, ResultsMatrix, EVAL_HEADER,
};
pub use experiment::{fit_and_score, pair_examples, run_experiment, ExperimentConfig, PairRun, DEFAULT_TRAIN_RATIO};
pub use features::{featurize, FeatureScheme, LabeledExample};
pub use model::{read_model, train, write_model, ClassifierModel, Hyper, Network, TrainOutcome, MODEL_MAGIC};
pub use negatives::{make_negatives, make_negatives_for_pair, NegativePair, NegativeTask};
pub use split::split_dataset;

use crate::similarity::SimilarityError;
use crate::wordnet::WordnetError;

#[derive(Debug, thiserror::Error)]
pub enum ClassifyError {
    #[error("training data contains a single label")]
    SingleLabel,
    #[error("need at least {needed} examples, got {got}")]
    TooFewExamples { needed: usize, got: usize },
    #[error("split ratio {0} must lie strictly between 0 and 1")]
    Ratio(f64),
    #[error("split leaves an empty side")]
    EmptySide,
    #[error("feature dimension {got} does not match the expected {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("non-finite feature value in example {0}")]
    NonFinite(String),
    #[error("empty test set")]
    EmptyTestSet,
    #[error("{pair}: the wordnet has only {available} usable negative pairs, {requested} requested")]
    InsufficientNegatives { pair: String, available: usize, requested: usize },
    #[error("empty gold dataset")]
    EmptyGold,
    #[error("model file line {line}: {message}")]
    ModelFormat { line: usize, message: String },
    #[error(transparent)]
    Similarity(#[from] SimilarityError),
    #[error(transparent)]
    Wordnet(#[from] WordnetError),
    #[error("{0}")]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}
