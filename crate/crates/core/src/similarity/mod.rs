//! Orthographic and phonetic similarity between script-normalized words.
//!
//! Every measure returns a value in `[0, 1]` and is symmetric in its
//! arguments. Lengths are counted in codepoints of the canonical form.

mod edit;
mod jaro;
mod normalize;
mod phonetic;
mod shingle;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;

pub use edit::{edit_distance, edit_distance_chars, weighted_edit_distance};
pub use jaro::{jaro, jaro_winkler, jaro_winkler_chars, WINKLER_MAX_PREFIX, WINKLER_SCALING};
pub use normalize::{normalize_script, NormalizeOptions, NormalizedWord, CANONICAL_BLOCK};
pub use phonetic::{
    phonetic_similarity, phonetic_similarity_chars, PhoneticTable, PhoneticTableError, DEFAULT_DIMENSION, DEFAULT_TABLE,
};
pub use shingle::{shingle_cosine, shingle_cosine_chars, shingles, SENTINEL};

use crate::lang::LanguageCode;

pub const DEFAULT_SHINGLE_SIZE: usize = 2;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SimilarityError {
    #[error("word is empty")]
    EmptyWord,
    #[error("normalized edit distance is undefined for two empty strings")]
    BothEmpty,
    #[error("shingle size must be at least 1")]
    ShingleSize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    Ned,
    ShingleCosine,
    JaroWinkler,
    Phonetic,
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Measure::Ned => "ned",
            Measure::ShingleCosine => "shingle_cosine",
            Measure::JaroWinkler => "jaro_winkler",
            Measure::Phonetic => "phonetic",
        })
    }
}

impl FromStr for Measure {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ned" => Ok(Measure::Ned),
            "shingle_cosine" | "cosine" => Ok(Measure::ShingleCosine),
            "jaro_winkler" => Ok(Measure::JaroWinkler),
            "phonetic" => Ok(Measure::Phonetic),
            other => Err(format!("unknown measure `{other}`")),
        }
    }
}

/// A similarity value tagged with the measure that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimilarityScore {
    pub measure: Measure,
    pub value: f64,
}

impl SimilarityScore {
    pub fn new(measure: Measure, value: f64) -> Self {
        debug_assert!((0.0..=1.0).contains(&value), "{measure} score {value} out of range");
        SimilarityScore { measure, value }
    }
}

/// `1 - d / max(|a|, |b|)`, computed as `(max - d) / max` so exact fractions
/// such as 7/10 land on the nearest double.
pub fn ned_similarity(a: &str, b: &str) -> Result<f64, SimilarityError> {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    ned_similarity_chars(&a, &b)
}

pub fn ned_similarity_chars(a: &[char], b: &[char]) -> Result<f64, SimilarityError> {
    let longest = a.len().max(b.len());
    if longest == 0 {
        return Err(SimilarityError::BothEmpty);
    }
    let d = edit_distance_chars(a, b);
    Ok((longest - d) as f64 / longest as f64)
}

/// All four scores for one word pair.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Scores {
    pub ned: Option<f64>,
    pub cosine: Option<f64>,
    pub jaro_winkler: Option<f64>,
    pub phonetic: Option<f64>,
}

impl Scores {
    pub fn get(&self, measure: Measure) -> Option<f64> {
        match measure {
            Measure::Ned => self.ned,
            Measure::ShingleCosine => self.cosine,
            Measure::JaroWinkler => self.jaro_winkler,
            Measure::Phonetic => self.phonetic,
        }
    }

    pub fn is_complete(&self) -> bool {
        self.ned.is_some() && self.cosine.is_some() && self.jaro_winkler.is_some() && self.phonetic.is_some()
    }
}

/// Normalization and measure settings shared by extraction and featurization.
#[derive(Debug, Clone)]
pub struct WordScorer {
    pub shingle_size: usize,
    pub normalize: NormalizeOptions,
    pub phonetic: Arc<PhoneticTable>,
}

impl Default for WordScorer {
    fn default() -> Self {
        WordScorer {
            shingle_size: DEFAULT_SHINGLE_SIZE,
            normalize: NormalizeOptions::default(),
            phonetic: PhoneticTable::shared(),
        }
    }
}

impl WordScorer {
    pub fn normalize(&self, word: &str, language: LanguageCode) -> Result<NormalizedWord, SimilarityError> {
        normalize_script(word, language, self.normalize)
    }

    pub fn score(
        &self,
        measure: Measure,
        a: &NormalizedWord,
        b: &NormalizedWord,
    ) -> Result<SimilarityScore, SimilarityError> {
        let (ca, cb) = (a.chars(), b.chars());
        let value = match measure {
            Measure::Ned => ned_similarity_chars(&ca, &cb)?,
            Measure::ShingleCosine => shingle_cosine_chars(&ca, &cb, self.shingle_size)?,
            Measure::JaroWinkler => jaro_winkler_chars(&ca, &cb),
            Measure::Phonetic => phonetic_similarity_chars(&ca, &cb, &self.phonetic)?,
        };
        Ok(SimilarityScore::new(measure, value))
    }

    pub fn score_all(&self, a: &NormalizedWord, b: &NormalizedWord) -> Result<Scores, SimilarityError> {
        let (ca, cb) = (a.chars(), b.chars());
        Ok(Scores {
            ned: Some(ned_similarity_chars(&ca, &cb)?),
            cosine: Some(shingle_cosine_chars(&ca, &cb, self.shingle_size)?),
            jaro_winkler: Some(jaro_winkler_chars(&ca, &cb)),
            phonetic: Some(phonetic_similarity_chars(&ca, &cb, &self.phonetic)?),
        })
    }
}
