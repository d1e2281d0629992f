use std::fmt;
use std::str::FromStr;

use super::ClassifyError;
use crate::extraction::ScoredPair;
use crate::similarity::{Measure, WordScorer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FeatureScheme {
    /// Normalized edit distance similarity.
    Orthographic,
    /// Feature-weighted edit distance similarity.
    Phonetic,
    /// NED, shingle cosine and Jaro-Winkler.
    Combo,
}

impl FeatureScheme {
    pub const ALL: [FeatureScheme; 3] = [FeatureScheme::Orthographic, FeatureScheme::Phonetic, FeatureScheme::Combo];

    pub fn measures(self) -> &'static [Measure] {
        match self {
            FeatureScheme::Orthographic => &[Measure::Ned],
            FeatureScheme::Phonetic => &[Measure::Phonetic],
            FeatureScheme::Combo => &[Measure::Ned, Measure::ShingleCosine, Measure::JaroWinkler],
        }
    }

    pub fn dimension(self) -> usize {
        self.measures().len()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            FeatureScheme::Orthographic => "orthographic",
            FeatureScheme::Phonetic => "phonetic",
            FeatureScheme::Combo => "combo",
        }
    }

    /// Row label in result tables.
    pub fn approach_label(self) -> &'static str {
        match self {
            FeatureScheme::Orthographic => "Orthographic Similarity",
            FeatureScheme::Phonetic => "Phonetic Similarity",
            FeatureScheme::Combo => "NED + CoS + Jaro-Winkler",
        }
    }
}

impl fmt::Display for FeatureScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FeatureScheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "orthographic" => Ok(FeatureScheme::Orthographic),
            "phonetic" => Ok(FeatureScheme::Phonetic),
            "combo" => Ok(FeatureScheme::Combo),
            other => Err(format!("unknown feature scheme `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledExample {
    pub features: Vec<f64>,
    pub positive: bool,
    pub pair_id: String,
}

/// Feature vector for a pair. Scores already on the pair are reused; missing
/// ones are computed with `scorer`.
pub fn featurize(pair: &ScoredPair, scheme: FeatureScheme, scorer: &WordScorer) -> Result<Vec<f64>, ClassifyError> {
    scheme
        .measures()
        .iter()
        .map(|&m| match pair.scores.get(m) {
            Some(v) => Ok(v),
            None => Ok(scorer.score(m, &pair.source_word, &pair.target_word)?.value),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extraction::PairContext;
    use crate::lang::LanguageCode;
    use crate::similarity::{phonetic_similarity, Scores};
    use crate::wordnet::SynsetId;

    fn pair(a: &str, b: &str, scorer: &WordScorer) -> ScoredPair {
        ScoredPair::new(
            scorer.normalize(a, LanguageCode::Hi).unwrap(),
            scorer.normalize(b, LanguageCode::Mr).unwrap(),
            PairContext::Cognate(SynsetId::new(1).unwrap()),
            Scores::default(),
        )
    }

    #[test]
    fn identical_combo() {
        let scorer = WordScorer::default();
        let p = pair("शिक्षा", "शिक्षा", &scorer);
        assert_eq!(featurize(&p, FeatureScheme::Combo, &scorer).unwrap(), vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn kitten_orthographic() {
        let scorer = WordScorer::default();
        let p = pair("kitten", "sitting", &scorer);
        let f = featurize(&p, FeatureScheme::Orthographic, &scorer).unwrap();
        assert_eq!(f.len(), 1);
        assert!((f[0] - 0.5714).abs() < 1e-4);
    }

    #[test]
    fn phonetic_passthrough() {
        let scorer = WordScorer::default();
        let p = pair("पानी", "पाणी", &scorer);
        let f = featurize(&p, FeatureScheme::Phonetic, &scorer).unwrap();
        let direct = phonetic_similarity(&p.source_word, &p.target_word, &scorer.phonetic).unwrap();
        assert_eq!(f, vec![direct]);
    }

    #[test]
    fn stored_scores_are_reused() {
        let scorer = WordScorer::default();
        let mut p = pair("क", "ख", &scorer);
        p.scores.ned = Some(0.25);
        assert_eq!(featurize(&p, FeatureScheme::Orthographic, &scorer).unwrap(), vec![0.25]);
    }

    #[test]
    fn dimensions() {
        assert_eq!(FeatureScheme::Orthographic.dimension(), 1);
        assert_eq!(FeatureScheme::Phonetic.dimension(), 1);
        assert_eq!(FeatureScheme::Combo.dimension(), 3);
    }
}
