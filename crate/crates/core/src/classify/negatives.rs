use std::collections::BTreeSet;

use rand::seq::index;
use rand::Rng;

use super::ClassifyError;
use crate::gold::{GoldDataset, GoldEntry};
use crate::lang::LanguagePair;
use crate::seed::stream_rng;
use crate::wordnet::{LinkedWordnet, Synset, SynsetId};

/// Above this many candidate combinations, sampling switches from exact
/// enumeration to rejection sampling.
const ENUMERATION_LIMIT: usize = 2_000_000;

#[derive(Debug, Clone, Copy)]
pub enum NegativeTask<'a> {
    /// Random lemma pairs drawn from different (non-linked) synsets.
    Cognate,
    /// True cognates relabeled negative, topped up with random pairs.
    FalseFriend { cognates: &'a GoldDataset },
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct NegativePair {
    pub pair: LanguagePair,
    pub source_word: String,
    pub target_word: String,
    pub synset_src: SynsetId,
    pub synset_tgt: SynsetId,
}

impl NegativePair {
    fn from_gold(e: &GoldEntry) -> Self {
        NegativePair {
            pair: e.language_pair(),
            source_word: e.source_word.clone(),
            target_word: e.target_word.clone(),
            synset_src: e.synset_id,
            synset_tgt: e.synset_id,
        }
    }
}

fn single_word_lemmas(
    wn: &LinkedWordnet,
    lang: crate::lang::LanguageCode,
) -> Result<Vec<(SynsetId, &str)>, ClassifyError> {
    Ok(wn
        .table(lang)?
        .values()
        .flat_map(|s| s.lemmas.iter().filter(|l| !Synset::is_multiword(l)).map(move |l| (s.id, l.as_str())))
        .collect())
}

/// `count` distinct random pairs with different synsets on the two sides,
/// avoiding any (source, target) word pair in `exclude`.
fn random_pairs<R: Rng>(
    wn: &LinkedWordnet,
    pair: LanguagePair,
    count: usize,
    exclude: &BTreeSet<(String, String)>,
    rng: &mut R,
) -> Result<Vec<NegativePair>, ClassifyError> {
    if count == 0 {
        return Ok(Vec::new());
    }
    let src = single_word_lemmas(wn, pair.source)?;
    let tgt = single_word_lemmas(wn, pair.target)?;
    let make = |i: usize, j: usize| NegativePair {
        pair,
        source_word: src[i].1.to_string(),
        target_word: tgt[j].1.to_string(),
        synset_src: src[i].0,
        synset_tgt: tgt[j].0,
    };
    let usable =
        |i: usize, j: usize| src[i].0 != tgt[j].0 && !exclude.contains(&(src[i].1.to_string(), tgt[j].1.to_string()));

    let total = src.len() * tgt.len();
    if total <= ENUMERATION_LIMIT {
        let valid: Vec<(usize, usize)> =
            (0..src.len()).flat_map(|i| (0..tgt.len()).map(move |j| (i, j))).filter(|&(i, j)| usable(i, j)).collect();
        if valid.len() < count {
            return Err(ClassifyError::InsufficientNegatives {
                pair: pair.to_string(),
                available: valid.len(),
                requested: count,
            });
        }
        let mut picked: Vec<usize> = index::sample(rng, valid.len(), count).into_vec();
        picked.sort_unstable();
        return Ok(picked.into_iter().map(|k| make(valid[k].0, valid[k].1)).collect());
    }

    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(count);
    let max_attempts = 100 * count + 10_000;
    for _ in 0..max_attempts {
        if out.len() == count {
            break;
        }
        let (i, j) = (rng.gen_range(0..src.len()), rng.gen_range(0..tgt.len()));
        if usable(i, j) && seen.insert((i, j)) {
            out.push(make(i, j));
        }
    }
    if out.len() < count {
        return Err(ClassifyError::InsufficientNegatives {
            pair: pair.to_string(),
            available: out.len(),
            requested: count,
        });
    }
    out.sort();
    Ok(out)
}

/// Negatives for one language pair, as many as there are positives.
pub fn make_negatives_for_pair<R: Rng>(
    wn: &LinkedWordnet,
    gold: &GoldDataset,
    pair: LanguagePair,
    task: NegativeTask<'_>,
    rng: &mut R,
) -> Result<Vec<NegativePair>, ClassifyError> {
    let positives: Vec<&GoldEntry> = gold.for_pair(pair).collect();
    let count = positives.len();
    let mut exclude: BTreeSet<(String, String)> =
        positives.iter().map(|e| (e.source_word.clone(), e.target_word.clone())).collect();

    match task {
        NegativeTask::Cognate => random_pairs(wn, pair, count, &exclude, rng),
        NegativeTask::FalseFriend { cognates } => {
            let available: Vec<&GoldEntry> = cognates
                .for_pair(pair)
                .filter(|e| !exclude.contains(&(e.source_word.clone(), e.target_word.clone())))
                .collect();
            let mut chosen: Vec<NegativePair> = if available.len() > count {
                let mut idx = index::sample(rng, available.len(), count).into_vec();
                idx.sort_unstable();
                idx.into_iter().map(|k| NegativePair::from_gold(available[k])).collect()
            } else {
                available.iter().map(|e| NegativePair::from_gold(e)).collect()
            };
            exclude.extend(chosen.iter().map(|n| (n.source_word.clone(), n.target_word.clone())));
            let top_up = random_pairs(wn, pair, count - chosen.len(), &exclude, rng)?;
            chosen.extend(top_up);
            Ok(chosen)
        }
    }
}

/// Negatives for every language pair in `gold`, each pair drawing from its
/// own named random stream.
pub fn make_negatives(
    wn: &LinkedWordnet,
    gold: &GoldDataset,
    task: NegativeTask<'_>,
    seed: u64,
) -> Result<Vec<NegativePair>, ClassifyError> {
    if gold.is_empty() {
        return Err(ClassifyError::EmptyGold);
    }
    let mut out = Vec::new();
    for pair in gold.language_pairs() {
        let mut rng = stream_rng(seed, &format!("negatives/{pair}"));
        out.extend(make_negatives_for_pair(wn, gold, pair, task, &mut rng)?);
    }
    Ok(out)
}
