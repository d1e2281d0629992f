//! Candidate mining over linked wordnets.
//!
//! True-cognate candidates come from lemma cross-pairs inside the same linked
//! synset that clear both the normalized-edit-distance and the shingle-cosine
//! thresholds. False-friend candidates are exact canonical spellings whose
//! synset sets on the two sides are disjoint.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::exec::{self, Execution};
use crate::lang::{LanguageCode, LanguagePair};
use crate::report::{fmt4, PairTable};
use crate::similarity::{
    jaro_winkler_chars, ned_similarity_chars, phonetic_similarity_chars, shingle_cosine_chars, NormalizedWord, Scores,
    SimilarityError, WordScorer,
};
use crate::wordnet::{LinkedWordnet, Synset, SynsetId, SynsetTable, WordnetError};

pub const DEFAULT_THRESHOLD: f64 = 0.7;

/// Slack for floating-point scores that should sit exactly on the threshold.
const THRESHOLD_EPSILON: f64 = 1e-12;

pub const CANDIDATE_HEADER: [&str; 11] = [
    "pair_id",
    "source_lang",
    "target_lang",
    "source_word",
    "target_word",
    "synset_src",
    "synset_tgt",
    "ned",
    "cosine",
    "jaro_winkler",
    "phonetic",
];

#[derive(Debug, thiserror::Error)]
pub enum ExtractionError {
    #[error(transparent)]
    Wordnet(#[from] WordnetError),
    #[error("threshold {0} must lie in (0, 1]")]
    Threshold(f64),
    #[error(transparent)]
    Similarity(#[from] SimilarityError),
    #[error("candidate file: {0}")]
    Csv(#[from] csv::Error),
    #[error("candidate file: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Cognates,
    FalseFriends,
}

impl Task {
    pub fn as_str(self) -> &'static str {
        match self {
            Task::Cognates => "cognates",
            Task::FalseFriends => "falsefriends",
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Task {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "cognates" | "cognate" => Ok(Task::Cognates),
            "falsefriends" | "false_friends" | "false-friends" | "false_friend" => Ok(Task::FalseFriends),
            other => Err(format!("unknown task `{other}` (expected cognates or falsefriends)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PairContext {
    Cognate(SynsetId),
    FalseFriend { source: SynsetId, target: SynsetId },
}

impl PairContext {
    pub fn from_ids(source: SynsetId, target: SynsetId) -> Self {
        if source == target {
            PairContext::Cognate(source)
        } else {
            PairContext::FalseFriend { source, target }
        }
    }

    pub fn source(self) -> SynsetId {
        match self {
            PairContext::Cognate(id) => id,
            PairContext::FalseFriend { source, .. } => source,
        }
    }

    pub fn target(self) -> SynsetId {
        match self {
            PairContext::Cognate(id) => id,
            PairContext::FalseFriend { target, .. } => target,
        }
    }

    pub fn task(self) -> Task {
        match self {
            PairContext::Cognate(_) => Task::Cognates,
            PairContext::FalseFriend { .. } => Task::FalseFriends,
        }
    }
}

/// Stable 16-hex-digit content hash of a candidate.
pub fn pair_id(pair: LanguagePair, source_word: &str, target_word: &str, context: PairContext) -> String {
    let mut h = Sha256::new();
    let ctx = match context {
        PairContext::Cognate(id) => format!("cognate:{id}"),
        PairContext::FalseFriend { source, target } => format!("falsefriend:{source}:{target}"),
    };
    for part in [pair.source.as_str(), pair.target.as_str(), source_word, target_word, &ctx] {
        h.update(part.as_bytes());
        h.update([0x1f]);
    }
    let digest = h.finalize();
    digest[..8].iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoredPair {
    pub pair_id: String,
    pub source_word: NormalizedWord,
    pub target_word: NormalizedWord,
    pub context: PairContext,
    pub scores: Scores,
}

impl ScoredPair {
    pub fn new(source_word: NormalizedWord, target_word: NormalizedWord, context: PairContext, scores: Scores) -> Self {
        let pair = LanguagePair::new(source_word.language, target_word.language);
        let pair_id = pair_id(pair, &source_word.original, &target_word.original, context);
        ScoredPair { pair_id, source_word, target_word, context, scores }
    }

    pub fn language_pair(&self) -> LanguagePair {
        LanguagePair::new(self.source_word.language, self.target_word.language)
    }

    fn sort_key(&self) -> (SynsetId, SynsetId, &str, &str) {
        (self.context.source(), self.context.target(), &self.source_word.original, &self.target_word.original)
    }

    pub fn to_record(&self) -> CandidateRecord {
        let pair = self.language_pair();
        CandidateRecord {
            pair_id: self.pair_id.clone(),
            source_lang: pair.source,
            target_lang: pair.target,
            source_word: self.source_word.original.clone(),
            target_word: self.target_word.original.clone(),
            synset_src: self.context.source(),
            synset_tgt: self.context.target(),
            ned: self.scores.ned,
            cosine: self.scores.cosine,
            jaro_winkler: self.scores.jaro_winkler,
            phonetic: self.scores.phonetic,
        }
    }
}

/// Relation between a shared spelling's sense sets on two sides.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PairRelation {
    TrueCognate,
    FalseFriend,
    PartialCognate,
    Unrelated,
}

impl PairRelation {
    /// Classifies from the synset sets that contain a spelling on each side.
    pub fn from_sense_sets(source: &BTreeSet<SynsetId>, target: &BTreeSet<SynsetId>) -> Self {
        if source.is_empty() || target.is_empty() {
            PairRelation::Unrelated
        } else if source.is_disjoint(target) {
            PairRelation::FalseFriend
        } else if source == target {
            PairRelation::TrueCognate
        } else {
            PairRelation::PartialCognate
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtractionConfig {
    pub threshold: f64,
    pub include_multiword: bool,
    pub execution: Execution,
}

impl Default for ExtractionConfig {
    fn default() -> Self {
        ExtractionConfig { threshold: DEFAULT_THRESHOLD, include_multiword: false, execution: Execution::default() }
    }
}

impl ExtractionConfig {
    fn validate(&self) -> Result<(), ExtractionError> {
        if self.threshold > 0.0 && self.threshold <= 1.0 {
            Ok(())
        } else {
            Err(ExtractionError::Threshold(self.threshold))
        }
    }

    fn keep_lemma(&self, lemma: &str) -> bool {
        self.include_multiword || !Synset::is_multiword(lemma)
    }
}

fn passes(score: f64, threshold: f64) -> bool {
    score + THRESHOLD_EPSILON >= threshold
}

fn full_scores(a: &[char], b: &[char], scorer: &WordScorer, ned: f64, cosine: f64) -> Result<Scores, SimilarityError> {
    Ok(Scores {
        ned: Some(ned),
        cosine: Some(cosine),
        jaro_winkler: Some(jaro_winkler_chars(a, b)),
        phonetic: Some(phonetic_similarity_chars(a, b, &scorer.phonetic)?),
    })
}

fn cognates_in_synset(
    s: &Synset,
    t: &Synset,
    config: &ExtractionConfig,
    scorer: &WordScorer,
) -> Result<Vec<ScoredPair>, ExtractionError> {
    let normalize_all = |synset: &Synset| -> Result<Vec<NormalizedWord>, SimilarityError> {
        synset.lemmas.iter().filter(|l| config.keep_lemma(l)).map(|l| scorer.normalize(l, synset.language)).collect()
    };
    let sources = normalize_all(s)?;
    let targets = normalize_all(t)?;
    let mut out = Vec::new();
    for sw in &sources {
        let sc = sw.chars();
        for tw in &targets {
            let tc = tw.chars();
            let ned = ned_similarity_chars(&sc, &tc)?;
            if !passes(ned, config.threshold) {
                continue;
            }
            let cosine = shingle_cosine_chars(&sc, &tc, scorer.shingle_size)?;
            if !passes(cosine, config.threshold) {
                continue;
            }
            let scores = full_scores(&sc, &tc, scorer, ned, cosine)?;
            out.push(ScoredPair::new(sw.clone(), tw.clone(), PairContext::Cognate(s.id), scores));
        }
    }
    Ok(out)
}

fn sort_dedup(mut pairs: Vec<ScoredPair>) -> Vec<ScoredPair> {
    pairs.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    pairs.dedup_by(|a, b| a.sort_key() == b.sort_key());
    pairs
}

/// Lemma cross-pairs within linked synsets whose NED and shingle cosine both
/// reach the threshold, ordered by (synset, source word, target word).
pub fn generate_cognate_candidates(
    wn: &LinkedWordnet,
    source: LanguageCode,
    target: LanguageCode,
    config: &ExtractionConfig,
    scorer: &WordScorer,
) -> Result<Vec<ScoredPair>, ExtractionError> {
    config.validate()?;
    if scorer.shingle_size == 0 {
        return Err(SimilarityError::ShingleSize.into());
    }
    let linked = wn.link_pairs(source, target)?;
    let per_synset = exec::map(config.execution, &linked.pairs, |(s, t)| cognates_in_synset(s, t, config, scorer));
    let mut all = Vec::new();
    for batch in per_synset {
        all.extend(batch?);
    }
    Ok(sort_dedup(all))
}

/// Canonical spelling → synsets containing it, each with the original lemma.
#[derive(Debug, Clone, Default)]
pub struct SpellingIndex {
    entries: BTreeMap<String, BTreeMap<SynsetId, String>>,
}

impl SpellingIndex {
    pub fn build(table: &SynsetTable, scorer: &WordScorer, include_multiword: bool) -> Result<Self, SimilarityError> {
        let mut entries: BTreeMap<String, BTreeMap<SynsetId, String>> = BTreeMap::new();
        for synset in table.values() {
            for lemma in &synset.lemmas {
                if !include_multiword && Synset::is_multiword(lemma) {
                    continue;
                }
                let canonical = scorer.normalize(lemma, synset.language)?.canonical;
                entries.entry(canonical).or_default().entry(synset.id).or_insert_with(|| lemma.clone());
            }
        }
        Ok(SpellingIndex { entries })
    }

    pub fn senses(&self, spelling: &str) -> BTreeSet<SynsetId> {
        self.entries.get(spelling).map(|m| m.keys().copied().collect()).unwrap_or_default()
    }

    pub fn spellings(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    fn lemmas(&self, spelling: &str) -> Option<&BTreeMap<SynsetId, String>> {
        self.entries.get(spelling)
    }
}

/// Spelling indices for both sides of one language pair.
#[derive(Debug, Clone)]
pub struct RelationIndex {
    pub source: SpellingIndex,
    pub target: SpellingIndex,
}

impl RelationIndex {
    pub fn build(
        wn: &LinkedWordnet,
        source: LanguageCode,
        target: LanguageCode,
        scorer: &WordScorer,
        include_multiword: bool,
    ) -> Result<Self, ExtractionError> {
        Ok(RelationIndex {
            source: SpellingIndex::build(wn.table(source)?, scorer, include_multiword)?,
            target: SpellingIndex::build(wn.table(target)?, scorer, include_multiword)?,
        })
    }

    pub fn classify(&self, spelling: &str) -> PairRelation {
        PairRelation::from_sense_sets(&self.source.senses(spelling), &self.target.senses(spelling))
    }

    /// Canonical spellings present on both sides, ascending.
    pub fn shared_spellings(&self) -> Vec<&str> {
        self.source.spellings().filter(|s| self.target.lemmas(s).is_some()).collect()
    }
}

/// Relation of one canonical spelling between two languages.
pub fn classify_relation(
    spelling: &str,
    wn: &LinkedWordnet,
    source: LanguageCode,
    target: LanguageCode,
    scorer: &WordScorer,
) -> Result<PairRelation, ExtractionError> {
    Ok(RelationIndex::build(wn, source, target, scorer, true)?.classify(spelling))
}

/// One candidate per (spelling, source synset, target synset) where the
/// spelling's sense sets are disjoint.
pub fn generate_false_friend_candidates(
    wn: &LinkedWordnet,
    source: LanguageCode,
    target: LanguageCode,
    config: &ExtractionConfig,
    scorer: &WordScorer,
) -> Result<Vec<ScoredPair>, ExtractionError> {
    let index = RelationIndex::build(wn, source, target, scorer, config.include_multiword)?;
    let mut out = Vec::new();
    for spelling in index.shared_spellings() {
        if index.classify(spelling) != PairRelation::FalseFriend {
            continue;
        }
        let (Some(src), Some(tgt)) = (index.source.lemmas(spelling), index.target.lemmas(spelling)) else {
            continue;
        };
        for (&p, sw) in src {
            for (&q, tw) in tgt {
                let sw = scorer.normalize(sw, source)?;
                let tw = scorer.normalize(tw, target)?;
                let (sc, tc) = (sw.chars(), tw.chars());
                let ned = ned_similarity_chars(&sc, &tc)?;
                let cosine = shingle_cosine_chars(&sc, &tc, scorer.shingle_size)?;
                let scores = full_scores(&sc, &tc, scorer, ned, cosine)?;
                out.push(ScoredPair::new(sw, tw, PairContext::FalseFriend { source: p, target: q }, scores));
            }
        }
    }
    Ok(sort_dedup(out))
}

/// Candidate counts per language pair; `columns` fixes the column order and
/// pairs not listed are appended in sorted order.
pub fn pair_report(candidates: &[ScoredPair], columns: &[LanguagePair]) -> Vec<(LanguagePair, usize)> {
    let mut counts: BTreeMap<LanguagePair, usize> = columns.iter().map(|&p| (p, 0)).collect();
    for c in candidates {
        *counts.entry(c.language_pair()).or_insert(0) += 1;
    }
    let mut out: Vec<(LanguagePair, usize)> = columns.iter().map(|p| (*p, counts[p])).collect();
    out.extend(counts.into_iter().filter(|(p, _)| !columns.contains(p)));
    out
}

pub fn pair_report_table(label: &str, report: &[(LanguagePair, usize)]) -> PairTable {
    let mut table = PairTable::new("Language Pair", report.iter().map(|(p, _)| *p).collect());
    table.push_row(label, report.iter().map(|(_, n)| n.to_string()).collect());
    table
}

/// One row of a candidate CSV file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateRecord {
    pub pair_id: String,
    pub source_lang: LanguageCode,
    pub target_lang: LanguageCode,
    pub source_word: String,
    pub target_word: String,
    pub synset_src: SynsetId,
    pub synset_tgt: SynsetId,
    pub ned: Option<f64>,
    pub cosine: Option<f64>,
    pub jaro_winkler: Option<f64>,
    pub phonetic: Option<f64>,
}

impl CandidateRecord {
    pub fn language_pair(&self) -> LanguagePair {
        LanguagePair::new(self.source_lang, self.target_lang)
    }

    pub fn context(&self) -> PairContext {
        PairContext::from_ids(self.synset_src, self.synset_tgt)
    }

    pub fn task(&self) -> Task {
        self.context().task()
    }

    pub fn scores(&self) -> Scores {
        Scores { ned: self.ned, cosine: self.cosine, jaro_winkler: self.jaro_winkler, phonetic: self.phonetic }
    }

    /// Rebuilds the scored pair, recomputing the canonical forms.
    pub fn to_scored_pair(&self, scorer: &WordScorer) -> Result<ScoredPair, SimilarityError> {
        let sw = scorer.normalize(&self.source_word, self.source_lang)?;
        let tw = scorer.normalize(&self.target_word, self.target_lang)?;
        Ok(ScoredPair {
            pair_id: self.pair_id.clone(),
            source_word: sw,
            target_word: tw,
            context: self.context(),
            scores: self.scores(),
        })
    }
}

fn opt4(v: Option<f64>) -> String {
    v.map(fmt4).unwrap_or_default()
}

pub fn write_candidates<W: Write>(out: W, candidates: &[ScoredPair]) -> Result<(), ExtractionError> {
    let records: Vec<CandidateRecord> = candidates.iter().map(ScoredPair::to_record).collect();
    write_candidate_records(out, &records)
}

pub fn write_candidate_records<W: Write>(out: W, records: &[CandidateRecord]) -> Result<(), ExtractionError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CANDIDATE_HEADER)?;
    for r in records {
        w.write_record([
            r.pair_id.clone(),
            r.source_lang.to_string(),
            r.target_lang.to_string(),
            r.source_word.clone(),
            r.target_word.clone(),
            r.synset_src.to_string(),
            r.synset_tgt.to_string(),
            opt4(r.ned),
            opt4(r.cosine),
            opt4(r.jaro_winkler),
            opt4(r.phonetic),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_candidates<R: Read>(input: R) -> Result<Vec<CandidateRecord>, ExtractionError> {
    let mut rdr = csv::Reader::from_reader(input);
    let records = rdr.deserialize().collect::<Result<Vec<CandidateRecord>, _>>()?;
    Ok(records)
}
