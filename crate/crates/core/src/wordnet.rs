//! Linked multilingual wordnet storage.
//!
//! Each language is loaded from its own `<code>.wordnet.tsv` file. Lines hold
//! one synset as tab-separated fields:
//!
//! ```text
//! id <TAB> pos <TAB> lemma,lemma,... <TAB> gloss [<TAB> example]
//! ```
//!
//! Synset ids form a shared concept space: the same id in two languages
//! denotes the same linked concept.

use std::collections::BTreeMap;
use std::fmt;
use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::lang::LanguageCode;

#[derive(Debug, thiserror::Error)]
pub enum WordnetError {
    #[error("duplicate synset id {id} at line {line} (first defined at line {first_line})")]
    DuplicateId { id: SynsetId, line: usize, first_line: usize },
    #[error("{}:{line}: {message}", path.display())]
    Located { path: PathBuf, line: usize, message: String },
    #[error("language `{0}` is not loaded")]
    NotLoaded(LanguageCode),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("read error: {0}")]
    Read(#[from] io::Error),
    #[error("cannot compute a distribution over an empty dataset")]
    EmptyDataset,
}

/// Positive integer identifying a linked concept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct SynsetId(u32);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SynsetIdError {
    #[error("synset id must be at least 1")]
    Zero,
    #[error("`{0}` is not a positive integer synset id")]
    NotInteger(String),
}

impl SynsetId {
    pub fn new(id: u32) -> Result<Self, SynsetIdError> {
        if id == 0 {
            Err(SynsetIdError::Zero)
        } else {
            Ok(SynsetId(id))
        }
    }

    pub fn get(self) -> u32 {
        self.0
    }
}

impl TryFrom<u32> for SynsetId {
    type Error = SynsetIdError;

    fn try_from(value: u32) -> Result<Self, Self::Error> {
        SynsetId::new(value)
    }
}

impl From<SynsetId> for u32 {
    fn from(id: SynsetId) -> Self {
        id.0
    }
}

impl FromStr for SynsetId {
    type Err = SynsetIdError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let value: u32 = s.trim().parse().map_err(|_| SynsetIdError::NotInteger(s.to_string()))?;
        SynsetId::new(value)
    }
}

impl fmt::Display for SynsetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pos {
    Noun,
    Verb,
    Adjective,
    Adverb,
}

impl Pos {
    pub const ALL: [Pos; 4] = [Pos::Noun, Pos::Verb, Pos::Adjective, Pos::Adverb];

    pub fn as_str(self) -> &'static str {
        match self {
            Pos::Noun => "noun",
            Pos::Verb => "verb",
            Pos::Adjective => "adjective",
            Pos::Adverb => "adverb",
        }
    }

    fn index(self) -> usize {
        match self {
            Pos::Noun => 0,
            Pos::Verb => 1,
            Pos::Adjective => 2,
            Pos::Adverb => 3,
        }
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown part of speech `{0}`")]
pub struct UnknownPos(pub String);

impl FromStr for Pos {
    type Err = UnknownPos;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Pos::ALL.iter().copied().find(|p| p.as_str() == s).ok_or_else(|| UnknownPos(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Synset {
    pub id: SynsetId,
    pub language: LanguageCode,
    pub pos: Pos,
    /// Trimmed, unique, non-empty lemmas in file order.
    pub lemmas: Vec<String>,
    pub gloss: String,
    pub example: Option<String>,
}

impl Synset {
    /// Multi-word expressions carry an internal space.
    pub fn is_multiword(lemma: &str) -> bool {
        lemma.chars().any(char::is_whitespace)
    }

    pub fn contains(&self, lemma: &str) -> bool {
        self.lemmas.iter().any(|l| l == lemma)
    }
}

/// A malformed line that was skipped during parsing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

pub type SynsetTable = BTreeMap<SynsetId, Synset>;

#[derive(Debug, Clone, Default)]
pub struct ParsedTable {
    pub synsets: SynsetTable,
    pub diagnostics: Vec<Diagnostic>,
}

fn parse_line(raw: &str, language: LanguageCode) -> Result<Synset, String> {
    let fields: Vec<&str> = raw.split('\t').collect();
    if !(4..=5).contains(&fields.len()) {
        return Err(format!("expected 4 or 5 tab-separated fields, found {}", fields.len()));
    }
    let id: SynsetId = fields[0].parse().map_err(|e: SynsetIdError| e.to_string())?;
    let pos: Pos = fields[1].trim().parse().map_err(|e: UnknownPos| e.to_string())?;

    let mut lemmas: Vec<String> = Vec::new();
    for lemma in fields[2].split(',') {
        let lemma = lemma.trim();
        if lemma.is_empty() {
            return Err("empty lemma".to_string());
        }
        if lemmas.iter().any(|l| l == lemma) {
            return Err(format!("duplicate lemma `{lemma}`"));
        }
        lemmas.push(lemma.to_string());
    }

    let gloss = fields[3].trim();
    if gloss.is_empty() {
        return Err("empty gloss".to_string());
    }
    let example = fields.get(4).map(|e| e.trim()).filter(|e| !e.is_empty()).map(str::to_string);

    Ok(Synset { id, language, pos, lemmas, gloss: gloss.to_string(), example })
}

/// Parses one language's wordnet file.
///
/// Malformed lines are collected as diagnostics and skipped; a repeated
/// synset id aborts the parse. Blank lines and `#` comment lines are ignored.
pub fn parse_wordnet<R: BufRead>(input: R, language: LanguageCode) -> Result<ParsedTable, WordnetError> {
    let mut table = ParsedTable::default();
    let mut first_seen: BTreeMap<SynsetId, usize> = BTreeMap::new();

    for (idx, line) in input.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        match parse_line(line, language) {
            Ok(synset) => {
                if let Some(&first_line) = first_seen.get(&synset.id) {
                    return Err(WordnetError::DuplicateId { id: synset.id, line: line_no, first_line });
                }
                first_seen.insert(synset.id, line_no);
                table.synsets.insert(synset.id, synset);
            }
            Err(message) => table.diagnostics.push(Diagnostic { line: line_no, message }),
        }
    }
    Ok(table)
}

/// Writes synsets back in the TSV format accepted by [`parse_wordnet`].
pub fn write_wordnet<'a, W, I>(mut out: W, synsets: I) -> io::Result<()>
where
    W: Write,
    I: IntoIterator<Item = &'a Synset>,
{
    for s in synsets {
        write!(out, "{}\t{}\t{}\t{}", s.id, s.pos, s.lemmas.join(","), s.gloss)?;
        if let Some(example) = &s.example {
            write!(out, "\t{example}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}

pub fn wordnet_file_name(language: LanguageCode) -> String {
    format!("{language}.wordnet.tsv")
}

pub fn load_wordnet_file(path: &Path, language: LanguageCode) -> Result<ParsedTable, WordnetError> {
    let file = File::open(path).map_err(|source| WordnetError::Io { path: path.to_path_buf(), source })?;
    parse_wordnet(BufReader::new(file), language).map_err(|e| match e {
        WordnetError::DuplicateId { line, .. } => {
            WordnetError::Located { path: path.to_path_buf(), line, message: e.to_string() }
        }
        WordnetError::Read(source) => WordnetError::Io { path: path.to_path_buf(), source },
        other => other,
    })
}

/// A malformed line, located by file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FileDiagnostic {
    pub path: PathBuf,
    pub line: usize,
    pub message: String,
}

impl fmt::Display for FileDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.path.display(), self.line, self.message)
    }
}

/// Loads `<code>.wordnet.tsv` for each language from `dir`. Malformed lines
/// are returned alongside the tables rather than aborting the load.
pub fn load_wordnet_dir(
    dir: &Path,
    languages: &[LanguageCode],
) -> Result<(LinkedWordnet, Vec<FileDiagnostic>), WordnetError> {
    let mut wn = LinkedWordnet::new();
    let mut diagnostics = Vec::new();
    for &lang in languages {
        let path = dir.join(wordnet_file_name(lang));
        let parsed = load_wordnet_file(&path, lang)?;
        diagnostics.extend(parsed.diagnostics.into_iter().map(|d| FileDiagnostic {
            path: path.clone(),
            line: d.line,
            message: d.message,
        }));
        wn.insert(lang, parsed.synsets);
    }
    Ok((wn, diagnostics))
}

/// Same id linked in two languages under different parts of speech.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PosMismatch {
    pub id: SynsetId,
    pub source_pos: Pos,
    pub target_pos: Pos,
}

#[derive(Debug)]
pub struct LinkedPairs<'a> {
    /// Ascending by synset id.
    pub pairs: Vec<(&'a Synset, &'a Synset)>,
    pub pos_mismatches: Vec<PosMismatch>,
}

/// Per-language synset tables joined through shared ids. Immutable once built.
#[derive(Debug, Clone, Default)]
pub struct LinkedWordnet {
    tables: BTreeMap<LanguageCode, SynsetTable>,
}

impl LinkedWordnet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, language: LanguageCode, table: SynsetTable) {
        self.tables.insert(language, table);
    }

    pub fn languages(&self) -> impl Iterator<Item = LanguageCode> + '_ {
        self.tables.keys().copied()
    }

    pub fn table(&self, language: LanguageCode) -> Result<&SynsetTable, WordnetError> {
        self.tables.get(&language).ok_or(WordnetError::NotLoaded(language))
    }

    pub fn synset(&self, language: LanguageCode, id: SynsetId) -> Option<&Synset> {
        self.tables.get(&language)?.get(&id)
    }

    /// Synsets sharing an id in both languages, skipping pos conflicts.
    pub fn link_pairs(&self, source: LanguageCode, target: LanguageCode) -> Result<LinkedPairs<'_>, WordnetError> {
        let src = self.table(source)?;
        let tgt = self.table(target)?;
        let mut pairs = Vec::new();
        let mut pos_mismatches = Vec::new();
        for (id, s) in src {
            let Some(t) = tgt.get(id) else { continue };
            if s.pos == t.pos {
                pairs.push((s, t));
            } else {
                pos_mismatches.push(PosMismatch { id: *id, source_pos: s.pos, target_pos: t.pos });
            }
        }
        Ok(LinkedPairs { pairs, pos_mismatches })
    }

    /// Every (language, language) id conflict across the loaded tables.
    pub fn pos_conflicts(&self) -> Vec<(LanguageCode, LanguageCode, PosMismatch)> {
        let langs: Vec<LanguageCode> = self.tables.keys().copied().collect();
        let mut out = Vec::new();
        for (i, &a) in langs.iter().enumerate() {
            for &b in &langs[i + 1..] {
                if let Ok(linked) = self.link_pairs(a, b) {
                    out.extend(linked.pos_mismatches.into_iter().map(|m| (a, b, m)));
                }
            }
        }
        out
    }
}

/// Share of each part of speech in a dataset, in the order noun, verb,
/// adjective, adverb. Percentages are rounded to two decimals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PosDistribution {
    pub counts: [usize; 4],
    pub percentages: [f64; 4],
}

impl PosDistribution {
    pub fn from_pos<I: IntoIterator<Item = Pos>>(items: I) -> Result<Self, WordnetError> {
        let mut counts = [0usize; 4];
        for pos in items {
            counts[pos.index()] += 1;
        }
        let total: usize = counts.iter().sum();
        if total == 0 {
            return Err(WordnetError::EmptyDataset);
        }
        let percentages = counts.map(|c| (c as f64 * 10_000.0 / total as f64).round() / 100.0);
        Ok(PosDistribution { counts, percentages })
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn percentage(&self, pos: Pos) -> f64 {
        self.percentages[pos.index()]
    }
}
