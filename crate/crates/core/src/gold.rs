//! Validated gold datasets: dictionary import, retained candidates, merging.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::extraction::CandidateRecord;
use crate::lang::{LanguageCode, LanguagePair};
use crate::wordnet::{LinkedWordnet, Pos, PosDistribution, SynsetId, WordnetError};

pub const GOLD_HEADER: [&str; 7] =
    ["synset_id", "pos", "source_lang", "source_word", "target_lang", "target_word", "provenance"];

/// Separator between several words in one dictionary cell.
pub const D1_WORD_SEPARATOR: char = ';';

#[derive(Debug, thiserror::Error)]
pub enum GoldError {
    #[error("line {line}: unknown column `{column}`")]
    UnknownColumn { line: usize, column: String },
    #[error("missing required column `{0}`")]
    MissingColumn(&'static str),
    #[error("line {line}: {message}")]
    Row { line: usize, message: String },
    #[error("candidate {pair_id}: synset {synset} missing from the {language} wordnet")]
    MissingSynset { pair_id: String, synset: SynsetId, language: LanguageCode },
    #[error(transparent)]
    Wordnet(#[from] WordnetError),
    #[error("gold file: {0}")]
    Csv(#[from] csv::Error),
    #[error("gold file: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Provenance {
    D1,
    D2,
    D3,
    #[serde(rename = "merged")]
    Merged,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::D1 => "D1",
            Provenance::D2 => "D2",
            Provenance::D3 => "D3",
            Provenance::Merged => "merged",
        }
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Provenance {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "D1" => Ok(Provenance::D1),
            "D2" => Ok(Provenance::D2),
            "D3" => Ok(Provenance::D3),
            "merged" => Ok(Provenance::Merged),
            other => Err(format!("unknown provenance `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldEntry {
    pub synset_id: SynsetId,
    pub pos: Pos,
    pub source_lang: LanguageCode,
    pub source_word: String,
    pub target_lang: LanguageCode,
    pub target_word: String,
    pub provenance: Provenance,
}

type GoldKey = (SynsetId, LanguageCode, String, LanguageCode, String);

impl GoldEntry {
    fn key(&self) -> GoldKey {
        (self.synset_id, self.source_lang, self.source_word.clone(), self.target_lang, self.target_word.clone())
    }

    pub fn language_pair(&self) -> LanguagePair {
        LanguagePair::new(self.source_lang, self.target_lang)
    }
}

/// Sorted, duplicate-free gold entries.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GoldDataset {
    entries: Vec<GoldEntry>,
}

impl GoldDataset {
    /// Deduplicates on (synset, languages, words). On collision the entry with
    /// the earliest provenance (D1 before D2 before D3) is kept.
    pub fn from_entries<I: IntoIterator<Item = GoldEntry>>(entries: I) -> Self {
        let mut by_key: BTreeMap<GoldKey, GoldEntry> = BTreeMap::new();
        for e in entries {
            match by_key.get(&e.key()) {
                Some(existing) if existing.provenance <= e.provenance => {}
                _ => {
                    by_key.insert(e.key(), e);
                }
            }
        }
        GoldDataset { entries: by_key.into_values().collect() }
    }

    pub fn entries(&self) -> &[GoldEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn language_pairs(&self) -> BTreeSet<LanguagePair> {
        self.entries.iter().map(GoldEntry::language_pair).collect()
    }

    pub fn for_pair(&self, pair: LanguagePair) -> impl Iterator<Item = &GoldEntry> {
        self.entries.iter().filter(move |e| e.language_pair() == pair)
    }

    pub fn pos_distribution(&self) -> Result<PosDistribution, WordnetError> {
        PosDistribution::from_pos(self.entries.iter().map(|e| e.pos))
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self, GoldError> {
        let mut rdr = csv::Reader::from_reader(input);
        let entries = rdr.deserialize().collect::<Result<Vec<GoldEntry>, _>>()?;
        Ok(GoldDataset::from_entries(entries))
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), GoldError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(GOLD_HEADER)?;
        for e in &self.entries {
            w.write_record([
                e.synset_id.to_string().as_str(),
                e.pos.as_str(),
                e.source_lang.as_str(),
                &e.source_word,
                e.target_lang.as_str(),
                &e.target_word,
                e.provenance.as_str(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Union keyed on synset and word pair; D1 wins on collision.
pub fn merge_gold(d1: &GoldDataset, d2: &GoldDataset) -> GoldDataset {
    GoldDataset::from_entries(d1.entries.iter().chain(&d2.entries).cloned())
}

/// Gold entries for the retained candidates. Part of speech comes from the
/// source-side synset; false-friend entries are keyed on the source synset.
pub fn gold_from_candidates(
    candidates: &[CandidateRecord],
    retained: &BTreeSet<String>,
    wn: &LinkedWordnet,
    provenance: Provenance,
) -> Result<GoldDataset, GoldError> {
    let mut entries = Vec::new();
    for c in candidates.iter().filter(|c| retained.contains(&c.pair_id)) {
        let synset = wn.synset(c.source_lang, c.synset_src).ok_or_else(|| GoldError::MissingSynset {
            pair_id: c.pair_id.clone(),
            synset: c.synset_src,
            language: c.source_lang,
        })?;
        entries.push(GoldEntry {
            synset_id: c.synset_src,
            pos: synset.pos,
            source_lang: c.source_lang,
            source_word: c.source_word.clone(),
            target_lang: c.target_lang,
            target_word: c.target_word.clone(),
            provenance,
        });
    }
    Ok(GoldDataset::from_entries(entries))
}

#[derive(Debug, Clone, PartialEq)]
pub struct D1Import {
    pub dataset: GoldDataset,
    /// Cognate sets accepted (rows not flagged partial).
    pub sets: usize,
    /// Words across accepted sets, all languages.
    pub words: usize,
    pub partial_excluded: usize,
}

fn parse_partial(cell: &str) -> Option<bool> {
    match cell.trim().to_ascii_lowercase().as_str() {
        "" | "0" | "no" | "n" | "false" => Some(false),
        "1" | "yes" | "y" | "true" | "partial" => Some(true),
        _ => None,
    }
}

/// Imports a digitized cognate dictionary.
///
/// Columns: `synset_id`, `pos`, an optional `partial` flag, then one column per
/// language code. Cells may be blank or hold several words separated by `;`.
/// Each accepted row expands into pivot-to-other-language pairs (every pivot
/// word with every word of each other language). Rows flagged partial are
/// dropped and counted.
pub fn import_d1<R: Read>(input: R, pivot: LanguageCode) -> Result<D1Import, GoldError> {
    let mut rdr = csv::ReaderBuilder::new().flexible(false).from_reader(input);
    let headers = rdr.headers()?.clone();

    let mut synset_col = None;
    let mut pos_col = None;
    let mut partial_col = None;
    let mut lang_cols: Vec<(usize, LanguageCode)> = Vec::new();
    for (i, h) in headers.iter().enumerate() {
        match h.trim() {
            "synset_id" => synset_col = Some(i),
            "pos" => pos_col = Some(i),
            "partial" => partial_col = Some(i),
            other => match other.parse::<LanguageCode>() {
                Ok(code) => lang_cols.push((i, code)),
                Err(_) => return Err(GoldError::UnknownColumn { line: 1, column: other.to_string() }),
            },
        }
    }
    let synset_col = synset_col.ok_or(GoldError::MissingColumn("synset_id"))?;
    let pos_col = pos_col.ok_or(GoldError::MissingColumn("pos"))?;

    let mut entries = Vec::new();
    let mut sets = 0;
    let mut words = 0;
    let mut partial_excluded = 0;
    for (idx, row) in rdr.records().enumerate() {
        let row = row?;
        let line = idx + 2;
        let row_err = |message: String| GoldError::Row { line, message };
        let id: SynsetId =
            row[synset_col].parse().map_err(|e: crate::wordnet::SynsetIdError| row_err(e.to_string()))?;
        let pos: Pos = row[pos_col].trim().parse().map_err(|e: crate::wordnet::UnknownPos| row_err(e.to_string()))?;
        if let Some(col) = partial_col {
            let flag = parse_partial(&row[col]).ok_or_else(|| row_err(format!("bad partial flag `{}`", &row[col])))?;
            if flag {
                partial_excluded += 1;
                continue;
            }
        }
        sets += 1;
        let cell_words = |col: usize| -> Vec<String> {
            row[col].split(D1_WORD_SEPARATOR).map(str::trim).filter(|w| !w.is_empty()).map(str::to_string).collect()
        };
        let by_lang: Vec<(LanguageCode, Vec<String>)> =
            lang_cols.iter().map(|&(col, lang)| (lang, cell_words(col))).collect();
        words += by_lang.iter().map(|(_, w)| w.len()).sum::<usize>();
        let pivot_words: Vec<String> =
            by_lang.iter().filter(|(l, _)| *l == pivot).flat_map(|(_, w)| w.clone()).collect();
        for (lang, targets) in by_lang.iter().filter(|(l, _)| *l != pivot) {
            for sw in &pivot_words {
                for tw in targets {
                    entries.push(GoldEntry {
                        synset_id: id,
                        pos,
                        source_lang: pivot,
                        source_word: sw.clone(),
                        target_lang: *lang,
                        target_word: tw.clone(),
                        provenance: Provenance::D1,
                    });
                }
            }
        }
    }
    Ok(D1Import { dataset: GoldDataset::from_entries(entries), sets, words, partial_excluded })
}

#[cfg(test)]
mod tests {
    use super::*;
    use LanguageCode::*;

    const ALL_HEADER: &str = "synset_id,pos,partial,hi,bn,gu,mr,pa,sa,ml,ta,te,as,kn,or";

    fn entry(id: u32, sw: &str, tl: LanguageCode, tw: &str, prov: Provenance) -> GoldEntry {
        GoldEntry {
            synset_id: SynsetId::new(id).unwrap(),
            pos: Pos::Noun,
            source_lang: Hi,
            source_word: sw.into(),
            target_lang: tl,
            target_word: tw.into(),
            provenance: prov,
        }
    }

    #[test]
    fn d1_pivot_expansion() {
        let text = format!("{ALL_HEADER}\n1,noun,,a,b,c,d,e,f,g,h,i,j,k,l\n2,noun,no,a,b,,d,,f,g,h,,j,k,l\n");
        let import = import_d1(text.as_bytes(), Hi).unwrap();
        assert_eq!(import.dataset.len(), 11 + 8);
        assert_eq!(import.sets, 2);
        assert_eq!(import.words, 12 + 9);
        assert_eq!(import.partial_excluded, 0);
    }

    #[test]
    fn d1_partial_rows_excluded() {
        let text =
            format!("{ALL_HEADER}\n1,noun,yes,a,b,,,,,,,,,,\n2,noun,,a,b,,,,,,,,,,\n3,adjective,1,a,b,,,,,,,,,,\n");
        let import = import_d1(text.as_bytes(), Hi).unwrap();
        assert_eq!(import.partial_excluded, 2);
        assert_eq!(import.dataset.len(), 1);
    }

    #[test]
    fn d1_errors() {
        let bad_col = "synset_id,pos,hi,xx\n1,noun,a,b\n";
        assert!(matches!(import_d1(bad_col.as_bytes(), Hi), Err(GoldError::UnknownColumn { .. })));
        let bad_id = "synset_id,pos,hi,bn\nabc,noun,a,b\n";
        assert!(matches!(import_d1(bad_id.as_bytes(), Hi), Err(GoldError::Row { line: 2, .. })));
    }

    #[test]
    fn d1_multiple_words_per_cell() {
        let text = "synset_id,pos,hi,mr\n4,noun,a;b,c\n";
        let import = import_d1(text.as_bytes(), Hi).unwrap();
        assert_eq!(import.dataset.len(), 2);
        assert_eq!(import.words, 3);
    }

    #[test]
    fn merge_counts() {
        let d1 = GoldDataset::from_entries(vec![
            entry(1, "a", Bn, "a", Provenance::D1),
            entry(2, "b", Bn, "b", Provenance::D1),
            entry(3, "c", Mr, "c", Provenance::D1),
            entry(4, "d", Mr, "d", Provenance::D1),
        ]);
        let d2 = GoldDataset::from_entries(vec![
            entry(1, "a", Bn, "a", Provenance::D2),
            entry(2, "b", Bn, "b", Provenance::D2),
            entry(3, "c", Mr, "c", Provenance::D2),
            entry(5, "e", Mr, "e", Provenance::D2),
            entry(6, "f", Mr, "f", Provenance::D2),
        ]);
        let merged = merge_gold(&d1, &d2);
        assert_eq!(merged.len(), 4 + 5 - 3);
        assert!(merged.entries().iter().filter(|e| e.synset_id.get() <= 3).all(|e| e.provenance == Provenance::D1));
        assert_eq!(merge_gold(&d2, &d1), merged);
        assert_eq!(merge_gold(&d1, &d1), d1);
    }

    #[test]
    fn same_words_different_targets_stay_distinct() {
        let d = GoldDataset::from_entries(vec![
            entry(1, "अंक", Mr, "अंक", Provenance::D2),
            entry(1, "अंक", Sa, "अंक", Provenance::D2),
        ]);
        assert_eq!(d.len(), 2);
    }

    #[test]
    fn csv_round_trip() {
        let d = GoldDataset::from_entries(vec![
            entry(1, "a", Bn, "b", Provenance::D1),
            entry(2, "c", Mr, "d", Provenance::Merged),
        ]);
        let mut out = Vec::new();
        d.write_csv(&mut out).unwrap();
        assert!(String::from_utf8_lossy(&out)
            .starts_with("synset_id,pos,source_lang,source_word,target_lang,target_word,provenance\n"));
        assert_eq!(GoldDataset::read_csv(&out[..]).unwrap(), d);
    }
}
