//! Articulatory feature vectors for the canonical block and a phonetically
//! weighted word similarity built on them.
//!
//! The table is a TSV file: `#` comment lines (one of which may carry
//! `version: <v>`), a header row naming the columns, then one row per mapped
//! codepoint. The first column is the hex offset into the canonical block; an
//! optional `name` column is ignored; every other column is a feature in
//! `[0, 1]`.

use std::collections::HashMap;
use std::io::BufRead;
use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, OnceLock};

use super::edit::weighted_edit_distance;
use super::normalize::{NormalizedWord, CANONICAL_BLOCK};
use super::SimilarityError;

pub const DEFAULT_TABLE: &str = include_str!("../../data/phonetic_features.tsv");
pub const DEFAULT_DIMENSION: usize = 38;

#[derive(Debug, thiserror::Error)]
pub enum PhoneticTableError {
    #[error("phonetic table has no header row")]
    MissingHeader,
    #[error("line {line}: {message}")]
    Row { line: usize, message: String },
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug)]
pub struct PhoneticTable {
    version: Option<String>,
    features: Vec<String>,
    rows: HashMap<char, Vec<f64>>,
    zero: Vec<f64>,
    /// Substitution costs between block offsets, row-major 128 x 128.
    costs: Vec<f64>,
    unmapped: AtomicU64,
}

impl PhoneticTable {
    /// The bundled table, parsed once per process. Its unmapped-lookup
    /// counter is shared by every user of the returned handle.
    pub fn shared() -> Arc<PhoneticTable> {
        static SHARED: OnceLock<Arc<PhoneticTable>> = OnceLock::new();
        Arc::clone(SHARED.get_or_init(|| Arc::new(PhoneticTable::builtin())))
    }

    pub fn builtin() -> Self {
        Self::parse(DEFAULT_TABLE.as_bytes()).expect("bundled phonetic table is valid")
    }

    pub fn from_path(path: &Path) -> Result<Self, PhoneticTableError> {
        let file = std::fs::File::open(path)?;
        Self::parse(std::io::BufReader::new(file))
    }

    pub fn parse<R: BufRead>(input: R) -> Result<Self, PhoneticTableError> {
        let mut version = None;
        let mut header: Option<(Vec<String>, Option<usize>)> = None;
        let mut rows = HashMap::new();

        for (idx, line) in input.lines().enumerate() {
            let line_no = idx + 1;
            let line = line?;
            let line = line.trim_end_matches('\r');
            if let Some(comment) = line.strip_prefix('#') {
                if let Some(v) = comment.trim().strip_prefix("version:") {
                    version = Some(v.trim().to_string());
                }
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            let Some((features, name_col)) = &header else {
                let name_col = cols.iter().position(|c| *c == "name");
                let features = cols
                    .iter()
                    .enumerate()
                    .skip(1)
                    .filter(|(i, _)| Some(*i) != name_col)
                    .map(|(_, c)| c.to_string())
                    .collect();
                header = Some((features, name_col));
                continue;
            };
            let row_err = |message: String| PhoneticTableError::Row { line: line_no, message };
            let expected = features.len() + 1 + usize::from(name_col.is_some());
            if cols.len() != expected {
                return Err(row_err(format!("expected {expected} columns, found {}", cols.len())));
            }
            let offset =
                u32::from_str_radix(cols[0].trim(), 16).map_err(|_| row_err(format!("bad offset `{}`", cols[0])))?;
            if offset >= 0x80 {
                return Err(row_err(format!("offset {offset:#x} outside the block")));
            }
            let ch = char::from_u32(CANONICAL_BLOCK + offset).expect("block codepoint");
            let mut values = Vec::with_capacity(features.len());
            for (i, col) in cols.iter().enumerate().skip(1) {
                if Some(i) == *name_col {
                    continue;
                }
                let v: f64 = col.trim().parse().map_err(|_| row_err(format!("bad feature value `{col}`")))?;
                if !(0.0..=1.0).contains(&v) {
                    return Err(row_err(format!("feature value {v} outside [0,1]")));
                }
                values.push(v);
            }
            if rows.insert(ch, values).is_some() {
                return Err(row_err(format!("offset {offset:02X} listed twice")));
            }
        }

        let (features, _) = header.ok_or(PhoneticTableError::MissingHeader)?;
        let zero = vec![0.0; features.len()];
        let mut costs = vec![1.0; BLOCK_LEN * BLOCK_LEN];
        for i in 0..BLOCK_LEN {
            costs[i * BLOCK_LEN + i] = 0.0;
        }
        for (&a, va) in &rows {
            for (&b, vb) in &rows {
                if a != b {
                    costs[block_offset(a) * BLOCK_LEN + block_offset(b)] = 1.0 - cosine(va, vb);
                }
            }
        }
        Ok(PhoneticTable { version, features, rows, zero, costs, unmapped: AtomicU64::new(0) })
    }

    pub fn version(&self) -> Option<&str> {
        self.version.as_deref()
    }

    pub fn dimension(&self) -> usize {
        self.features.len()
    }

    pub fn feature_names(&self) -> &[String] {
        &self.features
    }

    pub fn is_mapped(&self, ch: char) -> bool {
        self.rows.contains_key(&ch)
    }

    pub fn mapped_chars(&self) -> impl Iterator<Item = char> + '_ {
        self.rows.keys().copied()
    }

    /// Feature row for a canonical codepoint; the zero vector if unmapped.
    pub fn vector(&self, ch: char) -> &[f64] {
        match self.rows.get(&ch) {
            Some(v) => v,
            None => {
                self.unmapped.fetch_add(1, Ordering::Relaxed);
                &self.zero
            }
        }
    }

    pub fn feature(&self, ch: char, name: &str) -> Option<f64> {
        let idx = self.features.iter().position(|f| f == name)?;
        self.rows.get(&ch).map(|v| v[idx])
    }

    /// One minus the feature cosine; 0 for identical characters and 1 when
    /// either side has no feature row.
    pub fn substitution_cost(&self, a: char, b: char) -> f64 {
        if a == b {
            return 0.0;
        }
        match (in_block(a), in_block(b)) {
            (true, true) => self.costs[block_offset(a) * BLOCK_LEN + block_offset(b)],
            _ => 1.0,
        }
    }

    fn note_unmapped(&self, word: &[char]) {
        let n = word.iter().filter(|c| !self.rows.contains_key(c)).count() as u64;
        if n > 0 {
            self.unmapped.fetch_add(n, Ordering::Relaxed);
        }
    }

    /// Number of lookups that fell back to the zero vector.
    pub fn unmapped_lookups(&self) -> u64 {
        self.unmapped.load(Ordering::Relaxed)
    }
}

const BLOCK_LEN: usize = 0x80;

fn in_block(c: char) -> bool {
    (CANONICAL_BLOCK..CANONICAL_BLOCK + BLOCK_LEN as u32).contains(&(c as u32))
}

fn block_offset(c: char) -> usize {
    (c as u32 - CANONICAL_BLOCK) as usize
}

fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum();
    let nb: f64 = b.iter().map(|x| x * x).sum();
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    (dot / (na * nb).sqrt()).clamp(0.0, 1.0)
}

/// Edit distance whose substitution cost is one minus the feature cosine of
/// the two characters, normalized by the longer word.
pub fn phonetic_similarity(
    a: &NormalizedWord,
    b: &NormalizedWord,
    table: &PhoneticTable,
) -> Result<f64, SimilarityError> {
    let a: Vec<char> = a.canonical.chars().collect();
    let b: Vec<char> = b.canonical.chars().collect();
    phonetic_similarity_chars(&a, &b, table)
}

pub fn phonetic_similarity_chars(a: &[char], b: &[char], table: &PhoneticTable) -> Result<f64, SimilarityError> {
    if a.is_empty() || b.is_empty() {
        return Err(SimilarityError::EmptyWord);
    }
    table.note_unmapped(a);
    table.note_unmapped(b);
    let cost = weighted_edit_distance(a, b, |&x, &y| table.substitution_cost(x, y));
    let longest = a.len().max(b.len()) as f64;
    Ok((1.0 - cost / longest).clamp(0.0, 1.0))
}
