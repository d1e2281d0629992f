//! Cross-script canonicalization.
//!
//! The nine major Brahmi-derived blocks (Devanagari through Malayalam) share
//! one 128-codepoint layout, so a letter at offset `k` in the Bengali block is
//! the same letter as offset `k` in Devanagari. Every codepoint in those blocks
//! is re-based onto the Devanagari block. A handful of script-specific letters
//! that sit at offsets the shared layout assigns to something else are folded
//! to their canonical equivalents one-for-one, so the mapping stays
//! length-preserving.

use serde::Serialize;

use super::SimilarityError;
use crate::lang::LanguageCode;

pub const CANONICAL_BLOCK: u32 = 0x0900;
const INDIC_START: u32 = 0x0900;
const INDIC_END: u32 = 0x0D7F;
const NUKTA: char = '\u{093C}';

/// (block base, offset in source block, canonical offset).
const SCRIPT_FOLDS: &[(u32, u32, u32)] = &[
    // Bengali/Assamese: khanda ta, Assamese ra and wa.
    (0x0980, 0x4E, 0x24),
    (0x0980, 0x70, 0x30),
    (0x0980, 0x71, 0x35),
    // Gurmukhi tippi is a nasalization mark.
    (0x0A00, 0x70, 0x02),
    // Oriya wa.
    (0x0B00, 0x71, 0x35),
    // Telugu tsa and dza would otherwise land on the nukta letters.
    (0x0C00, 0x58, 0x1A),
    (0x0C00, 0x59, 0x1C),
    // Kannada llla is encoded at the offset of Devanagari fa.
    (0x0C80, 0x5E, 0x34),
    // Malayalam chillu letters map to their base consonants.
    (0x0D00, 0x54, 0x2E),
    (0x0D00, 0x55, 0x2F),
    (0x0D00, 0x56, 0x34),
    (0x0D00, 0x7A, 0x23),
    (0x0D00, 0x7B, 0x28),
    (0x0D00, 0x7C, 0x30),
    (0x0D00, 0x7D, 0x32),
    (0x0D00, 0x7E, 0x33),
    (0x0D00, 0x7F, 0x15),
];

/// Precomposed nukta letters (canonical offsets 0x58..=0x5F) and their bases.
const NUKTA_BASES: [u32; 8] = [0x15, 0x16, 0x17, 0x1C, 0x21, 0x22, 0x2B, 0x2F];

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct NormalizeOptions {
    /// Drop the combining nukta and reduce precomposed nukta letters to their base.
    pub strip_nukta: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NormalizedWord {
    pub original: String,
    pub canonical: String,
    pub language: LanguageCode,
    /// Codepoints outside the Indic blocks that were passed through unchanged.
    pub non_indic: usize,
}

impl NormalizedWord {
    pub fn is_non_indic(&self) -> bool {
        self.non_indic > 0
    }

    pub fn chars(&self) -> Vec<char> {
        self.canonical.chars().collect()
    }
}

fn canonical_char(c: char) -> Option<char> {
    let cp = c as u32;
    if !(INDIC_START..=INDIC_END).contains(&cp) {
        return None;
    }
    let base = cp & !0x7F;
    let offset = cp - base;
    let offset =
        SCRIPT_FOLDS.iter().find(|&&(b, from, _)| b == base && from == offset).map_or(offset, |&(_, _, to)| to);
    char::from_u32(CANONICAL_BLOCK + offset)
}

/// Maps a word onto the canonical block.
pub fn normalize_script(
    word: &str,
    language: LanguageCode,
    options: NormalizeOptions,
) -> Result<NormalizedWord, SimilarityError> {
    if word.is_empty() {
        return Err(SimilarityError::EmptyWord);
    }
    let mut canonical = String::with_capacity(word.len());
    let mut non_indic = 0;
    for c in word.chars() {
        let mapped = match canonical_char(c) {
            Some(m) => m,
            None => {
                non_indic += 1;
                c
            }
        };
        if options.strip_nukta {
            if mapped == NUKTA {
                continue;
            }
            let cp = mapped as u32;
            if (CANONICAL_BLOCK + 0x58..=CANONICAL_BLOCK + 0x5F).contains(&cp) {
                let base = NUKTA_BASES[(cp - CANONICAL_BLOCK - 0x58) as usize];
                canonical.push(char::from_u32(CANONICAL_BLOCK + base).expect("valid codepoint"));
                continue;
            }
        }
        canonical.push(mapped);
    }
    Ok(NormalizedWord { original: word.to_string(), canonical, language, non_indic })
}
