//! The twelve supported languages and their scripts.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown language code `{0}`")]
pub struct UnknownLanguage(pub String);

/// ISO 639-1 code of a language covered by the linked wordnets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum LanguageCode {
    Hi,
    Bn,
    Gu,
    Mr,
    Pa,
    Sa,
    Ml,
    Ta,
    Te,
    As,
    Kn,
    Or,
}

impl LanguageCode {
    pub const ALL: [LanguageCode; 12] = [
        LanguageCode::Hi,
        LanguageCode::Bn,
        LanguageCode::Gu,
        LanguageCode::Mr,
        LanguageCode::Pa,
        LanguageCode::Sa,
        LanguageCode::Ml,
        LanguageCode::Ta,
        LanguageCode::Te,
        LanguageCode::As,
        LanguageCode::Kn,
        LanguageCode::Or,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            LanguageCode::Hi => "hi",
            LanguageCode::Bn => "bn",
            LanguageCode::Gu => "gu",
            LanguageCode::Mr => "mr",
            LanguageCode::Pa => "pa",
            LanguageCode::Sa => "sa",
            LanguageCode::Ml => "ml",
            LanguageCode::Ta => "ta",
            LanguageCode::Te => "te",
            LanguageCode::As => "as",
            LanguageCode::Kn => "kn",
            LanguageCode::Or => "or",
        }
    }

    /// Short label used in report headers, e.g. `Hi`.
    pub fn label(self) -> &'static str {
        match self {
            LanguageCode::Hi => "Hi",
            LanguageCode::Bn => "Bn",
            LanguageCode::Gu => "Gu",
            LanguageCode::Mr => "Mr",
            LanguageCode::Pa => "Pa",
            LanguageCode::Sa => "Sa",
            LanguageCode::Ml => "Ml",
            LanguageCode::Ta => "Ta",
            LanguageCode::Te => "Te",
            LanguageCode::As => "As",
            LanguageCode::Kn => "Kn",
            LanguageCode::Or => "Or",
        }
    }

    /// First codepoint of the standard Unicode block the language is written in.
    pub fn script_block(self) -> u32 {
        match self {
            LanguageCode::Hi | LanguageCode::Mr | LanguageCode::Sa => 0x0900,
            LanguageCode::Bn | LanguageCode::As => 0x0980,
            LanguageCode::Pa => 0x0A00,
            LanguageCode::Gu => 0x0A80,
            LanguageCode::Or => 0x0B00,
            LanguageCode::Ta => 0x0B80,
            LanguageCode::Te => 0x0C00,
            LanguageCode::Kn => 0x0C80,
            LanguageCode::Ml => 0x0D00,
        }
    }
}

impl fmt::Display for LanguageCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LanguageCode {
    type Err = UnknownLanguage;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        LanguageCode::ALL.iter().copied().find(|code| code.as_str() == s).ok_or_else(|| UnknownLanguage(s.to_string()))
    }
}

impl TryFrom<String> for LanguageCode {
    type Error = UnknownLanguage;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        value.parse()
    }
}

impl From<LanguageCode> for String {
    fn from(code: LanguageCode) -> Self {
        code.as_str().to_string()
    }
}

/// An ordered (source, target) language pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct LanguagePair {
    pub source: LanguageCode,
    pub target: LanguageCode,
}

impl LanguagePair {
    pub fn new(source: LanguageCode, target: LanguageCode) -> Self {
        LanguagePair { source, target }
    }

    pub fn swapped(self) -> Self {
        LanguagePair::new(self.target, self.source)
    }

    /// Report label, e.g. `Hi-Bn`.
    pub fn label(self) -> String {
        format!("{}-{}", self.source.label(), self.target.label())
    }
}

impl fmt::Display for LanguagePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.source, self.target)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PairParseError {
    #[error("language pair `{0}` is not of the form `src-tgt`")]
    Shape(String),
    #[error(transparent)]
    Language(#[from] UnknownLanguage),
}

impl FromStr for LanguagePair {
    type Err = PairParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, b) = s.split_once('-').ok_or_else(|| PairParseError::Shape(s.to_string()))?;
        Ok(LanguagePair::new(a.to_ascii_lowercase().parse()?, b.to_ascii_lowercase().parse()?))
    }
}

impl TryFrom<String> for LanguagePair {
    type Error = PairParseError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<LanguagePair> for String {
    fn from(pair: LanguagePair) -> Self {
        pair.to_string()
    }
}
