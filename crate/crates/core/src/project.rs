//! Project configuration and the on-disk layout of a project's outputs.
//!
//! The config is a flat `key = value` file. Blank lines and lines starting
//! with `#` are ignored. Relative paths are taken relative to the file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::extraction::{Task, DEFAULT_THRESHOLD};
use crate::lang::{LanguageCode, LanguagePair};

pub const KEYS: [&str; 7] = ["wordnet_dir", "source", "targets", "threshold", "shingle_n", "seed", "output_dir"];

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: `{key}` is set twice")]
    Duplicate { line: usize, key: String },
    #[error("invalid value for `{key}`: {message}")]
    Value { key: String, message: String },
    #[error("`{0}` is required")]
    Missing(&'static str),
}

fn value_err(key: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Value { key: key.to_string(), message: message.into() }
}

/// Partially specified settings, from a file or from command-line flags.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigValues {
    pub wordnet_dir: Option<PathBuf>,
    pub source: Option<LanguageCode>,
    pub targets: Option<Vec<LanguageCode>>,
    pub threshold: Option<f64>,
    pub shingle_n: Option<usize>,
    pub seed: Option<u64>,
    pub output_dir: Option<PathBuf>,
}

impl ConfigValues {
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self, ConfigError> {
        let mut seen = BTreeMap::new();
        let mut values = ConfigValues::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let (key, value) = trimmed.split_once('=').ok_or(ConfigError::Syntax { line })?;
            let (key, value) = (key.trim(), value.trim());
            if !KEYS.contains(&key) {
                return Err(ConfigError::UnknownKey { line, key: key.into() });
            }
            if seen.insert(key.to_string(), line).is_some() {
                return Err(ConfigError::Duplicate { line, key: key.into() });
            }
            values.set(key, value, Some(base_dir))?;
        }
        Ok(values)
    }

    /// Sets one key from its textual value. Relative paths are joined onto
    /// `base_dir` when one is given.
    pub fn set(&mut self, key: &str, value: &str, base_dir: Option<&Path>) -> Result<(), ConfigError> {
        let path = |v: &str| {
            let p = PathBuf::from(v);
            match base_dir {
                Some(base) if p.is_relative() => base.join(p),
                _ => p,
            }
        };
        match key {
            "wordnet_dir" => self.wordnet_dir = Some(path(value)),
            "output_dir" => self.output_dir = Some(path(value)),
            "source" => self.source = Some(value.parse::<LanguageCode>().map_err(|e| value_err(key, e.to_string()))?),
            "targets" => {
                let langs = value
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|s| s.parse::<LanguageCode>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| value_err(key, e.to_string()))?;
                self.targets = Some(langs);
            }
            "threshold" => self.threshold = Some(value.parse().map_err(|_| value_err(key, "not a number"))?),
            "shingle_n" => self.shingle_n = Some(value.parse().map_err(|_| value_err(key, "not a positive integer"))?),
            "seed" => self.seed = Some(value.parse().map_err(|_| value_err(key, "not an unsigned integer"))?),
            other => return Err(value_err(other, "unknown key")),
        }
        Ok(())
    }

    /// Values in `over` take precedence.
    pub fn overlay(self, over: ConfigValues) -> ConfigValues {
        ConfigValues {
            wordnet_dir: over.wordnet_dir.or(self.wordnet_dir),
            source: over.source.or(self.source),
            targets: over.targets.or(self.targets),
            threshold: over.threshold.or(self.threshold),
            shingle_n: over.shingle_n.or(self.shingle_n),
            seed: over.seed.or(self.seed),
            output_dir: over.output_dir.or(self.output_dir),
        }
    }

    pub fn resolve(self) -> Result<ProjectConfig, ConfigError> {
        let source = self.source.unwrap_or(LanguageCode::Hi);
        let targets = self.targets.ok_or(ConfigError::Missing("targets"))?;
        if targets.is_empty() {
            return Err(value_err("targets", "at least one target language is required"));
        }
        if targets.contains(&source) {
            return Err(value_err("targets", format!("`{source}` is also the source language")));
        }
        let mut unique = targets.clone();
        unique.sort();
        unique.dedup();
        if unique.len() != targets.len() {
            return Err(value_err("targets", "duplicate language"));
        }
        let threshold = self.threshold.unwrap_or(DEFAULT_THRESHOLD);
        if !(threshold > 0.0 && threshold <= 1.0) {
            return Err(value_err("threshold", format!("{threshold} is outside (0, 1]")));
        }
        let shingle_n = self.shingle_n.unwrap_or(2);
        if shingle_n == 0 {
            return Err(value_err("shingle_n", "must be at least 1"));
        }
        Ok(ProjectConfig {
            wordnet_dir: self.wordnet_dir.ok_or(ConfigError::Missing("wordnet_dir"))?,
            source,
            targets,
            threshold,
            shingle_n,
            seed: self.seed.ok_or(ConfigError::Missing("seed"))?,
            output_dir: self.output_dir.ok_or(ConfigError::Missing("output_dir"))?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProjectConfig {
    pub wordnet_dir: PathBuf,
    pub source: LanguageCode,
    pub targets: Vec<LanguageCode>,
    pub threshold: f64,
    pub shingle_n: usize,
    pub seed: u64,
    pub output_dir: PathBuf,
}

impl ProjectConfig {
    pub fn pairs(&self) -> Vec<LanguagePair> {
        self.targets.iter().map(|&t| LanguagePair::new(self.source, t)).collect()
    }

    /// Source language first, then targets in configured order.
    pub fn languages(&self) -> Vec<LanguageCode> {
        std::iter::once(self.source).chain(self.targets.iter().copied()).collect()
    }

    pub fn layout(&self) -> ProjectLayout {
        ProjectLayout::new(&self.output_dir)
    }

    /// The config in file syntax, keys in canonical order.
    pub fn to_flat(&self) -> String {
        let targets: Vec<&str> = self.targets.iter().map(|t| t.as_str()).collect();
        format!(
            "wordnet_dir = {}\nsource = {}\ntargets = {}\nthreshold = {}\nshingle_n = {}\nseed = {}\noutput_dir = {}\n",
            self.wordnet_dir.display(),
            self.source,
            targets.join(","),
            self.threshold,
            self.shingle_n,
            self.seed,
            self.output_dir.display(),
        )
    }
}

/// Where each artefact of a project lives under its output directory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjectLayout {
    pub root: PathBuf,
}

impl ProjectLayout {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        ProjectLayout { root: root.into() }
    }

    fn file(&self, dir: &str, name: String) -> PathBuf {
        self.root.join(dir).join(name)
    }

    pub fn candidates(&self, task: Task, pair: LanguagePair) -> PathBuf {
        self.file("candidates", format!("{task}_{pair}.csv"))
    }

    pub fn worksheet(&self, task: Task, pair: LanguagePair) -> PathBuf {
        self.file("worksheets", format!("{task}_{pair}.csv"))
    }

    /// Append-only annotation log shared by the CLI and the service.
    pub fn annotations(&self) -> PathBuf {
        self.root.join("annotations.csv")
    }

    pub fn agreement(&self, task: Task, pair: LanguagePair) -> PathBuf {
        self.file("agreement", format!("{task}_{pair}.json"))
    }

    pub fn agreement_table(&self, task: Task) -> PathBuf {
        self.file("agreement", format!("{task}.csv"))
    }

    pub fn retained_gold(&self, task: Task) -> PathBuf {
        self.file("gold", format!("{task}_d2.csv"))
    }

    pub fn d1_gold(&self) -> PathBuf {
        self.file("gold", "cognates_d1.csv".into())
    }

    pub fn gold(&self, task: Task) -> PathBuf {
        self.file("gold", format!("{task}.csv"))
    }

    pub fn model(&self, task: Task, scheme: &str, pair: LanguagePair) -> PathBuf {
        self.file("models", format!("{task}_{scheme}_{pair}.model"))
    }

    pub fn report(&self, name: &str) -> PathBuf {
        self.file("reports", name.to_string())
    }

    pub fn manifest(&self, command: &str) -> PathBuf {
        self.file("manifests", format!("{command}.json"))
    }
}
