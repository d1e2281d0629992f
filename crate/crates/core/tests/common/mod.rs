#![allow(dead_code)]

use std::path::{Path, PathBuf};

use cognate_core::lang::LanguageCode;
use cognate_core::wordnet::{load_wordnet_dir, LinkedWordnet};

pub fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/mini")
}

pub fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

pub fn mini_wordnet() -> LinkedWordnet {
    let (wn, diagnostics) =
        load_wordnet_dir(&fixture_dir(), &[LanguageCode::Hi, LanguageCode::Mr, LanguageCode::Bn]).unwrap();
    assert!(diagnostics.is_empty(), "{diagnostics:?}");
    wn
}

/// Compares `actual` against a golden file. With `UPDATE_GOLDEN=1` the file
/// is rewritten instead.
pub fn assert_golden(name: &str, actual: &str) {
    let path = golden_dir().join(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, actual).unwrap();
        return;
    }
    let expected = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert!(expected == actual, "{} differs:\n--- expected\n{expected}\n--- actual\n{actual}", path.display());
}
