#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::Command;

use tempfile::TempDir;

pub const TIMESTAMP: &str = "2024-01-01T00:00:00.000Z";

pub fn core_tests() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests")
}

pub fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

pub fn fixture_wordnet() -> PathBuf {
    core_tests().join("fixtures/mini")
}

pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub struct Project {
    pub dir: TempDir,
}

impl Project {
    /// A project over `wordnet_dir` with output under `<tmp>/out`.
    pub fn with_wordnet(wordnet_dir: &Path, targets: &str) -> Project {
        let dir = tempfile::tempdir().unwrap();
        let conf = format!(
            "# test project\nwordnet_dir = {}\ntargets = {targets}\nseed = 42\noutput_dir = out\n",
            wordnet_dir.display()
        );
        std::fs::write(dir.path().join("project.conf"), conf).unwrap();
        Project { dir }
    }

    pub fn new(targets: &str) -> Project {
        Self::with_wordnet(&fixture_wordnet(), targets)
    }

    pub fn path(&self, rel: &str) -> PathBuf {
        self.dir.path().join(rel)
    }

    pub fn out(&self, rel: &str) -> PathBuf {
        self.dir.path().join("out").join(rel)
    }

    pub fn read_out(&self, rel: &str) -> String {
        let p = self.out(rel);
        std::fs::read_to_string(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
    }

    pub fn run(&self, args: &[&str]) -> Output {
        let mut full = vec!["--config", "project.conf"];
        full.extend_from_slice(args);
        run_in(self.dir.path(), &full)
    }

    /// Copies the generated worksheet for `pair`, filling the label column
    /// from `label(row_index)`, and returns the new file's path.
    pub fn fill_worksheet(
        &self,
        task: &str,
        pair: &str,
        annotator: &str,
        label: impl Fn(usize) -> Option<&'static str>,
    ) -> PathBuf {
        let src = self.out(&format!("worksheets/{task}_{pair}.csv"));
        let mut rdr = csv::Reader::from_path(&src).unwrap();
        let header = rdr.headers().unwrap().clone();
        let dst = self.path(&format!("{annotator}_{task}_{pair}.csv"));
        let mut w = csv::Writer::from_path(&dst).unwrap();
        w.write_record(&header).unwrap();
        for (i, row) in rdr.records().enumerate() {
            let row = row.unwrap();
            let mut fields: Vec<&str> = row.iter().collect();
            *fields.last_mut().unwrap() = label(i).unwrap_or("");
            w.write_record(&fields).unwrap();
        }
        w.flush().unwrap();
        dst
    }
}

pub fn run_in(dir: &Path, args: &[&str]) -> Output {
    let out = Command::new(env!("CARGO_BIN_EXE_cognate")).args(args).current_dir(dir).output().unwrap();
    Output {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8_lossy(&out.stdout).into_owned(),
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}

/// Labels used for the synthetic two-annotator run: the first annotator
/// rejects every fifth row, the second also rejects rows 3, 10, 17.
pub fn synthetic_label(annotator: usize, row: usize) -> Option<&'static str> {
    let negative = row % 5 == 0 || (annotator == 1 && row % 7 == 3);
    Some(if negative { "negative" } else { "positive" })
}

/// Compares a file against a golden; `UPDATE_GOLDEN=1` rewrites the golden.
pub fn check_golden(golden: &Path, actual: &str) -> Result<(), String> {
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::create_dir_all(golden.parent().unwrap()).unwrap();
        std::fs::write(golden, actual).unwrap();
        return Ok(());
    }
    let expected = std::fs::read_to_string(golden).map_err(|e| format!("{}: {e}", golden.display()))?;
    if expected == actual {
        Ok(())
    } else {
        Err(format!("{} differs", golden.display()))
    }
}
