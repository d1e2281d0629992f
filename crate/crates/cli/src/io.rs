use std::fs::File;
use std::path::Path;

use crate::error::{data_at, internal_at, CliError, Result};

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| internal_at(dir, e))?;
    }
    std::fs::write(path, bytes).map_err(|e| internal_at(path, e))
}

/// Opens an input file; a missing file is a data error naming the file and,
/// when given, the command that produces it.
pub fn open_input(path: &Path, produced_by: Option<&str>) -> Result<File> {
    File::open(path).map_err(|e| match (e.kind(), produced_by) {
        (std::io::ErrorKind::NotFound, Some(cmd)) => {
            CliError::Data(format!("{}: not found (run `cognate {cmd}` first)", path.display()))
        }
        _ => data_at(path, e),
    })
}

/// Serializes into memory with `write`, then writes the file in one go.
pub fn write_with<E: std::fmt::Display>(
    path: &Path,
    write: impl FnOnce(&mut Vec<u8>) -> std::result::Result<(), E>,
) -> Result<()> {
    let mut buf = Vec::new();
    write(&mut buf).map_err(|e| internal_at(path, e))?;
    write_file(path, &buf)
}
