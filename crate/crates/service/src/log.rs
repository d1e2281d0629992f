//! Append-only annotation log. Every line is an upsert; replaying the file in
//! order rebuilds the store.

use std::fs::{File, OpenOptions};
use std::io::{Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};

use cognate_core::annotation::{
    annotation_row, read_annotations, AnnotationRecord, AnnotationStore, Upsert, ANNOTATION_HEADER,
};

use crate::ServiceError;

#[derive(Debug)]
pub struct AnnotationLog {
    path: PathBuf,
    file: File,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> ServiceError + '_ {
    move |source| ServiceError::Io { path: path.to_path_buf(), source }
}

fn csv_line(fields: &[String]) -> Vec<u8> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(fields).expect("in-memory write");
    w.into_inner().expect("in-memory flush")
}

impl AnnotationLog {
    /// Opens (creating if needed) the log at `path` and replays it.
    pub fn open(path: &Path) -> Result<(AnnotationLog, AnnotationStore), ServiceError> {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir).map_err(io_err(dir))?;
        }
        let mut file = OpenOptions::new().read(true).append(true).create(true).open(path).map_err(io_err(path))?;
        let len = file.metadata().map_err(io_err(path))?.len();
        let mut store = AnnotationStore::new();
        if len == 0 {
            let header: Vec<String> = ANNOTATION_HEADER.iter().map(|s| s.to_string()).collect();
            file.write_all(&csv_line(&header)).map_err(io_err(path))?;
            file.sync_data().map_err(io_err(path))?;
        } else {
            file.seek(SeekFrom::Start(0)).map_err(io_err(path))?;
            let records =
                read_annotations(&file).map_err(|source| ServiceError::Log { path: path.to_path_buf(), source })?;
            for r in records {
                store.upsert(r);
            }
        }
        Ok((AnnotationLog { path: path.to_path_buf(), file }, store))
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Upserts `record` into `store`. A change is appended and synced to disk
    /// before the store is touched.
    pub fn submit(&mut self, store: &mut AnnotationStore, record: AnnotationRecord) -> Result<Upsert, ServiceError> {
        if store.get(&record.pair_id, &record.annotator).map(|r| r.label) == Some(record.label) {
            return Ok(Upsert::Unchanged);
        }
        let line = csv_line(&annotation_row(&record));
        self.file.write_all(&line).map_err(io_err(&self.path))?;
        self.file.sync_data().map_err(io_err(&self.path))?;
        Ok(store.upsert(record))
    }
}
