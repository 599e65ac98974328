//! Append-only verdict persistence.
//!
//! Each line is one `(query hash, outcome)` record. Reloading a store
//! before a run replays every cached verdict, so a repeated evaluation
//! issues zero prover calls and an interrupted run resumes where it
//! stopped. Writes are flushed per record.

use crate::entailment::CheckReason;
use serde::{Deserialize, Serialize};
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StoreRecord {
    /// SHA-256 hex digest of the canonical query text.
    pub key: String,
    pub reason: CheckReason,
    /// Canonical forms of the premise formulas the proof used.
    pub used: Vec<String>,
}

pub struct VerdictStore {
    path: PathBuf,
    writer: Mutex<File>,
}

impl VerdictStore {
    /// Open (creating if absent) and return any records already present.
    pub fn open(path: impl AsRef<Path>) -> std::io::Result<(VerdictStore, Vec<StoreRecord>)> {
        let path = path.as_ref().to_path_buf();
        let mut records = Vec::new();
        if path.exists() {
            let reader = BufReader::new(File::open(&path)?);
            for line in reader.lines() {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                // Torn trailing writes from an interrupted run are skipped.
                if let Ok(record) = serde_json::from_str::<StoreRecord>(&line) {
                    records.push(record);
                }
            }
        }
        let writer = OpenOptions::new().create(true).append(true).open(&path)?;
        Ok((
            VerdictStore {
                path,
                writer: Mutex::new(writer),
            },
            records,
        ))
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn append(&self, record: &StoreRecord) -> std::io::Result<()> {
        let line = serde_json::to_string(record).expect("store records serialize");
        let mut writer = self.writer.lock().expect("store writer poisoned");
        writeln!(writer, "{line}")?;
        writer.flush()
    }
}
