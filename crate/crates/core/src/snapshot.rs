//! Snapshot file: a `LEXKB v1` header line followed by canonical JSON.
//!
//! The payload always holds the knowledge base. Snapshots written by ingest also carry
//! the corpus and lexicon so a single file is enough to answer queries.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::CorpusDocument;
use crate::ontology::KbPayload;
use crate::pipeline::LexiconFile;

pub const HEADER: &str = "LEXKB v1";

#[derive(Debug, Error)]
pub enum SnapshotError {
    #[error("unsupported snapshot version {0:?}, expected {HEADER:?}")]
    Version(String),
    #[error("corrupt snapshot: {0}")]
    Corrupt(String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub(crate) struct SnapshotFile {
    pub kb: KbPayload,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corpus: Option<Vec<CorpusDocument>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lexicon: Option<LexiconFile>,
}

pub(crate) fn encode(file: &SnapshotFile) -> Vec<u8> {
    let mut out = format!("{HEADER}\n").into_bytes();
    serde_json::to_writer(&mut out, file).expect("snapshot payload always serialises");
    out.push(b'\n');
    out
}

pub(crate) fn decode(raw: &[u8]) -> Result<SnapshotFile, SnapshotError> {
    let newline = raw
        .iter()
        .position(|b| *b == b'\n')
        .ok_or_else(|| SnapshotError::Corrupt("missing header line".into()))?;
    let header = std::str::from_utf8(&raw[..newline])
        .map_err(|_| SnapshotError::Corrupt("header is not UTF-8".into()))?
        .trim_end_matches('\r');
    if header != HEADER {
        return if header.starts_with("LEXKB ") {
            Err(SnapshotError::Version(header.to_owned()))
        } else {
            Err(SnapshotError::Corrupt(format!(
                "unexpected header {header:?}"
            )))
        };
    }
    serde_json::from_slice(&raw[newline + 1..]).map_err(|e| SnapshotError::Corrupt(e.to_string()))
}
