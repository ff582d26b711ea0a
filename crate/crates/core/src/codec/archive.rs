//! Archive layout.
//!
//! ```text
//! "LGSK" | version u8 | backend u8 | backend-compressed container
//! container = manifest length (u64 LE) | manifest | payloads
//! ```
//!
//! The manifest is bincode (varint integers). Payloads are the column blobs
//! of every chunk, concatenated in manifest order; each blob's offset is
//! relative to the start of the payload area.

use bincode::Options;
use serde::{Deserialize, Serialize};

use super::{Backend, BlobSink, Dropped, TransformedColumn};
use crate::analyzer::CharacteristicSet;
use crate::error::{Error, Result};
use crate::ingest::Terminator;
use crate::parser::{EventTemplate, HeaderSchema, ParserModel};

pub const MAGIC: &[u8; 4] = b"LGSK";
pub const FORMAT_VERSION: u8 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlobEntry {
    pub name: String,
    pub offset: u64,
    pub len: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChunkManifest {
    pub chunk_id: u64,
    pub line_count: u64,
    pub terminators: Vec<(Terminator, u64)>,
    /// Number of lines matched to a template.
    pub matched: u64,
    /// Elastic event id per matched line.
    pub event_ids: u32,
    /// Delta-elastic line indices of unmatched lines.
    pub unmatched_index: u32,
    /// Unmatched lines joined by `\n`.
    pub unmatched_lines: u32,
    /// What the analyzer found on the sample; `None` when it did not run.
    pub characteristics: Option<CharacteristicSet>,
    pub dropped: Vec<Dropped>,
    pub columns: Vec<TransformedColumn>,
    pub windows: u64,
    pub clusters: u64,
    pub sampled_windows: u64,
    pub blobs: Vec<BlobEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArchiveManifest {
    pub version: u8,
    pub backend: Backend,
    pub header: HeaderSchema,
    pub templates: Vec<EventTemplate>,
    /// Compression settings, for display only.
    pub settings: Vec<(String, String)>,
    pub chunks: Vec<ChunkManifest>,
}

pub(crate) fn manifest_options() -> impl Options {
    bincode::DefaultOptions::new()
}

impl ArchiveManifest {
    pub fn new(backend: Backend, model: &ParserModel) -> Self {
        ArchiveManifest {
            version: FORMAT_VERSION,
            backend,
            header: model.header().clone(),
            templates: model.templates().to_vec(),
            settings: Vec::new(),
            chunks: Vec::new(),
        }
    }

    pub fn model(&self) -> ParserModel {
        ParserModel::from_parts(self.header.clone(), self.templates.clone())
    }

    /// Appends a chunk, placing its blobs at the end of `payload`.
    pub fn push_chunk(&mut self, mut chunk: ChunkManifest, sink: BlobSink, payload: &mut Vec<u8>) {
        chunk.blobs = sink
            .names
            .into_iter()
            .zip(sink.payloads)
            .map(|(name, bytes)| {
                let entry = BlobEntry {
                    name,
                    offset: payload.len() as u64,
                    len: bytes.len() as u64,
                };
                payload.extend_from_slice(&bytes);
                entry
            })
            .collect();
        self.chunks.push(chunk);
    }

    pub fn line_count(&self) -> u64 {
        self.chunks.iter().map(|c| c.line_count).sum()
    }

    /// Checks that the blobs tile `payload_len` bytes in order, without gaps
    /// or overlaps.
    pub fn check_tiling(&self, payload_len: u64) -> Result<()> {
        let mut at = 0u64;
        for c in &self.chunks {
            for b in &c.blobs {
                if b.offset != at {
                    return Err(Error::corrupt(format!(
                        "blob {} of chunk {} starts at {} instead of {at}",
                        b.name, c.chunk_id, b.offset
                    )));
                }
                at = at
                    .checked_add(b.len)
                    .ok_or_else(|| Error::corrupt("blob length overflow"))?;
            }
        }
        if at != payload_len {
            return Err(Error::corrupt(format!(
                "blobs cover {at} bytes but the payload holds {payload_len}"
            )));
        }
        Ok(())
    }
}

/// Serializes and compresses a complete archive.
pub fn write_archive(manifest: &ArchiveManifest, payload: &[u8]) -> Result<Vec<u8>> {
    let encoded = manifest_options()
        .serialize(manifest)
        .map_err(|e| Error::corrupt(format!("manifest serialization failed: {e}")))?;
    let mut container = Vec::with_capacity(8 + encoded.len() + payload.len());
    container.extend_from_slice(&(encoded.len() as u64).to_le_bytes());
    container.extend_from_slice(&encoded);
    container.extend_from_slice(payload);
    let compressed = manifest.backend.compress(&container)?;
    let mut out = Vec::with_capacity(6 + compressed.len());
    out.extend_from_slice(MAGIC);
    out.push(FORMAT_VERSION);
    out.push(manifest.backend.id());
    out.extend_from_slice(&compressed);
    Ok(out)
}
