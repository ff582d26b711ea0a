//! Decompression: undo the backend, decode columns, re-render templates and
//! re-interleave lines.

use std::io::Read;

use bincode::Options;
use rayon::prelude::*;

use crate::analyzer::{join_by_pattern, FieldId, IntegerForm};
use crate::codec::{dict_decode, elastic_decode, ArchiveManifest, Backend, ChunkManifest, Treatment, FORMAT_VERSION, MAGIC};
use crate::error::{Error, Result};
use crate::ingest::{expand_terminator_runs, Terminator};
use crate::parser::{Dispatch, EventTemplate, ParsedChunk, ParserModel, VariableMatrix};

const PREAMBLE: usize = MAGIC.len() + 2;

fn preamble(bytes: &[u8]) -> Result<Backend> {
    if bytes.len() < MAGIC.len() || &bytes[..MAGIC.len()] != MAGIC {
        return Err(Error::format(0, "not a LogShrink archive (bad magic)"));
    }
    if bytes.len() < PREAMBLE {
        return Err(Error::format(bytes.len() as u64, "truncated archive header"));
    }
    if bytes[4] != FORMAT_VERSION {
        return Err(Error::format(4, format!("unsupported format version {}", bytes[4])));
    }
    Backend::from_id(bytes[5]).ok_or_else(|| Error::format(5, format!("unknown backend id {}", bytes[5])))
}

fn decode_manifest(bytes: &[u8], backend: Backend) -> Result<ArchiveManifest> {
    let manifest: ArchiveManifest = crate::codec::manifest_options()
        .with_limit(bytes.len() as u64)
        .deserialize(bytes)
        .map_err(|e| Error::format(8, format!("unreadable manifest: {e}")))?;
    if manifest.version != FORMAT_VERSION || manifest.backend != backend {
        return Err(Error::corrupt("manifest disagrees with the archive header"));
    }
    Ok(manifest)
}

fn split_container(container: &[u8]) -> Result<(&[u8], &[u8])> {
    let len_bytes: [u8; 8] = container
        .get(..8)
        .and_then(|b| b.try_into().ok())
        .ok_or_else(|| Error::format(0, "container shorter than its length prefix"))?;
    let len = u64::from_le_bytes(len_bytes);
    let end = usize::try_from(len)
        .ok()
        .and_then(|l| l.checked_add(8))
        .filter(|&e| e <= container.len())
        .ok_or_else(|| Error::format(8, format!("manifest length {len} exceeds the container")))?;
    Ok((&container[8..end], &container[end..]))
}

/// Reads the manifest and the payload area, checking that the manifest's
/// blobs tile the payload.
pub fn read_archive(bytes: &[u8]) -> Result<(ArchiveManifest, Vec<u8>)> {
    let backend = preamble(bytes)?;
    let container = backend.decompress(&bytes[PREAMBLE..])?;
    let (manifest_bytes, payload) = split_container(&container)?;
    let manifest = decode_manifest(manifest_bytes, backend)?;
    manifest.check_tiling(payload.len() as u64)?;
    Ok((manifest, payload.to_vec()))
}

/// Reads only the manifest; payloads are not inflated.
pub fn read_manifest(bytes: &[u8]) -> Result<ArchiveManifest> {
    let backend = preamble(bytes)?;
    let fail = |source| Error::Backend {
        backend: backend.name(),
        source,
    };
    let mut reader = backend.decoder(&bytes[PREAMBLE..]);
    let mut len = [0u8; 8];
    reader.read_exact(&mut len).map_err(fail)?;
    let len = u64::from_le_bytes(len);
    let mut manifest = Vec::new();
    reader.by_ref().take(len).read_to_end(&mut manifest).map_err(fail)?;
    if manifest.len() as u64 != len {
        return Err(Error::format(8, format!("manifest length {len} exceeds the container")));
    }
    decode_manifest(&manifest, backend)
}

struct Blobs<'a> {
    chunk: &'a ChunkManifest,
    payload: &'a [u8],
}

impl<'a> Blobs<'a> {
    fn get(&self, i: u32) -> Result<&'a [u8]> {
        let b = self
            .chunk
            .blobs
            .get(i as usize)
            .ok_or_else(|| Error::corrupt(format!("chunk {} has no blob {i}", self.chunk.chunk_id)))?;
        Ok(&self.payload[b.offset as usize..(b.offset + b.len) as usize])
    }
}

fn split_raw(blob: &[u8], count: usize) -> Result<Vec<Vec<u8>>> {
    if count == 0 {
        return if blob.is_empty() {
            Ok(Vec::new())
        } else {
            Err(Error::corrupt("raw column holds bytes but no values"))
        };
    }
    let values: Vec<Vec<u8>> = blob.split(|&b| b == b'\n').map(<[u8]>::to_vec).collect();
    if values.len() != count {
        return Err(Error::corrupt(format!("raw column holds {} values, expected {count}", values.len())));
    }
    Ok(values)
}

fn render_ints(ints: impl IntoIterator<Item = i64>, form: IntegerForm) -> Vec<Vec<u8>> {
    ints.into_iter()
        .map(|v| {
            let mut out = Vec::new();
            form.render(v, &mut out);
            out
        })
        .collect()
}

fn decode_treatment(t: &Treatment, count: usize, blobs: &Blobs<'_>) -> Result<Vec<Vec<u8>>> {
    match t {
        Treatment::Raw { blob } => split_raw(blobs.get(*blob)?, count),
        Treatment::Dictionary { dict, indices } => dict_decode(blobs.get(*dict)?, blobs.get(*indices)?, count),
        Treatment::Integer { form, blob } => Ok(render_ints(elastic_decode(blobs.get(*blob)?, count)?, *form)),
        Treatment::Delta { form, blob } => {
            let deltas = elastic_decode(blobs.get(*blob)?, count)?;
            let values = deltas.into_iter().scan(0i64, |acc, d| {
                *acc = acc.wrapping_add(d);
                Some(*acc)
            });
            Ok(render_ints(values, *form))
        }
        Treatment::Split { pattern, children } => {
            if children.len() != pattern.len() + 1 {
                return Err(Error::corrupt("split column child count does not match its pattern"));
            }
            let parts = children
                .iter()
                .map(|c| decode_treatment(c, count, blobs))
                .collect::<Result<Vec<_>>>()?;
            Ok((0..count)
                .map(|row| {
                    let pieces: Vec<&[u8]> = parts.iter().map(|p| p[row].as_slice()).collect();
                    let mut out = Vec::new();
                    join_by_pattern(&pieces, pattern, &mut out);
                    out
                })
                .collect())
        }
    }
}

/// Decodes the columns of one chunk back into its parsed form.
pub fn invert_characteristics(chunk: &ChunkManifest, payload: &[u8], templates: &[EventTemplate], header_fields: usize) -> Result<ParsedChunk> {
    let blobs = Blobs { chunk, payload };
    let matched = usize::try_from(chunk.matched).map_err(|_| Error::corrupt("matched count overflow"))?;
    let line_count = usize::try_from(chunk.line_count).map_err(|_| Error::corrupt("line count overflow"))?;
    if matched > line_count {
        return Err(Error::corrupt("more matched lines than lines"));
    }
    let event_ids: Vec<u32> = elastic_decode(blobs.get(chunk.event_ids)?, matched)?
        .into_iter()
        .map(|e| {
            u32::try_from(e)
                .ok()
                .filter(|&e| (e as usize) < templates.len())
                .ok_or_else(|| Error::corrupt(format!("unknown event id {e}")))
        })
        .collect::<Result<_>>()?;
    let unmatched_count = line_count - matched;
    let mut unmatched_index = Vec::with_capacity(unmatched_count);
    let mut at = 0i64;
    for d in elastic_decode(blobs.get(chunk.unmatched_index)?, unmatched_count)? {
        at = at.wrapping_add(d);
        unmatched_index.push(usize::try_from(at).map_err(|_| Error::corrupt("negative unmatched line index"))?);
    }
    let unmatched_lines = split_raw(blobs.get(chunk.unmatched_lines)?, unmatched_count)?;

    let mut rows = vec![0usize; templates.len()];
    for &e in &event_ids {
        rows[e as usize] += 1;
    }
    let mut header_columns: Vec<Option<Vec<Vec<u8>>>> = vec![None; header_fields];
    let mut variables: Vec<VariableMatrix> = templates.iter().map(|t| VariableMatrix::new(t.arity())).collect();
    let mut slots: Vec<Vec<Option<Vec<Vec<u8>>>>> = templates.iter().map(|t| vec![None; t.arity()]).collect();
    for col in &chunk.columns {
        match col.field {
            FieldId::Header(i) => {
                let cell = header_columns
                    .get_mut(i as usize)
                    .ok_or_else(|| Error::corrupt(format!("header field {i} out of range")))?;
                *cell = Some(decode_treatment(&col.treatment, matched, &blobs)?);
            }
            FieldId::Variable { event, slot } => {
                let cell = slots
                    .get_mut(event as usize)
                    .and_then(|s| s.get_mut(slot as usize))
                    .ok_or_else(|| Error::corrupt(format!("variable column {} out of range", col.field)))?;
                *cell = Some(decode_treatment(&col.treatment, rows[event as usize], &blobs)?);
            }
        }
    }
    let header_columns = header_columns
        .into_iter()
        .enumerate()
        .map(|(i, c)| c.ok_or_else(|| Error::corrupt(format!("header column {i} missing"))))
        .collect::<Result<Vec<_>>>()?;
    for (e, (matrix, cols)) in variables.iter_mut().zip(slots).enumerate() {
        matrix.rows = rows[e];
        for (s, c) in cols.into_iter().enumerate() {
            matrix.columns[s] = match c {
                Some(c) => c,
                None if rows[e] == 0 => Vec::new(),
                None => return Err(Error::corrupt(format!("variable column E{e}.V{s} missing"))),
            };
        }
    }
    let line_dispatch = ParsedChunk::dispatch_from(line_count, &unmatched_index, &event_ids, templates.len())?;
    Ok(ParsedChunk {
        header_columns,
        event_ids,
        variables,
        unmatched: unmatched_index.into_iter().zip(unmatched_lines).collect(),
        line_dispatch,
    })
}

/// Renders every line of a parsed chunk followed by its terminator.
pub fn reconstruct_lines(parsed: &ParsedChunk, model: &ParserModel, terminators: &[Terminator], out: &mut Vec<u8>) -> Result<()> {
    if terminators.len() != parsed.line_count() {
        return Err(Error::corrupt(format!(
            "{} terminators for {} lines",
            terminators.len(),
            parsed.line_count()
        )));
    }
    let header = model.header();
    let mut matched = 0;
    let mut content = Vec::new();
    let mut cells: Vec<&[u8]> = Vec::with_capacity(parsed.header_columns.len());
    for (d, t) in parsed.line_dispatch.iter().zip(terminators) {
        match *d {
            Dispatch::Matched { event_id, row } => {
                let template = model
                    .template(event_id)
                    .ok_or_else(|| Error::corrupt(format!("unknown event id {event_id}")))?;
                let matrix = &parsed.variables[event_id as usize];
                if matrix.columns.len() != template.arity() || row >= matrix.rows {
                    return Err(Error::corrupt(format!("variable row {row} of event {event_id} does not fit its template")));
                }
                content.clear();
                template.render(&matrix.row(row), &mut content);
                cells.clear();
                cells.extend(parsed.header_columns.iter().map(|c| c[matched].as_slice()));
                header.render(&cells, &content, out);
                matched += 1;
            }
            Dispatch::Unmatched { index } => out.extend_from_slice(&parsed.unmatched[index].1),
        }
        out.extend_from_slice(t.as_bytes());
    }
    Ok(())
}

fn decode_chunk(chunk: &ChunkManifest, payload: &[u8], model: &ParserModel) -> Result<Vec<u8>> {
    let parsed = invert_characteristics(chunk, payload, model.templates(), model.header().field_count())?;
    let terminators = expand_terminator_runs(&chunk.terminators);
    let mut out = Vec::new();
    reconstruct_lines(&parsed, model, &terminators, &mut out)?;
    Ok(out)
}

/// Restores the original bytes of an archive, decoding chunks on `workers`
/// threads.
pub fn decompress(bytes: &[u8], workers: usize) -> Result<Vec<u8>> {
    let (manifest, payload) = read_archive(bytes)?;
    let model = manifest.model();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::parameter(format!("cannot start worker pool: {e}")))?;
    let parts: Vec<Vec<u8>> = pool.install(|| {
        manifest
            .chunks
            .par_iter()
            .map(|c| decode_chunk(c, &payload, &model))
            .collect::<Result<_>>()
    })?;
    Ok(parts.concat())
}
