//! Column encoders and the archive container.
//!
//! The matcher checks the characteristics mined from a sample against the
//! full columns of a chunk. Whatever survives picks the treatment of each
//! (sub-)field: dictionary, delta, plain integers or raw text. Dropped
//! characteristics are written to the manifest so decoding never re-runs the
//! analysis.

mod archive;
mod backend;
mod dict;
mod elastic;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::analyzer::{parse_integers, satisfies_multiplicity, split_by_pattern, CharacteristicSet, FieldId, FieldRef, IntegerForm};
use crate::parser::ParsedChunk;

pub(crate) use archive::manifest_options;
pub use archive::{write_archive, ArchiveManifest, BlobEntry, ChunkManifest, FORMAT_VERSION, MAGIC};
pub use backend::Backend;
pub use dict::{dict_decode, dict_encode, dict_entries};
pub use elastic::{elastic_decode, elastic_decode_all, elastic_encode, read_varint, unzigzag, write_varint, zigzag};

/// How one column is stored. Blob numbers index the chunk's blob table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Treatment {
    /// Values joined by `\n`; no value can contain a line feed.
    Raw { blob: u32 },
    Dictionary { dict: u32, indices: u32 },
    /// First value verbatim, then wrapping differences, elastic-encoded.
    Delta { form: IntegerForm, blob: u32 },
    /// Elastic-encoded values.
    Integer { form: IntegerForm, blob: u32 },
    Split { pattern: Vec<u8>, children: Vec<Treatment> },
}

impl Treatment {
    pub fn kind(&self) -> &'static str {
        match self {
            Treatment::Raw { .. } => "raw",
            Treatment::Dictionary { .. } => "dictionary",
            Treatment::Delta { .. } => "delta",
            Treatment::Integer { .. } => "integer",
            Treatment::Split { .. } => "split",
        }
    }

    /// Blob numbers used by this treatment, depth first.
    pub fn blobs(&self) -> Vec<u32> {
        match self {
            Treatment::Raw { blob } | Treatment::Delta { blob, .. } | Treatment::Integer { blob, .. } => vec![*blob],
            Treatment::Dictionary { dict, indices } => vec![*dict, *indices],
            Treatment::Split { children, .. } => children.iter().flat_map(Treatment::blobs).collect(),
        }
    }
}

impl fmt::Display for Treatment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Treatment::Split { pattern, children } => {
                write!(f, "split({:?}:", String::from_utf8_lossy(pattern))?;
                for c in children {
                    write!(f, " {c}")?;
                }
                f.write_str(")")
            }
            Treatment::Delta { form: IntegerForm::Padded(w), .. } | Treatment::Integer { form: IntegerForm::Padded(w), .. } => {
                write!(f, "{}[w{w}]", self.kind())
            }
            _ => f.write_str(self.kind()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransformedColumn {
    pub field: FieldId,
    pub treatment: Treatment,
}

/// A sampled characteristic that did not hold on the full column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Dropped {
    Pattern(FieldId),
    Variability(FieldRef),
}

impl fmt::Display for Dropped {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dropped::Pattern(id) => write!(f, "pattern of {id}"),
            Dropped::Variability(r) => write!(f, "variability of {r}"),
        }
    }
}

/// Named payloads of one chunk, in write order.
#[derive(Debug, Default, Clone)]
pub struct BlobSink {
    pub names: Vec<String>,
    pub payloads: Vec<Vec<u8>>,
}

impl BlobSink {
    pub fn push(&mut self, name: impl Into<String>, payload: Vec<u8>) -> u32 {
        self.names.push(name.into());
        self.payloads.push(payload);
        (self.payloads.len() - 1) as u32
    }
}

pub fn join_raw<V: AsRef<[u8]>>(values: &[V]) -> Vec<u8> {
    let mut out = Vec::with_capacity(values.iter().map(|v| v.as_ref().len() + 1).sum());
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            out.push(b'\n');
        }
        out.extend_from_slice(v.as_ref());
    }
    out
}

/// Every column of a parsed chunk: header fields, then variable slots of
/// each event that occurs at least once.
pub fn field_columns(parsed: &ParsedChunk) -> Vec<(FieldId, &[Vec<u8>])> {
    let mut out: Vec<(FieldId, &[Vec<u8>])> = parsed
        .header_columns
        .iter()
        .enumerate()
        .map(|(i, c)| (FieldId::Header(i as u32), c.as_slice()))
        .collect();
    for (e, m) in parsed.variables.iter().enumerate() {
        if m.rows == 0 {
            continue;
        }
        for (s, c) in m.columns.iter().enumerate() {
            out.push((
                FieldId::Variable {
                    event: e as u32,
                    slot: s as u32,
                },
                c.as_slice(),
            ));
        }
    }
    out
}

/// Stores every column as raw text.
pub fn encode_raw(parsed: &ParsedChunk, sink: &mut BlobSink) -> Vec<TransformedColumn> {
    field_columns(parsed)
        .into_iter()
        .map(|(field, values)| TransformedColumn {
            field,
            treatment: Treatment::Raw {
                blob: sink.push(field.to_string(), join_raw(values)),
            },
        })
        .collect()
}

/// Matches the sampled characteristics against all values of every column
/// and encodes the columns accordingly.
pub fn apply_characteristics(parsed: &ParsedChunk, cs: &CharacteristicSet, sink: &mut BlobSink) -> (Vec<TransformedColumn>, Vec<Dropped>) {
    let mut dropped = Vec::new();
    let columns = field_columns(parsed)
        .into_iter()
        .map(|(field, values)| {
            let treatment = encode_field(field, values, cs, sink, &mut dropped);
            TransformedColumn { field, treatment }
        })
        .collect();
    (columns, dropped)
}

fn encode_field<V: AsRef<[u8]>>(field: FieldId, values: &[V], cs: &CharacteristicSet, sink: &mut BlobSink, dropped: &mut Vec<Dropped>) -> Treatment {
    if let Some(pattern) = cs.patterns.get(&field) {
        let rows: Option<Vec<Vec<&[u8]>>> = values.iter().map(|v| split_by_pattern(v.as_ref(), pattern)).collect();
        if let Some(rows) = rows {
            let children = (0..=pattern.len())
                .map(|sub| {
                    let column: Vec<&[u8]> = rows.iter().map(|r| r[sub]).collect();
                    encode_leaf(FieldRef::sub(field, sub as u32), &column, cs, sink, dropped)
                })
                .collect();
            return Treatment::Split {
                pattern: pattern.clone(),
                children,
            };
        }
        dropped.push(Dropped::Pattern(field));
        return encode_fallback(FieldRef::whole(field), values, cs.sigma, sink);
    }
    encode_leaf(FieldRef::whole(field), values, cs, sink, dropped)
}

fn encode_leaf<V: AsRef<[u8]>>(r: FieldRef, values: &[V], cs: &CharacteristicSet, sink: &mut BlobSink, dropped: &mut Vec<Dropped>) -> Treatment {
    if cs.variability.contains(&r) {
        if let Some((form, ints)) = parse_integers(values) {
            let mut deltas = Vec::with_capacity(ints.len());
            let mut prev = 0i64;
            for v in ints {
                deltas.push(v.wrapping_sub(prev));
                prev = v;
            }
            return Treatment::Delta {
                form,
                blob: sink.push(r.to_string(), elastic_encode(&deltas)),
            };
        }
        dropped.push(Dropped::Variability(r));
        return encode_fallback(r, values, cs.sigma, sink);
    }
    if cs.multiplicity.contains(&r) {
        return encode_dictionary(r, values, sink);
    }
    if let Some((form, ints)) = parse_integers(values) {
        return Treatment::Integer {
            form,
            blob: sink.push(r.to_string(), elastic_encode(&ints)),
        };
    }
    Treatment::Raw {
        blob: sink.push(r.to_string(), join_raw(values)),
    }
}

/// Treatment of a column whose sampled characteristic was dropped, judged on
/// the full data.
fn encode_fallback<V: AsRef<[u8]>>(r: FieldRef, values: &[V], sigma: f64, sink: &mut BlobSink) -> Treatment {
    if let Some((form, ints)) = parse_integers(values) {
        return Treatment::Integer {
            form,
            blob: sink.push(r.to_string(), elastic_encode(&ints)),
        };
    }
    if satisfies_multiplicity(values, sigma) {
        return encode_dictionary(r, values, sink);
    }
    Treatment::Raw {
        blob: sink.push(r.to_string(), join_raw(values)),
    }
}

fn encode_dictionary<V: AsRef<[u8]>>(r: FieldRef, values: &[V], sink: &mut BlobSink) -> Treatment {
    let (d, i) = dict_encode(values);
    Treatment::Dictionary {
        dict: sink.push(format!("{r}.dict"), d),
        indices: sink.push(format!("{r}.idx"), i),
    }
}
