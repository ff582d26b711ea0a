//! Compression ratio and speed measurements.
//!
//! `CR = original size / compressed size`; `CS = original MB / seconds`, with
//! 1 MB = 10^6 bytes and the clock covering the whole pipeline.

use std::time::{Duration, Instant};

use crate::codec::Backend;
use crate::error::Result;
use crate::parser::{HeaderSchema, ParserConfig};
use crate::pipeline::{compress, CompressOptions};

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub tool: String,
    pub original_size: u64,
    pub compressed_size: u64,
    pub elapsed: Duration,
}

pub fn compression_ratio(original: u64, compressed: u64) -> f64 {
    original as f64 / compressed as f64
}

pub fn compression_speed(original: u64, elapsed: Duration) -> f64 {
    original as f64 / 1e6 / elapsed.as_secs_f64().max(1e-9)
}

impl BenchReport {
    pub fn cr(&self) -> f64 {
        compression_ratio(self.original_size, self.compressed_size)
    }

    pub fn cs(&self) -> f64 {
        compression_speed(self.original_size, self.elapsed)
    }
}

/// The backend alone on the raw file.
pub fn baseline(data: &[u8], backend: Backend) -> Result<BenchReport> {
    let start = Instant::now();
    let out = backend.compress(data)?;
    Ok(BenchReport {
        tool: backend.name().to_string(),
        original_size: data.len() as u64,
        compressed_size: out.len() as u64,
        elapsed: start.elapsed(),
    })
}

pub fn logshrink(data: &[u8], opts: &CompressOptions, tool: &str) -> Result<BenchReport> {
    let start = Instant::now();
    let (archive, _) = compress(data, opts)?;
    Ok(BenchReport {
        tool: tool.to_string(),
        original_size: data.len() as u64,
        compressed_size: archive.len() as u64,
        elapsed: start.elapsed(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StorageStyle {
    Row,
    Column,
}

/// Lays the file out row by row (as is) or as one column per header field
/// plus a content column, then compresses it with `backend`. Lines that do
/// not fit the header schema form a column of their own.
pub fn storage_style_size(data: &[u8], parser: &ParserConfig, style: StorageStyle, backend: Backend) -> Result<u64> {
    let laid_out = match style {
        StorageStyle::Row => data.to_vec(),
        StorageStyle::Column => {
            let lines: Vec<&[u8]> = data.split(|&b| b == b'\n').collect();
            let schema = match &parser.format_hint {
                Some(f) => HeaderSchema::from_format(f)?,
                None => HeaderSchema::detect(&lines[..lines.len().min(parser.training_head_lines)]),
            };
            let mut columns: Vec<Vec<u8>> = vec![Vec::new(); schema.field_count() + 2];
            let rest = columns.len() - 1;
            for line in lines {
                match schema.split(line) {
                    Some((cells, content)) => {
                        for (col, cell) in columns.iter_mut().zip(&cells) {
                            col.extend_from_slice(cell);
                            col.push(b'\n');
                        }
                        columns[rest - 1].extend_from_slice(content);
                        columns[rest - 1].push(b'\n');
                    }
                    None => {
                        columns[rest].extend_from_slice(line);
                        columns[rest].push(b'\n');
                    }
                }
            }
            columns.concat()
        }
    };
    Ok(backend.compress(&laid_out)?.len() as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_and_speed_arithmetic() {
        assert_eq!(compression_ratio(1000, 100), 10.0);
        let r = BenchReport {
            tool: "x".into(),
            original_size: 10_000_000,
            compressed_size: 1_000_000,
            elapsed: Duration::from_secs(4),
        };
        assert_eq!(r.cr(), 10.0);
        assert_eq!(r.cs(), 2.5);
    }

    #[test]
    fn column_layout_keeps_every_byte_count() {
        let data = b"1 INFO a: x\n2 WARN b: y\nnot a header line\n";
        let cfg = ParserConfig {
            format_hint: Some("<T> <Level> <Component>: <Content>".into()),
            ..ParserConfig::default()
        };
        for style in [StorageStyle::Row, StorageStyle::Column] {
            assert!(storage_style_size(data, &cfg, style, Backend::Gzip).unwrap() > 0);
        }
    }
}
