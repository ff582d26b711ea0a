//! Splitting a raw log stream into fixed-size line chunks.
//!
//! Lines are treated as opaque byte strings. The terminator of every line is
//! recorded so that `lines[i] + terminators[i]`, concatenated over all chunks,
//! is exactly the source stream.

use std::io::{self, BufRead};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default number of lines per chunk.
pub const DEFAULT_CHUNK_LINES: usize = 100_000;

/// The bytes stripped from the end of a line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Terminator {
    /// `\n`
    Lf,
    /// `\r\n`
    CrLf,
    /// Final line of a stream without a trailing newline.
    None,
}

impl Terminator {
    pub fn as_bytes(self) -> &'static [u8] {
        match self {
            Terminator::Lf => b"\n",
            Terminator::CrLf => b"\r\n",
            Terminator::None => b"",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogChunk {
    pub chunk_id: usize,
    pub lines: Vec<Vec<u8>>,
    pub terminators: Vec<Terminator>,
    pub byte_offset: u64,
}

impl LogChunk {
    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    /// Re-concatenates lines and terminators.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.write_to(&mut out);
        out
    }

    pub fn write_to(&self, out: &mut Vec<u8>) {
        for (line, term) in self.lines.iter().zip(&self.terminators) {
            out.extend_from_slice(line);
            out.extend_from_slice(term.as_bytes());
        }
    }
}

/// Iterator over the chunks of a byte stream. Created by [`chunk_stream`].
#[derive(Debug)]
pub struct ChunkReader<R> {
    reader: R,
    chunk_size: usize,
    next_id: usize,
    offset: u64,
    done: bool,
    buf: Vec<u8>,
}

/// Streams `source` as chunks of `chunk_size_lines` lines each.
pub fn chunk_stream<R: BufRead>(source: R, chunk_size_lines: usize) -> Result<ChunkReader<R>> {
    if chunk_size_lines == 0 {
        return Err(Error::parameter("chunk_size_lines must be at least 1"));
    }
    Ok(ChunkReader {
        reader: source,
        chunk_size: chunk_size_lines,
        next_id: 0,
        offset: 0,
        done: false,
        buf: Vec::new(),
    })
}

/// Reads a single line, returning `None` at end of stream.
fn read_line<R: BufRead>(reader: &mut R, buf: &mut Vec<u8>) -> io::Result<Option<(Vec<u8>, Terminator)>> {
    buf.clear();
    let n = loop {
        match reader.read_until(b'\n', buf) {
            Ok(n) => break n,
            Err(e) if e.kind() == io::ErrorKind::Interrupted => continue,
            Err(e) => return Err(e),
        }
    };
    if n == 0 {
        return Ok(None);
    }
    let term = if buf.ends_with(b"\r\n") {
        buf.truncate(buf.len() - 2);
        Terminator::CrLf
    } else if buf.ends_with(b"\n") {
        buf.truncate(buf.len() - 1);
        Terminator::Lf
    } else {
        Terminator::None
    };
    Ok(Some((buf.clone(), term)))
}

impl<R: BufRead> Iterator for ChunkReader<R> {
    type Item = Result<LogChunk>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let start = self.offset;
        let mut lines = Vec::with_capacity(self.chunk_size.min(1 << 16));
        let mut terminators = Vec::with_capacity(lines.capacity());
        while lines.len() < self.chunk_size {
            match read_line(&mut self.reader, &mut self.buf) {
                Ok(Some((line, term))) => {
                    self.offset += (line.len() + term.as_bytes().len()) as u64;
                    lines.push(line);
                    terminators.push(term);
                }
                Ok(None) => {
                    self.done = true;
                    break;
                }
                Err(source) => {
                    self.done = true;
                    return Some(Err(Error::Io {
                        offset: self.offset,
                        source,
                    }));
                }
            }
        }
        if lines.is_empty() {
            return None;
        }
        let chunk = LogChunk {
            chunk_id: self.next_id,
            lines,
            terminators,
            byte_offset: start,
        };
        self.next_id += 1;
        Some(Ok(chunk))
    }
}

/// Run-length encodes a terminator list as `(terminator, run)` pairs.
pub fn terminator_runs(terminators: &[Terminator]) -> Vec<(Terminator, u64)> {
    let mut runs: Vec<(Terminator, u64)> = Vec::new();
    for &t in terminators {
        match runs.last_mut() {
            Some((last, n)) if *last == t => *n += 1,
            _ => runs.push((t, 1)),
        }
    }
    runs
}

pub fn expand_terminator_runs(runs: &[(Terminator, u64)]) -> Vec<Terminator> {
    runs.iter()
        .flat_map(|&(t, n)| std::iter::repeat_n(t, n as usize))
        .collect()
}
