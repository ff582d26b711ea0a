//! Header schemas: the fixed prefix a logging framework puts in front of every
//! message (datetime, level, component, ...).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One piece of a header layout.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum HeaderSegment {
    /// A named header column.
    Field(String),
    /// Separator bytes that appear verbatim in every line.
    Literal(Vec<u8>),
}

/// Layout of the header that precedes the message content.
///
/// A schema is an alternating sequence of fields and literal separators. Every
/// field is followed by a literal, so a line splits deterministically: each
/// field captures the shortest non-empty run of bytes that ends at the next
/// occurrence of its trailing literal, and whatever follows the last literal
/// is the content. Rendering is the inverse join, so splitting never loses
/// bytes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeaderSchema {
    segments: Vec<HeaderSegment>,
    format_hint: Option<String>,
    detected: bool,
}

const LEVEL_WORDS: &[&str] = &[
    "TRACE", "DEBUG", "INFO", "NOTICE", "WARN", "WARNING", "ERROR", "SEVERE", "FATAL", "CRITICAL",
    "CRIT", "ALERT", "EMERG", "ERR",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum CellKind {
    Numeric,
    Level,
    Other,
}

fn classify(cell: &[u8]) -> CellKind {
    if cell.iter().any(u8::is_ascii_digit) && !cell.iter().any(u8::is_ascii_alphabetic) {
        return CellKind::Numeric;
    }
    let trimmed: &[u8] = {
        let s = cell
            .iter()
            .position(|b| b.is_ascii_alphabetic())
            .unwrap_or(cell.len());
        let e = cell
            .iter()
            .rposition(|b| b.is_ascii_alphabetic())
            .map_or(s, |p| p + 1);
        &cell[s..e.max(s)]
    };
    if !trimmed.is_empty()
        && LEVEL_WORDS
            .iter()
            .any(|w| w.as_bytes().eq_ignore_ascii_case(trimmed))
        && trimmed.len() + 2 >= cell.len()
    {
        return CellKind::Level;
    }
    CellKind::Other
}

impl HeaderSchema {
    /// A schema with no header: the whole line is content.
    pub fn empty() -> Self {
        HeaderSchema {
            segments: Vec::new(),
            format_hint: None,
            detected: false,
        }
    }

    fn from_segments(segments: Vec<HeaderSegment>, format_hint: Option<String>, detected: bool) -> Result<Self> {
        let mut prev_field = false;
        for seg in &segments {
            match seg {
                HeaderSegment::Field(_) if prev_field => {
                    return Err(Error::HeaderFormat(
                        "two header fields need a literal separator between them".into(),
                    ))
                }
                HeaderSegment::Field(_) => prev_field = true,
                HeaderSegment::Literal(l) if l.is_empty() => {
                    return Err(Error::HeaderFormat("empty literal separator".into()))
                }
                HeaderSegment::Literal(_) => prev_field = false,
            }
        }
        if prev_field {
            return Err(Error::HeaderFormat(
                "the last header field must be followed by a separator before <Content>".into(),
            ));
        }
        Ok(HeaderSchema {
            segments,
            format_hint,
            detected,
        })
    }

    /// Parses a loghub-style format such as
    /// `<Date> <Time> <Level> <Component>: <Content>`.
    ///
    /// `<Content>` must be the final placeholder. Regex escapes (`\[`, `\|`)
    /// are accepted and unescaped.
    pub fn from_format(format: &str) -> Result<Self> {
        let mut segments = Vec::new();
        let mut literal = Vec::new();
        let mut rest = format;
        let mut saw_content = false;
        while !rest.is_empty() {
            if saw_content {
                return Err(Error::HeaderFormat("<Content> must be the last placeholder".into()));
            }
            if let Some(after) = rest.strip_prefix('<') {
                let end = after
                    .find('>')
                    .ok_or_else(|| Error::HeaderFormat(format!("unterminated placeholder in {format:?}")))?;
                let name = &after[..end];
                if name.is_empty() || !name.chars().all(|c| c.is_alphanumeric() || c == '_') {
                    return Err(Error::HeaderFormat(format!("bad placeholder <{name}>")));
                }
                if !literal.is_empty() {
                    segments.push(HeaderSegment::Literal(std::mem::take(&mut literal)));
                }
                if name == "Content" {
                    saw_content = true;
                } else {
                    segments.push(HeaderSegment::Field(name.to_string()));
                }
                rest = &after[end + 1..];
            } else if let Some(after) = rest.strip_prefix('\\') {
                let c = after
                    .chars()
                    .next()
                    .ok_or_else(|| Error::HeaderFormat("dangling escape".into()))?;
                let mut tmp = [0u8; 4];
                literal.extend_from_slice(c.encode_utf8(&mut tmp).as_bytes());
                rest = &after[c.len_utf8()..];
            } else {
                let c = rest.chars().next().unwrap();
                let mut tmp = [0u8; 4];
                literal.extend_from_slice(c.encode_utf8(&mut tmp).as_bytes());
                rest = &rest[c.len_utf8()..];
            }
        }
        if !saw_content {
            return Err(Error::HeaderFormat("format must end with <Content>".into()));
        }
        if !literal.is_empty() {
            return Err(Error::HeaderFormat("text after <Content> is not supported".into()));
        }
        Self::from_segments(segments, Some(format.to_string()), false)
    }

    /// Guesses a header from sample lines: the longest prefix of
    /// space-separated cells whose kind (numeric, level keyword, other) is the
    /// same in at least 95% of the lines. When a level keyword is part of that
    /// prefix the header stops at the cell after it (the component); otherwise
    /// it is the leading run of numeric cells.
    pub fn detect<L: AsRef<[u8]>>(sample: &[L]) -> Self {
        const MAX_FIELDS: usize = 8;
        if sample.is_empty() {
            return Self::empty();
        }
        let rows: Vec<Vec<&[u8]>> = sample
            .iter()
            .map(|l| l.as_ref().split(|&b| b == b' ').take(MAX_FIELDS + 1).collect())
            .collect();
        let n = rows.len();
        let mut kinds = Vec::new();
        for pos in 0..MAX_FIELDS {
            // the header must leave at least one content token behind
            let present: Vec<CellKind> = rows
                .iter()
                .filter(|r| r.len() > pos + 1)
                .map(|r| classify(r[pos]))
                .collect();
            if (present.len() as f64) < 0.95 * n as f64 {
                break;
            }
            let mut counts = [0usize; 3];
            for k in &present {
                counts[*k as usize] += 1;
            }
            let (best, &count) = counts.iter().enumerate().max_by_key(|(_, c)| **c).unwrap();
            if (count as f64) < 0.95 * n as f64 {
                break;
            }
            kinds.push(match best {
                0 => CellKind::Numeric,
                1 => CellKind::Level,
                _ => CellKind::Other,
            });
        }
        let level = kinds.iter().position(|k| *k == CellKind::Level);
        let len = match level {
            Some(level) => (level + 2).min(kinds.len()),
            None => kinds.iter().take_while(|k| **k == CellKind::Numeric).count(),
        };
        let mut segments = Vec::new();
        for i in 0..len {
            let name = match level {
                Some(l) if l == i => "Level".to_string(),
                Some(l) if l + 1 == i => "Component".to_string(),
                _ => format!("H{i}"),
            };
            segments.push(HeaderSegment::Field(name));
            segments.push(HeaderSegment::Literal(b" ".to_vec()));
        }
        HeaderSchema {
            segments,
            format_hint: None,
            detected: true,
        }
    }

    pub fn segments(&self) -> &[HeaderSegment] {
        &self.segments
    }

    pub fn format_hint(&self) -> Option<&str> {
        self.format_hint.as_deref()
    }

    pub fn detected(&self) -> bool {
        self.detected
    }

    pub fn field_count(&self) -> usize {
        self.segments
            .iter()
            .filter(|s| matches!(s, HeaderSegment::Field(_)))
            .count()
    }

    pub fn field_names(&self) -> Vec<&str> {
        self.segments
            .iter()
            .filter_map(|s| match s {
                HeaderSegment::Field(name) => Some(name.as_str()),
                HeaderSegment::Literal(_) => None,
            })
            .collect()
    }

    /// Index of the header field whose name matches `name` case-insensitively.
    pub fn field_index(&self, name: &str) -> Option<usize> {
        self.field_names()
            .iter()
            .position(|n| n.eq_ignore_ascii_case(name))
    }

    /// Splits a line into header cells and the content remainder.
    pub fn split<'a>(&self, line: &'a [u8]) -> Option<(Vec<&'a [u8]>, &'a [u8])> {
        let mut cells = Vec::with_capacity(self.segments.len() / 2);
        let mut pos = 0;
        let mut segs = self.segments.iter().peekable();
        while let Some(seg) = segs.next() {
            match seg {
                HeaderSegment::Literal(lit) => {
                    if !line[pos..].starts_with(lit) {
                        return None;
                    }
                    pos += lit.len();
                }
                HeaderSegment::Field(_) => {
                    let Some(HeaderSegment::Literal(lit)) = segs.peek() else {
                        unreachable!("schema invariant: fields are followed by literals")
                    };
                    if pos >= line.len() {
                        return None;
                    }
                    let end = pos + 1 + find(&line[pos + 1..], lit)?;
                    cells.push(&line[pos..end]);
                    pos = end;
                }
            }
        }
        Some((cells, &line[pos..]))
    }

    /// Inverse of [`split`](Self::split).
    pub fn render<C: AsRef<[u8]>>(&self, cells: &[C], content: &[u8], out: &mut Vec<u8>) {
        let mut cells = cells.iter();
        for seg in &self.segments {
            match seg {
                HeaderSegment::Literal(lit) => out.extend_from_slice(lit),
                HeaderSegment::Field(_) => {
                    out.extend_from_slice(cells.next().expect("one cell per header field").as_ref())
                }
            }
        }
        out.extend_from_slice(content);
    }
}

pub(crate) fn find(haystack: &[u8], needle: &[u8]) -> Option<usize> {
    if needle.len() == 1 {
        return haystack.iter().position(|&b| b == needle[0]);
    }
    haystack.windows(needle.len()).position(|w| w == needle)
}
