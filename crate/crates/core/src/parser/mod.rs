//! Template parser: trains event templates on a sample of lines, then splits
//! every line of a chunk into header cells, an event id and variables.

mod header;
mod template;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::ingest::LogChunk;

pub use header::{HeaderSchema, HeaderSegment};
pub use template::{tokenize, EventTemplate, PrefixTree, Token};

/// Training rounds before leftover lines are given exact-cluster templates.
const TRAINING_ROUNDS: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParserConfig {
    /// Loghub-style header format, e.g. `<Date> <Time> <Level> <Component>: <Content>`.
    pub format_hint: Option<String>,
    /// Minimum share of a cluster representative's literal tokens a line must
    /// repeat to join that cluster during training.
    pub similarity_threshold: f64,
    /// A position becomes a template literal when its most frequent token
    /// covers at least this share of the cluster.
    pub frequent_token_min_ratio: f64,
    /// Lines taken from the head of the first chunk for training.
    pub training_head_lines: usize,
    /// Uniform sampling rate applied to every later chunk.
    pub training_rate: f64,
}

impl Default for ParserConfig {
    fn default() -> Self {
        ParserConfig {
            format_hint: None,
            similarity_threshold: 0.7,
            frequent_token_min_ratio: 0.5,
            training_head_lines: 5000,
            training_rate: 0.01,
        }
    }
}

/// Header schema, templates and the prefix tree used to match lines.
#[derive(Debug, Clone)]
pub struct ParserModel {
    header: HeaderSchema,
    templates: Vec<EventTemplate>,
    tree: PrefixTree,
}

impl PartialEq for ParserModel {
    fn eq(&self, other: &Self) -> bool {
        self.header == other.header && self.templates == other.templates
    }
}

/// Result of matching one line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LineMatch<'a> {
    Matched {
        event_id: u32,
        header: Vec<&'a [u8]>,
        variables: Vec<&'a [u8]>,
    },
    Unmatched,
}

impl ParserModel {
    /// Assembles a model from stored parts. Template ids must equal their
    /// position.
    pub fn from_parts(header: HeaderSchema, templates: Vec<EventTemplate>) -> Self {
        debug_assert!(templates
            .iter()
            .enumerate()
            .all(|(i, t)| t.event_id as usize == i));
        let tree = PrefixTree::build(&templates);
        ParserModel {
            header,
            templates,
            tree,
        }
    }

    pub fn header(&self) -> &HeaderSchema {
        &self.header
    }

    pub fn templates(&self) -> &[EventTemplate] {
        &self.templates
    }

    pub fn template(&self, event_id: u32) -> Option<&EventTemplate> {
        self.templates.get(event_id as usize)
    }

    pub fn tree(&self) -> &PrefixTree {
        &self.tree
    }

    /// Matches a line against the header schema and the template tree.
    ///
    /// Every literal of the returned template equals the token at the same
    /// position, so rendering the template with the captured variables gives
    /// back the content exactly.
    pub fn match_line<'a>(&self, line: &'a [u8]) -> LineMatch<'a> {
        let Some((header, content)) = self.header.split(line) else {
            return LineMatch::Unmatched;
        };
        let tokens: Vec<&[u8]> = tokenize(content).collect();
        let Some(event_id) = self.tree.search(&tokens) else {
            return LineMatch::Unmatched;
        };
        let template = &self.templates[event_id as usize];
        let variables = template
            .tokens
            .iter()
            .zip(&tokens)
            .filter(|(t, _)| t.is_wildcard())
            .map(|(_, v)| *v)
            .collect();
        LineMatch::Matched {
            event_id,
            header,
            variables,
        }
    }
}

fn has_digit(token: &[u8]) -> bool {
    token.iter().any(u8::is_ascii_digit)
}

/// Token as seen by the clustering step: digit-bearing tokens are masked.
fn masked(token: &[u8]) -> Option<&[u8]> {
    (!has_digit(token)).then_some(token)
}

struct Cluster<'a> {
    /// `None` marks a position that already varies inside the cluster.
    representative: Vec<Option<&'a [u8]>>,
    members: Vec<usize>,
}

impl<'a> Cluster<'a> {
    fn similarity(&self, tokens: &[&[u8]]) -> f64 {
        let mut literals = 0usize;
        let mut shared = 0usize;
        for (rep, tok) in self.representative.iter().zip(tokens) {
            if let Some(rep) = rep {
                literals += 1;
                if rep == tok {
                    shared += 1;
                }
            }
        }
        if literals == 0 {
            return if tokens.iter().all(|t| masked(t).is_none()) { 1.0 } else { 0.0 };
        }
        shared as f64 / literals as f64
    }

    fn absorb(&mut self, idx: usize, tokens: &[&'a [u8]]) {
        for (rep, tok) in self.representative.iter_mut().zip(tokens) {
            if *rep != masked(tok) {
                *rep = None;
            }
        }
        self.members.push(idx);
    }
}

/// Derives a template skeleton from cluster members. With `strict` set only
/// tokens shared by every member become literals.
fn derive_skeleton(members: &[&Vec<&[u8]>], ratio: f64, strict: bool) -> Vec<Token> {
    let n = members.len();
    let width = members[0].len();
    (0..width)
        .map(|pos| {
            let mut counts: HashMap<&[u8], usize> = HashMap::new();
            let mut best: (&[u8], usize) = (&[], 0);
            for m in members {
                let c = counts.entry(m[pos]).or_insert(0);
                *c += 1;
                // first-seen wins ties
                if *c > best.1 {
                    best = (m[pos], *c);
                }
            }
            let (tok, c) = best;
            let literal = !has_digit(tok)
                && if strict || n == 1 {
                    c == n
                } else {
                    c >= 2 && c as f64 >= ratio * n as f64
                };
            if literal {
                Token::Literal(tok.to_vec())
            } else {
                Token::Wildcard
            }
        })
        .collect()
}

fn aligns(skeleton: &[Token], tokens: &[&[u8]]) -> bool {
    skeleton.iter().zip(tokens).all(|(s, t)| match s {
        Token::Literal(l) => l.as_slice() == *t,
        Token::Wildcard => true,
    })
}

/// Level, component with digits removed, token count.
type GroupKey<'a> = (Option<&'a [u8]>, Option<Vec<u8>>, usize);

/// Trains a parser model on sampled lines.
///
/// Lines are grouped by level, component and token count, clustered by shared
/// literal tokens, and each cluster yields a template in which frequent tokens
/// are literals and the rest wildcards. Lines that do not fit their cluster's
/// template are clustered again in the next round.
pub fn train_parser<L: AsRef<[u8]>>(sample_lines: &[L], config: &ParserConfig) -> crate::Result<ParserModel> {
    let header = match &config.format_hint {
        Some(hint) => HeaderSchema::from_format(hint)?,
        None => HeaderSchema::detect(sample_lines),
    };
    if sample_lines.is_empty() {
        return Ok(ParserModel::from_parts(header, Vec::new()));
    }
    let level_idx = header.field_index("level");
    let component_idx = header.field_index("component");

    // (group key, tokens) per parsable sample line
    let mut rows: Vec<Vec<&[u8]>> = Vec::new();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut group_index: HashMap<GroupKey<'_>, usize> = HashMap::new();
    for line in sample_lines {
        let Some((cells, content)) = header.split(line.as_ref()) else {
            continue;
        };
        let tokens: Vec<&[u8]> = tokenize(content).collect();
        let key = (
            level_idx.map(|i| cells[i]),
            // process ids glued to component names must not split groups
            component_idx.map(|i| cells[i].iter().copied().filter(|b| !b.is_ascii_digit()).collect::<Vec<u8>>()),
            tokens.len(),
        );
        let g = *group_index.entry(key).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[g].push(rows.len());
        rows.push(tokens);
    }

    let mut skeletons: Vec<Vec<Token>> = Vec::new();
    let mut seen: HashMap<Vec<Token>, ()> = HashMap::new();
    for group in groups {
        let mut pending = group;
        for round in 0..TRAINING_ROUNDS {
            if pending.is_empty() {
                break;
            }
            let strict = round + 1 == TRAINING_ROUNDS;
            let mut clusters: Vec<Cluster<'_>> = Vec::new();
            for &idx in &pending {
                let tokens = &rows[idx];
                let best = clusters
                    .iter()
                    .enumerate()
                    .map(|(i, c)| (i, c.similarity(tokens)))
                    .filter(|&(_, s)| s >= config.similarity_threshold)
                    .fold(None::<(usize, f64)>, |acc, (i, s)| match acc {
                        Some((_, bs)) if bs >= s => acc,
                        _ => Some((i, s)),
                    });
                match best {
                    Some((i, _)) => clusters[i].absorb(idx, tokens),
                    None => clusters.push(Cluster {
                        representative: tokens.iter().map(|t| masked(t)).collect(),
                        members: vec![idx],
                    }),
                }
            }
            let mut leftover = Vec::new();
            for cluster in clusters {
                let members: Vec<&Vec<&[u8]>> = cluster.members.iter().map(|&i| &rows[i]).collect();
                let skeleton = derive_skeleton(&members, config.frequent_token_min_ratio, strict);
                for &m in &cluster.members {
                    if !aligns(&skeleton, &rows[m]) {
                        leftover.push(m);
                    }
                }
                // a lone line gives no evidence that every token varies
                if cluster.members.len() < 2 && skeleton.iter().all(Token::is_wildcard) {
                    continue;
                }
                if seen.insert(skeleton.clone(), ()).is_none() {
                    skeletons.push(skeleton);
                }
            }
            pending = leftover;
        }
    }

    let templates = skeletons
        .into_iter()
        .enumerate()
        .map(|(i, tokens)| EventTemplate::new(i as u32, tokens))
        .collect();
    Ok(ParserModel::from_parts(header, templates))
}

/// Column-major variables of one event: `columns[slot][row]`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VariableMatrix {
    pub arity: usize,
    pub rows: usize,
    pub columns: Vec<Vec<Vec<u8>>>,
}

impl VariableMatrix {
    pub fn new(arity: usize) -> Self {
        VariableMatrix {
            arity,
            rows: 0,
            columns: vec![Vec::new(); arity],
        }
    }

    pub fn push_row<V: AsRef<[u8]>>(&mut self, row: &[V]) {
        assert_eq!(row.len(), self.arity, "row width must equal template arity");
        for (col, v) in self.columns.iter_mut().zip(row) {
            col.push(v.as_ref().to_vec());
        }
        self.rows += 1;
    }

    pub fn row(&self, i: usize) -> Vec<&[u8]> {
        self.columns.iter().map(|c| c[i].as_slice()).collect()
    }
}

/// Where an original line went.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dispatch {
    Matched { event_id: u32, row: usize },
    Unmatched { index: usize },
}

/// Column-oriented parse result of one chunk.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParsedChunk {
    /// One column per header field, one cell per matched line.
    pub header_columns: Vec<Vec<Vec<u8>>>,
    /// Event id per matched line.
    pub event_ids: Vec<u32>,
    /// Indexed by event id.
    pub variables: Vec<VariableMatrix>,
    /// `(line index, raw line)` for lines no template covers.
    pub unmatched: Vec<(usize, Vec<u8>)>,
    pub line_dispatch: Vec<Dispatch>,
}

impl ParsedChunk {
    pub fn line_count(&self) -> usize {
        self.line_dispatch.len()
    }

    /// Rebuilds dispatch information from the unmatched line indices and the
    /// event stream: matched lines fill the remaining slots in order and each
    /// event's rows are consumed in order.
    pub fn dispatch_from(line_count: usize, unmatched_lines: &[usize], event_ids: &[u32], event_count: usize) -> crate::Result<Vec<Dispatch>> {
        if unmatched_lines.len() + event_ids.len() != line_count {
            return Err(crate::Error::corrupt(format!(
                "{} matched + {} unmatched lines do not add up to {line_count}",
                event_ids.len(),
                unmatched_lines.len()
            )));
        }
        let mut next_row = vec![0usize; event_count];
        let mut dispatch = Vec::with_capacity(line_count);
        let mut u = 0;
        let mut events = event_ids.iter();
        for line in 0..line_count {
            if unmatched_lines.get(u) == Some(&line) {
                dispatch.push(Dispatch::Unmatched { index: u });
                u += 1;
            } else {
                let &event_id = events
                    .next()
                    .ok_or_else(|| crate::Error::corrupt("event stream shorter than matched lines"))?;
                let slot = next_row
                    .get_mut(event_id as usize)
                    .ok_or_else(|| crate::Error::corrupt(format!("unknown event id {event_id}")))?;
                dispatch.push(Dispatch::Matched { event_id, row: *slot });
                *slot += 1;
            }
        }
        if u != unmatched_lines.len() {
            return Err(crate::Error::corrupt("unmatched line indices out of order or out of range"));
        }
        Ok(dispatch)
    }
}

/// Splits every line of a chunk into columns.
pub fn parse_chunk(model: &ParserModel, chunk: &LogChunk) -> ParsedChunk {
    let mut parsed = ParsedChunk {
        header_columns: vec![Vec::new(); model.header.field_count()],
        event_ids: Vec::new(),
        variables: model
            .templates
            .iter()
            .map(|t| VariableMatrix::new(t.arity()))
            .collect(),
        unmatched: Vec::new(),
        line_dispatch: Vec::with_capacity(chunk.len()),
    };
    for (i, line) in chunk.lines.iter().enumerate() {
        match model.match_line(line) {
            LineMatch::Matched {
                event_id,
                header,
                variables,
            } => {
                for (col, cell) in parsed.header_columns.iter_mut().zip(header) {
                    col.push(cell.to_vec());
                }
                let matrix = &mut parsed.variables[event_id as usize];
                let row = matrix.rows;
                matrix.push_row(&variables);
                parsed.event_ids.push(event_id);
                parsed.line_dispatch.push(Dispatch::Matched { event_id, row });
            }
            LineMatch::Unmatched => {
                parsed.line_dispatch.push(Dispatch::Unmatched {
                    index: parsed.unmatched.len(),
                });
                parsed.unmatched.push((i, line.clone()));
            }
        }
    }
    parsed
}
