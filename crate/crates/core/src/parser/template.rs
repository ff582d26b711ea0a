use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Content is tokenized on single spaces; empty tokens are kept so that a
/// plain join restores the content.
pub fn tokenize(content: &[u8]) -> impl Iterator<Item = &[u8]> {
    content.split(|&b| b == b' ')
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Token {
    Literal(Vec<u8>),
    Wildcard,
}

impl Token {
    pub fn is_wildcard(&self) -> bool {
        matches!(self, Token::Wildcard)
    }
}

/// The constant skeleton of a log statement.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventTemplate {
    pub event_id: u32,
    pub tokens: Vec<Token>,
}

impl EventTemplate {
    pub fn new(event_id: u32, tokens: Vec<Token>) -> Self {
        EventTemplate { event_id, tokens }
    }

    /// Number of wildcard slots.
    pub fn arity(&self) -> usize {
        self.tokens.iter().filter(|t| t.is_wildcard()).count()
    }

    pub fn literal_count(&self) -> usize {
        self.tokens.len() - self.arity()
    }

    /// Substitutes `vars` into the wildcard slots, in order.
    pub fn render<V: AsRef<[u8]>>(&self, vars: &[V], out: &mut Vec<u8>) {
        let mut vars = vars.iter();
        for (i, tok) in self.tokens.iter().enumerate() {
            if i > 0 {
                out.push(b' ');
            }
            match tok {
                Token::Literal(l) => out.extend_from_slice(l),
                Token::Wildcard => out.extend_from_slice(vars.next().expect("variable per slot").as_ref()),
            }
        }
    }
}

impl fmt::Display for EventTemplate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, tok) in self.tokens.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            match tok {
                Token::Literal(l) => f.write_str(&String::from_utf8_lossy(l))?,
                Token::Wildcard => f.write_str("<*>")?,
            }
        }
        Ok(())
    }
}

#[derive(Debug, Default, Clone)]
struct Node {
    literals: HashMap<Vec<u8>, Node>,
    wildcard: Option<Box<Node>>,
    leaf: Option<u32>,
}

/// Prefix tree over templates. The first level is keyed by token count, the
/// following levels by the template tokens.
#[derive(Debug, Default, Clone)]
pub struct PrefixTree {
    buckets: HashMap<usize, Node>,
    literal_counts: HashMap<u32, usize>,
}

impl PrefixTree {
    pub fn build(templates: &[EventTemplate]) -> Self {
        let mut tree = PrefixTree::default();
        for t in templates {
            tree.insert(t);
        }
        tree
    }

    pub fn insert(&mut self, template: &EventTemplate) {
        let mut node = self.buckets.entry(template.tokens.len()).or_default();
        for tok in &template.tokens {
            node = match tok {
                Token::Literal(l) => node.literals.entry(l.clone()).or_default(),
                Token::Wildcard => node.wildcard.get_or_insert_with(Default::default),
            };
        }
        // first insertion wins for duplicate skeletons
        node.leaf.get_or_insert(template.event_id);
        self.literal_counts
            .insert(template.event_id, template.literal_count());
    }

    /// Finds the template whose literals all align with `tokens`, preferring
    /// the one with the most literals and then the lowest id.
    pub fn search(&self, tokens: &[&[u8]]) -> Option<u32> {
        let root = self.buckets.get(&tokens.len())?;
        let mut best: Option<(usize, u32)> = None;
        self.walk(root, tokens, 0, &mut best);
        best.map(|(_, id)| id)
    }

    fn walk(&self, node: &Node, tokens: &[&[u8]], depth: usize, best: &mut Option<(usize, u32)>) {
        if depth == tokens.len() {
            if let Some(id) = node.leaf {
                let lits = self.literal_counts[&id];
                let better = match *best {
                    None => true,
                    Some((bl, bid)) => lits > bl || (lits == bl && id < bid),
                };
                if better {
                    *best = Some((lits, id));
                }
            }
            return;
        }
        if let Some(child) = node.literals.get(tokens[depth]) {
            self.walk(child, tokens, depth + 1, best);
        }
        if let Some(child) = &node.wildcard {
            self.walk(child, tokens, depth + 1, best);
        }
    }

    /// Number of token-count buckets.
    pub fn bucket_count(&self) -> usize {
        self.buckets.len()
    }
}
