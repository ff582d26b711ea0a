//! Commonality and variability analysis of column values.
//!
//! String fields are checked for redundancy (multiplicity) and, failing that,
//! for a shared delimiter skeleton that splits them into sub-fields. Integer
//! fields are checked for steady change: if differencing lowers the weighted
//! entropy, the field is delta-encoded.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default delimiter universe.
pub const DEFAULT_DELIMITERS: &[u8] = b"-#><_:;,[]\\/.()";

/// Largest DP table, in cells, for the exact multi-sequence LCS. Larger
/// inputs fall back to a pairwise fold.
const EXACT_LCS_BUDGET: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyzerConfig {
    /// Multiplicity threshold; fields at or below it are dictionary-encoded.
    pub sigma: f64,
    pub delimiters: Vec<u8>,
}

impl Default for AnalyzerConfig {
    fn default() -> Self {
        AnalyzerConfig {
            sigma: 0.3,
            delimiters: DEFAULT_DELIMITERS.to_vec(),
        }
    }
}

/// A column of a parsed chunk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FieldId {
    Header(u32),
    Variable { event: u32, slot: u32 },
}

impl fmt::Display for FieldId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldId::Header(i) => write!(f, "H{i}"),
            FieldId::Variable { event, slot } => write!(f, "E{event}.V{slot}"),
        }
    }
}

/// A field, or one of its sub-fields after a delimiter split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FieldRef {
    pub field: FieldId,
    pub sub: Option<u32>,
}

impl FieldRef {
    pub fn whole(field: FieldId) -> Self {
        FieldRef { field, sub: None }
    }

    pub fn sub(field: FieldId, sub: u32) -> Self {
        FieldRef { field, sub: Some(sub) }
    }
}

impl fmt::Display for FieldRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sub {
            None => write!(f, "{}", self.field),
            Some(s) => write!(f, "{}_{}", self.field, s + 1),
        }
    }
}

/// Characteristics mined from sampled rows.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CharacteristicSet {
    /// Delimiter pattern per field.
    pub patterns: BTreeMap<FieldId, Vec<u8>>,
    /// (Sub-)fields to dictionary-encode.
    pub multiplicity: BTreeSet<FieldRef>,
    /// (Sub-)fields to delta-encode.
    pub variability: BTreeSet<FieldRef>,
    pub sigma: f64,
    pub delimiters: Vec<u8>,
}

impl CharacteristicSet {
    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty() && self.multiplicity.is_empty() && self.variability.is_empty()
    }
}

/// `M(X) = |distinct(X)| / |X|`.
pub fn multiplicity<V: AsRef<[u8]>>(values: &[V]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::parameter("multiplicity of an empty multiset is undefined"));
    }
    let distinct: HashSet<&[u8]> = values.iter().map(AsRef::as_ref).collect();
    Ok(distinct.len() as f64 / values.len() as f64)
}

/// Whether a field is redundant enough for a dictionary. Constant fields
/// always qualify, whatever the sample size.
pub fn satisfies_multiplicity<V: AsRef<[u8]>>(values: &[V], sigma: f64) -> bool {
    if values.is_empty() {
        return false;
    }
    let distinct: HashSet<&[u8]> = values.iter().map(AsRef::as_ref).collect();
    distinct.len() == 1 || distinct.len() as f64 / values.len() as f64 <= sigma
}

/// The delimiter bytes of `value`, in order of appearance.
pub fn delimiter_sequence(value: &[u8], delimiters: &[u8]) -> Vec<u8> {
    value.iter().copied().filter(|b| delimiters.contains(b)).collect()
}

/// Longest common subsequence of two byte strings.
pub fn lcs_pair(a: &[u8], b: &[u8]) -> Vec<u8> {
    let (n, m) = (a.len(), b.len());
    let mut dp = vec![0u32; (n + 1) * (m + 1)];
    let at = |i: usize, j: usize| i * (m + 1) + j;
    for i in (0..n).rev() {
        for j in (0..m).rev() {
            dp[at(i, j)] = if a[i] == b[j] {
                dp[at(i + 1, j + 1)] + 1
            } else {
                dp[at(i + 1, j)].max(dp[at(i, j + 1)])
            };
        }
    }
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::with_capacity(dp[0] as usize);
    while i < n && j < m {
        if a[i] == b[j] {
            out.push(a[i]);
            i += 1;
            j += 1;
        } else if dp[at(i + 1, j)] >= dp[at(i, j + 1)] {
            i += 1;
        } else {
            j += 1;
        }
    }
    out
}

/// Pairwise left fold `LCS(LCS(s1, s2), s3) ...`. Always a common
/// subsequence of every input, not always the longest one.
pub fn lcs_fold<S: AsRef<[u8]>>(seqs: &[S]) -> Vec<u8> {
    let mut iter = seqs.iter();
    let Some(first) = iter.next() else {
        return Vec::new();
    };
    let mut acc = first.as_ref().to_vec();
    for s in iter {
        if acc.is_empty() {
            break;
        }
        acc = lcs_pair(&acc, s.as_ref());
    }
    acc
}

/// Exact LCS of several sequences by dynamic programming over the product of
/// their positions. Returns `None` when the table would exceed `budget`.
pub fn lcs_exact<S: AsRef<[u8]>>(seqs: &[S], budget: usize) -> Option<Vec<u8>> {
    let seqs: Vec<&[u8]> = seqs.iter().map(AsRef::as_ref).collect();
    let k = seqs.len();
    if k == 0 {
        return Some(Vec::new());
    }
    let mut strides = vec![0usize; k];
    let mut total = 1usize;
    for d in (0..k).rev() {
        strides[d] = total;
        total = total.checked_mul(seqs[d].len() + 1)?;
        if total > budget {
            return None;
        }
    }
    let coords = |mut f: usize, out: &mut [usize]| {
        for d in 0..k {
            out[d] = f / strides[d];
            f %= strides[d];
        }
    };
    let mut table = vec![0u16; total];
    let mut pos = vec![0usize; k];
    for f in (0..total).rev() {
        coords(f, &mut pos);
        if pos.iter().zip(&seqs).any(|(&p, s)| p == s.len()) {
            continue;
        }
        let c = seqs[0][pos[0]];
        table[f] = if seqs.iter().zip(&pos).all(|(s, &p)| s[p] == c) {
            table[f + strides.iter().sum::<usize>()] + 1
        } else {
            (0..k).map(|d| table[f + strides[d]]).max().unwrap()
        };
    }
    let mut out = Vec::with_capacity(table[0] as usize);
    let mut f = 0;
    loop {
        coords(f, &mut pos);
        if pos.iter().zip(&seqs).any(|(&p, s)| p == s.len()) {
            break;
        }
        let c = seqs[0][pos[0]];
        if seqs.iter().zip(&pos).all(|(s, &p)| s[p] == c) {
            out.push(c);
            f += strides.iter().sum::<usize>();
        } else {
            let d = (0..k).find(|&d| table[f + strides[d]] == table[f]).unwrap();
            f += strides[d];
        }
    }
    Some(out)
}

/// Splits `value` at the first occurrence of each pattern delimiter in turn.
/// Returns `pattern.len() + 1` pieces, or `None` when the pattern does not
/// embed in the value.
pub fn split_by_pattern<'a>(value: &'a [u8], pattern: &[u8]) -> Option<Vec<&'a [u8]>> {
    let mut parts = Vec::with_capacity(pattern.len() + 1);
    let mut start = 0;
    for &d in pattern {
        let off = value[start..].iter().position(|&b| b == d)?;
        parts.push(&value[start..start + off]);
        start += off + 1;
    }
    parts.push(&value[start..]);
    Some(parts)
}

/// Inverse of [`split_by_pattern`].
pub fn join_by_pattern<P: AsRef<[u8]>>(parts: &[P], pattern: &[u8], out: &mut Vec<u8>) {
    for (i, p) in parts.iter().enumerate() {
        if i > 0 {
            out.push(pattern[i - 1]);
        }
        out.extend_from_slice(p.as_ref());
    }
}

/// Mines the delimiter skeleton shared by all values. Identical delimiter
/// sequences are collapsed first; small inputs get the exact multi-sequence
/// LCS, larger ones the pairwise fold. Returns `None` for an empty skeleton
/// or when splitting some value by it does not rejoin to the value.
pub fn delimiter_lcs<V: AsRef<[u8]>>(values: &[V], delimiters: &[u8]) -> Option<Vec<u8>> {
    if values.len() < 2 {
        return None;
    }
    let mut seen = HashSet::new();
    let mut seqs: Vec<Vec<u8>> = Vec::new();
    for v in values {
        let d = delimiter_sequence(v.as_ref(), delimiters);
        if d.is_empty() {
            return None;
        }
        if seen.insert(d.clone()) {
            seqs.push(d);
        }
    }
    seqs.sort_by_key(Vec::len);
    let pattern = lcs_exact(&seqs, EXACT_LCS_BUDGET).unwrap_or_else(|| lcs_fold(&seqs));
    if pattern.is_empty() {
        return None;
    }
    let mut buf = Vec::new();
    for v in values {
        let v = v.as_ref();
        let parts = split_by_pattern(v, &pattern)?;
        buf.clear();
        join_by_pattern(&parts, &pattern, &mut buf);
        if buf != v {
            return None;
        }
    }
    Some(pattern)
}

/// `sum_x w(x) P(x) (-ln P(x))` with `w(x) = log2(|x| + 1)`.
pub fn weighted_entropy(values: &[i128]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let mut counts: BTreeMap<i128, usize> = BTreeMap::new();
    for &v in values {
        *counts.entry(v).or_default() += 1;
    }
    let n = values.len() as f64;
    counts
        .into_iter()
        .map(|(x, c)| {
            let p = c as f64 / n;
            let w = ((x.unsigned_abs() as f64) + 1.0).log2();
            -w * p * p.ln()
        })
        .sum()
}

/// `{a1, a2 - a1, ..., am - a(m-1)}`, computed without overflow.
pub fn differences(values: &[i64]) -> Vec<i128> {
    let mut out = Vec::with_capacity(values.len());
    let mut prev = 0i128;
    for &v in values {
        out.push(i128::from(v) - prev);
        prev = i128::from(v);
    }
    out
}

/// True when differencing lowers the weighted entropy of the sequence.
pub fn variability_test(values: &[i64]) -> bool {
    if values.len() < 2 {
        return false;
    }
    let raw: Vec<i128> = values.iter().map(|&v| i128::from(v)).collect();
    weighted_entropy(&differences(values)) < weighted_entropy(&raw)
}

/// How the text of an integer column is written.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IntegerForm {
    /// Shortest decimal form, optional leading `-`.
    Canonical,
    /// Unsigned, zero-padded to a fixed number of digits.
    Padded(u8),
}

impl IntegerForm {
    pub fn render(self, v: i64, out: &mut Vec<u8>) {
        use std::io::Write;
        match self {
            IntegerForm::Canonical => write!(out, "{v}").unwrap(),
            IntegerForm::Padded(w) => write!(out, "{v:0width$}", width = w as usize).unwrap(),
        }
    }
}

fn parse_canonical(v: &[u8]) -> Option<i64> {
    let digits = v.strip_prefix(b"-").unwrap_or(v);
    if digits.is_empty() || !digits.iter().all(u8::is_ascii_digit) {
        return None;
    }
    if digits.len() > 1 && digits[0] == b'0' {
        return None;
    }
    if v.len() != digits.len() && digits == b"0" {
        return None;
    }
    std::str::from_utf8(v).ok()?.parse().ok()
}

/// Parses a column as integers if every value is an exactly-reproducible
/// decimal integer: all canonical, or all zero-padded to one width.
pub fn parse_integers<V: AsRef<[u8]>>(values: &[V]) -> Option<(IntegerForm, Vec<i64>)> {
    if values.is_empty() {
        return None;
    }
    if let Some(ints) = values.iter().map(|v| parse_canonical(v.as_ref())).collect::<Option<Vec<_>>>() {
        return Some((IntegerForm::Canonical, ints));
    }
    let width = values[0].as_ref().len();
    if !(2..=18).contains(&width) {
        return None;
    }
    let ints = values
        .iter()
        .map(|v| {
            let v = v.as_ref();
            if v.len() != width || !v.iter().all(u8::is_ascii_digit) {
                return None;
            }
            std::str::from_utf8(v).ok()?.parse::<i64>().ok()
        })
        .collect::<Option<Vec<_>>>()?;
    Some((IntegerForm::Padded(width as u8), ints))
}

/// Treatment decided for one column by the analyzer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Verdict {
    Dictionary,
    Delta,
    Raw,
}

fn judge<V: AsRef<[u8]>>(values: &[V], sigma: f64) -> Verdict {
    if let Some((_, ints)) = parse_integers(values) {
        if variability_test(&ints) {
            return Verdict::Delta;
        }
        return Verdict::Raw;
    }
    if satisfies_multiplicity(values, sigma) {
        Verdict::Dictionary
    } else {
        Verdict::Raw
    }
}

/// Analyzes sampled values of each field and assembles the characteristic
/// set. Integer fields go to the variability test; string fields to the
/// multiplicity test, then to delimiter mining with one level of sub-field
/// analysis.
pub fn analyze<V: AsRef<[u8]>>(fields: &[(FieldId, Vec<V>)], cfg: &AnalyzerConfig) -> CharacteristicSet {
    let mut cs = CharacteristicSet {
        sigma: cfg.sigma,
        delimiters: cfg.delimiters.clone(),
        ..CharacteristicSet::default()
    };
    for (id, values) in fields {
        if values.is_empty() {
            continue;
        }
        if parse_integers(values).is_some() {
            if judge(values, cfg.sigma) == Verdict::Delta {
                cs.variability.insert(FieldRef::whole(*id));
            }
            continue;
        }
        if satisfies_multiplicity(values, cfg.sigma) {
            cs.multiplicity.insert(FieldRef::whole(*id));
            continue;
        }
        let Some(pattern) = delimiter_lcs(values, &cfg.delimiters) else {
            continue;
        };
        let rows: Vec<Vec<&[u8]>> = values
            .iter()
            .map(|v| split_by_pattern(v.as_ref(), &pattern).expect("pattern embeds in every sampled value"))
            .collect();
        for sub in 0..=pattern.len() {
            let column: Vec<&[u8]> = rows.iter().map(|r| r[sub]).collect();
            let r = FieldRef::sub(*id, sub as u32);
            match judge(&column, cfg.sigma) {
                Verdict::Dictionary => {
                    cs.multiplicity.insert(r);
                }
                Verdict::Delta => {
                    cs.variability.insert(r);
                }
                Verdict::Raw => {}
            }
        }
        cs.patterns.insert(*id, pattern);
    }
    cs
}
