//! Core permutation types: parsing, pattern keys, twin-pair witnesses, and
//! the three classical symmetries.
//!
//! A permutation of [n] is stored as its one-line notation, so `entries[i]`
//! is the value at (one-based) position `i + 1`. Subsequences are compared by
//! their *pattern key*: the sequence of ranks of the values. Two subsequences
//! are similar (order-isomorphic) exactly when their keys agree, which is the
//! defining relation for twins throughout this crate.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors from parsing or validating permutation data.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum PermError {
    #[error("empty input: expected at least one integer")]
    Empty,
    #[error("bad token {0:?}: expected a positive integer")]
    BadToken(String),
    #[error("duplicate value {0}")]
    Duplicate(u32),
    #[error("value {value} out of range: expected 1..={n}")]
    ValueOutOfRange { value: u32, n: usize },
    #[error("index {index} out of range: host has {n} positions")]
    IndexOutOfRange { index: u32, n: usize },
}

/// A permutation of `{1, ..., n}` in one-line notation. Serializes as the
/// bare entry array; construction always goes through validation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct Permutation {
    entries: Vec<u32>,
}

impl Permutation {
    /// Builds a permutation from its one-line notation, checking that the
    /// entries are exactly `1..=n` in some order.
    pub fn new(entries: Vec<u32>) -> Result<Self, PermError> {
        let n = entries.len();
        let mut seen = vec![false; n];
        for &v in &entries {
            if v == 0 || v as usize > n {
                return Err(PermError::ValueOutOfRange { value: v, n });
            }
            if seen[v as usize - 1] {
                return Err(PermError::Duplicate(v));
            }
            seen[v as usize - 1] = true;
        }
        Ok(Permutation { entries })
    }

    /// The identity permutation of length `n`.
    pub fn identity(n: usize) -> Self {
        Permutation {
            entries: (1..=n as u32).collect(),
        }
    }

    /// Parses one-line notation: integers separated by whitespace or commas,
    /// e.g. `"6 1 4 7 3 9 8 2 5"` or `"2,1,3"`.
    pub fn parse(text: &str) -> Result<Self, PermError> {
        Permutation::new(parse_values(text)?)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.entries
    }

    /// Value at a one-based position. Panics if out of range.
    pub fn value_at(&self, pos: u32) -> u32 {
        self.entries[pos as usize - 1]
    }

    /// Values along a strictly increasing list of one-based positions.
    pub fn values_at(&self, positions: &[u32]) -> Vec<u32> {
        positions.iter().map(|&p| self.value_at(p)).collect()
    }

    /// One-line notation as `"a b c"` text.
    pub fn to_line(&self) -> String {
        let words: Vec<String> = self.entries.iter().map(|v| v.to_string()).collect();
        words.join(" ")
    }
}

/// Parses a line of distinct integers separated by whitespace or commas.
/// Unlike [`Permutation::parse`] the values need not form a permutation,
/// which is what window-level operations want.
pub fn parse_values(text: &str) -> Result<Vec<u32>, PermError> {
    let mut out = Vec::new();
    for token in text.split(|c: char| c.is_whitespace() || c == ',') {
        if token.is_empty() {
            continue;
        }
        let v: u32 = token
            .parse()
            .map_err(|_| PermError::BadToken(token.to_string()))?;
        out.push(v);
    }
    if out.is_empty() {
        return Err(PermError::Empty);
    }
    let mut sorted = out.clone();
    sorted.sort_unstable();
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            return Err(PermError::Duplicate(w[0]));
        }
    }
    Ok(out)
}

/// The rank sequence of a list of distinct values: position `i` holds
/// `1 + #{j : values[j] < values[i]}`. Two sequences of equal length are
/// order-isomorphic iff their keys are equal, and a permutation is its own
/// key.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PatternKey(pub Vec<u32>);

/// Computes the pattern key of a sequence of distinct values.
pub fn pattern_key(values: &[u32]) -> Result<PatternKey, PermError> {
    let mut ranks = vec![0u32; values.len()];
    fill_ranks(values, &mut ranks)?;
    Ok(PatternKey(ranks))
}

/// Rank computation into a caller-provided buffer (hot paths reuse it).
/// `ranks` must have the same length as `values`.
pub(crate) fn fill_ranks(values: &[u32], ranks: &mut [u32]) -> Result<(), PermError> {
    debug_assert_eq!(values.len(), ranks.len());
    let mut order: Vec<u32> = (0..values.len() as u32).collect();
    order.sort_unstable_by_key(|&i| values[i as usize]);
    for (r, &i) in order.iter().enumerate() {
        if r > 0 && values[order[r - 1] as usize] == values[i as usize] {
            return Err(PermError::Duplicate(values[i as usize]));
        }
        ranks[i as usize] = r as u32 + 1;
    }
    Ok(())
}

/// Whether two sequences of distinct values are order-isomorphic.
/// Sequences of different lengths are never similar; two empty sequences are.
pub fn is_similar(a: &[u32], b: &[u32]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut ra = vec![0u32; a.len()];
    let mut rb = vec![0u32; b.len()];
    if fill_ranks(a, &mut ra).is_err() || fill_ranks(b, &mut rb).is_err() {
        return false;
    }
    ra == rb
}

/// A twin witness: two equal-length, strictly increasing, disjoint lists of
/// one-based positions in some host permutation whose value subsequences are
/// order-isomorphic. Length-0 twins (two empty lists) are the legal witness
/// for hosts too short to contain anything better.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwinPair {
    pub first: Vec<u32>,
    pub second: Vec<u32>,
}

impl TwinPair {
    pub fn empty() -> Self {
        TwinPair {
            first: Vec::new(),
            second: Vec::new(),
        }
    }

    /// Common length of the two subsequences.
    pub fn len(&self) -> usize {
        debug_assert_eq!(self.first.len(), self.second.len());
        self.first.len()
    }

    pub fn is_empty(&self) -> bool {
        self.first.is_empty() && self.second.is_empty()
    }

    /// Shifts every index by `offset`, translating window-local offsets to
    /// host positions.
    pub fn shifted(&self, offset: u32) -> TwinPair {
        TwinPair {
            first: self.first.iter().map(|&i| i + offset).collect(),
            second: self.second.iter().map(|&i| i + offset).collect(),
        }
    }
}

/// Checks a claimed twin pair against its host permutation.
///
/// Returns `Err` when an index falls outside `[1, n]`; otherwise `Ok(true)`
/// iff both index lists are strictly increasing, mutually disjoint, of equal
/// length, and carry order-isomorphic value subsequences.
pub fn verify_twin_pair(host: &Permutation, pair: &TwinPair) -> Result<bool, PermError> {
    let n = host.len();
    for &idx in pair.first.iter().chain(pair.second.iter()) {
        if idx == 0 || idx as usize > n {
            return Err(PermError::IndexOutOfRange { index: idx, n });
        }
    }
    if pair.first.len() != pair.second.len() {
        return Ok(false);
    }
    let increasing = |s: &[u32]| s.windows(2).all(|w| w[0] < w[1]);
    if !increasing(&pair.first) || !increasing(&pair.second) {
        return Ok(false);
    }
    // Disjointness via merge: both lists are strictly increasing here.
    let (mut i, mut j) = (0, 0);
    while i < pair.first.len() && j < pair.second.len() {
        match pair.first[i].cmp(&pair.second[j]) {
            std::cmp::Ordering::Equal => return Ok(false),
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
        }
    }
    let va = host.values_at(&pair.first);
    let vb = host.values_at(&pair.second);
    Ok(is_similar(&va, &vb))
}

/// The three index/value symmetries of the permutation square.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Symmetry {
    /// Reverse the positions: `v_i -> v_{n+1-i}`.
    Reverse,
    /// Complement the values: `v -> n + 1 - v`.
    Complement,
    /// Swap the roles of positions and values.
    Inverse,
}

impl Symmetry {
    pub const ALL: [Symmetry; 3] = [Symmetry::Reverse, Symmetry::Complement, Symmetry::Inverse];
}

/// Applies a symmetry. Each of the three is an involution.
pub fn apply_symmetry(p: &Permutation, s: Symmetry) -> Permutation {
    let n = p.len() as u32;
    let entries = match s {
        Symmetry::Reverse => p.as_slice().iter().rev().copied().collect(),
        Symmetry::Complement => p.as_slice().iter().map(|&v| n + 1 - v).collect(),
        Symmetry::Inverse => {
            let mut inv = vec![0u32; n as usize];
            for (i, &v) in p.as_slice().iter().enumerate() {
                inv[v as usize - 1] = i as u32 + 1;
            }
            inv
        }
    };
    Permutation { entries }
}

/// Advances `a` to its lexicographic successor in place; `false` once `a`
/// was the final (descending) arrangement.
pub fn next_permutation(a: &mut [u32]) -> bool {
    if a.len() < 2 {
        return false;
    }
    let mut i = a.len() - 1;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = a.len() - 1;
    while a[j] <= a[i - 1] {
        j -= 1;
    }
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}

/// Iterates every permutation of `[n]` in lexicographic order. `n = 0`
/// yields exactly the empty permutation.
pub fn all_permutations(n: usize) -> impl Iterator<Item = Permutation> {
    let mut cur: Option<Vec<u32>> = Some((1..=n as u32).collect());
    std::iter::from_fn(move || {
        let out = cur.clone()?;
        let advanced = {
            let c = cur.as_mut().unwrap();
            next_permutation(c)
        };
        if !advanced {
            cur = None;
        }
        Some(Permutation { entries: out })
    })
}
