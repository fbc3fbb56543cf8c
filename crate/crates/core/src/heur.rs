//! Scalable twin heuristics with proven guarantees.
//!
//! Two constructions run in near-linear time and still certify nontrivial
//! twin lengths:
//!
//! - *Monotone splitting* ([`es_split_twins`]): any monotone subsequence of
//!   length m splits into twins of length floor(m/2), so Erdős–Szekeres
//!   alone guarantees twins of length about sqrt(n)/2.
//! - *Block matchings* ([`matching_twins`]): chop positions and values into
//!   blocks of size `a`, draw an edge between position block i and value
//!   block j when at least two positions of block i carry values of block j,
//!   and extract one twin element per matching edge. Any matching yields
//!   genuine twins because distinct edges use distinct value blocks, and with
//!   a around (3n)^(1/3) the maximum matching has expected size on the order
//!   of n^(2/3).

use crate::monotone::longest_monotone;
use crate::perm::{Permutation, TwinPair};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HeurError {
    #[error("block size {a} out of range for a permutation of length {n}")]
    BadBlockSize { a: usize, n: usize },
}

/// Splits the longest monotone subsequence into its first and second half.
/// Both halves are monotone in the same direction, hence order-isomorphic.
/// The witness has length floor(m/2) where m is the longest monotone length;
/// hosts with fewer than two elements get the empty pair.
pub fn es_split_twins(p: &Permutation) -> TwinPair {
    if p.len() < 2 {
        return TwinPair::empty();
    }
    let w = longest_monotone(p);
    let half = w.length / 2;
    TwinPair {
        first: w.positions[..half].to_vec(),
        second: w.positions[half..2 * half].to_vec(),
    }
}

/// The bipartite block graph of a permutation at block size `a`.
///
/// Position block `A_i` covers positions `(i-1)a + 1 ..= ia` and value block
/// `V_j` covers values `(j-1)a + 1 ..= ja`, for `i, j` in `1..=m` with
/// `m = floor(n/a)`. When `a` does not divide `n` the trailing partial
/// position and value ranges are discarded. The cell count `X_ij` is the
/// number of kept positions of `A_i` carrying kept values of `V_j`; the
/// graph has an edge wherever `X_ij >= 2`.
#[derive(Debug, Clone)]
pub struct BipartiteBlockGraph {
    pub n: usize,
    pub a: usize,
    /// Number of blocks per side, m = floor(n/a).
    pub blocks: usize,
    /// Edges (i, j) with X_ij >= 2, one-based, in (i, j)-lexicographic order.
    pub edges: Vec<(u32, u32)>,
    /// Sparse nonzero cells by row: rows[i] lists (j, X_{i+1, j+1}) ascending.
    rows: Vec<Vec<(u32, u32)>>,
    /// Same cells transposed: cols[j] lists (i, count) ascending.
    cols: Vec<Vec<(u32, u32)>>,
    /// Degree in the edge graph (cells with count >= 2), per side.
    pub left_degree: Vec<u32>,
    pub right_degree: Vec<u32>,
}

impl BipartiteBlockGraph {
    /// X_ij for one-based block indices.
    pub fn count(&self, i: u32, j: u32) -> u32 {
        let row = &self.rows[i as usize - 1];
        match row.binary_search_by_key(&(j - 1), |&(jj, _)| jj) {
            Ok(pos) => row[pos].1,
            Err(_) => 0,
        }
    }

    /// Sum of X_ij over j: how many positions of block i carry kept values.
    pub fn row_sum(&self, i: u32) -> u32 {
        self.rows[i as usize - 1].iter().map(|&(_, c)| c).sum()
    }

    /// Sum of X_ij over i: how many values of block j sit at kept positions.
    pub fn col_sum(&self, j: u32) -> u32 {
        self.cols[j as usize - 1].iter().map(|&(_, c)| c).sum()
    }

    /// Maximum degree over both sides of the edge graph. At most floor(a/2)
    /// because a block holds at most `a` positions (or values) and every
    /// edge consumes two of them.
    pub fn max_degree(&self) -> u32 {
        self.left_degree
            .iter()
            .chain(self.right_degree.iter())
            .copied()
            .max()
            .unwrap_or(0)
    }
}

/// Builds the block graph. `a` must lie in `1..=n` (any `a` is accepted for
/// the empty permutation, yielding an empty graph).
pub fn build_block_graph(p: &Permutation, a: usize) -> Result<BipartiteBlockGraph, HeurError> {
    let n = p.len();
    if n > 0 && (a == 0 || a > n) {
        return Err(HeurError::BadBlockSize { a, n });
    }
    let m = if a == 0 { 0 } else { n / a };
    let kept = m * a;
    let mut rows: Vec<Vec<(u32, u32)>> = vec![Vec::new(); m];
    let mut cols: Vec<Vec<(u32, u32)>> = vec![Vec::new(); m];
    let mut buf: Vec<u32> = Vec::with_capacity(a);
    for i in 0..m {
        buf.clear();
        for s in i * a..(i + 1) * a {
            let v = p.as_slice()[s] as usize;
            if v <= kept {
                buf.push(((v - 1) / a) as u32);
            }
        }
        buf.sort_unstable();
        let mut run = 0;
        while run < buf.len() {
            let j = buf[run];
            let mut end = run;
            while end < buf.len() && buf[end] == j {
                end += 1;
            }
            rows[i].push((j, (end - run) as u32));
            run = end;
        }
    }
    for (i, row) in rows.iter().enumerate() {
        for &(j, c) in row {
            cols[j as usize].push((i as u32, c));
        }
    }
    let mut edges = Vec::new();
    let mut left_degree = vec![0u32; m];
    let mut right_degree = vec![0u32; m];
    for (i, row) in rows.iter().enumerate() {
        for &(j, c) in row {
            if c >= 2 {
                edges.push((i as u32 + 1, j + 1));
                left_degree[i] += 1;
                right_degree[j as usize] += 1;
            }
        }
    }
    let g = BipartiteBlockGraph {
        n,
        a,
        blocks: m,
        edges,
        rows,
        cols,
        left_degree,
        right_degree,
    };
    // Structural cap: a block contributes two endpoints per incident edge
    // out of at most `a` members.
    debug_assert!(a == 0 || g.max_degree() as usize <= a / 2);
    Ok(g)
}

/// How a matching is chosen from the block graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatchingStrategy {
    /// Scan edges in (i, j)-lexicographic order, keep an edge when both
    /// endpoints are still free. Guaranteed at least |E| / (2 max degree).
    Greedy,
    /// Augmenting-path maximum matching.
    Maximum,
    /// Delete vertices of degree >= cprime on either side, then run greedy
    /// on what survives.
    Truncated { cprime: usize },
}

/// Greedy matching in edge order. The returned pairs are sorted by left
/// block. Panics (debug) if the classical |E|/(2 Delta) guarantee were ever
/// violated, which cannot happen: each chosen edge rules out at most
/// 2 Delta - 2 others.
pub fn greedy_matching(g: &BipartiteBlockGraph) -> Vec<(u32, u32)> {
    let mut used_l = vec![false; g.blocks];
    let mut used_r = vec![false; g.blocks];
    let mut out = Vec::new();
    for &(i, j) in &g.edges {
        if !used_l[i as usize - 1] && !used_r[j as usize - 1] {
            used_l[i as usize - 1] = true;
            used_r[j as usize - 1] = true;
            out.push((i, j));
        }
    }
    let delta = g.max_degree() as usize;
    assert!(
        2 * delta * out.len() >= g.edges.len(),
        "greedy matching fell below |E|/(2 max degree)"
    );
    out
}

/// Maximum bipartite matching via augmenting paths (Kuhn's algorithm),
/// deterministic: left vertices ascending, neighbors ascending. Returned
/// pairs are sorted by left block.
pub fn maximum_matching(g: &BipartiteBlockGraph) -> Vec<(u32, u32)> {
    let m = g.blocks;
    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); m];
    for &(i, j) in &g.edges {
        adj[i as usize - 1].push(j - 1);
    }
    const FREE: u32 = u32::MAX;
    let mut match_right: Vec<u32> = vec![FREE; m];
    let mut seen = vec![false; m];

    fn augment(u: usize, adj: &[Vec<u32>], seen: &mut [bool], match_right: &mut [u32]) -> bool {
        for &v in &adj[u] {
            let v = v as usize;
            if !seen[v] {
                seen[v] = true;
                if match_right[v] == u32::MAX
                    || augment(match_right[v] as usize, adj, seen, match_right)
                {
                    match_right[v] = u as u32;
                    return true;
                }
            }
        }
        false
    }

    for u in 0..m {
        if !adj[u].is_empty() {
            seen.iter_mut().for_each(|s| *s = false);
            augment(u, &adj, &mut seen, &mut match_right);
        }
    }
    let mut out: Vec<(u32, u32)> = match_right
        .iter()
        .enumerate()
        .filter(|&(_, &l)| l != FREE)
        .map(|(j, &l)| (l + 1, j as u32 + 1))
        .collect();
    out.sort_unstable();
    out
}

/// Deletes every vertex of degree >= `cprime` (both sides), then matches
/// greedily among surviving edges.
pub fn truncated_matching(g: &BipartiteBlockGraph, cprime: usize) -> Vec<(u32, u32)> {
    let cp = cprime as u32;
    let mut used_l = vec![false; g.blocks];
    let mut used_r = vec![false; g.blocks];
    let mut out = Vec::new();
    for &(i, j) in &g.edges {
        if g.left_degree[i as usize - 1] >= cp || g.right_degree[j as usize - 1] >= cp {
            continue;
        }
        if !used_l[i as usize - 1] && !used_r[j as usize - 1] {
            used_l[i as usize - 1] = true;
            used_r[j as usize - 1] = true;
            out.push((i, j));
        }
    }
    out
}

/// Turns a matching in the block graph into a twin pair: for each edge
/// (i, j), in ascending i, the two smallest positions of block A_i carrying
/// values of block V_j contribute one element to each twin.
///
/// Distinct edges use distinct position blocks (so both index sequences
/// increase) and distinct value blocks (so the relative order of any two
/// picked values is decided by their value-block indices alone, identically
/// in both twins). Hence the two subsequences are always order-isomorphic.
pub fn extract_matching_twins(
    p: &Permutation,
    g: &BipartiteBlockGraph,
    matching: &[(u32, u32)],
) -> TwinPair {
    let a = g.a;
    let kept = g.blocks * a;
    let mut sorted: Vec<(u32, u32)> = matching.to_vec();
    sorted.sort_unstable();
    let mut first = Vec::with_capacity(sorted.len());
    let mut second = Vec::with_capacity(sorted.len());
    for &(i, j) in &sorted {
        let mut picks = [0u32; 2];
        let mut found = 0;
        let lo = (i as usize - 1) * a;
        for s in lo..lo + a {
            let v = p.as_slice()[s] as usize;
            if v <= kept && ((v - 1) / a) as u32 == j - 1 {
                picks[found] = s as u32 + 1;
                found += 1;
                if found == 2 {
                    break;
                }
            }
        }
        assert!(found == 2, "matching edge without two supporting positions");
        first.push(picks[0]);
        second.push(picks[1]);
    }
    TwinPair { first, second }
}

/// Block-size presets for [`default_block_size`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum BlockMode {
    /// a = ceil((c n)^(1/3)): maximizes the expected matching size.
    #[default]
    Plain,
    /// a = ceil((c n ln n)^(1/3)): larger blocks, denser graph; trades a
    /// log factor of twin length for a simpler high-probability analysis.
    Log,
}

/// Default block size for a host of length n at density constant `c`.
/// Clamped into `1..=max(1, n)` so tiny hosts stay legal.
pub fn default_block_size(n: usize, mode: BlockMode, c: f64) -> usize {
    let nf = n as f64;
    let raw = match mode {
        BlockMode::Plain => (c * nf).powf(1.0 / 3.0),
        BlockMode::Log => (c * nf * nf.max(2.0).ln()).powf(1.0 / 3.0),
    };
    // Cube roots of exact cubes can land a hair off in either direction;
    // snap before ceiling so (3*9)^(1/3) is 3, not 4.
    let snapped = if (raw - raw.round()).abs() < 1e-9 {
        raw.round()
    } else {
        raw.ceil()
    };
    (snapped as usize).clamp(1, n.max(1))
}

/// Degree threshold for the truncated strategy: ceil(e^2 c / 2), which is 12
/// at the default c = 3.
pub fn default_cprime(c: f64) -> usize {
    (std::f64::consts::E.powi(2) * c / 2.0).ceil() as usize
}

/// End-to-end block-matching twins. `a` defaults to the plain-mode block
/// size at c = 3. Hosts shorter than 2 yield the empty pair.
pub fn matching_twins(
    p: &Permutation,
    a: Option<usize>,
    strategy: MatchingStrategy,
) -> Result<TwinPair, HeurError> {
    let n = p.len();
    if n < 2 {
        return Ok(TwinPair::empty());
    }
    let a = match a {
        Some(a) => {
            if a == 0 || a > n {
                return Err(HeurError::BadBlockSize { a, n });
            }
            a
        }
        None => default_block_size(n, BlockMode::Plain, 3.0),
    };
    let g = build_block_graph(p, a)?;
    let matching = match strategy {
        MatchingStrategy::Greedy => greedy_matching(&g),
        MatchingStrategy::Maximum => maximum_matching(&g),
        MatchingStrategy::Truncated { cprime } => truncated_matching(&g, cprime),
    };
    let pair = extract_matching_twins(p, &g, &matching);
    debug_assert_eq!(crate::perm::verify_twin_pair(p, &pair), Ok(true));
    Ok(pair)
}
