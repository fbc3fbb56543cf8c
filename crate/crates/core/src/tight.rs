//! Tight twins: twin pairs whose two subsequences jointly occupy a
//! contiguous window of the host permutation.
//!
//! A window of even length 2r contains tight twins of length r exactly when
//! its positions admit a balanced 2-coloring whose two color classes carry
//! order-isomorphic value sequences. Unlike ordinary twins and block twins,
//! tight twins are not monotone in r: a permutation can contain tight twins
//! of length 5 and none of length 4, so scans report a full per-length
//! profile rather than a single threshold.

use crate::perm::{PatternKey, TwinPair};
use crate::perm::Permutation;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TightError {
    #[error("window length {0} is odd: tight twins need an even window")]
    OddLength(usize),
    #[error("window contains duplicate value {0}")]
    Duplicate(u32),
}

/// Searches for a balanced 2-coloring of `window` (length 2r) whose color
/// classes are order-isomorphic. Returns the first split in color-vector
/// lexicographic order (color A before color B at every position), as
/// one-based offsets local to the window.
///
/// Position 1 always receives color A: the complement of a valid coloring is
/// valid with the roles swapped, so the lexicographically first valid vector
/// starts with A and nothing is lost.
///
/// The search assigns colors left to right and prunes on two conditions:
/// a color class may never exceed r elements, and every time the shorter
/// class reaches length m its m-th value must have the same rank among its
/// class's first m values as the other class's m-th value has among its
/// first m. The rank-of-each-new-element sequence determines the pattern, so
/// the two classes are order-isomorphic iff all those checks pass.
pub fn tight_window_split(window: &[u32]) -> Result<Option<TwinPair>, TightError> {
    if window.len() % 2 != 0 {
        return Err(TightError::OddLength(window.len()));
    }
    let mut sorted = window.to_vec();
    sorted.sort_unstable();
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            return Err(TightError::Duplicate(w[0]));
        }
    }
    Ok(split_distinct(window))
}

/// Rank of `vals[m-1]` among `vals[..m]`, one-based.
fn rank_of_last(vals: &[u32]) -> u32 {
    let last = *vals.last().unwrap();
    vals.iter().filter(|&&v| v < last).count() as u32 + 1
}

/// The split search proper; callers guarantee even length and distinct
/// values. Used directly by scans that slice windows out of a permutation.
pub(crate) fn split_distinct(window: &[u32]) -> Option<TwinPair> {
    let len = window.len();
    debug_assert!(len % 2 == 0);
    if len == 0 {
        return Some(TwinPair::empty());
    }
    let r = len / 2;
    // a/b hold the values per class, idx_a/idx_b the one-based offsets.
    let mut a: Vec<u32> = Vec::with_capacity(r);
    let mut b: Vec<u32> = Vec::with_capacity(r);
    let mut idx_a: Vec<u32> = Vec::with_capacity(r);
    let mut idx_b: Vec<u32> = Vec::with_capacity(r);

    fn rec(
        window: &[u32],
        pos: usize,
        r: usize,
        a: &mut Vec<u32>,
        b: &mut Vec<u32>,
        idx_a: &mut Vec<u32>,
        idx_b: &mut Vec<u32>,
    ) -> bool {
        if pos == window.len() {
            return a.len() == r && b.len() == r;
        }
        let v = window[pos];
        // Color A first: that ordering is what makes the result the
        // lexicographically first valid color vector.
        if a.len() < r {
            a.push(v);
            idx_a.push(pos as u32 + 1);
            let consistent = if b.len() >= a.len() {
                let m = a.len();
                rank_of_last(&a[..m]) == rank_of_last(&b[..m])
            } else {
                true
            };
            if consistent && rec(window, pos + 1, r, a, b, idx_a, idx_b) {
                return true;
            }
            a.pop();
            idx_a.pop();
        }
        if b.len() < r {
            b.push(v);
            idx_b.push(pos as u32 + 1);
            let consistent = if a.len() >= b.len() {
                let m = b.len();
                rank_of_last(&b[..m]) == rank_of_last(&a[..m])
            } else {
                true
            };
            if consistent && rec(window, pos + 1, r, a, b, idx_a, idx_b) {
                return true;
            }
            b.pop();
            idx_b.pop();
        }
        false
    }

    // Pin position 1 to color A.
    a.push(window[0]);
    idx_a.push(1);
    if rec(window, 1, r, &mut a, &mut b, &mut idx_a, &mut idx_b) {
        Some(TwinPair {
            first: idx_a,
            second: idx_b,
        })
    } else {
        None
    }
}

/// Witness for the longest tight twins found by a scan: the one-based start
/// of the splitting window and the twin pair in host coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TightWitness {
    pub window_start: u32,
    pub pair: TwinPair,
}

/// Result of scanning every even-length window of a permutation.
/// `per_length[i]` states whether some window of length `2 * (i + 1)` splits,
/// i.e. whether tight twins of length `i + 1` exist; the profile covers
/// r = 1 ..= floor(n / 2) in full because tight twins are not monotone.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TightScanReport {
    pub max_length: usize,
    pub witness: Option<TightWitness>,
    pub per_length: Vec<bool>,
}

impl TightScanReport {
    /// Whether tight twins of length exactly `r` exist.
    pub fn has_length(&self, r: usize) -> bool {
        r >= 1 && r <= self.per_length.len() && self.per_length[r - 1]
    }
}

/// Scans all windows of length 2r for every r in `1..=n/2`, reporting the
/// full profile and a witness for the maximum. Within one r windows are
/// tried left to right and the first splitting window is recorded.
pub fn tight_twins_scan(p: &Permutation) -> TightScanReport {
    let n = p.len();
    let vals = p.as_slice();
    let rmax = n / 2;
    let mut per_length = vec![false; rmax];
    let mut witness: Option<TightWitness> = None;
    let mut max_length = 0;
    for r in 1..=rmax {
        let w = 2 * r;
        for start in 0..=(n - w) {
            if let Some(local) = split_distinct(&vals[start..start + w]) {
                per_length[r - 1] = true;
                max_length = r;
                witness = Some(TightWitness {
                    window_start: start as u32 + 1,
                    pair: local.shifted(start as u32),
                });
                break;
            }
        }
    }
    TightScanReport {
        max_length,
        witness,
        per_length,
    }
}

/// Result of a tight block twin scan: the largest k such that two *adjacent*
/// windows of length k are order-isomorphic, with the least one-based start
/// of the left window among the maxima.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TightBlockResult {
    pub length: usize,
    pub start: Option<u32>,
}

/// Finds the longest pair of adjacent order-isomorphic windows:
/// `[i, i+k-1]` and `[i+k, i+2k-1]`. Tried in descending k and ascending i,
/// so the first hit is the maximum with the least start. Like tight twins
/// this statistic is not monotone in k, hence the full descending sweep.
pub fn tight_block_scan(p: &Permutation) -> TightBlockResult {
    let n = p.len();
    let vals = p.as_slice();
    let mut key_left = PatternKey(Vec::new());
    let mut key_right = PatternKey(Vec::new());
    for k in (1..=n / 2).rev() {
        for i in 0..=(n - 2 * k) {
            key_left.0.resize(k, 0);
            key_right.0.resize(k, 0);
            crate::perm::fill_ranks(&vals[i..i + k], &mut key_left.0)
                .expect("permutation windows have distinct values");
            crate::perm::fill_ranks(&vals[i + k..i + 2 * k], &mut key_right.0)
                .expect("permutation windows have distinct values");
            if key_left == key_right {
                return TightBlockResult {
                    length: k,
                    start: Some(i as u32 + 1),
                };
            }
        }
    }
    TightBlockResult {
        length: 0,
        start: None,
    }
}
