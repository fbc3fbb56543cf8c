//! Longest monotone subsequences with witnesses.
//!
//! Patience sorting finds a longest increasing subsequence in O(n log n):
//! scan left to right, keep the smallest possible tail value of an
//! increasing subsequence of each length, and binary-search the tails for
//! every new element. Recording which tail each element extended lets us
//! walk predecessor links backwards to recover an actual witness, not just
//! the length. A longest decreasing subsequence is the same search with the
//! order reversed.

use crate::perm::Permutation;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Increasing,
    Decreasing,
}

/// A longest monotone subsequence: its direction, length, and one-based
/// witness positions (strictly increasing).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonotoneWitness {
    pub direction: Direction,
    pub length: usize,
    pub positions: Vec<u32>,
}

/// Longest increasing subsequence as 0-based indices. `greater` flips the
/// comparison, turning the search into longest decreasing.
fn lis_indices(values: &[u32], decreasing: bool) -> Vec<usize> {
    let n = values.len();
    if n == 0 {
        return Vec::new();
    }
    let key = |i: usize| -> i64 {
        let v = values[i] as i64;
        if decreasing {
            -v
        } else {
            v
        }
    };
    // tails[k] = index of the smallest key ending an increasing run of
    // length k+1; prev[i] = predecessor of i in the run it extends.
    let mut tails: Vec<usize> = Vec::new();
    let mut prev: Vec<usize> = vec![usize::MAX; n];
    for i in 0..n {
        let pos = tails.partition_point(|&t| key(t) < key(i));
        if pos > 0 {
            prev[i] = tails[pos - 1];
        }
        if pos == tails.len() {
            tails.push(i);
        } else {
            tails[pos] = i;
        }
    }
    let mut out = Vec::with_capacity(tails.len());
    let mut cur = *tails.last().unwrap();
    loop {
        out.push(cur);
        if prev[cur] == usize::MAX {
            break;
        }
        cur = prev[cur];
    }
    out.reverse();
    out
}

/// Longest monotone subsequence of a permutation, with a witness.
///
/// Both directions are searched; on a tie the increasing witness is
/// returned. By the Erdős–Szekeres theorem the result has length at least
/// ceil(sqrt(n)).
pub fn longest_monotone(p: &Permutation) -> MonotoneWitness {
    let inc = lis_indices(p.as_slice(), false);
    let dec = lis_indices(p.as_slice(), true);
    let (direction, idx) = if inc.len() >= dec.len() {
        (Direction::Increasing, inc)
    } else {
        (Direction::Decreasing, dec)
    };
    MonotoneWitness {
        direction,
        length: idx.len(),
        positions: idx.into_iter().map(|i| i as u32 + 1).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::all_permutations;
    use crate::rng::random_permutation;

    /// Brute-force oracle: longest monotone length over all subsequences.
    fn oracle_len(values: &[u32]) -> usize {
        let n = values.len();
        let mut best = 0;
        for mask in 0u32..(1 << n) {
            let picked: Vec<u32> = (0..n)
                .filter(|&i| mask & (1 << i) != 0)
                .map(|i| values[i])
                .collect();
            let inc = picked.windows(2).all(|w| w[0] < w[1]);
            let dec = picked.windows(2).all(|w| w[0] > w[1]);
            if inc || dec {
                best = best.max(picked.len());
            }
        }
        best
    }

    #[test]
    fn worked_example() {
        let p = Permutation::parse("6 1 4 7 3 9 8 2 5").unwrap();
        let w = longest_monotone(&p);
        assert_eq!(w.length, 4);
        // The witness must be real: monotone values at increasing positions.
        let vals = p.values_at(&w.positions);
        assert!(vals.windows(2).all(|x| x[0] < x[1]) || vals.windows(2).all(|x| x[0] > x[1]));
    }

    #[test]
    fn identity_prefers_increasing() {
        let p = Permutation::parse("1 2 3 4 5").unwrap();
        let w = longest_monotone(&p);
        assert_eq!(w.direction, Direction::Increasing);
        assert_eq!(w.length, 5);
        assert_eq!(w.positions, vec![1, 2, 3, 4, 5]);
    }

    #[test]
    fn reverse_identity_is_decreasing() {
        let p = Permutation::parse("5 4 3 2 1").unwrap();
        let w = longest_monotone(&p);
        assert_eq!(w.direction, Direction::Decreasing);
        assert_eq!(w.length, 5);
    }

    #[test]
    fn empty_and_singleton() {
        let e = Permutation::new(vec![]).unwrap();
        assert_eq!(longest_monotone(&e).length, 0);
        let s = Permutation::parse("1").unwrap();
        let w = longest_monotone(&s);
        assert_eq!(w.length, 1);
        assert_eq!(w.positions, vec![1]);
    }

    #[test]
    fn matches_oracle_exhaustively() {
        for n in 0..=7 {
            for p in all_permutations(n) {
                assert_eq!(
                    longest_monotone(&p).length,
                    oracle_len(p.as_slice()),
                    "mismatch on {:?}",
                    p
                );
            }
        }
    }

    #[test]
    fn matches_oracle_randomly() {
        for seed in 0..300 {
            let p = random_permutation(12, seed);
            assert_eq!(longest_monotone(&p).length, oracle_len(p.as_slice()));
        }
    }

    #[test]
    fn erdos_szekeres_bound() {
        for n in [10usize, 100, 1000, 10_000] {
            for seed in 0..5 {
                let p = random_permutation(n, seed);
                let need = (n as f64).sqrt().ceil() as usize;
                assert!(longest_monotone(&p).length >= need);
            }
        }
    }

    #[test]
    fn witness_positions_strictly_increase() {
        for seed in 0..100 {
            let p = random_permutation(50, seed);
            let w = longest_monotone(&p);
            assert!(w.positions.windows(2).all(|x| x[0] < x[1]));
            assert_eq!(w.length, w.positions.len());
        }
    }
}
