//! Exact, witness-producing twin solvers and the exhaustive oracles that
//! validate them.
//!
//! The workhorse is a descending level search: for k from floor(n/2) down,
//! every length-k subsequence is grouped by its rank key, and a class that
//! holds two index-disjoint members certifies twins of length k. The first
//! level with a hit is optimal because twins truncate (drop the last element
//! of each side and they stay twins). Grouping makes refutation at large k
//! cheap: almost all classes up there are singletons.
//!
//! All enumeration orders are index-lexicographic so that witnesses are
//! identical across runs and platforms.

use crate::heur::{es_split_twins, matching_twins, MatchingStrategy};
use crate::perm::{
    apply_symmetry, fill_ranks, is_similar, next_permutation, pattern_key, Permutation, Symmetry,
    TwinPair,
};
use crate::tight::tight_twins_scan;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::hash_map::Entry;
use std::collections::HashMap;
use std::fmt;
use thiserror::Error;

/// Largest host searched exhaustively without an explicit node budget.
pub const EXACT_LIMIT: usize = 16;
/// Hard ceiling on host length: index sets are stored as 64-bit masks.
pub const MASK_LIMIT: usize = 64;
/// Largest host the three-coloring oracle will accept (3^n assignments).
pub const ORACLE_LIMIT: usize = 10;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExactError {
    #[error("host length {n} exceeds the no-budget limit {limit}; pass a node budget")]
    NeedsBudget { n: usize, limit: usize },
    #[error("host length {n} exceeds the hard search limit {limit}")]
    HostTooLarge { n: usize, limit: usize },
    #[error("host length {n} exceeds the oracle limit {limit}")]
    OracleTooLarge { n: usize, limit: usize },
    #[error("extremal search for {stat} is capped at n = {limit}, got {n}")]
    ExtremalTooLarge {
        stat: ExtremalStat,
        n: usize,
        limit: usize,
    },
    #[error("the pattern to avoid must be non-empty")]
    EmptyPattern,
}

/// Result of a (possibly budgeted) exact search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ExactOutcome {
    /// The search ran to completion: `length` is the true maximum.
    Optimal { length: usize, pair: TwinPair },
    /// The node budget ran out while level `upper` was still open. Levels
    /// above `upper` are refuted, so the truth lies in `[length, upper]`;
    /// `pair` is the best witness in hand (from the heuristic baselines).
    BestSoFar {
        length: usize,
        upper: usize,
        pair: TwinPair,
    },
}

impl ExactOutcome {
    pub fn pair(&self) -> &TwinPair {
        match self {
            ExactOutcome::Optimal { pair, .. } | ExactOutcome::BestSoFar { pair, .. } => pair,
        }
    }

    /// Length of the returned witness (the proved lower bound).
    pub fn twin_length(&self) -> usize {
        match self {
            ExactOutcome::Optimal { length, .. } | ExactOutcome::BestSoFar { length, .. } => {
                *length
            }
        }
    }

    pub fn is_optimal(&self) -> bool {
        matches!(self, ExactOutcome::Optimal { .. })
    }
}

struct Budget {
    left: u64,
}

impl Budget {
    fn spend(&mut self) -> bool {
        if self.left == 0 {
            return false;
        }
        self.left -= 1;
        true
    }
}

/// Rank key of one subsequence, compared only within a fixed length, so the
/// packed form needs no length tag. Ranks are at most 25 on the packed path
/// and 25 * 5 = 125 bits fit a u128.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum LevelKey {
    Packed(u128),
    Wide(Vec<u16>),
}

fn make_key(ranks: &[u32]) -> LevelKey {
    if ranks.len() <= 25 {
        let mut acc: u128 = 0;
        for &r in ranks {
            acc = (acc << 5) | r as u128;
        }
        LevelKey::Packed(acc)
    } else {
        LevelKey::Wide(ranks.iter().map(|&r| r as u16).collect())
    }
}

/// Advances `c` to the next k-combination of {0, .., n-1} in lexicographic
/// order; false when `c` was the last one.
fn advance_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] != i + n - k {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn mask_positions(mask: u64) -> Vec<u32> {
    let mut out = Vec::with_capacity(mask.count_ones() as usize);
    let mut m = mask;
    while m != 0 {
        let b = m.trailing_zeros();
        out.push(b + 1);
        m &= m - 1;
    }
    out
}

struct PatternClass {
    masks: Vec<u64>,
    /// None: membership unknown (avoidance mode, no collision yet).
    /// Some(false): class pattern contains the forbidden pattern; dead.
    alive: Option<bool>,
}

enum LevelResult {
    Found(TwinPair),
    Exhausted,
    OutOfBudget,
}

/// Searches one level: is there an index-disjoint pair of similar length-k
/// subsequences (whose pattern avoids `avoid`, when given)? Each enumerated
/// subsequence and each within-class disjointness test costs one budget node.
fn level_search(
    p: &Permutation,
    k: usize,
    avoid: Option<&Permutation>,
    budget: &mut Budget,
) -> LevelResult {
    let n = p.len();
    let vals = p.as_slice();
    let mut classes: HashMap<LevelKey, PatternClass> = HashMap::new();
    let mut c: Vec<usize> = (0..k).collect();
    let mut vbuf = vec![0u32; k];
    let mut rbuf = vec![0u32; k];
    loop {
        if !budget.spend() {
            return LevelResult::OutOfBudget;
        }
        for (j, &ci) in c.iter().enumerate() {
            vbuf[j] = vals[ci];
        }
        fill_ranks(&vbuf, &mut rbuf).expect("subsequence of a permutation has distinct values");
        let mask: u64 = c.iter().fold(0u64, |m, &ci| m | (1u64 << ci));
        match classes.entry(make_key(&rbuf)) {
            Entry::Occupied(mut e) => {
                let class = e.get_mut();
                if class.alive.is_none() {
                    let tau = avoid.expect("deferred verdicts only occur in avoidance mode");
                    let pattern =
                        Permutation::new(rbuf.clone()).expect("rank key is a permutation");
                    let ok = !contains_pattern(&pattern, tau);
                    class.alive = Some(ok);
                    if !ok {
                        class.masks = Vec::new();
                    }
                }
                if class.alive == Some(true) {
                    for &earlier in &class.masks {
                        if !budget.spend() {
                            return LevelResult::OutOfBudget;
                        }
                        if earlier & mask == 0 {
                            return LevelResult::Found(TwinPair {
                                first: mask_positions(earlier),
                                second: mask_positions(mask),
                            });
                        }
                    }
                    class.masks.push(mask);
                }
            }
            Entry::Vacant(e) => {
                e.insert(PatternClass {
                    masks: vec![mask],
                    alive: if avoid.is_some() { None } else { Some(true) },
                });
            }
        }
        if !advance_combination(&mut c, n) {
            return LevelResult::Exhausted;
        }
    }
}

/// Best heuristic witness available without search, used when the budget
/// dies: the longer of the monotone split and the maximum block matching,
/// falling back to a singleton pair. In avoidance mode each candidate is
/// kept only if its own pattern avoids `tau`.
fn fallback_witness(p: &Permutation, avoid: Option<&Permutation>) -> TwinPair {
    let mut candidates = vec![es_split_twins(p)];
    if let Ok(m) = matching_twins(p, None, MatchingStrategy::Maximum) {
        candidates.push(m);
    }
    if p.len() >= 2 {
        candidates.push(TwinPair {
            first: vec![1],
            second: vec![2],
        });
    }
    let mut best = TwinPair::empty();
    for cand in candidates {
        if cand.len() <= best.len() {
            continue;
        }
        if let Some(tau) = avoid {
            if !cand.is_empty() {
                let key = pattern_key(&p.values_at(&cand.first))
                    .expect("twin values are distinct");
                let pattern = Permutation::new(key.0).expect("rank key is a permutation");
                if contains_pattern(&pattern, tau) {
                    continue;
                }
            }
        }
        best = cand;
    }
    best
}

fn twins_search(
    p: &Permutation,
    avoid: Option<&Permutation>,
    budget: Option<u64>,
) -> Result<ExactOutcome, ExactError> {
    let n = p.len();
    if n > MASK_LIMIT {
        return Err(ExactError::HostTooLarge {
            n,
            limit: MASK_LIMIT,
        });
    }
    if budget.is_none() && n > EXACT_LIMIT {
        return Err(ExactError::NeedsBudget {
            n,
            limit: EXACT_LIMIT,
        });
    }
    let mut budget = Budget {
        left: budget.unwrap_or(u64::MAX),
    };
    for k in (1..=n / 2).rev() {
        match level_search(p, k, avoid, &mut budget) {
            LevelResult::Found(pair) => {
                debug_assert_eq!(crate::perm::verify_twin_pair(p, &pair), Ok(true));
                return Ok(ExactOutcome::Optimal { length: k, pair });
            }
            LevelResult::Exhausted => {}
            LevelResult::OutOfBudget => {
                let pair = fallback_witness(p, avoid);
                debug_assert_eq!(crate::perm::verify_twin_pair(p, &pair), Ok(true));
                return Ok(ExactOutcome::BestSoFar {
                    length: pair.len(),
                    upper: k,
                    pair,
                });
            }
        }
    }
    Ok(ExactOutcome::Optimal {
        length: 0,
        pair: TwinPair::empty(),
    })
}

/// Maximum twin length t(p) with a verified witness.
///
/// Without a budget the host must satisfy n <= [`EXACT_LIMIT`]. With a
/// budget, hosts up to [`MASK_LIMIT`] are accepted and the search reports
/// [`ExactOutcome::BestSoFar`] if the node budget runs out first.
pub fn exact_twins(p: &Permutation, budget: Option<u64>) -> Result<ExactOutcome, ExactError> {
    twins_search(p, None, budget)
}

/// Maximum length over twins whose common pattern does not contain `tau`.
/// One containment check per pattern class suffices, since both members of
/// any twin pair realize the same pattern.
pub fn exact_twins_avoiding(
    p: &Permutation,
    tau: &Permutation,
    budget: Option<u64>,
) -> Result<ExactOutcome, ExactError> {
    if tau.is_empty() {
        return Err(ExactError::EmptyPattern);
    }
    twins_search(p, Some(tau), budget)
}

/// Exhaustive three-coloring oracle for t(p): every index is unused, in the
/// first twin, or in the second; leaves with balanced sides and similar
/// value sequences are counted. The only pruning is count feasibility (the
/// side sizes must still be able to meet), so this is an independent check
/// on [`exact_twins`], not a faster sibling of it.
pub fn oracle_twins_3color(p: &Permutation) -> Result<usize, ExactError> {
    let n = p.len();
    if n > ORACLE_LIMIT {
        return Err(ExactError::OracleTooLarge {
            n,
            limit: ORACLE_LIMIT,
        });
    }
    let mut first = Vec::with_capacity(n / 2);
    let mut second = Vec::with_capacity(n / 2);
    let mut best = 0usize;
    oracle_rec(p.as_slice(), 0, &mut first, &mut second, &mut best);
    Ok(best)
}

fn oracle_rec(vals: &[u32], i: usize, first: &mut Vec<u32>, second: &mut Vec<u32>, best: &mut usize) {
    let rem = vals.len() - i;
    if first.len().abs_diff(second.len()) > rem {
        return;
    }
    if i == vals.len() {
        debug_assert_eq!(first.len(), second.len());
        if first.len() > *best && is_similar(first, second) {
            *best = first.len();
        }
        return;
    }
    let v = vals[i];
    oracle_rec(vals, i + 1, first, second, best);
    first.push(v);
    oracle_rec(vals, i + 1, first, second, best);
    first.pop();
    second.push(v);
    oracle_rec(vals, i + 1, first, second, best);
    second.pop();
}

/// True iff some subsequence of `host` is similar to `pattern`. Depth-first
/// over positions with two prunes: not enough positions left, and the rank
/// of each newly chosen value must match the rank of the corresponding
/// pattern prefix element (a complete invariant of similarity). The empty
/// pattern is contained in everything.
pub fn contains_pattern(host: &Permutation, pattern: &Permutation) -> bool {
    let m = pattern.len();
    if m == 0 {
        return true;
    }
    let n = host.len();
    if m > n {
        return false;
    }
    let tvals = pattern.as_slice();
    let target: Vec<u32> = (0..m)
        .map(|i| 1 + tvals[..i].iter().filter(|&&x| x < tvals[i]).count() as u32)
        .collect();
    let mut chosen: Vec<u32> = Vec::with_capacity(m);
    pattern_rec(host.as_slice(), &target, 0, &mut chosen)
}

fn pattern_rec(hvals: &[u32], target: &[u32], start: usize, chosen: &mut Vec<u32>) -> bool {
    let d = chosen.len();
    if d == target.len() {
        return true;
    }
    let last_start = hvals.len() - (target.len() - d);
    for i in start..=last_start {
        let v = hvals[i];
        let rank = 1 + chosen.iter().filter(|&&x| x < v).count() as u32;
        if rank == target[d] {
            chosen.push(v);
            if pattern_rec(hvals, target, i + 1, chosen) {
                return true;
            }
            chosen.pop();
        }
    }
    false
}

/// Maximum block-twin length with the lexicographically least witness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BlockTwinResult {
    pub length: usize,
    /// One-based window starts (first, second); None only when length = 0.
    pub starts: Option<(u32, u32)>,
}

/// Maximum k such that two disjoint windows of length k (second starting at
/// least k after the first) carry similar value sequences, plus the least
/// witness (max k, then least first start, then least second start).
///
/// Existence per level is one linear scan keeping the earliest window start
/// per rank key, and levels are tried in ascending order: block twins
/// truncate, so existence is downward closed and the first failing level
/// ends the climb. A second pass at the top level recovers the least pair.
pub fn exact_block_twins(p: &Permutation) -> BlockTwinResult {
    let n = p.len();
    let vals = p.as_slice();
    if n < 2 {
        return BlockTwinResult {
            length: 0,
            starts: None,
        };
    }
    let mut kmax = 0usize;
    for k in 1..=n / 2 {
        if !window_pair_exists(vals, k) {
            break;
        }
        kmax = k;
    }
    debug_assert!(kmax >= 1, "two singleton windows always match");
    let k = kmax;
    let mut vbuf = vec![0u32; k];
    let mut rbuf = vec![0u32; k];
    let mut keys: Vec<LevelKey> = Vec::with_capacity(n - k + 1);
    let mut by_key: HashMap<LevelKey, Vec<u32>> = HashMap::new();
    for i in 0..=n - k {
        vbuf.copy_from_slice(&vals[i..i + k]);
        fill_ranks(&vbuf, &mut rbuf).expect("window of a permutation has distinct values");
        let key = make_key(&rbuf);
        by_key.entry(key.clone()).or_default().push(i as u32);
        keys.push(key);
    }
    for i in 0..=n - 2 * k {
        let starts = &by_key[&keys[i]];
        let cut = (i + k) as u32;
        let pos = starts.partition_point(|&s| s < cut);
        if pos < starts.len() {
            return BlockTwinResult {
                length: k,
                starts: Some((i as u32 + 1, starts[pos] + 1)),
            };
        }
    }
    unreachable!("an existence level must produce a witness");
}

fn window_pair_exists(vals: &[u32], k: usize) -> bool {
    let n = vals.len();
    let mut vbuf = vec![0u32; k];
    let mut rbuf = vec![0u32; k];
    let mut earliest: HashMap<LevelKey, usize> = HashMap::new();
    for i in 0..=n - k {
        vbuf.copy_from_slice(&vals[i..i + k]);
        fill_ranks(&vbuf, &mut rbuf).expect("window of a permutation has distinct values");
        match earliest.entry(make_key(&rbuf)) {
            Entry::Occupied(e) => {
                if i - *e.get() >= k {
                    return true;
                }
            }
            Entry::Vacant(e) => {
                e.insert(i);
            }
        }
    }
    false
}

/// Statistic minimized by [`extremal_search`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtremalStat {
    /// Maximum twin length t.
    T,
    /// Maximum block-twin length bt.
    Bt,
    /// Maximum tight-twin length tt.
    TtMax,
}

impl fmt::Display for ExtremalStat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExtremalStat::T => "t",
            ExtremalStat::Bt => "bt",
            ExtremalStat::TtMax => "tt_max",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExtremalResult {
    pub value: usize,
    /// Lexicographically least permutation attaining the minimum.
    pub witness: Permutation,
    /// Permutations actually evaluated (smaller under symmetry reduction).
    pub examined: u64,
}

fn extremal_limit(stat: ExtremalStat) -> usize {
    match stat {
        ExtremalStat::T => 9,
        ExtremalStat::Bt => 10,
        ExtremalStat::TtMax => 8,
    }
}

fn eval_stat(p: &Permutation, stat: ExtremalStat) -> usize {
    match stat {
        ExtremalStat::T => exact_twins(p, None)
            .expect("extremal hosts fit the no-budget limit")
            .twin_length(),
        ExtremalStat::Bt => exact_block_twins(p).length,
        ExtremalStat::TtMax => tight_twins_scan(p).max_length,
    }
}

/// True iff `entries` is the lexicographic minimum of its orbit under the
/// group generated by `syms`.
fn is_orbit_min(entries: &[u32], syms: &[Symmetry]) -> bool {
    let mut orbit: Vec<Vec<u32>> = vec![entries.to_vec()];
    let mut i = 0;
    while i < orbit.len() {
        let q = Permutation::new(orbit[i].clone()).expect("orbit member is a permutation");
        for &s in syms {
            let image = apply_symmetry(&q, s).as_slice().to_vec();
            if image.as_slice() < entries {
                return false;
            }
            if !orbit.iter().any(|o| *o == image) {
                orbit.push(image);
            }
        }
        i += 1;
    }
    true
}

/// Minimum of `stat` over all permutations of [n], with the least witness.
///
/// With `symmetry_reduction` only orbit-minimal permutations are evaluated:
/// t is invariant under reverse, complement, and inverse, while bt and tt
/// survive only reverse and complement (inverting a permutation does not
/// keep windows contiguous). The reduced run returns the same value and the
/// same witness as the full run, because the least permutation attaining
/// the minimum is itself orbit-minimal.
pub fn extremal_search(
    n: usize,
    stat: ExtremalStat,
    symmetry_reduction: bool,
) -> Result<ExtremalResult, ExactError> {
    let limit = extremal_limit(stat);
    if n > limit {
        return Err(ExactError::ExtremalTooLarge { stat, n, limit });
    }
    if n == 0 {
        return Ok(ExtremalResult {
            value: 0,
            witness: Permutation::new(Vec::new()).expect("empty permutation"),
            examined: 1,
        });
    }
    let syms: &[Symmetry] = match stat {
        ExtremalStat::T => &[Symmetry::Reverse, Symmetry::Complement, Symmetry::Inverse],
        ExtremalStat::Bt | ExtremalStat::TtMax => &[Symmetry::Reverse, Symmetry::Complement],
    };
    // One chunk per leading value; chunk-local minima merge in order, which
    // reproduces the sequential lexicographic scan exactly.
    let chunks: Vec<(usize, Option<Vec<u32>>, u64)> = (1..=n as u32)
        .into_par_iter()
        .map(|lead| {
            let mut arr: Vec<u32> = Vec::with_capacity(n);
            arr.push(lead);
            arr.extend((1..=n as u32).filter(|&v| v != lead));
            let mut best_val = usize::MAX;
            let mut best_wit: Option<Vec<u32>> = None;
            let mut examined = 0u64;
            loop {
                if !symmetry_reduction || is_orbit_min(&arr, syms) {
                    examined += 1;
                    let p = Permutation::new(arr.clone()).expect("enumeration yields permutations");
                    let v = eval_stat(&p, stat);
                    if v < best_val {
                        best_val = v;
                        best_wit = Some(arr.clone());
                    }
                }
                if !next_permutation(&mut arr[1..]) {
                    break;
                }
            }
            (best_val, best_wit, examined)
        })
        .collect();
    let mut value = usize::MAX;
    let mut witness: Option<Vec<u32>> = None;
    let mut examined = 0u64;
    for (v, w, e) in chunks {
        examined += e;
        if v < value {
            value = v;
            witness = w;
        }
    }
    let witness = witness.expect("at least one permutation was evaluated");
    Ok(ExtremalResult {
        value,
        witness: Permutation::new(witness).expect("witness is a permutation"),
        examined,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::{all_permutations, verify_twin_pair};
    use crate::rng::random_permutation;

    fn example() -> Permutation {
        Permutation::parse("6 1 4 7 3 9 8 2 5").unwrap()
    }

    fn perm(text: &str) -> Permutation {
        Permutation::parse(text).unwrap()
    }

    #[test]
    fn worked_examples() {
        let out = exact_twins(&perm("1 2 3 4"), None).unwrap();
        assert_eq!(
            out,
            ExactOutcome::Optimal {
                length: 2,
                pair: TwinPair {
                    first: vec![1, 4],
                    second: vec![2, 3],
                },
            }
        );

        let out = exact_twins(&perm("2 1"), None).unwrap();
        assert_eq!(out.twin_length(), 1);
        assert_eq!(out.pair().first, vec![1]);
        assert_eq!(out.pair().second, vec![2]);

        let out = exact_twins(&example(), None).unwrap();
        let oracle = oracle_twins_3color(&example()).unwrap();
        assert!(out.is_optimal());
        assert_eq!(out.twin_length(), oracle);
        assert!(out.twin_length() >= 3);
        assert_eq!(verify_twin_pair(&example(), out.pair()), Ok(true));
    }

    #[test]
    fn oracle_examples() {
        assert_eq!(oracle_twins_3color(&perm("1 2 3 4")).unwrap(), 2);
        assert_eq!(oracle_twins_3color(&perm("1")).unwrap(), 0);
        assert_eq!(
            oracle_twins_3color(&Permutation::new(vec![]).unwrap()).unwrap(),
            0
        );
        assert_eq!(
            oracle_twins_3color(&Permutation::identity(11)),
            Err(ExactError::OracleTooLarge { n: 11, limit: 10 })
        );
    }

    #[test]
    fn oracle_equivalence_exhaustive_small() {
        for n in 2..=6 {
            for p in all_permutations(n) {
                let exact = exact_twins(&p, None).unwrap();
                assert!(exact.is_optimal());
                assert_eq!(
                    exact.twin_length(),
                    oracle_twins_3color(&p).unwrap(),
                    "mismatch on {}",
                    p.to_line()
                );
                assert_eq!(verify_twin_pair(&p, exact.pair()), Ok(true));
            }
        }
    }

    #[test]
    fn oracle_equivalence_random() {
        for n in [8usize, 9, 10] {
            for trial in 0..30 {
                let p = random_permutation(n, 1000 * n as u64 + trial);
                let exact = exact_twins(&p, None).unwrap();
                assert_eq!(exact.twin_length(), oracle_twins_3color(&p).unwrap());
            }
        }
    }

    #[test]
    fn monotone_split_lower_bound() {
        use crate::monotone::longest_monotone;
        for trial in 0..50 {
            let p = random_permutation(14, 7000 + trial);
            let out = exact_twins(&p, None).unwrap();
            assert!(out.twin_length() >= longest_monotone(&p).length / 2);
        }
    }

    #[test]
    fn budget_and_limits() {
        assert_eq!(
            exact_twins(&Permutation::identity(17), None),
            Err(ExactError::NeedsBudget { n: 17, limit: 16 })
        );
        assert_eq!(
            exact_twins(&Permutation::identity(65), Some(1000)),
            Err(ExactError::HostTooLarge { n: 65, limit: 64 })
        );

        let p = random_permutation(20, 11);
        let starved = exact_twins(&p, Some(100)).unwrap();
        match &starved {
            ExactOutcome::BestSoFar {
                length,
                upper,
                pair,
            } => {
                assert_eq!(*upper, 10);
                assert_eq!(*length, pair.len());
                assert!(*length <= *upper);
                assert_eq!(verify_twin_pair(&p, pair), Ok(true));
            }
            other => panic!("expected BestSoFar, got {other:?}"),
        }

        let solved = exact_twins(&p, Some(1_000_000_000)).unwrap();
        assert!(solved.is_optimal());
        assert!(solved.twin_length() >= starved.twin_length());
        assert_eq!(verify_twin_pair(&p, solved.pair()), Ok(true));
    }

    #[test]
    fn contains_pattern_examples() {
        assert!(contains_pattern(&example(), &perm("1 3 2")));
        assert!(!contains_pattern(&perm("3 2 1"), &perm("1 2")));
        assert!(contains_pattern(&perm("3 2 1"), &perm("3 2 1")));
        assert!(contains_pattern(
            &perm("2 1"),
            &Permutation::new(vec![]).unwrap()
        ));
        assert!(!contains_pattern(&perm("2 1"), &perm("1 2 3")));
        assert!(!contains_pattern(&perm("1 2 3 4 5 6"), &perm("2 1")));
        // Every 3-pattern sits inside a long enough random-looking host.
        let host = perm("6 1 4 7 3 9 8 2 5");
        for tau in all_permutations(3) {
            assert!(contains_pattern(&host, &tau), "missing {}", tau.to_line());
        }
    }

    #[test]
    fn contains_pattern_matches_brute_force() {
        for trial in 0..60 {
            let host = random_permutation(9, 400 + trial);
            for tau in all_permutations(4) {
                let brute = brute_contains(&host, &tau);
                assert_eq!(contains_pattern(&host, &tau), brute);
            }
        }
    }

    fn brute_contains(host: &Permutation, tau: &Permutation) -> bool {
        let n = host.len();
        let m = tau.len();
        let hv = host.as_slice();
        let tv = tau.as_slice();
        (0u32..1 << n).any(|mask| {
            if mask.count_ones() as usize != m {
                return false;
            }
            let vals: Vec<u32> = (0..n).filter(|&i| mask & (1 << i) != 0).map(|i| hv[i]).collect();
            is_similar(&vals, tv)
        })
    }

    #[test]
    fn avoiding_examples() {
        let out = exact_twins_avoiding(&perm("1 2 3 4 5 6"), &perm("1 2"), None).unwrap();
        assert_eq!(out.twin_length(), 1);
        assert_eq!(out.pair().first, vec![1]);
        assert_eq!(out.pair().second, vec![2]);

        let out = exact_twins_avoiding(&perm("6 5 4 3 2 1"), &perm("2 1"), None).unwrap();
        assert_eq!(out.twin_length(), 1);

        // Forbidding the singleton pattern forbids every nonempty twin.
        let out = exact_twins_avoiding(&example(), &perm("1"), None).unwrap();
        assert_eq!(out.twin_length(), 0);
        assert!(out.pair().is_empty());

        assert_eq!(
            exact_twins_avoiding(&example(), &Permutation::new(vec![]).unwrap(), None),
            Err(ExactError::EmptyPattern)
        );

        let out = exact_twins_avoiding(&example(), &perm("1 3 2"), None).unwrap();
        assert_eq!(out.twin_length(), oracle_avoiding(&example(), &perm("1 3 2")));
        assert_eq!(verify_twin_pair(&example(), out.pair()), Ok(true));
    }

    fn oracle_avoiding(p: &Permutation, tau: &Permutation) -> usize {
        let n = p.len();
        let vals = p.as_slice();
        let mut best = 0usize;
        for code in 0..3usize.pow(n as u32) {
            let mut c = code;
            let mut f = Vec::new();
            let mut s = Vec::new();
            for &v in vals.iter().take(n) {
                match c % 3 {
                    1 => f.push(v),
                    2 => s.push(v),
                    _ => {}
                }
                c /= 3;
            }
            if f.len() == s.len() && f.len() > best && is_similar(&f, &s) {
                let key = pattern_key(&f).unwrap();
                let pattern = Permutation::new(key.0).unwrap();
                if !contains_pattern(&pattern, tau) {
                    best = f.len();
                }
            }
        }
        best
    }

    #[test]
    fn avoiding_matches_filtered_oracle_exhaustively() {
        let taus = [perm("1 2"), perm("2 1"), perm("1 3 2")];
        for n in 2..=5 {
            for p in all_permutations(n) {
                let plain = exact_twins(&p, None).unwrap().twin_length();
                for tau in &taus {
                    let got = exact_twins_avoiding(&p, tau, None).unwrap();
                    assert_eq!(got.twin_length(), oracle_avoiding(&p, tau));
                    assert!(got.twin_length() <= plain);
                }
            }
        }
    }

    #[test]
    fn block_twins_examples() {
        assert_eq!(
            exact_block_twins(&perm("6 5 2 3 8 9 7 1 4")),
            BlockTwinResult {
                length: 4,
                starts: Some((1, 6)),
            }
        );
        assert_eq!(
            exact_block_twins(&perm("1 2 3 4")),
            BlockTwinResult {
                length: 2,
                starts: Some((1, 3)),
            }
        );
        assert_eq!(
            exact_block_twins(&perm("2 1")),
            BlockTwinResult {
                length: 1,
                starts: Some((1, 2)),
            }
        );
        assert_eq!(
            exact_block_twins(&perm("1")),
            BlockTwinResult {
                length: 0,
                starts: None,
            }
        );
    }

    fn block_oracle(p: &Permutation) -> BlockTwinResult {
        let n = p.len();
        let vals = p.as_slice();
        for k in (1..=n / 2).rev() {
            for i in 0..=n - 2 * k {
                for j in i + k..=n - k {
                    if is_similar(&vals[i..i + k], &vals[j..j + k]) {
                        return BlockTwinResult {
                            length: k,
                            starts: Some((i as u32 + 1, j as u32 + 1)),
                        };
                    }
                }
            }
        }
        BlockTwinResult {
            length: 0,
            starts: None,
        }
    }

    #[test]
    fn block_twins_match_window_oracle() {
        for n in [2usize, 3, 5, 8, 12, 14] {
            for trial in 0..40 {
                let p = random_permutation(n, 900 + 100 * n as u64 + trial);
                let got = exact_block_twins(&p);
                assert_eq!(got, block_oracle(&p), "host {}", p.to_line());
                let (i, j) = got.starts.unwrap();
                let (i, j, k) = (i as usize - 1, j as usize - 1, got.length);
                assert!(j >= i + k);
                assert!(is_similar(
                    &p.as_slice()[i..i + k],
                    &p.as_slice()[j..j + k]
                ));
            }
        }
    }

    #[test]
    fn extremal_small_cases() {
        let r = extremal_search(2, ExtremalStat::T, false).unwrap();
        assert_eq!(r.value, 1);
        assert_eq!(r.witness, perm("1 2"));
        assert_eq!(r.examined, 2);

        // Independent minimum via the oracle.
        let brute = all_permutations(5)
            .map(|p| oracle_twins_3color(&p).unwrap())
            .min()
            .unwrap();
        let r = extremal_search(5, ExtremalStat::T, false).unwrap();
        assert_eq!(r.value, brute);
        assert_eq!(eval_stat(&r.witness, ExtremalStat::T), r.value);

        let r = extremal_search(6, ExtremalStat::TtMax, false).unwrap();
        assert!(r.value >= 2);

        assert!(matches!(
            extremal_search(10, ExtremalStat::T, false),
            Err(ExactError::ExtremalTooLarge { .. })
        ));
        assert!(matches!(
            extremal_search(9, ExtremalStat::TtMax, true),
            Err(ExactError::ExtremalTooLarge { .. })
        ));
        assert!(matches!(
            extremal_search(11, ExtremalStat::Bt, false),
            Err(ExactError::ExtremalTooLarge { .. })
        ));
    }

    #[test]
    fn symmetry_reduction_is_lossless() {
        for stat in [ExtremalStat::T, ExtremalStat::Bt, ExtremalStat::TtMax] {
            for n in 1..=6 {
                let full = extremal_search(n, stat, false).unwrap();
                let reduced = extremal_search(n, stat, true).unwrap();
                assert_eq!(full.value, reduced.value, "stat {stat} n {n}");
                assert_eq!(full.witness, reduced.witness, "stat {stat} n {n}");
                assert!(reduced.examined <= full.examined);
            }
        }
    }
}
