//! Tools for finding and certifying *twins* in permutations.
//!
//! Twins are a pair of disjoint subsequences of a permutation that are
//! order-isomorphic to each other. This crate bundles everything needed to
//! study them at desk scale:
//!
//! - [`perm`]: permutation parsing, pattern keys, symmetries, seeded shuffles.
//! - [`monotone`]: longest increasing/decreasing subsequence with witnesses.
//! - [`exact`]: exhaustive solvers for twins, block twins, and
//!   pattern-avoiding twins, plus a brute-force coloring oracle.
//! - [`tight`]: twins that jointly occupy a contiguous window.
//! - [`heur`]: scalable heuristics (monotone splitting and block-graph
//!   matchings) with proven lower-bound guarantees.
//! - [`cert`]: numeric certificates (first-moment bounds, exact block-overlap
//!   probabilities, local-lemma conditions) evaluated with directed rounding.
//! - [`experiments`]: a seeded, reproducible Monte Carlo harness.
//!
//! All externally visible indices are one-based; a witness always refers to
//! positions of the host permutation, never to values.

pub mod cert;
pub mod exact;
pub mod experiments;
pub mod heur;
pub mod monotone;
pub mod perm;
pub mod rng;
pub mod tight;

pub use exact::{exact_block_twins, exact_twins, oracle_twins_3color, ExactOutcome};
pub use heur::{build_block_graph, es_split_twins, matching_twins, MatchingStrategy};
pub use perm::{pattern_key, verify_twin_pair, PatternKey, PermError, Permutation, TwinPair};
pub use tight::{tight_twins_scan, tight_window_split, TightScanReport};
