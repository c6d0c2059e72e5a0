//! `nlab`: a laboratory for digit streams.
//!
//! The crate builds, transforms, and measures long digit streams over a fixed
//! base-`b` alphabet:
//!
//! - [`shiftspace`] — alphabets, product (Bernoulli) measures on digit
//!   strings, cylinder patterns, block recoding between `D^∞` and `(D^k)^∞`,
//!   and wildcard ("starred") block patterns with their measures.
//! - [`generators`] — deterministic and seeded stream constructions:
//!   Champernowne concatenation, i.i.d. sampling, stage concatenation,
//!   digit duplication, zero filling, and the parity-perturbed block point
//!   that is non-normal yet normal along thin periodic selections.
//! - [`selectors`] — increasing index sequences (arithmetic progressions,
//!   periodic residue sets, eventually periodic sets, explicit lists),
//!   subsequence selection, densities, and the block-thickness check.
//! - [`analyze`] — single-pass frequency counting of every pattern up to a
//!   length bound, discrepancy against a target measure, block-aligned
//!   starred-pattern counting, and heuristic normality verdicts with
//!   convergence curves.
//! - [`cli`] — the `nlab` command line: stream files, report files, and the
//!   end-to-end verification recipes.
//!
//! Empirical frequencies use start-position counting: the occurrence count of
//! a length-`k` pattern at horizon `N` is the number of start positions in
//! `1..=N` (1-based) where the pattern matches, with `k-1` digits of
//! read-ahead past `N` so late-starting occurrences are resolved. All
//! counters are exact integers.

pub mod analyze;
pub mod cli;
mod error;
pub mod generators;
pub mod selectors;
pub mod shiftspace;

pub use error::{Error, Result};

/// Exact rational used wherever the crate promises exact arithmetic.
pub type Rational = num::BigRational;
