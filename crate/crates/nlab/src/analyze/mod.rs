//! Streaming frequency analysis.
//!
//! Occurrences are counted by start position: at horizon `N`, the count of a
//! length-`j` pattern is the number of positions `p ∈ 1..=N` where the
//! pattern occupies `p..p+j-1`. The counter reads `max_len - 1` digits past
//! `N` so late-starting occurrences are complete; with that convention the
//! counts of every fixed length sum to exactly `N`.
//!
//! Counting is a single pass with a rolling base-`b` window code. When the
//! stream ends before `N + max_len - 1` digits, the horizon shrinks to the
//! largest `N'` every pattern length supports and the report is marked
//! truncated; a tail ring buffer makes the shrunken counts exact without a
//! second pass.

mod crosscheck;
mod starred_count;
mod verdict;

pub use crosscheck::{block_view_crosscheck, wall_matrix, CrosscheckOutcome, WallCell};
pub use starred_count::{count_starred_aligned, StarredCount};
pub use verdict::{
    default_schedule, normality_verdict, DiscrepancyCurve, TauPolicy, Verdict, VerdictRun,
};

use crate::shiftspace::{BernoulliMeasure, BlockCode, DigitSequence, Pattern};
use crate::{Error, Result};
use rayon::prelude::*;

/// Cap on the dense pattern table, in entries (`Σ_{j≤k} b^j`).
#[derive(Debug, Clone, Copy)]
pub struct MemoryBudget {
    pub max_table_entries: u64,
}

impl Default for MemoryBudget {
    fn default() -> Self {
        MemoryBudget {
            max_table_entries: 1 << 24,
        }
    }
}

impl MemoryBudget {
    fn check(&self, base: u32, max_len: u32) -> Result<()> {
        let mut total: u64 = 0;
        let mut pow: u64 = 1;
        for _ in 0..max_len {
            pow = pow.saturating_mul(base as u64);
            total = total.saturating_add(pow);
            if total > self.max_table_entries {
                return Err(Error::BudgetExceeded {
                    needed: total,
                    budget: self.max_table_entries,
                });
            }
        }
        Ok(())
    }
}

/// Raw per-pattern occurrence counts, exact integers. `counts[j-1]` is the
/// dense table for length `j`, indexed by the row-major pattern code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawCounts {
    pub base: u32,
    pub max_len: u32,
    pub requested_n: u64,
    pub n: u64,
    pub truncated: bool,
    pub counts: Vec<Vec<u64>>,
}

impl RawCounts {
    pub fn count_of(&self, digits: &[u32]) -> u64 {
        let j = digits.len();
        let mut code: u64 = 0;
        for &d in digits {
            code = code * self.base as u64 + d as u64;
        }
        self.counts[j - 1][code as usize]
    }

    fn merge(mut self, other: &RawCounts) -> RawCounts {
        debug_assert_eq!(self.base, other.base);
        debug_assert_eq!(self.max_len, other.max_len);
        self.requested_n += other.requested_n;
        self.n += other.n;
        self.truncated |= other.truncated;
        for (mine, theirs) in self.counts.iter_mut().zip(&other.counts) {
            for (a, b) in mine.iter_mut().zip(theirs) {
                *a += b;
            }
        }
        self
    }
}

/// Single-pass occurrence counting over an arbitrary digit iterator.
pub fn count_stream(
    digits: impl Iterator<Item = u32>,
    base: u32,
    n: u64,
    max_len: u32,
) -> RawCounts {
    let k = max_len as u64;
    let b = base as u64;
    let pows: Vec<u64> = (0..=max_len).map(|j| b.pow(j)).collect();
    let mut counts: Vec<Vec<u64>> = (1..=max_len)
        .map(|j| vec![0u64; pows[j as usize] as usize])
        .collect();

    let mut window: u64 = 0;
    let top = pows[max_len as usize];
    // Ring of the last `k` digits, for the truncation fixup.
    let mut ring = vec![0u32; max_len as usize];
    let mut read: u64 = 0;

    let want = n + k - 1;
    for d in digits {
        read += 1;
        ring[((read - 1) % k) as usize] = d;
        window = (window * b + d as u64) % top;
        let e = read;
        for j in 1..=k {
            if e >= j && e - j < n {
                let code = window % pows[j as usize];
                counts[(j - 1) as usize][code as usize] += 1;
            }
        }
        if read == want {
            break;
        }
    }

    if read == want {
        return RawCounts {
            base,
            max_len,
            requested_n: n,
            n,
            truncated: false,
            counts,
        };
    }

    // The stream ended after `read < n + k - 1` digits. Shrink the horizon to
    // the largest start position every length supports and remove windows
    // already counted past it; all of them live in the tail ring.
    let m = read;
    let n_eff = if m >= k { (m - k + 1).min(n) } else { 0 };
    for j in 1..=k {
        let counted = if m >= j { (m - j + 1).min(n) } else { 0 };
        for s in (n_eff + 1)..=counted {
            let mut code: u64 = 0;
            for p in s..s + j {
                code = code * b + ring[((p - 1) % k) as usize] as u64;
            }
            counts[(j - 1) as usize][code as usize] -= 1;
        }
    }
    RawCounts {
        base,
        max_len,
        requested_n: n,
        n: n_eff,
        truncated: true,
        counts,
    }
}

/// Counts over a materialized slice; identical to [`count_stream`] on the
/// same digits.
pub fn count_slice(digits: &[u32], base: u32, n: u64, max_len: u32) -> RawCounts {
    count_stream(digits.iter().copied(), base, n, max_len)
}

/// Chunked counting: start positions `1..=n` are split into consecutive
/// ranges of the given sizes (the last range absorbs any remainder), each
/// range is counted against the shared slice with `max_len - 1` digits of
/// read-ahead, and the integer tables are summed. Bit-identical to
/// [`count_slice`] for every choice of chunk sizes.
pub fn count_chunked(
    digits: &[u32],
    base: u32,
    n: u64,
    max_len: u32,
    chunk_sizes: &[u64],
) -> RawCounts {
    let ranges = chunk_ranges(n, chunk_sizes);
    ranges
        .into_iter()
        .map(|(lo, hi)| count_chunk(digits, base, max_len, lo, hi))
        .reduce(|a, b| a.merge(&b))
        .unwrap_or_else(|| count_slice(digits, base, 0, max_len))
}

/// Rayon-parallel variant of [`count_chunked`] with uniform chunk length.
/// Merging is integer addition, so the result is identical to sequential
/// counting.
pub fn count_parallel(
    digits: &[u32],
    base: u32,
    n: u64,
    max_len: u32,
    chunk_len: u64,
) -> RawCounts {
    let chunk_len = chunk_len.max(1);
    let sizes: Vec<u64> = (0..n / chunk_len)
        .map(|_| chunk_len)
        .chain((!n.is_multiple_of(chunk_len)).then_some(n % chunk_len))
        .collect();
    let ranges = chunk_ranges(n, &sizes);
    ranges
        .into_par_iter()
        .map(|(lo, hi)| count_chunk(digits, base, max_len, lo, hi))
        .reduce_with(|a, b| a.merge(&b))
        .unwrap_or_else(|| count_slice(digits, base, 0, max_len))
}

fn chunk_ranges(n: u64, chunk_sizes: &[u64]) -> Vec<(u64, u64)> {
    let mut ranges = Vec::new();
    let mut lo = 1u64;
    for &size in chunk_sizes {
        if lo > n || size == 0 {
            continue;
        }
        let hi = (lo + size - 1).min(n);
        ranges.push((lo, hi));
        lo = hi + 1;
    }
    if lo <= n {
        ranges.push((lo, n));
    }
    ranges
}

/// Counts windows starting in `lo..=hi` (1-based positions of the full
/// stream) by feeding the sub-slice with read-ahead into [`count_stream`].
fn count_chunk(digits: &[u32], base: u32, max_len: u32, lo: u64, hi: u64) -> RawCounts {
    let local_n = hi - lo + 1;
    let start = (lo - 1) as usize;
    let end = ((hi as usize) + max_len as usize - 1).min(digits.len());
    let slice = &digits[start.min(digits.len())..end];
    count_stream(slice.iter().copied(), base, local_n, max_len)
}

/// One report row: a pattern, its exact count, and the float summaries.
#[derive(Debug, Clone)]
pub struct ReportRow {
    pub length: u32,
    pub pattern: Pattern,
    pub count: u64,
    pub empirical: f64,
    pub expected: f64,
    pub deviation: f64,
}

/// Frequencies of every pattern of length `1..=max_len` at one horizon,
/// with deviations against a target measure.
#[derive(Debug, Clone)]
pub struct FrequencyReport {
    pub base: u32,
    pub max_len: u32,
    pub requested_n: u64,
    /// Effective horizon; below `requested_n` only when the stream ran out.
    pub n: u64,
    pub truncated: bool,
    pub rows: Vec<ReportRow>,
    /// Max `|deviation|` over all rows.
    pub discrepancy: f64,
}

impl FrequencyReport {
    pub fn from_raw(raw: &RawCounts, measure: &BernoulliMeasure) -> Result<Self> {
        if measure.alphabet().base() != raw.base {
            return Err(Error::BaseMismatch(format!(
                "measure base {} vs stream base {}",
                measure.alphabet().base(),
                raw.base
            )));
        }
        let mut rows = Vec::new();
        let mut discrepancy = 0.0f64;
        for j in 1..=raw.max_len {
            let code = BlockCode::new(raw.base, j)?;
            for c in 0..code.block_count() {
                let pattern = Pattern::new(code.decode(c))?;
                let count = raw.counts[(j - 1) as usize][c as usize];
                let empirical = if raw.n > 0 {
                    count as f64 / raw.n as f64
                } else {
                    0.0
                };
                let expected = measure.cylinder_measure(&pattern)?;
                let deviation = empirical - expected;
                discrepancy = discrepancy.max(deviation.abs());
                rows.push(ReportRow {
                    length: j,
                    pattern,
                    count,
                    empirical,
                    expected,
                    deviation,
                });
            }
        }
        Ok(FrequencyReport {
            base: raw.base,
            max_len: raw.max_len,
            requested_n: raw.requested_n,
            n: raw.n,
            truncated: raw.truncated,
            rows,
            discrepancy,
        })
    }

    /// Max `|deviation|` over the rows of one fixed length.
    pub fn discrepancy_at_length(&self, length: u32) -> f64 {
        self.rows
            .iter()
            .filter(|r| r.length == length)
            .map(|r| r.deviation.abs())
            .fold(0.0, f64::max)
    }

    pub fn row(&self, digits: &[u32]) -> Option<&ReportRow> {
        self.rows
            .iter()
            .find(|r| r.pattern.digits() == digits)
    }
}

/// Counts every pattern of length `1..=max_len` over the next
/// `n + max_len - 1` digits of `seq` and summarizes against `measure`.
pub fn count_patterns(
    seq: &mut DigitSequence,
    n: u64,
    max_len: u32,
    measure: &BernoulliMeasure,
    budget: &MemoryBudget,
) -> Result<FrequencyReport> {
    if n < 1 || max_len < 1 {
        return Err(Error::InvalidParameter(
            "horizon and pattern length must be >= 1".into(),
        ));
    }
    if measure.alphabet() != seq.alphabet() {
        return Err(Error::BaseMismatch(format!(
            "measure base {} vs stream base {}",
            measure.alphabet().base(),
            seq.alphabet().base()
        )));
    }
    budget.check(seq.alphabet().base(), max_len)?;
    let base = seq.alphabet().base();
    let raw = count_stream(seq.by_ref(), base, n, max_len);
    FrequencyReport::from_raw(&raw, measure)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shiftspace::Alphabet;

    fn seq(base: u32, v: Vec<u32>) -> DigitSequence {
        DigitSequence::from_digits(Alphabet::new(base).unwrap(), v).unwrap()
    }

    fn uniform(base: u32) -> BernoulliMeasure {
        BernoulliMeasure::uniform(Alphabet::new(base).unwrap())
    }

    #[test]
    fn alternating_word() {
        let v: Vec<u32> = (0..102).map(|i| i % 2).collect();
        let mut s = seq(2, v);
        let report =
            count_patterns(&mut s, 100, 2, &uniform(2), &MemoryBudget::default()).unwrap();
        assert!(!report.truncated);
        assert_eq!(report.row(&[0]).unwrap().count, 50);
        assert_eq!(report.row(&[0, 1]).unwrap().count, 50);
        assert_eq!(report.row(&[0, 0]).unwrap().count, 0);
        assert_eq!(report.row(&[1, 0]).unwrap().count, 50);
        // Discrepancy: pattern [0,0] has frequency 0 against expected 1/4.
        assert_eq!(report.discrepancy, 0.25);
    }

    #[test]
    fn all_zeros() {
        let mut s = seq(2, vec![0; 1000]);
        let report =
            count_patterns(&mut s, 1000, 1, &uniform(2), &MemoryBudget::default()).unwrap();
        assert_eq!(report.row(&[0]).unwrap().empirical, 1.0);
        assert_eq!(report.row(&[1]).unwrap().empirical, 0.0);
        assert_eq!(report.discrepancy, 0.5);
    }

    #[test]
    fn conservation_and_marginalization() {
        // Pseudo-random fixed stream; counts of each length sum to n and
        // shorter counts marginalize longer ones.
        let v: Vec<u32> = (0u64..5000)
            .map(|i| ((i * 2654435761) >> 7) as u32 % 3)
            .collect();
        let n = 4000u64;
        let raw = count_slice(&v, 3, n, 4);
        for j in 1..=4u32 {
            let total: u64 = raw.counts[(j - 1) as usize].iter().sum();
            assert_eq!(total, n, "length {j}");
        }
        for j in 1..4u32 {
            let code = BlockCode::new(3, j).unwrap();
            for c in 0..code.block_count() {
                let short = raw.counts[(j - 1) as usize][c as usize];
                let longer: u64 = (0..3u64)
                    .map(|d| raw.counts[j as usize][(c as u64 * 3 + d) as usize])
                    .sum();
                assert_eq!(short, longer, "marginalization at length {j} code {c}");
            }
        }
    }

    #[test]
    fn truncated_stream_keeps_conservation() {
        // 10 digits, horizon 9 wanted with max_len 3 needs 11; the effective
        // horizon shrinks to 8 and every length still sums to it.
        let v: Vec<u32> = vec![0, 1, 1, 0, 1, 0, 0, 1, 1, 0];
        let raw = count_slice(&v, 2, 9, 3);
        assert!(raw.truncated);
        assert_eq!(raw.n, 8);
        for j in 1..=3u32 {
            let total: u64 = raw.counts[(j - 1) as usize].iter().sum();
            assert_eq!(total, 8, "length {j}");
        }
        // Against direct counting on the fixed word.
        let count_011 = (1..=8)
            .filter(|&p| v[p - 1..p + 2] == [0, 1, 1])
            .count() as u64;
        assert_eq!(raw.count_of(&[0, 1, 1]), count_011);
    }

    #[test]
    fn stream_shorter_than_patterns() {
        let raw = count_slice(&[1, 0], 2, 10, 3);
        assert!(raw.truncated);
        assert_eq!(raw.n, 0);
        for j in 1..=3u32 {
            assert_eq!(raw.counts[(j - 1) as usize].iter().sum::<u64>(), 0);
        }
    }

    #[test]
    fn chunked_equals_sequential() {
        let v: Vec<u32> = (0u64..3000)
            .map(|i| ((i.wrapping_mul(0x9E3779B97F4A7C15)) >> 33) as u32 % 2)
            .collect();
        let n = 2500u64;
        let sequential = count_slice(&v, 2, n, 3);
        for sizes in [
            vec![2500],
            vec![100, 400, 2000],
            vec![3, 3, 3, 1000, 1491],
            vec![1250, 1250],
        ] {
            let chunked = count_chunked(&v, 2, n, 3, &sizes);
            assert_eq!(chunked, sequential, "sizes {sizes:?}");
        }
        let parallel = count_parallel(&v, 2, n, 3, 377);
        assert_eq!(parallel, sequential);
    }

    #[test]
    fn periodic_word_matches_one_period_enumeration() {
        // Exact oracle: on a periodic word, the count at a horizon that is a
        // whole number of periods equals (occurrences in one period of the
        // infinite word) x (number of periods).
        let period: Vec<u32> = vec![2, 0, 1, 1, 0];
        let p = period.len() as u64;
        let reps = 40u64;
        let n = p * reps;
        let k = 3u32;
        let digits: Vec<u32> = period
            .iter()
            .cycle()
            .take((n + k as u64 - 1) as usize)
            .copied()
            .collect();
        let raw = count_slice(&digits, 3, n, k);
        // One-period enumeration with wraparound.
        let code = BlockCode::new(3, k).unwrap();
        for c in 0..code.block_count() {
            let pat = code.decode(c);
            let per_period = (0..p)
                .filter(|&s| {
                    (0..k as u64).all(|i| period[((s + i) % p) as usize] == pat[i as usize])
                })
                .count() as u64;
            assert_eq!(
                raw.counts[(k - 1) as usize][c as usize],
                per_period * reps,
                "pattern {pat:?}"
            );
        }
    }

    #[test]
    fn budget_rejects_oversized_tables() {
        let budget = MemoryBudget {
            max_table_entries: 100,
        };
        let mut s = seq(10, (0..10).collect());
        assert!(matches!(
            count_patterns(&mut s, 5, 3, &uniform(10), &budget),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn base_mismatch_rejected() {
        let mut s = seq(2, vec![0, 1]);
        assert!(matches!(
            count_patterns(&mut s, 2, 1, &uniform(3), &MemoryBudget::default()),
            Err(Error::BaseMismatch(_))
        ));
    }
}
