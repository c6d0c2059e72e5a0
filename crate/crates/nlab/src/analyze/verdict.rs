//! Heuristic normality verdicts from discrepancy trajectories.
//!
//! No finite horizon decides normality; the verdict here is an explicitly
//! heuristic classification. A stream is reported as a non-normality witness
//! when some pattern's deviation exceeds its tolerance at the final
//! checkpoint AND the discrepancy curve has not decreased by at least 25%
//! since the mid-schedule checkpoint; otherwise the stream is "consistent
//! with normal". The shrink test runs on the aggregate curve: slowly
//! converging constructions (Champernowne-style concatenations have
//! discrepancy falling like 1/log N) sit well above any fixed tolerance at
//! feasible horizons, but their curve falls, while the counterexample
//! streams hold a flat deviation an order of magnitude above it. Reports
//! carry the full checkpoint curve so the convergence can be judged
//! directly.

use super::{count_slice, FrequencyReport, MemoryBudget};
use crate::shiftspace::{BernoulliMeasure, DigitSequence, Pattern};
use crate::{Error, Result};

/// Per-pattern deviation tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TauPolicy {
    /// One tolerance for every pattern.
    Flat(f64),
    /// `max(floor, scale · sqrt(expected·(1-expected) / N_final))` — the
    /// binomial standard deviation of the pattern count, scaled.
    Adaptive { scale: f64, floor: f64 },
}

impl Default for TauPolicy {
    fn default() -> Self {
        TauPolicy::Adaptive {
            scale: 4.0,
            floor: 1e-3,
        }
    }
}

impl TauPolicy {
    pub fn tau(&self, expected: f64, n_final: u64) -> f64 {
        match *self {
            TauPolicy::Flat(t) => t,
            TauPolicy::Adaptive { scale, floor } => {
                let sigma = (expected * (1.0 - expected) / n_final.max(1) as f64).sqrt();
                (scale * sigma).max(floor)
            }
        }
    }
}

/// Discrepancy at each checkpoint horizon, strictly increasing in `N`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscrepancyCurve {
    pub points: Vec<(u64, f64)>,
}

/// Outcome of the heuristic test.
#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    ConsistentWithNormal,
    NonNormalWitness {
        pattern: Pattern,
        deviation: f64,
        horizon: u64,
    },
}

impl Verdict {
    pub fn is_consistent(&self) -> bool {
        matches!(self, Verdict::ConsistentWithNormal)
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::ConsistentWithNormal => write!(f, "consistent-with-normal"),
            Verdict::NonNormalWitness {
                pattern,
                deviation,
                horizon,
            } => write!(
                f,
                "non-normal-witness(pattern={pattern}, deviation={deviation:.6}, N={horizon})"
            ),
        }
    }
}

/// Geometric checkpoint schedule `N/1000, N/100, N/10, N` (deduplicated,
/// zero horizons dropped).
pub fn default_schedule(n: u64) -> Vec<u64> {
    let mut points: Vec<u64> = [n / 1000, n / 100, n / 10, n]
        .into_iter()
        .filter(|&x| x > 0)
        .collect();
    points.dedup();
    points
}

/// Verdict, curve, and the final checkpoint's full report.
#[derive(Debug, Clone)]
pub struct VerdictRun {
    pub verdict: Verdict,
    pub curve: DiscrepancyCurve,
    pub final_report: FrequencyReport,
}

/// The full verdict computation: counts at every checkpoint of `schedule`
/// (ascending), compares final deviations against the tolerance policy and
/// against the mid-schedule checkpoint, and returns the verdict, the
/// discrepancy curve, and the final report.
pub fn normality_verdict(
    seq: &mut DigitSequence,
    measure: &BernoulliMeasure,
    max_len: u32,
    schedule: &[u64],
    tau: &TauPolicy,
    budget: &MemoryBudget,
) -> Result<VerdictRun> {
    if schedule.is_empty() {
        return Err(Error::InvalidParameter("schedule must be nonempty".into()));
    }
    if schedule.windows(2).any(|w| w[0] >= w[1]) || schedule[0] == 0 {
        return Err(Error::InvalidParameter(
            "schedule must be strictly increasing positive horizons".into(),
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

    let n_final = *schedule.last().expect("nonempty");
    let need = (n_final + max_len as u64 - 1) as usize;
    let digits = seq.take_prefix(need);
    let base = seq.alphabet().base();

    let mut reports: Vec<FrequencyReport> = Vec::with_capacity(schedule.len());
    for &checkpoint in schedule {
        let raw = count_slice(&digits, base, checkpoint, max_len);
        reports.push(FrequencyReport::from_raw(&raw, measure)?);
    }
    let curve = DiscrepancyCurve {
        points: reports.iter().map(|r| (r.n, r.discrepancy)).collect(),
    };

    let mid_index = (reports.len() - 1) / 2;
    let last = reports.last().expect("nonempty");
    // Worst pattern above its tolerance at the final checkpoint.
    let mut exceeding: Option<(usize, f64)> = None;
    for (i, row) in last.rows.iter().enumerate() {
        let dev = row.deviation.abs();
        if dev > tau.tau(row.expected, last.n)
            && exceeding.is_none_or(|(_, best)| dev > best)
        {
            exceeding = Some((i, dev));
        }
    }
    // Shrink test on the aggregate curve: decreased by >= 25% since mid.
    let shrinking = last.discrepancy <= 0.75 * reports[mid_index].discrepancy;
    let verdict = match exceeding {
        Some((i, dev)) if !shrinking => Verdict::NonNormalWitness {
            pattern: last.rows[i].pattern.clone(),
            deviation: dev,
            horizon: last.n,
        },
        _ => Verdict::ConsistentWithNormal,
    };
    let final_report = reports.pop().expect("nonempty");
    Ok(VerdictRun {
        verdict,
        curve,
        final_report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shiftspace::Alphabet;

    fn uniform(base: u32) -> BernoulliMeasure {
        BernoulliMeasure::uniform(Alphabet::new(base).unwrap())
    }

    #[test]
    fn all_zeros_is_witnessed() {
        let mut s = DigitSequence::new(Alphabet::new(2).unwrap(), std::iter::repeat(0u32));
        let run = normality_verdict(
            &mut s,
            &uniform(2),
            1,
            &[100, 1000, 10000],
            &TauPolicy::Flat(0.02),
            &MemoryBudget::default(),
        )
        .unwrap();
        match run.verdict {
            Verdict::NonNormalWitness {
                pattern, deviation, ..
            } => {
                assert_eq!(pattern.digits(), &[0]);
                assert!((deviation - 0.5).abs() < 1e-12);
            }
            other => panic!("expected witness, got {other}"),
        }
        assert_eq!(run.curve.points.len(), 3);
        assert!(run.curve.points.iter().all(|&(_, d)| (d - 0.5).abs() < 1e-12));
        assert_eq!(run.final_report.row(&[0]).unwrap().count, 10_000);
    }

    #[test]
    fn alternating_word_k2_is_witnessed() {
        let mut s = DigitSequence::new(
            Alphabet::new(2).unwrap(),
            (0u32..).map(|i| i % 2),
        );
        let run = normality_verdict(
            &mut s,
            &uniform(2),
            2,
            &[1000, 10000],
            &TauPolicy::default(),
            &MemoryBudget::default(),
        )
        .unwrap();
        match run.verdict {
            Verdict::NonNormalWitness { deviation, .. } => {
                assert!((deviation - 0.25).abs() < 1e-3);
            }
            other => panic!("expected witness, got {other}"),
        }
    }

    #[test]
    fn seeded_uniform_stream_is_consistent() {
        let m = uniform(2);
        let mut s = crate::generators::iid_sampled(&m, 1234);
        let run = normality_verdict(
            &mut s,
            &m,
            3,
            &default_schedule(200_000),
            &TauPolicy::Flat(0.02),
            &MemoryBudget::default(),
        )
        .unwrap();
        assert!(run.verdict.is_consistent(), "{}", run.verdict);
    }

    #[test]
    fn default_schedule_shape() {
        assert_eq!(default_schedule(1_000_000), vec![1000, 10_000, 100_000, 1_000_000]);
        assert_eq!(default_schedule(500), vec![5, 50, 500]);
        assert_eq!(default_schedule(3), vec![3]);
    }

    #[test]
    fn rejects_bad_schedule() {
        let mut s = DigitSequence::new(Alphabet::new(2).unwrap(), std::iter::repeat(0u32));
        assert!(normality_verdict(
            &mut s,
            &uniform(2),
            1,
            &[],
            &TauPolicy::default(),
            &MemoryBudget::default()
        )
        .is_err());
        let mut s = DigitSequence::new(Alphabet::new(2).unwrap(), std::iter::repeat(0u32));
        assert!(normality_verdict(
            &mut s,
            &uniform(2),
            1,
            &[100, 100],
            &TauPolicy::default(),
            &MemoryBudget::default()
        )
        .is_err());
    }
}
