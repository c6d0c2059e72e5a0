//! Selection grids and base-vs-block verdict comparison.

use super::{normality_verdict, DiscrepancyCurve, MemoryBudget, TauPolicy, Verdict};
use crate::selectors::{select, SelectionSequence};
use crate::shiftspace::{block_recode, BernoulliMeasure, DigitSequence};
use crate::Result;

/// One cell of a selection grid: the verdict for the stream selected along
/// `a_offset, a_{offset+step}, a_{offset+2·step}, …`.
#[derive(Debug, Clone)]
pub struct WallCell {
    pub offset: u64,
    pub step: u64,
    pub verdict: Verdict,
    pub curve: DiscrepancyCurve,
    pub final_report: super::FrequencyReport,
}

/// Runs select + verdict for every (offset, step) pair. `make_seq` builds a
/// fresh stream per cell; selection consumes its input, so cells never share
/// one.
#[allow(clippy::too_many_arguments)]
pub fn wall_matrix(
    make_seq: &dyn Fn() -> Result<DigitSequence>,
    measure: &BernoulliMeasure,
    offsets: &[u64],
    steps: &[u64],
    max_len: u32,
    schedule: &[u64],
    tau: &TauPolicy,
    budget: &MemoryBudget,
) -> Result<Vec<WallCell>> {
    let mut cells = Vec::with_capacity(offsets.len() * steps.len());
    for &offset in offsets {
        for &step in steps {
            let sel = SelectionSequence::ap(offset, step)?;
            let mut selected = select(make_seq()?, &sel);
            let run = normality_verdict(&mut selected, measure, max_len, schedule, tau, budget)?;
            cells.push(WallCell {
                offset,
                step,
                verdict: run.verdict,
                curve: run.curve,
                final_report: run.final_report,
            });
        }
    }
    Ok(cells)
}

/// Paired verdicts for the same stream seen at digit level and at width-`k`
/// block level (block patterns of length 1, against the induced block
/// measure). The two views agree for genuinely normal and genuinely
/// non-normal streams.
#[derive(Debug, Clone)]
pub struct CrosscheckOutcome {
    pub width: u32,
    pub base_verdict: Verdict,
    pub base_curve: DiscrepancyCurve,
    pub block_verdict: Verdict,
    pub block_curve: DiscrepancyCurve,
}

impl CrosscheckOutcome {
    pub fn agree(&self) -> bool {
        self.base_verdict.is_consistent() == self.block_verdict.is_consistent()
    }
}

/// Base view: patterns up to length `width` at horizon `n`. Block view: the
/// recoded stream's single-block patterns at horizon `n / width`.
pub fn block_view_crosscheck(
    make_seq: &dyn Fn() -> Result<DigitSequence>,
    measure: &BernoulliMeasure,
    width: u32,
    n: u64,
    tau: &TauPolicy,
    budget: &MemoryBudget,
) -> Result<CrosscheckOutcome> {
    let schedule = super::default_schedule(n);
    let mut base_seq = make_seq()?;
    let base_run = normality_verdict(&mut base_seq, measure, width, &schedule, tau, budget)?;

    let block_measure = measure.block_measure(width)?;
    let (mut block_seq, _dropped) = block_recode(make_seq()?, width)?;
    let block_schedule = super::default_schedule(n / width as u64);
    let block_run = normality_verdict(
        &mut block_seq,
        &block_measure,
        1,
        &block_schedule,
        tau,
        budget,
    )?;
    Ok(CrosscheckOutcome {
        width,
        base_verdict: base_run.verdict,
        base_curve: base_run.curve,
        block_verdict: block_run.verdict,
        block_curve: block_run.curve,
    })
}
