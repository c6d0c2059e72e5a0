//! Orchestration behind the `gen`, `select`, and `analyze` subcommands.

use super::report::ReportDoc;
use super::stream_file::{StreamFile, StreamHeaderExtra};
use crate::analyze::{
    count_starred_aligned, default_schedule, normality_verdict, MemoryBudget, TauPolicy,
};
use crate::generators::{GeneratorSpec, MeasureSpec};
use crate::selectors::{select, SelectionSequence};
use crate::shiftspace::{block_recode, starred_measure_bruteforce, StarredPattern};
use crate::{Error, Result};
use num::ToPrimitive;

/// Defaults loadable from a key=value config file (`#` starts a comment).
/// Recognized keys: `tau_scale`, `tau_floor`, `max_table_entries`.
#[derive(Debug, Clone)]
pub struct Defaults {
    pub tau_scale: f64,
    pub tau_floor: f64,
    pub budget: MemoryBudget,
}

impl Default for Defaults {
    fn default() -> Self {
        Defaults {
            tau_scale: 4.0,
            tau_floor: 1e-3,
            budget: MemoryBudget::default(),
        }
    }
}

impl Defaults {
    pub fn from_config_text(text: &str) -> Result<Self> {
        let mut d = Defaults::default();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                input: line.to_string(),
                pos: lineno,
                msg: "expected key=value".into(),
            })?;
            let bad = |msg: String| Error::Parse {
                input: line.to_string(),
                pos: lineno,
                msg,
            };
            match key.trim() {
                "tau_scale" => {
                    d.tau_scale = value
                        .trim()
                        .parse()
                        .map_err(|_| bad("bad tau_scale".into()))?
                }
                "tau_floor" => {
                    d.tau_floor = value
                        .trim()
                        .parse()
                        .map_err(|_| bad("bad tau_floor".into()))?
                }
                "max_table_entries" => {
                    d.budget.max_table_entries = value
                        .trim()
                        .parse()
                        .map_err(|_| bad("bad max_table_entries".into()))?
                }
                other => return Err(bad(format!("unknown config key {other:?}"))),
            }
        }
        Ok(d)
    }

    pub fn tau(&self) -> TauPolicy {
        TauPolicy::Adaptive {
            scale: self.tau_scale,
            floor: self.tau_floor,
        }
    }
}

/// Instantiates the spec and takes exactly `n` digits.
pub fn cmd_gen(spec_text: &str, n: u64) -> Result<(u32, Vec<u32>, StreamHeaderExtra)> {
    let spec = GeneratorSpec::parse(spec_text)?;
    let base = spec.alphabet()?.base();
    let digits = spec.instantiate()?.take_prefix(n as usize);
    if (digits.len() as u64) < n {
        return Err(Error::InvalidParameter(format!(
            "generator ended after {} digits, {n} requested",
            digits.len()
        )));
    }
    Ok((
        base,
        digits,
        StreamHeaderExtra {
            spec: Some(spec.to_string()),
            selection: None,
        },
    ))
}

/// Output of a selection over a finite stream file.
pub struct SelectOutput {
    pub digits: Vec<u32>,
    pub extra: StreamHeaderExtra,
    /// For finite explicit selections: how many requested indices fell past
    /// the end of the input.
    pub missing: u64,
}

pub fn cmd_select(input: &StreamFile, sel_text: &str) -> Result<SelectOutput> {
    let sel = SelectionSequence::parse(sel_text)?;
    let digits: Vec<u32> = select(input.digit_sequence(), &sel).collect();
    let missing = match &sel {
        SelectionSequence::Explicit(list) => list.len() as u64 - digits.len() as u64,
        _ => 0,
    };
    Ok(SelectOutput {
        digits,
        extra: StreamHeaderExtra {
            spec: input.spec.clone(),
            selection: Some(sel.to_string()),
        },
        missing,
    })
}

/// Options for `analyze`.
#[derive(Debug, Clone)]
pub struct AnalyzeOptions {
    pub max_len: u32,
    /// Target measure; defaults to uniform over the analyzed alphabet.
    pub measure: Option<MeasureSpec>,
    /// Recode the stream into width-`K` blocks before analysis.
    pub block_width: Option<u32>,
    /// Additionally count one starred pattern, block-aligned
    /// (requires `block_width`).
    pub starred: Option<String>,
    /// Flat deviation tolerance; `None` uses the adaptive policy.
    pub tau: Option<f64>,
    /// Checkpoint horizons; `None` for the geometric default.
    pub schedule: Option<Vec<u64>>,
    /// Horizon; `None` analyzes everything the payload supports.
    pub n: Option<u64>,
    pub defaults: Defaults,
}

pub struct AnalyzeOutput {
    pub doc: ReportDoc,
    pub consistent: bool,
}

pub fn cmd_analyze(input: &StreamFile, opts: &AnalyzeOptions) -> Result<AnalyzeOutput> {
    let mut doc = ReportDoc::new();
    doc.config("command", "analyze");
    doc.config("base", input.base);
    if let Some(spec) = &input.spec {
        doc.config("stream_spec", spec.clone());
    }
    if let Some(sel) = &input.selection {
        doc.config("stream_sel", sel.clone());
    }

    // The analyzed stream: raw digits, or blocks of them.
    let (mut seq, analyzed_len) = match opts.block_width {
        None => (
            input.digit_sequence(),
            input.digits.len() as u64,
        ),
        Some(w) => {
            let (blocks, _) = block_recode(input.digit_sequence(), w)?;
            doc.config("block_width", w);
            (blocks, input.digits.len() as u64 / w as u64)
        }
    };

    let max_len = opts.max_len;
    let n = match opts.n {
        Some(n) => n,
        None => analyzed_len
            .saturating_sub(max_len as u64 - 1)
            .max(1),
    };
    doc.config("n", n);
    doc.config("k", max_len);

    let measure = match &opts.measure {
        Some(spec) => {
            doc.config("measure", spec.to_string());
            spec.build()?
        }
        None => {
            let alphabet = seq.alphabet();
            doc.config("measure", format!("uniform:b={}", alphabet.base()));
            crate::shiftspace::BernoulliMeasure::uniform(alphabet)
        }
    };

    let tau = match opts.tau {
        Some(t) => {
            doc.config("tau", format!("{t}"));
            TauPolicy::Flat(t)
        }
        None => {
            doc.config(
                "tau",
                format!(
                    "adaptive:scale={},floor={}",
                    opts.defaults.tau_scale, opts.defaults.tau_floor
                ),
            );
            opts.defaults.tau()
        }
    };
    let schedule = match &opts.schedule {
        Some(s) => s.clone(),
        None => default_schedule(n),
    };
    doc.config(
        "schedule",
        schedule
            .iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join("|"),
    );

    let run = normality_verdict(
        &mut seq,
        &measure,
        max_len,
        &schedule,
        &tau,
        &opts.defaults.budget,
    )?;
    doc.add_rows(&run.final_report);
    doc.add_curve(&run.curve);

    if let Some(starred_text) = &opts.starred {
        let width = opts.block_width.ok_or_else(|| {
            Error::InvalidParameter("--starred requires --block <K>".into())
        })?;
        let pattern = StarredPattern::parse(input.base, width, starred_text)?;
        let (mut blocks, _) = block_recode(input.digit_sequence(), width)?;
        let n_blocks = (input.digits.len() as u64 / width as u64)
            .saturating_sub(pattern.len() as u64 - 1)
            .max(1);
        let count = count_starred_aligned(&mut blocks, &pattern, n_blocks)?;
        let expected = if measure.is_exact() && measure.alphabet() == blocks.alphabet() {
            starred_measure_bruteforce(&measure, &pattern)
                .ok()
                .and_then(|r| r.to_f64())
        } else {
            None
        };
        doc.config("starred", starred_text.clone());
        doc.add_starred(starred_text, &count, expected);
    }

    doc.summary("n", run.final_report.n);
    doc.summary("truncated", run.final_report.truncated);
    doc.summary("discrepancy", format!("{:.9}", run.final_report.discrepancy));
    doc.summary(
        "discrepancy_at_k",
        format!("{:.9}", run.final_report.discrepancy_at_length(max_len)),
    );
    doc.summary("verdict", run.verdict.to_string());
    Ok(AnalyzeOutput {
        consistent: run.verdict.is_consistent(),
        doc,
    })
}
