//! Increasing index sequences and subsequence selection.
//!
//! Indices are 1-based throughout: a stream's first digit sits at position 1,
//! matching the usual `a_1 a_2 a_3 …` indexing. Selection along a sequence
//! `n_1 < n_2 < …` emits `(a_{n_1}, a_{n_2}, …)` lazily, consuming the input
//! only as far as needed.

use crate::shiftspace::DigitSequence;
use crate::{Error, Rational, Result};
use num::BigInt;

/// A union of residue classes mod `period`: `n` is a member iff
/// `((n-1) mod period) + 1` is one of `residues`. Residues live in
/// `1..=period` and the set is nonempty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodicSet {
    period: u64,
    residues: Vec<u64>,
}

impl PeriodicSet {
    pub fn new(period: u64, mut residues: Vec<u64>) -> Result<Self> {
        if period < 1 {
            return Err(Error::InvalidParameter("period must be >= 1".into()));
        }
        if residues.is_empty() {
            return Err(Error::InvalidParameter(
                "periodic set needs at least one residue".into(),
            ));
        }
        residues.sort_unstable();
        residues.dedup();
        if let Some(&bad) = residues.iter().find(|&&r| r < 1 || r > period) {
            return Err(Error::InvalidParameter(format!(
                "residue {bad} outside 1..={period}"
            )));
        }
        Ok(PeriodicSet { period, residues })
    }

    /// `{1, …, t-1} mod t`: density `1 - 1/t`. Requires `t ≥ 2`.
    pub fn complement_of_multiples(t: u64) -> Result<Self> {
        if t < 2 {
            return Err(Error::InvalidParameter(
                "complement family needs t >= 2".into(),
            ));
        }
        PeriodicSet::new(t, (1..t).collect())
    }

    pub fn period(&self) -> u64 {
        self.period
    }

    pub fn residues(&self) -> &[u64] {
        &self.residues
    }

    pub fn contains(&self, n: u64) -> bool {
        debug_assert!(n >= 1);
        let r = ((n - 1) % self.period) + 1;
        self.residues.binary_search(&r).is_ok()
    }

    pub fn density(&self) -> Rational {
        Rational::new(
            BigInt::from(self.residues.len() as u64),
            BigInt::from(self.period),
        )
    }

    pub fn indices(&self) -> impl Iterator<Item = u64> + Send {
        let period = self.period;
        let residues = self.residues.clone();
        (0u64..).flat_map(move |block| {
            let base = block * period;
            residues.iter().map(move |&r| base + r).collect::<Vec<_>>()
        })
    }

    /// Least `n ≥ 1` such that the whole run
    /// `{width·(n-1)+offset, …, width·n+offset-1}` of `width` consecutive
    /// integers lies inside the set, or `None` when no run ever does.
    ///
    /// Run starts repeat mod `period` with period `period / gcd(period, width)`
    /// in `n`, so scanning `n` up to that bound (plus one for safety) decides
    /// the question for all `n`.
    pub fn thickness_violation(&self, width: u64, offset: u64) -> Option<u64> {
        assert!(width >= 1 && offset >= 1);
        let bound = self.period / gcd(self.period, width) + 1;
        for n in 1..=bound {
            let start = width * (n - 1) + offset;
            if (start..start + width).all(|i| self.contains(i)) {
                return Some(n);
            }
        }
        None
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Exact density when the selection kind admits one, otherwise a
/// finite-horizon estimate (explicit lists never claim an exact liminf).
#[derive(Debug, Clone, PartialEq)]
pub enum Density {
    Exact(Rational),
    Estimate { value: f64, horizon: u64 },
}

impl Density {
    pub fn value(&self) -> f64 {
        use num::ToPrimitive;
        match self {
            Density::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            Density::Estimate { value, .. } => *value,
        }
    }
}

/// An increasing sequence of positive integers, given by shape.
#[derive(Debug, Clone, PartialEq)]
pub enum SelectionSequence {
    /// Arithmetic progression `start, start+step, start+2·step, …`.
    Ap { start: u64, step: u64 },
    Periodic(PeriodicSet),
    /// Explicit members up to a cutoff, then a periodic tail strictly after
    /// the last explicit member.
    EventuallyPeriodic { head: Vec<u64>, tail: PeriodicSet },
    /// A finite, strictly increasing list.
    Explicit(Vec<u64>),
}

impl SelectionSequence {
    pub fn ap(start: u64, step: u64) -> Result<Self> {
        if start < 1 || step < 1 {
            return Err(Error::InvalidParameter(
                "arithmetic progression needs start >= 1 and step >= 1".into(),
            ));
        }
        Ok(SelectionSequence::Ap { start, step })
    }

    pub fn eventually_periodic(head: Vec<u64>, tail: PeriodicSet) -> Result<Self> {
        if head.windows(2).any(|w| w[0] >= w[1]) || head.first().is_some_and(|&h| h < 1) {
            return Err(Error::InvalidParameter(
                "preperiod must be strictly increasing positive integers".into(),
            ));
        }
        Ok(SelectionSequence::EventuallyPeriodic { head, tail })
    }

    pub fn explicit(list: Vec<u64>) -> Result<Self> {
        if list.is_empty() {
            return Err(Error::InvalidParameter(
                "explicit selection must be nonempty".into(),
            ));
        }
        if list.windows(2).any(|w| w[0] >= w[1]) || list[0] < 1 {
            return Err(Error::InvalidParameter(
                "explicit selection must be strictly increasing positive integers".into(),
            ));
        }
        Ok(SelectionSequence::Explicit(list))
    }

    /// The indices `n_1 < n_2 < …`, lazily.
    pub fn indices(&self) -> Box<dyn Iterator<Item = u64> + Send> {
        match self {
            SelectionSequence::Ap { start, step } => {
                let (start, step) = (*start, *step);
                Box::new((0u64..).map(move |i| start + i * step))
            }
            SelectionSequence::Periodic(p) => Box::new(p.indices()),
            SelectionSequence::EventuallyPeriodic { head, tail } => {
                let cutoff = head.last().copied().unwrap_or(0);
                let head = head.clone();
                Box::new(
                    head.into_iter()
                        .chain(tail.indices().filter(move |&n| n > cutoff)),
                )
            }
            SelectionSequence::Explicit(list) => Box::new(list.clone().into_iter()),
        }
    }

    /// Asymptotic lower density: exact for AP, periodic, and eventually
    /// periodic shapes; a flagged finite-horizon estimate for explicit lists
    /// (the minimum of `|A ∩ [1,N]| / N` over `N` just before each member and
    /// at the horizon).
    pub fn lower_density(&self) -> Density {
        match self {
            SelectionSequence::Ap { step, .. } => {
                Density::Exact(Rational::new(BigInt::from(1), BigInt::from(*step)))
            }
            SelectionSequence::Periodic(p) => Density::Exact(p.density()),
            SelectionSequence::EventuallyPeriodic { tail, .. } => Density::Exact(tail.density()),
            SelectionSequence::Explicit(list) => {
                let horizon = *list.last().expect("nonempty");
                let mut min = 1.0f64;
                for (i, &a) in list.iter().enumerate() {
                    // Just before the (i+1)-th member: i members in [1, a-1].
                    if a > 1 {
                        min = min.min(i as f64 / (a - 1) as f64);
                    }
                }
                min = min.min(list.len() as f64 / horizon as f64);
                Density::Estimate {
                    value: min,
                    horizon,
                }
            }
        }
    }

    /// Grammar: `ap:k=2,l=3` | `periodic:m=6,r=1|2|4|5` |
    /// `evper:pre=3|7;m=2,r=1` | `explicit:5|17|99`.
    pub fn parse(text: &str) -> Result<Self> {
        let err = |pos: usize, msg: &str| Error::Parse {
            input: text.to_string(),
            pos,
            msg: msg.to_string(),
        };
        let (kind, rest) = text
            .split_once(':')
            .ok_or_else(|| err(text.len(), "expected `kind:params`"))?;
        let body_at = kind.len() + 1;
        match kind {
            "ap" => {
                let mut start = None;
                let mut step = None;
                for part in rest.split(',') {
                    match part.split_once('=') {
                        Some(("k", v)) => start = Some(parse_u64(text, body_at, v)?),
                        Some(("l", v)) => step = Some(parse_u64(text, body_at, v)?),
                        _ => return Err(err(body_at, "expected k=<start>,l=<step>")),
                    }
                }
                SelectionSequence::ap(
                    start.ok_or_else(|| err(body_at, "missing k="))?,
                    step.ok_or_else(|| err(body_at, "missing l="))?,
                )
            }
            "periodic" => {
                let p = parse_periodic(text, body_at, rest)?;
                Ok(SelectionSequence::Periodic(p))
            }
            "evper" => {
                let (pre_part, tail_part) = rest
                    .split_once(';')
                    .ok_or_else(|| err(body_at, "expected pre=…;m=…,r=…"))?;
                let pre_body = pre_part
                    .strip_prefix("pre=")
                    .ok_or_else(|| err(body_at, "expected pre="))?;
                let head = if pre_body.is_empty() {
                    Vec::new()
                } else {
                    pre_body
                        .split('|')
                        .map(|v| parse_u64(text, body_at, v))
                        .collect::<Result<Vec<_>>>()?
                };
                let tail = parse_periodic(text, body_at + pre_part.len() + 1, tail_part)?;
                SelectionSequence::eventually_periodic(head, tail)
            }
            "explicit" => {
                let list = rest
                    .split('|')
                    .map(|v| parse_u64(text, body_at, v))
                    .collect::<Result<Vec<_>>>()?;
                SelectionSequence::explicit(list)
            }
            _ => Err(err(0, "unknown selection kind")),
        }
    }
}

fn parse_u64(input: &str, pos: usize, v: &str) -> Result<u64> {
    v.parse().map_err(|_| Error::Parse {
        input: input.to_string(),
        pos,
        msg: format!("expected integer, got {v:?}"),
    })
}

fn parse_periodic(input: &str, pos: usize, body: &str) -> Result<PeriodicSet> {
    let mut period = None;
    let mut residues = Vec::new();
    for part in body.split(',') {
        match part.split_once('=') {
            Some(("m", v)) => period = Some(parse_u64(input, pos, v)?),
            Some(("r", v)) => {
                for r in v.split('|') {
                    residues.push(parse_u64(input, pos, r)?);
                }
            }
            _ => {
                return Err(Error::Parse {
                    input: input.to_string(),
                    pos,
                    msg: "expected m=<period>,r=<r1>|<r2>|…".into(),
                })
            }
        }
    }
    PeriodicSet::new(
        period.ok_or_else(|| Error::Parse {
            input: input.to_string(),
            pos,
            msg: "missing m=".into(),
        })?,
        residues,
    )
}

impl std::fmt::Display for SelectionSequence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SelectionSequence::Ap { start, step } => write!(f, "ap:k={start},l={step}"),
            SelectionSequence::Periodic(p) => {
                write!(f, "periodic:m={},r=", p.period())?;
                write_joined(f, p.residues())
            }
            SelectionSequence::EventuallyPeriodic { head, tail } => {
                write!(f, "evper:pre=")?;
                write_joined(f, head)?;
                write!(f, ";m={},r=", tail.period())?;
                write_joined(f, tail.residues())
            }
            SelectionSequence::Explicit(list) => {
                write!(f, "explicit:")?;
                write_joined(f, list)
            }
        }
    }
}

fn write_joined(f: &mut std::fmt::Formatter<'_>, xs: &[u64]) -> std::fmt::Result {
    for (i, x) in xs.iter().enumerate() {
        if i > 0 {
            write!(f, "|")?;
        }
        write!(f, "{x}")?;
    }
    Ok(())
}

struct SelectIter {
    input: DigitSequence,
    indices: Box<dyn Iterator<Item = u64> + Send>,
    position: u64,
}

impl Iterator for SelectIter {
    type Item = u32;

    fn next(&mut self) -> Option<u32> {
        let target = self.indices.next()?;
        debug_assert!(target > self.position, "indices must increase");
        while self.position + 1 < target {
            self.input.next()?;
            self.position += 1;
        }
        self.position += 1;
        self.input.next()
    }
}

/// Emits `(a_{n_1}, a_{n_2}, …)` for the selection's indices; ends when
/// either the selection or the input runs out.
pub fn select(seq: DigitSequence, sel: &SelectionSequence) -> DigitSequence {
    let alphabet = seq.alphabet();
    DigitSequence::new(
        alphabet,
        SelectIter {
            input: seq,
            indices: sel.indices(),
            position: 0,
        },
    )
}

/// Thickness check for periodic selections; other shapes are rejected
/// because the question is only decidable from a periodic description.
pub fn thickness_violation(
    sel: &SelectionSequence,
    width: u64,
    offset: u64,
) -> Result<Option<u64>> {
    match sel {
        SelectionSequence::Periodic(p) => Ok(p.thickness_violation(width, offset)),
        other => Err(Error::UnsupportedSelection(format!(
            "thickness check requires a periodic selection, got {other}"
        ))),
    }
}

/// `PeriodicSet(t, {1,…,t-1})` for each requested `t`: periodic selections of
/// density `1 - 1/t`, the family used by the density-convergence recipe.
pub fn near_full_family(ts: &[u64]) -> Result<Vec<SelectionSequence>> {
    ts.iter()
        .map(|&t| Ok(SelectionSequence::Periodic(PeriodicSet::complement_of_multiples(t)?)))
        .collect()
}
