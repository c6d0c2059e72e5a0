//! The stream constructions behind each generator kind.

use super::rng::DigitSampler;
use crate::selectors::SelectionSequence;
use crate::shiftspace::{block_flatten, Alphabet, BernoulliMeasure, BlockCode, DigitSequence};
use crate::{Error, Rational, Result};
use num::{BigInt, ToPrimitive};

struct Champernowne {
    base: u32,
    current: u64,
    buf: Vec<u32>,
    pos: usize,
}

impl Champernowne {
    fn refill(&mut self) {
        self.current += 1;
        self.buf.clear();
        let mut n = self.current;
        while n > 0 {
            self.buf.push((n % self.base as u64) as u32);
            n /= self.base as u64;
        }
        self.buf.reverse();
        self.pos = 0;
    }
}

impl Iterator for Champernowne {
    type Item = u32;

    fn next(&mut self) -> Option<u32> {
        if self.pos == self.buf.len() {
            self.refill();
        }
        let d = self.buf[self.pos];
        self.pos += 1;
        Some(d)
    }
}

/// Concatenation of the base-`b` expansions of `1, 2, 3, …`; unbounded and
/// seed-free.
pub fn champernowne(base: u32) -> Result<DigitSequence> {
    let alphabet = Alphabet::new(base)?;
    Ok(DigitSequence::new(
        alphabet,
        Champernowne {
            base,
            current: 0,
            buf: Vec::new(),
            pos: 0,
        },
    ))
}

/// I.i.d. digits with the measure's weights, from the crate's fixed seeded
/// generator (SplitMix64 seed expansion keying 8-round ChaCha, inverse-CDF
/// digit mapping; see the README's determinism notes for the exact
/// derivation). Same seed, same stream.
pub fn iid_sampled(measure: &BernoulliMeasure, seed: u64) -> DigitSequence {
    let mut sampler = DigitSampler::new(&measure.float_weights(), seed);
    DigitSequence::new(
        measure.alphabet(),
        std::iter::repeat_with(move || sampler.sample()),
    )
}

struct StageConcat {
    code_base: u32,
    growth: u32,
    weights: Vec<Rational>,
    stage: u32,
    string_index: u64,
    string_count: u64,
    reps_left: u64,
    digits: Vec<u32>,
    pos: usize,
}

impl StageConcat {
    fn load_string(&mut self) {
        let code = BlockCode::new(self.code_base, self.stage).expect("valid stage");
        self.digits = code.decode(self.string_index as u32);
        self.pos = 0;
        // reps = ceil(mu(C_s) * b^(growth * stage))
        let mu: Rational = self
            .digits
            .iter()
            .map(|&d| self.weights[d as usize].clone())
            .product();
        let scale = BigInt::from(self.code_base).pow(self.growth * self.stage);
        let reps = (mu * Rational::from_integer(scale)).ceil().to_integer();
        self.reps_left = reps.to_u64().unwrap_or(u64::MAX);
    }

    fn advance(&mut self) {
        loop {
            self.string_index += 1;
            if self.string_index == self.string_count {
                self.stage += 1;
                self.string_index = 0;
                self.string_count = (self.code_base as u64).pow(self.stage);
            }
            self.load_string();
            if self.reps_left > 0 {
                return;
            }
        }
    }
}

impl Iterator for StageConcat {
    type Item = u32;

    fn next(&mut self) -> Option<u32> {
        if self.pos == self.digits.len() {
            self.pos = 0;
            self.reps_left -= 1;
            if self.reps_left == 0 {
                self.advance();
            }
        }
        let d = self.digits[self.pos];
        self.pos += 1;
        Some(d)
    }
}

/// Deterministic, seed-free stream for a measure with exact weights: at
/// stage `L = 1, 2, …` every length-`L` string is enumerated in lexicographic
/// order and emitted `⌈μ(C_s) · b^{growth·L}⌉` times in a row; stages are
/// concatenated.
///
/// Frequencies approach the measure as stages complete (exactly balanced at
/// stage boundaries for the uniform measure); mid-stage horizons over-weight
/// the lexicographically early strings, so finite-horizon discrepancy
/// oscillates with the stage phase. See the crate README for measured values.
pub fn stage_concat(measure: &BernoulliMeasure, growth: u32) -> Result<DigitSequence> {
    if !measure.is_exact() {
        return Err(Error::ExactWeightsRequired(
            "stage concatenation enumerates repeat counts from rational weights".into(),
        ));
    }
    if growth < 1 {
        return Err(Error::InvalidParameter("growth must be >= 1".into()));
    }
    let base = measure.alphabet().base();
    let weights: Vec<Rational> = measure
        .alphabet()
        .digits()
        .map(|d| measure.weight_exact(d).expect("exact").clone())
        .collect();
    let mut iter = StageConcat {
        code_base: base,
        growth,
        weights,
        stage: 1,
        string_index: 0,
        string_count: base as u64,
        reps_left: 0,
        digits: Vec::new(),
        pos: 0,
    };
    iter.load_string();
    if iter.reps_left == 0 {
        iter.advance();
    }
    Ok(DigitSequence::new(measure.alphabet(), iter))
}

struct Duplicate {
    input: DigitSequence,
    repeat: u32,
    current: u32,
    left: u32,
}

impl Iterator for Duplicate {
    type Item = u32;

    fn next(&mut self) -> Option<u32> {
        if self.left == 0 {
            self.current = self.input.next()?;
            self.left = self.repeat;
        }
        self.left -= 1;
        Some(self.current)
    }
}

/// Emits each input digit `repeat` consecutive times. `repeat = 1` is
/// rejected: it would be a silent no-op.
pub fn duplicate(input: DigitSequence, repeat: u32) -> Result<DigitSequence> {
    if repeat < 2 {
        return Err(Error::InvalidParameter(format!(
            "duplicate needs repeat >= 2, got {repeat}"
        )));
    }
    let alphabet = input.alphabet();
    Ok(DigitSequence::new(
        alphabet,
        Duplicate {
            input,
            repeat,
            current: 0,
            left: 0,
        },
    ))
}

struct FillZero {
    input: DigitSequence,
    indices: Box<dyn Iterator<Item = u64> + Send>,
    next_index: Option<u64>,
    position: u64,
}

impl Iterator for FillZero {
    type Item = u32;

    fn next(&mut self) -> Option<u32> {
        self.position += 1;
        if self.next_index == Some(self.position) {
            self.next_index = self.indices.next();
            self.input.next()
        } else {
            Some(0)
        }
    }
}

/// Spreads the input along the selection: output position `n` carries the
/// next input digit when `n` is selected and the digit 0 otherwise, so
/// selecting the output along the same selection recovers the input. The
/// output ends when the input does (and becomes all zeros after a finite
/// selection is exhausted).
pub fn fill_zero(input: DigitSequence, selection: &SelectionSequence) -> DigitSequence {
    let alphabet = input.alphabet();
    let mut indices = selection.indices();
    let next_index = indices.next();
    DigitSequence::new(
        alphabet,
        FillZero {
            input,
            indices,
            next_index,
            position: 0,
        },
    )
}

/// Flattens a width-`width` block stream to base digits, with `pad` leading
/// zeros. The block stream is expected to target the parity-perturbed block
/// measure; [`super::GeneratorSpec`] enforces that before calling here.
pub fn perturbed_point(
    base: u32,
    width: u32,
    blocks: DigitSequence,
    pad: u32,
) -> Result<DigitSequence> {
    let flat = block_flatten(blocks, base, width)?;
    if pad == 0 {
        return Ok(flat);
    }
    let alphabet = flat.alphabet();
    Ok(DigitSequence::new(
        alphabet,
        std::iter::repeat_n(0u32, pad as usize).chain(flat),
    ))
}

/// The exact stage-1 emission order of [`stage_concat`], used by tests: each
/// digit `d` repeated `⌈λ_d · b^growth⌉` times.
pub fn stage_concat_first_stage(measure: &BernoulliMeasure, growth: u32) -> Result<Vec<u32>> {
    let base = measure.alphabet().base();
    let scale = BigInt::from(base).pow(growth);
    let mut out = Vec::new();
    for d in measure.alphabet().digits() {
        let w = measure
            .weight_exact(d)
            .ok_or_else(|| Error::ExactWeightsRequired("stage enumeration".into()))?;
        let reps = (w.clone() * Rational::from_integer(scale.clone()))
            .ceil()
            .to_integer()
            .to_u64()
            .unwrap_or(0);
        out.extend(std::iter::repeat_n(d, reps as usize));
    }
    Ok(out)
}
