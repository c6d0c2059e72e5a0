//! Alphabets, product measures on digit strings, cylinder patterns, and the
//! block bijection between `D^∞` and `(D^k)^∞`.
//!
//! A digit is a `u32` below the alphabet base. Block alphabets identify a
//! width-`k` tuple `[d_1,…,d_k]` with the integer `d_1 b^{k-1} + … + d_k`
//! (row-major base-`b`), so block digits are ordinary digits of a larger
//! alphabet and weight lookup is O(1).

mod sequence;
mod starred;

pub use sequence::{block_flatten, block_recode, DigitSequence, DroppedDigits};
pub use starred::{
    starred_measure_bruteforce, starred_measure_closed_form, Slot, StarredPattern,
};

use crate::{Error, Rational, Result};
use num::{BigInt, One, Signed, ToPrimitive, Zero};

/// Digit set `{0, …, b-1}` for an integer base `b ≥ 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Alphabet {
    base: u32,
}

impl Alphabet {
    pub fn new(base: u32) -> Result<Self> {
        if base < 2 {
            return Err(Error::InvalidBase(base));
        }
        Ok(Alphabet { base })
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn contains(&self, digit: u32) -> bool {
        digit < self.base
    }

    pub fn digits(&self) -> impl Iterator<Item = u32> {
        0..self.base
    }
}

/// The bijection between width-`k` digit tuples over base `b` and single
/// digits of the size-`b^k` block alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockCode {
    base: u32,
    width: u32,
}

impl BlockCode {
    pub fn new(base: u32, width: u32) -> Result<Self> {
        if base < 2 {
            return Err(Error::InvalidBase(base));
        }
        if width < 1 {
            return Err(Error::InvalidParameter("block width must be >= 1".into()));
        }
        // The block alphabet must itself fit in a u32 digit.
        let mut size: u64 = 1;
        for _ in 0..width {
            size = size.saturating_mul(base as u64);
            if size > (1 << 31) {
                return Err(Error::AlphabetOverflow { base, width });
            }
        }
        Ok(BlockCode { base, width })
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    /// Size of the block alphabet, `b^k`.
    pub fn block_count(&self) -> u32 {
        self.base.pow(self.width)
    }

    pub fn block_alphabet(&self) -> Alphabet {
        Alphabet {
            base: self.block_count(),
        }
    }

    /// Row-major encoding of `[d_1,…,d_k]` as `Σ d_i b^{k-i}`.
    pub fn encode(&self, digits: &[u32]) -> Result<u32> {
        if digits.len() != self.width as usize {
            return Err(Error::WidthMismatch(format!(
                "expected {} digits, got {}",
                self.width,
                digits.len()
            )));
        }
        let mut code: u64 = 0;
        for &d in digits {
            if d >= self.base {
                return Err(Error::InvalidPattern(format!(
                    "digit {d} out of alphabet of base {}",
                    self.base
                )));
            }
            code = code * self.base as u64 + d as u64;
        }
        Ok(code as u32)
    }

    /// Inverse of [`BlockCode::encode`]; most significant digit first.
    pub fn decode(&self, block: u32) -> Vec<u32> {
        let mut out = vec![0u32; self.width as usize];
        let mut rest = block;
        for slot in out.iter_mut().rev() {
            *slot = rest % self.base;
            rest /= self.base;
        }
        out
    }
}

/// A finite nonempty digit string `[d_1,…,d_k]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Pattern {
    digits: Vec<u32>,
}

impl Pattern {
    pub fn new(digits: Vec<u32>) -> Result<Self> {
        if digits.is_empty() {
            return Err(Error::InvalidPattern("pattern must be nonempty".into()));
        }
        Ok(Pattern { digits })
    }

    pub fn digits(&self) -> &[u32] {
        &self.digits
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

impl std::fmt::Display for Pattern {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[")?;
        for (i, d) in self.digits.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{d}")?;
        }
        write!(f, "]")
    }
}

/// Digit weights of a product measure, either exact rationals or floats.
///
/// Exact weights are used by the oracles and the small-case constructions;
/// float weights exist for measures that only feed the streaming analyzers.
#[derive(Debug, Clone, PartialEq)]
pub enum Weights {
    Exact(Vec<Rational>),
    Float(Vec<f64>),
}

/// A product measure on infinite digit strings, given by per-digit weights
/// `λ_d ≥ 0` with `Σ λ_d = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct BernoulliMeasure {
    alphabet: Alphabet,
    weights: Weights,
}

const FLOAT_SUM_TOLERANCE: f64 = 1e-12;

impl BernoulliMeasure {
    /// Uniform weights `1/b`, exact.
    pub fn uniform(alphabet: Alphabet) -> Self {
        let b = alphabet.base() as i64;
        let w = Rational::new(BigInt::one(), BigInt::from(b));
        BernoulliMeasure {
            alphabet,
            weights: Weights::Exact(vec![w; alphabet.base() as usize]),
        }
    }

    pub fn from_rationals(weights: Vec<Rational>) -> Result<Self> {
        let alphabet = Alphabet::new(weights.len() as u32)?;
        if weights.iter().any(|w| w.is_negative()) {
            return Err(Error::InvalidWeights("negative weight".into()));
        }
        let sum: Rational = weights.iter().cloned().sum();
        if !sum.is_one() {
            return Err(Error::InvalidWeights(format!(
                "weights sum to {sum}, expected exactly 1"
            )));
        }
        Ok(BernoulliMeasure {
            alphabet,
            weights: Weights::Exact(weights),
        })
    }

    pub fn from_floats(weights: Vec<f64>) -> Result<Self> {
        let alphabet = Alphabet::new(weights.len() as u32)?;
        if weights.iter().any(|&w| !w.is_finite() || w < 0.0) {
            return Err(Error::InvalidWeights("weights must be finite and >= 0".into()));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > FLOAT_SUM_TOLERANCE {
            return Err(Error::InvalidWeights(format!(
                "weights sum to {sum}, expected 1 within {FLOAT_SUM_TOLERANCE}"
            )));
        }
        Ok(BernoulliMeasure {
            alphabet,
            weights: Weights::Float(weights),
        })
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.weights, Weights::Exact(_))
    }

    pub fn weight(&self, digit: u32) -> f64 {
        match &self.weights {
            Weights::Exact(v) => v[digit as usize].to_f64().unwrap_or(f64::NAN),
            Weights::Float(v) => v[digit as usize],
        }
    }

    pub fn weight_exact(&self, digit: u32) -> Option<&Rational> {
        match &self.weights {
            Weights::Exact(v) => Some(&v[digit as usize]),
            Weights::Float(_) => None,
        }
    }

    pub fn float_weights(&self) -> Vec<f64> {
        self.alphabet.digits().map(|d| self.weight(d)).collect()
    }

    fn check_pattern(&self, pattern: &Pattern) -> Result<()> {
        for &d in pattern.digits() {
            if !self.alphabet.contains(d) {
                return Err(Error::InvalidPattern(format!(
                    "digit {d} out of alphabet of base {}",
                    self.alphabet.base()
                )));
            }
        }
        Ok(())
    }

    /// Measure of the cylinder set of `pattern`: the product of the digit
    /// weights, evaluated in floats.
    pub fn cylinder_measure(&self, pattern: &Pattern) -> Result<f64> {
        self.check_pattern(pattern)?;
        Ok(pattern.digits().iter().map(|&d| self.weight(d)).product())
    }

    /// Exact counterpart of [`BernoulliMeasure::cylinder_measure`].
    pub fn cylinder_measure_exact(&self, pattern: &Pattern) -> Result<Rational> {
        self.check_pattern(pattern)?;
        match &self.weights {
            Weights::Exact(v) => Ok(pattern
                .digits()
                .iter()
                .map(|&d| v[d as usize].clone())
                .product()),
            Weights::Float(_) => Err(Error::ExactWeightsRequired(
                "measure has float weights".into(),
            )),
        }
    }

    /// The induced measure on width-`k` blocks: the weight of block
    /// `[d_1,…,d_k]` is the cylinder measure of that string. Block digits are
    /// indexed by the row-major encoding.
    pub fn block_measure(&self, width: u32) -> Result<BernoulliMeasure> {
        let code = BlockCode::new(self.alphabet.base(), width)?;
        let alphabet = code.block_alphabet();
        let weights = match &self.weights {
            Weights::Exact(_) => {
                let mut out = Vec::with_capacity(code.block_count() as usize);
                for block in 0..code.block_count() {
                    let p = Pattern::new(code.decode(block))?;
                    out.push(self.cylinder_measure_exact(&p)?);
                }
                Weights::Exact(out)
            }
            Weights::Float(_) => {
                let mut out = Vec::with_capacity(code.block_count() as usize);
                for block in 0..code.block_count() {
                    let p = Pattern::new(code.decode(block))?;
                    out.push(self.cylinder_measure(&p)?);
                }
                Weights::Float(out)
            }
        };
        Ok(BernoulliMeasure { alphabet, weights })
    }
}

/// The parity-perturbed block measure on width-`width` blocks over base
/// `base`: blocks whose digits all lie in `{0,1}` get weight
/// `b^{-K} − (−1)^{Σd} / (2 b^K)`, every other block gets `b^{-K}`.
///
/// The signed perturbations cancel, so the weights sum to exactly 1. A
/// stream of i.i.d. blocks from this measure, flattened to base digits, has
/// uniform statistics along every sufficiently thin periodic selection while
/// the aligned all-zero block keeps frequency `0.5 b^{-K}` instead of
/// `b^{-K}`.
pub fn parity_perturbed_measure(base: u32, width: u32) -> Result<BernoulliMeasure> {
    let code = BlockCode::new(base, width)?;
    let bk = BigInt::from(base).pow(width);
    let unperturbed = Rational::new(BigInt::one(), bk.clone());
    let half = Rational::new(BigInt::one(), BigInt::from(2) * bk);
    let mut weights = Vec::with_capacity(code.block_count() as usize);
    for block in 0..code.block_count() {
        let digits = code.decode(block);
        let w = if digits.iter().all(|&d| d <= 1) {
            let digit_sum: u32 = digits.iter().sum();
            if digit_sum.is_multiple_of(2) {
                unperturbed.clone() - half.clone()
            } else {
                unperturbed.clone() + half.clone()
            }
        } else {
            unperturbed.clone()
        };
        weights.push(w);
    }
    BernoulliMeasure::from_rationals(weights)
}

/// The width-2 block measure concentrated on doubled digits: block `[d,d]`
/// has weight `1/b`, all other blocks have weight 0. This is the block
/// distribution of a digit-duplicated stream; its wildcard-pattern measures
/// agree with the parity-perturbed measure's closed form.
pub fn duplicate_pair_measure(base: u32) -> Result<BernoulliMeasure> {
    let code = BlockCode::new(base, 2)?;
    let w = Rational::new(BigInt::one(), BigInt::from(base));
    let mut weights = vec![Rational::zero(); code.block_count() as usize];
    for d in 0..base {
        weights[code.encode(&[d, d])? as usize] = w.clone();
    }
    BernoulliMeasure::from_rationals(weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::FromPrimitive;

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn alphabet_rejects_small_base() {
        assert!(Alphabet::new(0).is_err());
        assert!(Alphabet::new(1).is_err());
        assert!(Alphabet::new(2).is_ok());
    }

    #[test]
    fn cylinder_uniform_b2() {
        let m = BernoulliMeasure::uniform(Alphabet::new(2).unwrap());
        let p = Pattern::new(vec![0, 1, 1]).unwrap();
        assert_eq!(m.cylinder_measure_exact(&p).unwrap(), rat(1, 8));
        assert_eq!(m.cylinder_measure(&p).unwrap(), 0.125);
    }

    #[test]
    fn cylinder_weighted() {
        let m = BernoulliMeasure::from_floats(vec![0.3, 0.7]).unwrap();
        let p = Pattern::new(vec![1, 1]).unwrap();
        let got = m.cylinder_measure(&p).unwrap();
        assert!((got - 0.49).abs() < 1e-15);
        // Exact route with the same weights as rationals.
        let m = BernoulliMeasure::from_rationals(vec![rat(3, 10), rat(7, 10)]).unwrap();
        assert_eq!(m.cylinder_measure_exact(&p).unwrap(), rat(49, 100));
    }

    #[test]
    fn cylinder_rejects_foreign_digit() {
        let m = BernoulliMeasure::uniform(Alphabet::new(2).unwrap());
        let p = Pattern::new(vec![0, 2]).unwrap();
        assert!(matches!(
            m.cylinder_measure(&p),
            Err(Error::InvalidPattern(_))
        ));
    }

    #[test]
    fn cylinder_of_perturbed_block_alphabet() {
        // One block digit of the width-2 perturbed measure, evaluated as a
        // length-1 cylinder of the block alphabet.
        let nu = parity_perturbed_measure(2, 2).unwrap();
        let code = BlockCode::new(2, 2).unwrap();
        let blk = code.encode(&[0, 0]).unwrap();
        let p = Pattern::new(vec![blk]).unwrap();
        assert_eq!(nu.cylinder_measure_exact(&p).unwrap(), rat(1, 8));
    }

    #[test]
    fn block_measure_uniform_b2_k2() {
        let m = BernoulliMeasure::uniform(Alphabet::new(2).unwrap());
        let mk = m.block_measure(2).unwrap();
        assert_eq!(mk.alphabet().base(), 4);
        for d in 0..4 {
            assert_eq!(*mk.weight_exact(d).unwrap(), rat(1, 4));
        }
    }

    #[test]
    fn block_measure_weighted() {
        let m = BernoulliMeasure::from_rationals(vec![rat(3, 10), rat(7, 10)]).unwrap();
        let mk = m.block_measure(2).unwrap();
        let expect = [rat(9, 100), rat(21, 100), rat(21, 100), rat(49, 100)];
        for (d, e) in expect.iter().enumerate() {
            assert_eq!(mk.weight_exact(d as u32).unwrap(), e);
        }
    }

    #[test]
    fn block_measure_uniform_b3_k2() {
        let m = BernoulliMeasure::uniform(Alphabet::new(3).unwrap());
        let mk = m.block_measure(2).unwrap();
        assert_eq!(mk.alphabet().base(), 9);
        for d in 0..9 {
            assert_eq!(*mk.weight_exact(d).unwrap(), rat(1, 9));
        }
    }

    #[test]
    fn block_measure_of_uniform_is_uniform() {
        for b in 2..=4u32 {
            for k in 1..=4u32 {
                let m = BernoulliMeasure::uniform(Alphabet::new(b).unwrap());
                let mk = m.block_measure(k).unwrap();
                let u = BernoulliMeasure::uniform(Alphabet::new(b.pow(k)).unwrap());
                assert_eq!(mk, u, "b={b} k={k}");
            }
        }
    }

    #[test]
    fn perturbed_measure_b2_k2_values() {
        let nu = parity_perturbed_measure(2, 2).unwrap();
        let expect = [rat(1, 8), rat(3, 8), rat(3, 8), rat(1, 8)];
        for (d, e) in expect.iter().enumerate() {
            assert_eq!(nu.weight_exact(d as u32).unwrap(), e, "block {d}");
        }
    }

    #[test]
    fn perturbed_measure_b3_k1_values() {
        let nu = parity_perturbed_measure(3, 1).unwrap();
        let expect = [rat(1, 6), rat(1, 2), rat(1, 3)];
        for (d, e) in expect.iter().enumerate() {
            assert_eq!(nu.weight_exact(d as u32).unwrap(), e, "digit {d}");
        }
    }

    #[test]
    fn perturbed_measure_all_zero_block_is_half_uniform() {
        for b in 2..=4u32 {
            for k in 1..=5u32 {
                let nu = parity_perturbed_measure(b, k).unwrap();
                let expect = rat(1, 2) * rat(1, (b as i64).pow(k));
                assert_eq!(*nu.weight_exact(0).unwrap(), expect, "b={b} K={k}");
            }
        }
    }

    #[test]
    fn perturbed_measure_sums_to_one() {
        // Exact sum; from_rationals would already have rejected anything else,
        // so recompute the sum independently here.
        for b in 2..=5u32 {
            for k in 1..=8u32 {
                let nu = parity_perturbed_measure(b, k).unwrap();
                let sum: Rational = (0..nu.alphabet().base())
                    .map(|d| nu.weight_exact(d).unwrap().clone())
                    .sum();
                assert!(sum.is_one(), "b={b} K={k}");
            }
        }
    }

    #[test]
    fn signed_perturbations_cancel_up_to_k12() {
        // Σ over {0,1}^K of (−1)^{Σd} = 0, checked exhaustively.
        for k in 1..=12u32 {
            let mut total: i64 = 0;
            for v in 0u64..(1 << k) {
                let ones = v.count_ones();
                total += if ones % 2 == 0 { 1 } else { -1 };
            }
            assert_eq!(total, 0, "K={k}");
        }
    }

    #[test]
    fn duplicate_pair_measure_values() {
        let m = duplicate_pair_measure(2).unwrap();
        let expect = [rat(1, 2), rat(0, 1), rat(0, 1), rat(1, 2)];
        for (d, e) in expect.iter().enumerate() {
            assert_eq!(m.weight_exact(d as u32).unwrap(), e);
        }
    }

    #[test]
    fn from_floats_validates() {
        assert!(BernoulliMeasure::from_floats(vec![0.5, 0.5]).is_ok());
        assert!(BernoulliMeasure::from_floats(vec![0.5, 0.6]).is_err());
        assert!(BernoulliMeasure::from_floats(vec![-0.5, 1.5]).is_err());
        let w = Rational::from_f64(0.25).unwrap();
        assert!(BernoulliMeasure::from_rationals(vec![w.clone(), w.clone(), w.clone()]).is_err());
    }

    #[test]
    fn block_code_roundtrip() {
        let code = BlockCode::new(3, 3).unwrap();
        for block in 0..code.block_count() {
            let digits = code.decode(block);
            assert_eq!(code.encode(&digits).unwrap(), block);
        }
        assert_eq!(code.encode(&[0, 1, 2]).unwrap(), 5);
    }
}
