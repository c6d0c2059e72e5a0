//! Digit streams and the block recoding between a base alphabet and its
//! width-`k` block alphabet.

use super::{Alphabet, BlockCode};
use crate::{Error, Result};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

/// A single-consumer stream of digits over a fixed alphabet.
///
/// Sequences are ordinary iterators; anything unbounded (a generator) or
/// finite (a materialized prefix, a file payload) can back one. Generators
/// guarantee every emitted digit is below the base; materialized
/// constructors validate eagerly.
pub struct DigitSequence {
    alphabet: Alphabet,
    iter: Box<dyn Iterator<Item = u32> + Send>,
}

impl DigitSequence {
    /// Wraps an iterator that is trusted to emit only digits below the base.
    pub fn new(alphabet: Alphabet, iter: impl Iterator<Item = u32> + Send + 'static) -> Self {
        DigitSequence {
            alphabet,
            iter: Box::new(iter),
        }
    }

    /// Materialized sequence; validates every digit up front.
    pub fn from_digits(alphabet: Alphabet, digits: Vec<u32>) -> Result<Self> {
        if let Some(&bad) = digits.iter().find(|&&d| !alphabet.contains(d)) {
            return Err(Error::InvalidPattern(format!(
                "digit {bad} out of alphabet of base {}",
                alphabet.base()
            )));
        }
        Ok(Self::from_shared(alphabet, Arc::new(digits)))
    }

    /// Materialized sequence sharing an already validated buffer.
    pub fn from_shared(alphabet: Alphabet, digits: Arc<Vec<u32>>) -> Self {
        let len = digits.len();
        let iter = (0..len).map(move |i| digits[i]);
        DigitSequence {
            alphabet,
            iter: Box::new(iter),
        }
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    /// Consumes and returns up to `n` digits.
    pub fn take_prefix(&mut self, n: usize) -> Vec<u32> {
        let mut out = Vec::with_capacity(n.min(1 << 24));
        for _ in 0..n {
            match self.iter.next() {
                Some(d) => out.push(d),
                None => break,
            }
        }
        out
    }
}

impl Iterator for DigitSequence {
    type Item = u32;

    fn next(&mut self) -> Option<u32> {
        self.iter.next()
    }
}

impl std::fmt::Debug for DigitSequence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DigitSequence")
            .field("alphabet", &self.alphabet)
            .finish_non_exhaustive()
    }
}

/// Count of trailing digits dropped by [`block_recode`] because they did not
/// fill a whole block. The count is final once the recoded stream ends.
#[derive(Debug, Clone, Default)]
pub struct DroppedDigits(Arc<AtomicU64>);

impl DroppedDigits {
    pub fn count(&self) -> u64 {
        self.0.load(Ordering::Relaxed)
    }
}

struct BlockRecode {
    input: DigitSequence,
    code: BlockCode,
    dropped: Arc<AtomicU64>,
}

impl Iterator for BlockRecode {
    type Item = u32;

    fn next(&mut self) -> Option<u32> {
        let mut acc: u64 = 0;
        for i in 0..self.code.width() {
            match self.input.next() {
                Some(d) => acc = acc * self.code.base() as u64 + d as u64,
                None => {
                    self.dropped.store(i as u64, Ordering::Relaxed);
                    return None;
                }
            }
        }
        Some(acc as u32)
    }
}

/// Groups consecutive digits into width-`width` blocks, emitting one block
/// digit (row-major code) per group. A trailing group shorter than `width`
/// is dropped; the number of dropped digits is readable from the returned
/// [`DroppedDigits`] handle after the stream ends.
pub fn block_recode(seq: DigitSequence, width: u32) -> Result<(DigitSequence, DroppedDigits)> {
    let code = BlockCode::new(seq.alphabet().base(), width)?;
    let handle = DroppedDigits::default();
    let recode = BlockRecode {
        input: seq,
        code,
        dropped: handle.0.clone(),
    };
    Ok((DigitSequence::new(code.block_alphabet(), recode), handle))
}

/// Inverse of [`block_recode`]: expands each width-`width` block digit back
/// into its `width` base digits. `seq` must be over the alphabet of size
/// `base^width`.
pub fn block_flatten(seq: DigitSequence, base: u32, width: u32) -> Result<DigitSequence> {
    let code = BlockCode::new(base, width)?;
    if seq.alphabet().base() != code.block_count() {
        return Err(Error::BaseMismatch(format!(
            "stream alphabet {} is not {}^{}",
            seq.alphabet().base(),
            base,
            width
        )));
    }
    let iter = seq.flat_map(move |block| code.decode(block));
    Ok(DigitSequence::new(Alphabet { base }, iter))
}
