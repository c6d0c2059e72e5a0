//! Wildcard block patterns: width-`K` super-digits over `D ∪ {*}` in which
//! every super-digit keeps at least one wildcard.
//!
//! A starred pattern denotes the set of all block strings obtained by filling
//! each `*` with any digit, independently. Under the parity-perturbed block
//! measure (and under the doubled-digit pair measure) the measure of that set
//! has the closed form `b^{-n}`, `n` = number of concrete digits.

use super::{BernoulliMeasure, BlockCode, Pattern};
use crate::{Error, Rational, Result};
use num::{BigInt, One, Zero};

/// One cell of a starred super-digit: a concrete digit or a wildcard.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    Digit(u32),
    Star,
}

/// A string of `m ≥ 1` width-`K` super-digits, each containing at least one
/// wildcard. Correct by construction: validation happens in [`StarredPattern::new`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StarredPattern {
    base: u32,
    width: u32,
    superdigits: Vec<Vec<Slot>>,
}

impl StarredPattern {
    pub fn new(base: u32, width: u32, superdigits: Vec<Vec<Slot>>) -> Result<Self> {
        if base < 2 {
            return Err(Error::InvalidBase(base));
        }
        if width < 1 {
            return Err(Error::InvalidStarredPattern("width must be >= 1".into()));
        }
        if superdigits.is_empty() {
            return Err(Error::InvalidStarredPattern(
                "pattern must have at least one super-digit".into(),
            ));
        }
        for (i, sd) in superdigits.iter().enumerate() {
            if sd.len() != width as usize {
                return Err(Error::InvalidStarredPattern(format!(
                    "super-digit {i} has {} cells, expected {width}",
                    sd.len()
                )));
            }
            if !sd.iter().any(|s| matches!(s, Slot::Star)) {
                return Err(Error::InvalidStarredPattern(format!(
                    "super-digit {i} has no wildcard; it is a plain block"
                )));
            }
            for s in sd {
                if let Slot::Digit(d) = s {
                    if *d >= base {
                        return Err(Error::InvalidStarredPattern(format!(
                            "digit {d} out of alphabet of base {base}"
                        )));
                    }
                }
            }
        }
        Ok(StarredPattern {
            base,
            width,
            superdigits,
        })
    }

    /// Parses forms like `0*|*1` (digits as single chars, base ≤ 10) or
    /// `0,*|*,1` (comma-separated cells); `|` separates super-digits.
    pub fn parse(base: u32, width: u32, text: &str) -> Result<Self> {
        let mut superdigits = Vec::new();
        for part in text.split('|') {
            let cells: Vec<&str> = if part.contains(',') {
                part.split(',').collect()
            } else {
                part.split_terminator("").skip(1).collect()
            };
            let mut sd = Vec::with_capacity(cells.len());
            for cell in cells {
                if cell == "*" {
                    sd.push(Slot::Star);
                } else {
                    let d: u32 = cell.parse().map_err(|_| {
                        Error::InvalidStarredPattern(format!("bad cell {cell:?} in {text:?}"))
                    })?;
                    sd.push(Slot::Digit(d));
                }
            }
            superdigits.push(sd);
        }
        StarredPattern::new(base, width, superdigits)
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn superdigits(&self) -> &[Vec<Slot>] {
        &self.superdigits
    }

    /// Number of super-digits `m`.
    pub fn len(&self) -> usize {
        self.superdigits.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Number of concrete (non-wildcard) digits across the whole pattern.
    pub fn concrete_digits(&self) -> u32 {
        self.superdigits
            .iter()
            .flatten()
            .filter(|s| matches!(s, Slot::Digit(_)))
            .count() as u32
    }

    /// Whether the given decoded block matches one super-digit.
    pub(crate) fn matches_block(&self, superdigit: usize, block_digits: &[u32]) -> bool {
        self.superdigits[superdigit]
            .iter()
            .zip(block_digits)
            .all(|(slot, &d)| match slot {
                Slot::Star => true,
                Slot::Digit(x) => *x == d,
            })
    }

    /// All block codes that complete one super-digit.
    fn completions(&self, superdigit: usize, code: &BlockCode) -> Vec<u32> {
        let sd = &self.superdigits[superdigit];
        let mut out: Vec<Vec<u32>> = vec![Vec::new()];
        for slot in sd {
            let choices: Vec<u32> = match slot {
                Slot::Digit(d) => vec![*d],
                Slot::Star => (0..self.base).collect(),
            };
            let mut next = Vec::with_capacity(out.len() * choices.len());
            for prefix in &out {
                for &c in &choices {
                    let mut ext = prefix.clone();
                    ext.push(c);
                    next.push(ext);
                }
            }
            out = next;
        }
        out.iter()
            .map(|digits| code.encode(digits).expect("validated digits"))
            .collect()
    }
}

impl std::fmt::Display for StarredPattern {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (i, sd) in self.superdigits.iter().enumerate() {
            if i > 0 {
                write!(f, "|")?;
            }
            for (j, slot) in sd.iter().enumerate() {
                if j > 0 && self.base > 10 {
                    write!(f, ",")?;
                }
                match slot {
                    Slot::Star => write!(f, "*")?,
                    Slot::Digit(d) => write!(f, "{d}")?,
                }
            }
        }
        Ok(())
    }
}

/// Closed-form measure of a starred pattern under the parity-perturbed block
/// measure of matching base and width: `b^{-n}` with `n` the number of
/// concrete digits.
pub fn starred_measure_closed_form(pattern: &StarredPattern) -> Rational {
    let n = pattern.concrete_digits();
    Rational::new(BigInt::one(), BigInt::from(pattern.base()).pow(n))
}

/// Oracle for the closed form: sums the exact cylinder measure of every
/// completion of every wildcard. `measure` must live on the pattern's block
/// alphabet (size `base^width`) and carry exact weights.
pub fn starred_measure_bruteforce(
    measure: &BernoulliMeasure,
    pattern: &StarredPattern,
) -> Result<Rational> {
    let code = BlockCode::new(pattern.base(), pattern.width())?;
    if measure.alphabet().base() != code.block_count() {
        return Err(Error::WidthMismatch(format!(
            "measure alphabet {} does not match block alphabet {}^{} = {}",
            measure.alphabet().base(),
            pattern.base(),
            pattern.width(),
            code.block_count()
        )));
    }
    // Cross product of completions over all super-digits, summed as full
    // cylinder measures. Deliberately unfactored: this is the independent
    // check for the closed form.
    let per_superdigit: Vec<Vec<u32>> = (0..pattern.len())
        .map(|i| pattern.completions(i, &code))
        .collect();
    let mut total = Rational::zero();
    let mut choice = vec![0usize; per_superdigit.len()];
    loop {
        let blocks: Vec<u32> = choice
            .iter()
            .enumerate()
            .map(|(i, &c)| per_superdigit[i][c])
            .collect();
        total += measure.cylinder_measure_exact(&Pattern::new(blocks)?)?;
        // Odometer over the completion choices.
        let mut pos = per_superdigit.len();
        loop {
            if pos == 0 {
                return Ok(total);
            }
            pos -= 1;
            choice[pos] += 1;
            if choice[pos] < per_superdigit[pos].len() {
                break;
            }
            choice[pos] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shiftspace::{duplicate_pair_measure, parity_perturbed_measure};

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    fn pat(base: u32, width: u32, text: &str) -> StarredPattern {
        StarredPattern::parse(base, width, text).unwrap()
    }

    #[test]
    fn rejects_starless_superdigit() {
        assert!(matches!(
            StarredPattern::parse(2, 2, "01"),
            Err(Error::InvalidStarredPattern(_))
        ));
        assert!(StarredPattern::parse(2, 2, "0*").is_ok());
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(starred_measure_closed_form(&pat(2, 2, "0*")), rat(1, 2));
        assert_eq!(starred_measure_closed_form(&pat(2, 2, "**")), rat(1, 1));
        assert_eq!(starred_measure_closed_form(&pat(2, 2, "0*|*1")), rat(1, 4));
    }

    #[test]
    fn bruteforce_examples() {
        let nu = parity_perturbed_measure(2, 2).unwrap();
        assert_eq!(
            starred_measure_bruteforce(&nu, &pat(2, 2, "0*")).unwrap(),
            rat(1, 2)
        );
        assert_eq!(
            starred_measure_bruteforce(&nu, &pat(2, 2, "*0|1*")).unwrap(),
            rat(1, 4)
        );
    }

    #[test]
    fn bruteforce_on_duplicate_pair_measure() {
        // The doubled-digit pair measure satisfies the same closed form.
        let m = duplicate_pair_measure(2).unwrap();
        assert_eq!(
            starred_measure_bruteforce(&m, &pat(2, 2, "0*")).unwrap(),
            rat(1, 2)
        );
        assert_eq!(
            starred_measure_bruteforce(&m, &pat(2, 2, "**")).unwrap(),
            rat(1, 1)
        );
    }

    #[test]
    fn bruteforce_rejects_width_mismatch() {
        let nu = parity_perturbed_measure(2, 3).unwrap();
        assert!(matches!(
            starred_measure_bruteforce(&nu, &pat(2, 2, "0*")),
            Err(Error::WidthMismatch(_))
        ));
    }

    /// Every starred pattern of the given shape, for exhaustive checks.
    fn all_starred_patterns(base: u32, width: u32, m: usize) -> Vec<StarredPattern> {
        // Enumerate (base+1)^width candidate super-digits, keep the starred
        // ones, then all m-tuples.
        let cells = base + 1; // digit values 0..base, star = base
        let mut superdigits = Vec::new();
        for raw in 0..cells.pow(width) {
            let mut rest = raw;
            let mut sd = Vec::with_capacity(width as usize);
            for _ in 0..width {
                let v = rest % cells;
                rest /= cells;
                sd.push(if v == base { Slot::Star } else { Slot::Digit(v) });
            }
            if sd.iter().any(|s| matches!(s, Slot::Star)) {
                superdigits.push(sd);
            }
        }
        let mut patterns = Vec::new();
        let mut choice = vec![0usize; m];
        'outer: loop {
            let sds: Vec<Vec<Slot>> = choice.iter().map(|&c| superdigits[c].clone()).collect();
            patterns.push(StarredPattern::new(base, width, sds).unwrap());
            let mut pos = m;
            loop {
                if pos == 0 {
                    break 'outer;
                }
                pos -= 1;
                choice[pos] += 1;
                if choice[pos] < superdigits.len() {
                    break;
                }
                choice[pos] = 0;
            }
        }
        patterns
    }

    #[test]
    fn closed_form_matches_bruteforce_small() {
        // Small slice of the exhaustive acceptance check, kept as a unit test.
        let nu = parity_perturbed_measure(2, 2).unwrap();
        for p in all_starred_patterns(2, 2, 1) {
            assert_eq!(
                starred_measure_bruteforce(&nu, &p).unwrap(),
                starred_measure_closed_form(&p),
                "pattern {p}"
            );
        }
    }

    #[test]
    fn parse_display_roundtrip() {
        for text in ["0*", "**", "0*|*1", "*0|1*"] {
            let p = pat(2, 2, text);
            assert_eq!(p.to_string(), text);
        }
    }
}
