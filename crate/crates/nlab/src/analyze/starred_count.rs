//! Block-aligned occurrence counting of wildcard patterns.

use crate::shiftspace::{BlockCode, DigitSequence, StarredPattern};
use crate::{Error, Result};

/// Occurrences of a starred pattern at block positions `1..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct StarredCount {
    pub requested_n: u64,
    pub n: u64,
    pub truncated: bool,
    pub count: u64,
    pub frequency: f64,
}

/// Counts the block positions `p ∈ 1..=n` where `pattern`'s `m` super-digits
/// match the blocks at `p..p+m-1` (wildcards match any digit); occurrences
/// overlap. `blocks` must be a stream over the pattern's block alphabet
/// (size `base^width`); `m - 1` blocks past `n` are read so late starts are
/// resolved.
pub fn count_starred_aligned(
    blocks: &mut DigitSequence,
    pattern: &StarredPattern,
    n: u64,
) -> Result<StarredCount> {
    let code = BlockCode::new(pattern.base(), pattern.width())?;
    if blocks.alphabet().base() != code.block_count() {
        return Err(Error::WidthMismatch(format!(
            "stream alphabet {} does not match block alphabet {}^{} = {}",
            blocks.alphabet().base(),
            pattern.base(),
            pattern.width(),
            code.block_count()
        )));
    }
    let m = pattern.len() as u64;
    let want = n + m - 1;
    // Ring of the last m decoded blocks.
    let mut ring: Vec<Vec<u32>> = vec![Vec::new(); m as usize];
    let mut read: u64 = 0;
    let mut count: u64 = 0;
    for block in blocks.by_ref() {
        read += 1;
        ring[((read - 1) % m) as usize] = code.decode(block);
        if read >= m && read - m < n {
            let start = read - m + 1;
            let hit = (0..m).all(|j| {
                let digits = &ring[((start + j - 1) % m) as usize];
                pattern.matches_block(j as usize, digits)
            });
            if hit {
                count += 1;
            }
        }
        if read == want {
            break;
        }
    }
    let (n_eff, truncated) = if read == want {
        (n, false)
    } else {
        (read.saturating_sub(m - 1).min(n), true)
    };
    let frequency = if n_eff > 0 {
        count as f64 / n_eff as f64
    } else {
        0.0
    };
    Ok(StarredCount {
        requested_n: n,
        n: n_eff,
        truncated,
        count,
        frequency,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shiftspace::Alphabet;

    fn blocks(block_base: u32, v: Vec<u32>) -> DigitSequence {
        DigitSequence::from_digits(Alphabet::new(block_base).unwrap(), v).unwrap()
    }

    #[test]
    fn full_wildcard_matches_everything() {
        let p = StarredPattern::parse(2, 2, "**").unwrap();
        let mut s = blocks(4, vec![0, 1, 2, 3, 0, 1]);
        let got = count_starred_aligned(&mut s, &p, 6).unwrap();
        assert_eq!(got.count, 6);
        assert_eq!(got.frequency, 1.0);
    }

    #[test]
    fn hand_counted_pairs() {
        // Blocks over width 2, base 2: codes 0=[0,0], 1=[0,1], 2=[1,0], 3=[1,1].
        // Pattern 0* matches blocks 0 and 1.
        let p = StarredPattern::parse(2, 2, "0*").unwrap();
        let mut s = blocks(4, vec![0, 3, 1, 2, 1, 0]);
        let got = count_starred_aligned(&mut s, &p, 6).unwrap();
        assert_eq!(got.count, 4);
    }

    #[test]
    fn two_superdigits_overlapping() {
        // Pattern 0*|*1 matches (block in {0,1}) followed by (block in {1,3}).
        let p = StarredPattern::parse(2, 2, "0*|*1").unwrap();
        // blocks:      0  1  3  1  0  2
        // window hits: 01 -> yes (0 then 1); 13 -> second=3 yes but first=1 yes? 1 is 0* -> [0,1] starts with 0: yes.
        let v = vec![0, 1, 3, 1, 0, 2];
        let mut s = blocks(4, v.clone());
        let got = count_starred_aligned(&mut s, &p, 5).unwrap();
        // Manual: windows starting 1..=5: (0,1) hit, (1,3) hit, (3,1) no, (1,0) no, (0,2) no.
        assert_eq!(got.count, 2);
    }

    #[test]
    fn truncation_reported() {
        let p = StarredPattern::parse(2, 2, "0*|**").unwrap();
        let mut s = blocks(4, vec![0, 1, 2]);
        let got = count_starred_aligned(&mut s, &p, 10).unwrap();
        assert!(got.truncated);
        assert_eq!(got.n, 2);
    }

    #[test]
    fn width_mismatch_rejected() {
        let p = StarredPattern::parse(2, 3, "0**").unwrap();
        let mut s = blocks(4, vec![0, 1]);
        assert!(matches!(
            count_starred_aligned(&mut s, &p, 2),
            Err(Error::WidthMismatch(_))
        ));
    }
}
