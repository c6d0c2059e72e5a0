//! Property tests for the structural invariants.

use nlab::analyze::{count_chunked, count_slice};
use nlab::generators::GeneratorSpec;
use nlab::selectors::{select, PeriodicSet, SelectionSequence};
use nlab::shiftspace::{block_flatten, block_recode, Alphabet, DigitSequence};
use proptest::prelude::*;

fn seq(base: u32, digits: Vec<u32>) -> DigitSequence {
    DigitSequence::from_digits(Alphabet::new(base).unwrap(), digits).unwrap()
}

proptest! {
    #[test]
    fn recode_flatten_roundtrip(
        base in 2u32..=6,
        width in 1u32..=8,
        raw in prop::collection::vec(0u32..6, 0..300),
    ) {
        let digits: Vec<u32> = raw.into_iter().map(|d| d % base).collect();
        let (blocks, dropped) = block_recode(seq(base, digits.clone()), width).unwrap();
        let flat: Vec<u32> = block_flatten(blocks, base, width).unwrap().collect();
        let keep = digits.len() / width as usize * width as usize;
        prop_assert_eq!(&flat[..], &digits[..keep]);
        prop_assert_eq!(dropped.count() as usize, digits.len() - keep);
    }

    #[test]
    fn counting_conserves_and_marginalizes(
        base in 2u32..=4,
        max_len in 1u32..=4,
        digits in prop::collection::vec(0u32..4, 50..400),
        n_frac in 0.1f64..1.0,
    ) {
        let digits: Vec<u32> = digits.into_iter().map(|d| d % base).collect();
        let usable = digits.len() as u64;
        prop_assume!(usable >= max_len as u64);
        let n = (((usable - (max_len as u64 - 1)) as f64) * n_frac).max(1.0) as u64;
        let raw = count_slice(&digits, base, n, max_len);
        prop_assert!(!raw.truncated);
        for j in 1..=max_len {
            let total: u64 = raw.counts[(j - 1) as usize].iter().sum();
            prop_assert_eq!(total, n, "length {}", j);
        }
        for j in 1..max_len {
            for (c, &short) in raw.counts[(j - 1) as usize].iter().enumerate() {
                let longer: u64 = (0..base as usize)
                    .map(|d| raw.counts[j as usize][c * base as usize + d])
                    .sum();
                prop_assert_eq!(short, longer);
            }
        }
    }

    #[test]
    fn chunked_counting_matches_sequential(
        base in 2u32..=3,
        max_len in 1u32..=4,
        digits in prop::collection::vec(0u32..3, 30..500),
        cuts in prop::collection::vec(1u64..200, 0..8),
    ) {
        let digits: Vec<u32> = digits.into_iter().map(|d| d % base).collect();
        prop_assume!(digits.len() as u64 > max_len as u64);
        let n = digits.len() as u64 - (max_len as u64 - 1);
        let sequential = count_slice(&digits, base, n, max_len);
        let sizes: Vec<u64> = cuts.iter().map(|&c| c.max(max_len as u64)).collect();
        let chunked = count_chunked(&digits, base, n, max_len, &sizes);
        prop_assert_eq!(chunked, sequential);
    }

    #[test]
    fn ap_selection_composes(
        l1 in 1u64..=6,
        l2 in 1u64..=6,
        digits in prop::collection::vec(0u32..2, 10..600),
    ) {
        let two_step: Vec<u32> = select(
            select(
                seq(2, digits.clone()),
                &SelectionSequence::ap(1, l1).unwrap(),
            ),
            &SelectionSequence::ap(1, l2).unwrap(),
        )
        .collect();
        let one_step: Vec<u32> = select(
            seq(2, digits),
            &SelectionSequence::ap(1, l1 * l2).unwrap(),
        )
        .collect();
        prop_assert_eq!(two_step, one_step);
    }

    #[test]
    fn identity_selection_is_identity(digits in prop::collection::vec(0u32..2, 0..500)) {
        let got: Vec<u32> = select(
            seq(2, digits.clone()),
            &SelectionSequence::ap(1, 1).unwrap(),
        )
        .collect();
        prop_assert_eq!(got, digits);
    }

    #[test]
    fn selection_grammar_roundtrips(
        start in 1u64..1000,
        step in 1u64..1000,
        period in 1u64..40,
        picks in prop::collection::vec(any::<bool>(), 40),
    ) {
        let residues: Vec<u64> = (1..=period).filter(|&r| picks[(r - 1) as usize]).collect();
        let mut sels = vec![SelectionSequence::ap(start, step).unwrap()];
        if !residues.is_empty() {
            let p = PeriodicSet::new(period, residues).unwrap();
            sels.push(SelectionSequence::Periodic(p.clone()));
            sels.push(SelectionSequence::eventually_periodic(vec![], p).unwrap());
        }
        for sel in sels {
            let text = sel.to_string();
            prop_assert_eq!(SelectionSequence::parse(&text).unwrap(), sel, "{}", text);
        }
    }

    #[test]
    fn generator_grammar_roundtrips(
        base in 2u32..=8,
        seed in any::<u64>(),
        repeat in 2u32..=5,
    ) {
        let specs = [
            GeneratorSpec::Champernowne { base },
            GeneratorSpec::Iid {
                measure: nlab::generators::MeasureSpec::Uniform { base },
                seed,
            },
            GeneratorSpec::Duplicate {
                repeat,
                inner: Box::new(GeneratorSpec::Champernowne { base }),
            },
            GeneratorSpec::perturbed_point_iid(base, 2, seed),
        ];
        for spec in specs {
            let text = spec.to_string();
            prop_assert_eq!(GeneratorSpec::parse(&text).unwrap(), spec, "{}", text);
        }
    }

    #[test]
    fn fill_zero_selection_roundtrip(
        period in 1u64..12,
        picks in prop::collection::vec(any::<bool>(), 12),
        inner in prop::collection::vec(0u32..2, 1..200),
    ) {
        let residues: Vec<u64> = (1..=period).filter(|&r| picks[(r - 1) as usize]).collect();
        prop_assume!(!residues.is_empty());
        let sel = SelectionSequence::Periodic(PeriodicSet::new(period, residues).unwrap());
        let filled = nlab::generators::fill_zero(seq(2, inner.clone()), &sel);
        let back: Vec<u32> = select(filled, &sel).collect();
        prop_assert_eq!(back, inner);
    }
}
