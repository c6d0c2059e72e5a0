//! Digit stream generators and their serializable specifications.
//!
//! A [`GeneratorSpec`] is a complete, textual description of a stream: the
//! same spec (including its seed) always instantiates a bit-identical
//! stream. The grammar is `kind:key=value,…` with nested specs in
//! parentheses, e.g.
//!
//! ```text
//! champernowne:b=2
//! iid:b=2,seed=42
//! iid:w=1/3|2/3,seed=7
//! concat:b=2
//! thm3:b=2,K=2,seed=7
//! dup:r=2,inner=(champernowne:b=2)
//! fill:sel=(periodic:m=2,r=2),inner=(iid:b=2,seed=1)
//! ```

mod rng;
mod streams;

pub use streams::{
    champernowne, duplicate, fill_zero, iid_sampled, perturbed_point, stage_concat,
    stage_concat_first_stage,
};

use crate::selectors::SelectionSequence;
use crate::shiftspace::{
    parity_perturbed_measure, Alphabet, BernoulliMeasure, DigitSequence,
};
use crate::{Error, Rational, Result};
use num::BigInt;

/// A measure given by shape, buildable and printable.
#[derive(Debug, Clone, PartialEq)]
pub enum MeasureSpec {
    Uniform { base: u32 },
    Weights { weights: Vec<Rational> },
    /// The parity-perturbed block measure on width-`width` blocks over base
    /// `base` (CLI token `thm3`).
    Perturbed { base: u32, width: u32 },
}

impl MeasureSpec {
    pub fn build(&self) -> Result<BernoulliMeasure> {
        match self {
            MeasureSpec::Uniform { base } => Ok(BernoulliMeasure::uniform(Alphabet::new(*base)?)),
            MeasureSpec::Weights { weights } => BernoulliMeasure::from_rationals(weights.clone()),
            MeasureSpec::Perturbed { base, width } => parity_perturbed_measure(*base, *width),
        }
    }

    /// Grammar: `uniform:b=2` | `weights:1/3|2/3` | `thm3:b=2,K=2`.
    /// Weight entries accept `p/q`, integers, and finite decimals, all read
    /// exactly.
    pub fn parse(text: &str) -> Result<Self> {
        let (kind, rest) = text.split_once(':').ok_or_else(|| Error::Parse {
            input: text.into(),
            pos: text.len(),
            msg: "expected `kind:params`".into(),
        })?;
        match kind {
            "uniform" => {
                let fields = parse_fields(text, rest)?;
                Ok(MeasureSpec::Uniform {
                    base: take_u64(text, &fields, "b")? as u32,
                })
            }
            "weights" => {
                let weights = rest
                    .split('|')
                    .map(|w| parse_rational(text, w))
                    .collect::<Result<Vec<_>>>()?;
                Ok(MeasureSpec::Weights { weights })
            }
            "thm3" => {
                let fields = parse_fields(text, rest)?;
                Ok(MeasureSpec::Perturbed {
                    base: take_u64(text, &fields, "b")? as u32,
                    width: take_u64(text, &fields, "K")? as u32,
                })
            }
            _ => Err(Error::Parse {
                input: text.into(),
                pos: 0,
                msg: format!("unknown measure kind {kind:?}"),
            }),
        }
    }
}

impl std::fmt::Display for MeasureSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MeasureSpec::Uniform { base } => write!(f, "uniform:b={base}"),
            MeasureSpec::Weights { weights } => {
                write!(f, "weights:")?;
                for (i, w) in weights.iter().enumerate() {
                    if i > 0 {
                        write!(f, "|")?;
                    }
                    write!(f, "{w}")?;
                }
                Ok(())
            }
            MeasureSpec::Perturbed { base, width } => write!(f, "thm3:b={base},K={width}"),
        }
    }
}

/// A fully serializable stream description. Instantiating the same spec
/// twice yields bit-identical streams; all randomness is seeded.
#[derive(Debug, Clone, PartialEq)]
pub enum GeneratorSpec {
    /// `champernowne:b=<base>`
    Champernowne { base: u32 },
    /// `iid:…,seed=<seed>`
    Iid { measure: MeasureSpec, seed: u64 },
    /// `concat:…[,growth=<g>]` — stage concatenation, growth defaults to 2.
    Concat { measure: MeasureSpec, growth: u32 },
    /// `thm3:b=<b>,K=<K>,…` — width-`K` blocks drawn from the
    /// parity-perturbed measure by the inner generator, flattened to base
    /// digits, optionally behind `pad` leading zeros.
    PerturbedPoint {
        base: u32,
        width: u32,
        inner: Box<GeneratorSpec>,
        pad: u32,
    },
    /// `dup:r=<r>,inner=(<spec>)`
    Duplicate {
        repeat: u32,
        inner: Box<GeneratorSpec>,
    },
    /// `fill:sel=(<selection>),inner=(<spec>)`
    FillZero {
        selection: SelectionSequence,
        inner: Box<GeneratorSpec>,
    },
}

impl GeneratorSpec {
    /// Convenience constructor for the perturbed point with an i.i.d. inner
    /// generator over the matching parity-perturbed measure.
    pub fn perturbed_point_iid(base: u32, width: u32, seed: u64) -> Self {
        GeneratorSpec::PerturbedPoint {
            base,
            width,
            inner: Box::new(GeneratorSpec::Iid {
                measure: MeasureSpec::Perturbed { base, width },
                seed,
            }),
            pad: 0,
        }
    }

    /// The alphabet of the emitted digits.
    pub fn alphabet(&self) -> Result<Alphabet> {
        match self {
            GeneratorSpec::Champernowne { base } => Alphabet::new(*base),
            GeneratorSpec::Iid { measure, .. } | GeneratorSpec::Concat { measure, .. } => {
                Ok(measure.build()?.alphabet())
            }
            GeneratorSpec::PerturbedPoint { base, .. } => Alphabet::new(*base),
            GeneratorSpec::Duplicate { inner, .. } => inner.alphabet(),
            GeneratorSpec::FillZero { inner, .. } => inner.alphabet(),
        }
    }

    /// The product measure this generator's stream targets (is expected to be
    /// normal for), when it targets one.
    pub fn target_measure(&self) -> Result<Option<BernoulliMeasure>> {
        match self {
            GeneratorSpec::Champernowne { base } => {
                Ok(Some(BernoulliMeasure::uniform(Alphabet::new(*base)?)))
            }
            GeneratorSpec::Iid { measure, .. } | GeneratorSpec::Concat { measure, .. } => {
                Ok(Some(measure.build()?))
            }
            // Duplicated, filled, and perturbed streams are the
            // counterexamples; they target no product measure.
            _ => Ok(None),
        }
    }

    /// Builds a fresh stream. Independent instantiations never share state.
    pub fn instantiate(&self) -> Result<DigitSequence> {
        match self {
            GeneratorSpec::Champernowne { base } => champernowne(*base),
            GeneratorSpec::Iid { measure, seed } => Ok(iid_sampled(&measure.build()?, *seed)),
            GeneratorSpec::Concat { measure, growth } => stage_concat(&measure.build()?, *growth),
            GeneratorSpec::PerturbedPoint {
                base,
                width,
                inner,
                pad,
            } => {
                let nu = parity_perturbed_measure(*base, *width)?;
                let inner_measure = inner.target_measure()?.ok_or_else(|| {
                    Error::MeasureMismatch(
                        "inner generator does not target a product measure".into(),
                    )
                })?;
                if inner_measure != nu {
                    return Err(Error::MeasureMismatch(format!(
                        "inner generator must target the parity-perturbed measure \
                         for b={base}, K={width}"
                    )));
                }
                perturbed_point(*base, *width, inner.instantiate()?, *pad)
            }
            GeneratorSpec::Duplicate { repeat, inner } => duplicate(inner.instantiate()?, *repeat),
            GeneratorSpec::FillZero { selection, inner } => {
                Ok(fill_zero(inner.instantiate()?, selection))
            }
        }
    }

    /// Parses the `kind:key=value,…` grammar shown in the module docs.
    pub fn parse(text: &str) -> Result<Self> {
        let err = |pos: usize, msg: String| Error::Parse {
            input: text.to_string(),
            pos,
            msg,
        };
        let (kind, rest) = text
            .split_once(':')
            .ok_or_else(|| err(text.len(), "expected `kind:params`".into()))?;
        let at = kind.len() + 1;
        match kind {
            "champernowne" => {
                let fields = parse_fields(text, rest)?;
                Ok(GeneratorSpec::Champernowne {
                    base: take_u64(text, &fields, "b")? as u32,
                })
            }
            "iid" => {
                let fields = parse_fields(text, rest)?;
                let measure = measure_from_fields(text, at, &fields)?;
                Ok(GeneratorSpec::Iid {
                    measure,
                    seed: take_u64(text, &fields, "seed")?,
                })
            }
            "concat" => {
                let fields = parse_fields(text, rest)?;
                let measure = measure_from_fields(text, at, &fields)?;
                let growth = opt_u64(text, &fields, "growth")?.unwrap_or(2) as u32;
                Ok(GeneratorSpec::Concat { measure, growth })
            }
            "thm3" => {
                let fields = parse_fields(text, rest)?;
                let base = take_u64(text, &fields, "b")? as u32;
                let width = take_u64(text, &fields, "K")? as u32;
                let pad = opt_u64(text, &fields, "pad")?.unwrap_or(0) as u32;
                let inner = if let Some(inner_text) = lookup(&fields, "inner") {
                    if inner_text == "concat" {
                        Box::new(GeneratorSpec::Concat {
                            measure: MeasureSpec::Perturbed { base, width },
                            growth: 2,
                        })
                    } else {
                        Box::new(GeneratorSpec::parse(inner_text)?)
                    }
                } else {
                    let seed = take_u64(text, &fields, "seed")?;
                    Box::new(GeneratorSpec::Iid {
                        measure: MeasureSpec::Perturbed { base, width },
                        seed,
                    })
                };
                Ok(GeneratorSpec::PerturbedPoint {
                    base,
                    width,
                    inner,
                    pad,
                })
            }
            "dup" => {
                let fields = parse_fields(text, rest)?;
                let repeat = take_u64(text, &fields, "r")? as u32;
                let inner_text = lookup(&fields, "inner")
                    .ok_or_else(|| err(at, "missing inner=(…)".into()))?;
                Ok(GeneratorSpec::Duplicate {
                    repeat,
                    inner: Box::new(GeneratorSpec::parse(inner_text)?),
                })
            }
            "fill" => {
                let fields = parse_fields(text, rest)?;
                let sel_text = lookup(&fields, "sel")
                    .ok_or_else(|| err(at, "missing sel=(…)".into()))?;
                let inner_text = lookup(&fields, "inner")
                    .ok_or_else(|| err(at, "missing inner=(…)".into()))?;
                Ok(GeneratorSpec::FillZero {
                    selection: SelectionSequence::parse(sel_text)?,
                    inner: Box::new(GeneratorSpec::parse(inner_text)?),
                })
            }
            _ => Err(err(0, format!("unknown generator kind {kind:?}"))),
        }
    }
}

impl std::fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GeneratorSpec::Champernowne { base } => write!(f, "champernowne:b={base}"),
            GeneratorSpec::Iid { measure, seed } => match measure {
                MeasureSpec::Uniform { base } => write!(f, "iid:b={base},seed={seed}"),
                other => write!(f, "iid:m=({other}),seed={seed}"),
            },
            GeneratorSpec::Concat { measure, growth } => match measure {
                MeasureSpec::Uniform { base } => write!(f, "concat:b={base},growth={growth}"),
                other => write!(f, "concat:m=({other}),growth={growth}"),
            },
            GeneratorSpec::PerturbedPoint {
                base,
                width,
                inner,
                pad,
            } => {
                write!(f, "thm3:b={base},K={width}")?;
                match inner.as_ref() {
                    GeneratorSpec::Iid {
                        measure: MeasureSpec::Perturbed { base: b2, width: w2 },
                        seed,
                    } if b2 == base && w2 == width => write!(f, ",seed={seed}")?,
                    other => write!(f, ",inner=({other})")?,
                }
                if *pad > 0 {
                    write!(f, ",pad={pad}")?;
                }
                Ok(())
            }
            GeneratorSpec::Duplicate { repeat, inner } => {
                write!(f, "dup:r={repeat},inner=({inner})")
            }
            GeneratorSpec::FillZero { selection, inner } => {
                write!(f, "fill:sel=({selection}),inner=({inner})")
            }
        }
    }
}

/// Splits `key=value,key=value` at top level, honoring parentheses in
/// values. Returns (key, value) pairs with parens stripped from values.
fn parse_fields<'a>(input: &str, body: &'a str) -> Result<Vec<(&'a str, &'a str)>> {
    let mut fields = Vec::new();
    let mut depth = 0usize;
    let mut start = 0usize;
    let bytes = body.as_bytes();
    for i in 0..=bytes.len() {
        let at_end = i == bytes.len();
        let c = if at_end { b',' } else { bytes[i] };
        match c {
            b'(' => depth += 1,
            b')' => {
                depth = depth.checked_sub(1).ok_or_else(|| Error::Parse {
                    input: input.to_string(),
                    pos: i,
                    msg: "unbalanced `)`".into(),
                })?
            }
            b',' if depth == 0 => {
                let part = &body[start..i];
                if !part.is_empty() {
                    let (k, v) = part.split_once('=').ok_or_else(|| Error::Parse {
                        input: input.to_string(),
                        pos: start,
                        msg: format!("expected key=value, got {part:?}"),
                    })?;
                    let v = v
                        .strip_prefix('(')
                        .and_then(|v| v.strip_suffix(')'))
                        .unwrap_or(v);
                    fields.push((k, v));
                }
                start = i + 1;
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err(Error::Parse {
            input: input.to_string(),
            pos: body.len(),
            msg: "unbalanced `(`".into(),
        });
    }
    Ok(fields)
}

fn lookup<'a>(fields: &[(&'a str, &'a str)], key: &str) -> Option<&'a str> {
    fields.iter().find(|(k, _)| *k == key).map(|(_, v)| *v)
}

fn take_u64(input: &str, fields: &[(&str, &str)], key: &str) -> Result<u64> {
    let v = lookup(fields, key).ok_or_else(|| Error::Parse {
        input: input.to_string(),
        pos: 0,
        msg: format!("missing {key}="),
    })?;
    v.parse().map_err(|_| Error::Parse {
        input: input.to_string(),
        pos: 0,
        msg: format!("{key}= expects an integer, got {v:?}"),
    })
}

fn opt_u64(input: &str, fields: &[(&str, &str)], key: &str) -> Result<Option<u64>> {
    match lookup(fields, key) {
        None => Ok(None),
        Some(_) => take_u64(input, fields, key).map(Some),
    }
}

fn measure_from_fields(
    input: &str,
    pos: usize,
    fields: &[(&str, &str)],
) -> Result<MeasureSpec> {
    if let Some(m) = lookup(fields, "m") {
        return MeasureSpec::parse(m);
    }
    if let Some(w) = lookup(fields, "w") {
        let weights = w
            .split('|')
            .map(|x| parse_rational(input, x))
            .collect::<Result<Vec<_>>>()?;
        return Ok(MeasureSpec::Weights { weights });
    }
    if let Some(_b) = lookup(fields, "b") {
        return Ok(MeasureSpec::Uniform {
            base: take_u64(input, fields, "b")? as u32,
        });
    }
    Err(Error::Parse {
        input: input.to_string(),
        pos,
        msg: "expected one of b=, w=, m=(…)".into(),
    })
}

/// Reads `p/q`, a plain integer, or a finite decimal, exactly.
fn parse_rational(input: &str, text: &str) -> Result<Rational> {
    let bad = |msg: String| Error::Parse {
        input: input.to_string(),
        pos: 0,
        msg,
    };
    if let Some((p, q)) = text.split_once('/') {
        let p: BigInt = p
            .parse()
            .map_err(|_| bad(format!("bad numerator {p:?}")))?;
        let q: BigInt = q
            .parse()
            .map_err(|_| bad(format!("bad denominator {q:?}")))?;
        if q == BigInt::from(0) {
            return Err(bad("zero denominator".into()));
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((int, frac)) = text.split_once('.') {
        let digits = format!("{int}{frac}");
        let p: BigInt = digits
            .parse()
            .map_err(|_| bad(format!("bad decimal {text:?}")))?;
        let q = BigInt::from(10u32).pow(frac.len() as u32);
        return Ok(Rational::new(p, q));
    }
    let p: BigInt = text
        .parse()
        .map_err(|_| bad(format!("bad number {text:?}")))?;
    Ok(Rational::from_integer(p))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grammar_roundtrip() {
        let texts = [
            "champernowne:b=2",
            "iid:b=2,seed=42",
            "iid:m=(weights:1/3|2/3),seed=7",
            "concat:b=2,growth=2",
            "thm3:b=2,K=2,seed=7",
            "dup:r=2,inner=(champernowne:b=2)",
            "fill:sel=(periodic:m=2,r=2),inner=(iid:b=2,seed=1)",
            "dup:r=3,inner=(fill:sel=(ap:k=1,l=2),inner=(concat:b=3,growth=2))",
        ];
        for text in texts {
            let spec = GeneratorSpec::parse(text).unwrap();
            assert_eq!(spec.to_string(), text, "display of {text}");
            assert_eq!(GeneratorSpec::parse(&spec.to_string()).unwrap(), spec);
        }
    }

    #[test]
    fn decimal_weights_are_exact() {
        let spec = GeneratorSpec::parse("iid:w=0.3|0.7,seed=1").unwrap();
        match &spec {
            GeneratorSpec::Iid {
                measure: MeasureSpec::Weights { weights },
                ..
            } => {
                assert_eq!(
                    weights[0],
                    Rational::new(BigInt::from(3), BigInt::from(10))
                );
                assert_eq!(
                    weights[1],
                    Rational::new(BigInt::from(7), BigInt::from(10))
                );
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn instantiation_is_deterministic() {
        let texts = [
            "champernowne:b=3",
            "iid:b=2,seed=9",
            "concat:b=2,growth=2",
            "thm3:b=2,K=2,seed=9",
            "dup:r=2,inner=(iid:b=2,seed=9)",
            "fill:sel=(periodic:m=3,r=1|2),inner=(iid:b=2,seed=9)",
        ];
        for text in texts {
            let spec = GeneratorSpec::parse(text).unwrap();
            let a = spec.instantiate().unwrap().take_prefix(10_000);
            let b = spec.instantiate().unwrap().take_prefix(10_000);
            assert_eq!(a, b, "{text}");
        }
    }

    #[test]
    fn perturbed_point_rejects_wrong_inner_measure() {
        let spec = GeneratorSpec::PerturbedPoint {
            base: 2,
            width: 2,
            inner: Box::new(GeneratorSpec::Iid {
                measure: MeasureSpec::Uniform { base: 4 },
                seed: 1,
            }),
            pad: 0,
        };
        assert!(matches!(
            spec.instantiate(),
            Err(Error::MeasureMismatch(_))
        ));
        let spec = GeneratorSpec::PerturbedPoint {
            base: 2,
            width: 2,
            inner: Box::new(GeneratorSpec::Duplicate {
                repeat: 2,
                inner: Box::new(GeneratorSpec::Champernowne { base: 4 }),
            }),
            pad: 0,
        };
        assert!(matches!(
            spec.instantiate(),
            Err(Error::MeasureMismatch(_))
        ));
    }

    #[test]
    fn perturbed_point_accepts_matching_inner() {
        let spec = GeneratorSpec::perturbed_point_iid(2, 2, 7);
        assert!(spec.instantiate().is_ok());
        let spec = GeneratorSpec::parse("thm3:b=2,K=2,inner=concat").unwrap();
        assert!(spec.instantiate().is_ok());
    }

    #[test]
    fn parse_errors_carry_input() {
        match GeneratorSpec::parse("dup:r=2") {
            Err(Error::Parse { input, .. }) => assert_eq!(input, "dup:r=2"),
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(GeneratorSpec::parse("dup:r=2,inner=(champernowne:b=2").is_err());
        assert!(GeneratorSpec::parse("iid:b=2").is_err()); // missing seed
    }
}
