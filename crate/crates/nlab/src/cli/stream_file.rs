//! The on-disk digit-stream format.
//!
//! A stream file is one header line followed by the payload:
//!
//! ```text
//! #nlab v1 b=<base> n=<count>[ spec=<generator>][ sel=<selection>]
//! ```
//!
//! For bases up to 10 the payload is one ASCII character per digit, wrapped
//! at 80 columns; for larger bases it is whitespace-separated decimal
//! integers. Whitespace in the payload is ignored on read. `n=?` declares an
//! unknown count (a streamed prefix); otherwise the payload must contain
//! exactly `n` digits.

use crate::shiftspace::Alphabet;
use crate::{Error, Result};
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;
use std::sync::Arc;

const MAGIC: &str = "#nlab v1";
const WRAP_CHARS: usize = 80;
const WRAP_VALUES: usize = 20;

/// A parsed stream file: validated digits plus provenance fields.
#[derive(Debug, Clone)]
pub struct StreamFile {
    pub base: u32,
    pub digits: Arc<Vec<u32>>,
    pub spec: Option<String>,
    pub selection: Option<String>,
}

impl StreamFile {
    pub fn alphabet(&self) -> Alphabet {
        Alphabet::new(self.base).expect("validated on read")
    }

    pub fn digit_sequence(&self) -> crate::shiftspace::DigitSequence {
        crate::shiftspace::DigitSequence::from_shared(self.alphabet(), self.digits.clone())
    }
}

/// Provenance recorded in the header.
#[derive(Debug, Clone, Default)]
pub struct StreamHeaderExtra {
    pub spec: Option<String>,
    pub selection: Option<String>,
}

pub fn write_stream(
    w: &mut dyn Write,
    base: u32,
    digits: &[u32],
    extra: &StreamHeaderExtra,
) -> Result<()> {
    write!(w, "{MAGIC} b={base} n={}", digits.len())?;
    if let Some(spec) = &extra.spec {
        write!(w, " spec={spec}")?;
    }
    if let Some(sel) = &extra.selection {
        write!(w, " sel={sel}")?;
    }
    writeln!(w)?;
    if base <= 10 {
        let mut line = String::with_capacity(WRAP_CHARS + 1);
        for chunk in digits.chunks(WRAP_CHARS) {
            line.clear();
            for &d in chunk {
                line.push(char::from_digit(d, 10).expect("digit below 10"));
            }
            writeln!(w, "{line}")?;
        }
    } else {
        for chunk in digits.chunks(WRAP_VALUES) {
            let line: Vec<String> = chunk.iter().map(|d| d.to_string()).collect();
            writeln!(w, "{}", line.join(" "))?;
        }
    }
    Ok(())
}

/// Writes via a temp file in the target directory, then renames, so readers
/// never observe a partial file.
pub fn write_stream_to_path(
    path: &Path,
    base: u32,
    digits: &[u32],
    extra: &StreamHeaderExtra,
) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let mut tmp = match dir {
        Some(dir) => tempfile::NamedTempFile::new_in(dir)?,
        None => tempfile::NamedTempFile::new_in(".")?,
    };
    write_stream(tmp.as_file_mut(), base, digits, extra)?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

pub fn read_stream(r: &mut dyn Read) -> Result<StreamFile> {
    let mut reader = BufReader::new(r);
    let mut header = String::new();
    reader.read_line(&mut header)?;
    let header = header.trim_end();
    let rest = header
        .strip_prefix(MAGIC)
        .ok_or_else(|| Error::MalformedStream(format!("missing `{MAGIC}` header")))?;

    let mut base: Option<u32> = None;
    let mut declared: Option<Option<u64>> = None;
    let mut extra = StreamHeaderExtra::default();
    for field in rest.split_whitespace() {
        let (key, value) = field.split_once('=').ok_or_else(|| {
            Error::MalformedStream(format!("bad header field {field:?}"))
        })?;
        match key {
            "b" => {
                base = Some(value.parse().map_err(|_| {
                    Error::MalformedStream(format!("bad base {value:?}"))
                })?)
            }
            "n" => {
                declared = Some(if value == "?" {
                    None
                } else {
                    Some(value.parse().map_err(|_| {
                        Error::MalformedStream(format!("bad count {value:?}"))
                    })?)
                })
            }
            "spec" => extra.spec = Some(value.to_string()),
            "sel" => extra.selection = Some(value.to_string()),
            other => {
                return Err(Error::MalformedStream(format!(
                    "unknown header field {other:?}"
                )))
            }
        }
    }
    let base = base.ok_or_else(|| Error::MalformedStream("missing b=".into()))?;
    let declared = declared.ok_or_else(|| Error::MalformedStream("missing n=".into()))?;
    let alphabet = Alphabet::new(base).map_err(|_| {
        Error::MalformedStream(format!("base {base} below 2"))
    })?;

    let mut digits = Vec::new();
    if base <= 10 {
        let mut body = String::new();
        reader.read_to_string(&mut body)?;
        for c in body.chars() {
            if c.is_ascii_whitespace() {
                continue;
            }
            let d = c
                .to_digit(10)
                .ok_or_else(|| Error::MalformedStream(format!("bad payload char {c:?}")))?;
            if !alphabet.contains(d) {
                return Err(Error::MalformedStream(format!(
                    "digit {d} out of alphabet of base {base}"
                )));
            }
            digits.push(d);
        }
    } else {
        let mut body = String::new();
        reader.read_to_string(&mut body)?;
        for token in body.split_whitespace() {
            let d: u32 = token
                .parse()
                .map_err(|_| Error::MalformedStream(format!("bad payload token {token:?}")))?;
            if !alphabet.contains(d) {
                return Err(Error::MalformedStream(format!(
                    "digit {d} out of alphabet of base {base}"
                )));
            }
            digits.push(d);
        }
    }
    if let Some(n) = declared {
        if digits.len() as u64 != n {
            return Err(Error::MalformedStream(format!(
                "header declares n={n} but payload has {} digits",
                digits.len()
            )));
        }
    }
    Ok(StreamFile {
        base,
        digits: Arc::new(digits),
        spec: extra.spec,
        selection: extra.selection,
    })
}

pub fn read_stream_from_path(path: &Path) -> Result<StreamFile> {
    let mut f = std::fs::File::open(path)?;
    read_stream(&mut f)
}
