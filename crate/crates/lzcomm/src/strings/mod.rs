//! Symbol strings and greedy LZ77-family factorizations.
//!
//! Three factorization modes share one representation:
//!
//! * `Lzn` — non self-referencing LZ77: each factor is the longest previous
//!   match that ends strictly before the factor, plus one following symbol.
//! * `Lzs` — self-referencing LZ77: the previous match may overlap the factor.
//! * `Cn`  — non self-referencing C-factorization: each factor is either a
//!   fresh letter or the longest prefix with a non-overlapping previous
//!   occurrence (no appended symbol).
//!
//! Sources always pick the leftmost maximizing occurrence, which makes every
//! factorization canonical. The fast paths are suffix-array based; the
//! `oracle` module holds independent brute-force implementations used to
//! pin them down in tests.

mod factorize;
mod index;
mod oracle;

pub use oracle::oracle_factorize;

use std::fmt;
use thiserror::Error;

/// Reserved id for the opening sentinel (`#`).
pub const SENTINEL_OPEN: u32 = u32::MAX - 1;
/// Reserved id for the closing sentinel (`$`).
pub const SENTINEL_CLOSE: u32 = u32::MAX;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StringsError {
    #[error("symbol id {0} is reserved for sentinels")]
    ReservedSymbol(u32),
    #[error("invalid integer token {token:?}: {reason}")]
    BadIntToken { token: String, reason: String },
    #[error("string contains non-text symbol id {0}")]
    NotText(u32),
    #[error("factor {index}: {reason}")]
    BadFactor { index: usize, reason: String },
    #[error("expansion length {actual} does not match declared length {declared}")]
    LengthMismatch { declared: usize, actual: usize },
    #[error("inputs have different lengths ({left} vs {right})")]
    UnequalLengths { left: usize, right: usize },
    #[error("bad factorization file: {0}")]
    Parse(String),
}

/// Factorization mode tag.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Lzn,
    Lzs,
    Cn,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Lzn => "LZN",
            Mode::Lzs => "LZS",
            Mode::Cn => "CN",
        }
    }

    pub fn parse(s: &str) -> Option<Mode> {
        match s {
            "LZN" | "lzn" => Some(Mode::Lzn),
            "LZS" | "lzs" => Some(Mode::Lzs),
            "CN" | "cn" => Some(Mode::Cn),
            _ => None,
        }
    }

    fn allows_overlap(self) -> bool {
        matches!(self, Mode::Lzs)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A sequence of 32-bit symbol ids. Texts and integer-alphabet strings share
/// this representation; the two topmost ids are reserved for sentinels and
/// only appear when inserted by [`wrap_sentinels`].
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct SymbolString(Vec<u32>);

impl SymbolString {
    pub fn new() -> Self {
        SymbolString(Vec::new())
    }

    /// Builds from raw ids, rejecting reserved sentinel ids.
    pub fn from_symbols(symbols: Vec<u32>) -> Result<Self, StringsError> {
        if let Some(&bad) = symbols.iter().find(|&&s| s >= SENTINEL_OPEN) {
            return Err(StringsError::ReservedSymbol(bad));
        }
        Ok(SymbolString(symbols))
    }

    pub(crate) fn from_raw(symbols: Vec<u32>) -> Self {
        SymbolString(symbols)
    }

    /// Maps UTF-8 scalar values to symbol ids.
    pub fn from_text(text: &str) -> Self {
        SymbolString(text.chars().map(|c| c as u32).collect())
    }

    /// Parses whitespace-separated decimal symbol ids.
    pub fn from_ints(text: &str) -> Result<Self, StringsError> {
        let mut symbols = Vec::new();
        for token in text.split_whitespace() {
            let value: u32 = token.parse().map_err(|e| StringsError::BadIntToken {
                token: token.to_string(),
                reason: format!("{e}"),
            })?;
            if value >= SENTINEL_OPEN {
                return Err(StringsError::ReservedSymbol(value));
            }
            symbols.push(value);
        }
        Ok(SymbolString(symbols))
    }

    pub fn to_text(&self) -> Result<String, StringsError> {
        self.0
            .iter()
            .map(|&s| char::from_u32(s).ok_or(StringsError::NotText(s)))
            .collect()
    }

    pub fn to_ints(&self) -> String {
        let mut out = String::new();
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            out.push_str(&s.to_string());
        }
        out
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbols(&self) -> &[u32] {
        &self.0
    }

    /// Suffix starting at 0-based position `start`.
    pub fn suffix(&self, start: usize) -> SymbolString {
        SymbolString(self.0[start..].to_vec())
    }

    /// Largest non-sentinel symbol id, if any.
    pub fn max_symbol(&self) -> Option<u32> {
        self.0.iter().copied().filter(|&s| s < SENTINEL_OPEN).max()
    }
}

impl fmt::Debug for SymbolString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.to_text() {
            Ok(t) => write!(f, "SymbolString({t:?})"),
            Err(_) => write!(f, "SymbolString({:?})", self.0),
        }
    }
}

/// One factor of a factorization.
///
/// `source` is the 1-based position of the leftmost previous occurrence and
/// is 0 exactly for fresh letters. `length` is the total factor length. In
/// LZN/LZS modes a referencing factor normally consists of a match of
/// `length - 1` symbols plus the appended `last_symbol`; when the final match
/// of the string reaches the last symbol there is nothing left to append and
/// the factor is a pure match of `length` symbols with `truncated` set. CN
/// factors are always pure matches and never set `truncated`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Factor {
    pub source: usize,
    pub length: usize,
    pub last_symbol: u32,
    pub truncated: bool,
}

impl Factor {
    pub fn fresh(symbol: u32) -> Self {
        Factor {
            source: 0,
            length: 1,
            last_symbol: symbol,
            truncated: false,
        }
    }
}

/// Ordered factor list plus mode tag; `size()` is zn, zs or cn of the
/// original string depending on the mode.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub mode: Mode,
    pub factors: Vec<Factor>,
    pub original_len: usize,
}

impl Factorization {
    pub fn size(&self) -> usize {
        self.factors.len()
    }

    /// Checks the per-mode structural invariants of every factor.
    pub fn validate(&self) -> Result<(), StringsError> {
        let mut start = 0usize; // 0-based start of the current factor
        let last = self.factors.len().wrapping_sub(1);
        for (index, f) in self.factors.iter().enumerate() {
            let fail = |reason: String| StringsError::BadFactor { index, reason };
            if f.length == 0 {
                return Err(fail("length must be >= 1".into()));
            }
            if f.truncated {
                if self.mode == Mode::Cn {
                    return Err(fail("CN factors are never truncated".into()));
                }
                if index != last {
                    return Err(fail("only the final factor may be truncated".into()));
                }
            }
            if f.source == 0 {
                if f.length != 1 || f.truncated {
                    return Err(fail("fresh letter must have length 1".into()));
                }
            } else {
                let src = f.source - 1;
                let copy_len = match (self.mode, f.truncated) {
                    (Mode::Cn, _) | (_, true) => f.length,
                    (_, false) => {
                        if f.length < 2 {
                            return Err(fail(
                                "referencing factor with appended symbol needs length >= 2".into(),
                            ));
                        }
                        f.length - 1
                    }
                };
                if self.mode.allows_overlap() {
                    if src >= start {
                        return Err(fail(format!(
                            "source {} must precede factor start {}",
                            f.source,
                            start + 1
                        )));
                    }
                } else if src + copy_len > start {
                    return Err(fail(format!(
                        "reference [{}..{}] overlaps factor starting at {}",
                        f.source,
                        src + copy_len,
                        start + 1
                    )));
                }
            }
            start += f.length;
        }
        if start != self.original_len {
            return Err(StringsError::LengthMismatch {
                declared: self.original_len,
                actual: start,
            });
        }
        Ok(())
    }

    /// Reconstructs the unique string. LZS copies run symbol-by-symbol so
    /// overlapping references self-extend.
    pub fn decompress(&self) -> Result<SymbolString, StringsError> {
        self.validate()?;
        let mut out: Vec<u32> = Vec::with_capacity(self.original_len);
        for (index, f) in self.factors.iter().enumerate() {
            let fail = |reason: String| StringsError::BadFactor { index, reason };
            if f.source == 0 {
                out.push(f.last_symbol);
                continue;
            }
            let src = f.source - 1;
            let (copy_len, append) = match (self.mode, f.truncated) {
                (Mode::Cn, _) | (_, true) => (f.length, false),
                (_, false) => (f.length - 1, true),
            };
            if src + copy_len > out.len() && !self.mode.allows_overlap() {
                return Err(fail("reference reads past available prefix".into()));
            }
            for t in 0..copy_len {
                if src + t >= out.len() {
                    return Err(fail("reference reads past available prefix".into()));
                }
                out.push(out[src + t]);
            }
            if append {
                out.push(f.last_symbol);
            } else if out.last() != Some(&f.last_symbol) {
                return Err(fail(format!(
                    "lastSymbol {} does not match copied content",
                    f.last_symbol
                )));
            }
        }
        if out.len() != self.original_len {
            return Err(StringsError::LengthMismatch {
                declared: self.original_len,
                actual: out.len(),
            });
        }
        Ok(SymbolString(out))
    }

    /// Text dump: header `#mode=<MODE> n=<len>`, then one factor per line as
    /// `source<TAB>length<TAB>lastSymbol`, with a trailing `*` field on a
    /// truncated final factor.
    pub fn to_text(&self) -> String {
        let mut out = format!("#mode={} n={}\n", self.mode, self.original_len);
        for f in &self.factors {
            out.push_str(&format!("{}\t{}\t{}", f.source, f.length, f.last_symbol));
            if f.truncated {
                out.push_str("\t*");
            }
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, StringsError> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| StringsError::Parse("empty file".into()))?;
        let rest = header
            .strip_prefix("#mode=")
            .ok_or_else(|| StringsError::Parse("missing #mode= header".into()))?;
        let (mode_str, n_part) = rest
            .split_once(" n=")
            .ok_or_else(|| StringsError::Parse("missing n= in header".into()))?;
        let mode = Mode::parse(mode_str)
            .ok_or_else(|| StringsError::Parse(format!("unknown mode {mode_str:?}")))?;
        let original_len: usize = n_part
            .trim()
            .parse()
            .map_err(|e| StringsError::Parse(format!("bad n: {e}")))?;
        let mut factors = Vec::new();
        for (lineno, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 3 && !(fields.len() == 4 && fields[3] == "*") {
                return Err(StringsError::Parse(format!(
                    "line {}: expected source<TAB>length<TAB>lastSymbol[<TAB>*]",
                    lineno + 2
                )));
            }
            let parse_field = |s: &str, what: &str| -> Result<usize, StringsError> {
                s.parse()
                    .map_err(|e| StringsError::Parse(format!("line {}: bad {what}: {e}", lineno + 2)))
            };
            let last_symbol: u32 = fields[2].parse().map_err(|e| {
                StringsError::Parse(format!("line {}: bad lastSymbol: {e}", lineno + 2))
            })?;
            factors.push(Factor {
                source: parse_field(fields[0], "source")?,
                length: parse_field(fields[1], "length")?,
                last_symbol,
                truncated: fields.len() == 4,
            });
        }
        let fz = Factorization {
            mode,
            factors,
            original_len,
        };
        fz.validate()?;
        Ok(fz)
    }
}

/// Greedy left-to-right factorization in the requested mode.
pub fn factorize(s: &SymbolString, mode: Mode) -> Factorization {
    factorize::factorize(s, mode)
}

/// Amortizes repeated factorizations of suffixes of one string: the suffix
/// index is built once and each suffix reuses it through a linear-time view.
/// Output is identical to `factorize` on the extracted suffix.
pub struct SuffixFactorizer<'a> {
    text: &'a [u32],
    index: Option<index::SuffixIndex>,
}

impl<'a> SuffixFactorizer<'a> {
    pub fn new(s: &'a SymbolString) -> Self {
        let text = s.symbols();
        SuffixFactorizer {
            text,
            index: (!text.is_empty()).then(|| index::SuffixIndex::build(text)),
        }
    }

    /// Factorization of the suffix starting at 0-based `offset`.
    pub fn factorize_suffix(&self, offset: usize, mode: Mode) -> Factorization {
        let tail = &self.text[offset..];
        if tail.is_empty() {
            return Factorization {
                mode,
                factors: Vec::new(),
                original_len: 0,
            };
        }
        let index = self.index.as_ref().expect("nonempty text has an index");
        if offset == 0 {
            factorize::greedy(tail, index, mode)
        } else {
            factorize::greedy(tail, &index.suffix_view(offset), mode)
        }
    }
}

pub fn factorize_lzn(s: &SymbolString) -> Factorization {
    factorize(s, Mode::Lzn)
}

pub fn factorize_lzs(s: &SymbolString) -> Factorization {
    factorize(s, Mode::Lzs)
}

pub fn factorize_cn(s: &SymbolString) -> Factorization {
    factorize(s, Mode::Cn)
}

/// Length of the longest common prefix of `x` and `y`.
pub fn lcp(x: &SymbolString, y: &SymbolString) -> usize {
    x.symbols()
        .iter()
        .zip(y.symbols())
        .take_while(|(a, b)| a == b)
        .count()
}

/// Positionwise Hamming distance report; positions are 1-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HammingReport {
    pub distance: usize,
    pub positions: Vec<usize>,
}

pub fn hamming_oracle(x: &SymbolString, y: &SymbolString) -> Result<HammingReport, StringsError> {
    if x.len() != y.len() {
        return Err(StringsError::UnequalLengths {
            left: x.len(),
            right: y.len(),
        });
    }
    let positions: Vec<usize> = x
        .symbols()
        .iter()
        .zip(y.symbols())
        .enumerate()
        .filter_map(|(i, (a, b))| (a != b).then_some(i + 1))
        .collect();
    Ok(HammingReport {
        distance: positions.len(),
        positions,
    })
}

/// Frames `a` as `#a$` and `b` as `$b#` so the first and last positions are
/// guaranteed mismatches; the raw Hamming distance is the wrapped distance
/// minus 2.
pub fn wrap_sentinels(a: &SymbolString, b: &SymbolString) -> (SymbolString, SymbolString) {
    let mut wa = Vec::with_capacity(a.len() + 2);
    wa.push(SENTINEL_OPEN);
    wa.extend_from_slice(a.symbols());
    wa.push(SENTINEL_CLOSE);
    let mut wb = Vec::with_capacity(b.len() + 2);
    wb.push(SENTINEL_CLOSE);
    wb.extend_from_slice(b.symbols());
    wb.push(SENTINEL_OPEN);
    (SymbolString(wa), SymbolString(wb))
}
