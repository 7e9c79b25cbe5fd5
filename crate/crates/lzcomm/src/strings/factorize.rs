//! Suffix-array backed greedy factorizers. Correctness is defined by exact
//! agreement with the brute-force oracles in `oracle.rs`.

use super::index::SuffixIndex;
use super::{Factor, Factorization, Mode, SymbolString};

pub(crate) fn factorize(s: &SymbolString, mode: Mode) -> Factorization {
    let text = s.symbols();
    if text.is_empty() {
        return Factorization {
            mode,
            factors: Vec::new(),
            original_len: 0,
        };
    }
    let index = SuffixIndex::build(text);
    greedy(text, &index, mode)
}

/// Greedy factor loop over `text` with a matching index.
pub(crate) fn greedy(text: &[u32], index: &SuffixIndex, mode: Mode) -> Factorization {
    let n = text.len();
    let mut factors = Vec::new();
    let mut u = 0usize;
    while u < n {
        let best = match mode {
            Mode::Lzn | Mode::Cn => index.best_nonoverlapping_match(u),
            Mode::Lzs => index.best_overlapping_match(u),
        };
        match best {
            None => {
                factors.push(Factor::fresh(text[u]));
                u += 1;
            }
            Some((len, src)) if mode == Mode::Cn => {
                factors.push(Factor {
                    source: src + 1,
                    length: len,
                    last_symbol: text[u + len - 1],
                    truncated: false,
                });
                u += len;
            }
            Some((len, src)) => {
                if u + len < n {
                    // Match plus one following symbol.
                    factors.push(Factor {
                        source: src + 1,
                        length: len + 1,
                        last_symbol: text[u + len],
                        truncated: false,
                    });
                    u += len + 1;
                } else {
                    // The match reaches the end of the string; the final
                    // factor is the pure match.
                    factors.push(Factor {
                        source: src + 1,
                        length: len,
                        last_symbol: text[n - 1],
                        truncated: true,
                    });
                    u += len;
                }
            }
        }
    }
    Factorization {
        mode,
        factors,
        original_len: n,
    }
}
