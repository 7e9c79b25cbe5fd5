//! Brute-force reference factorizers.
//!
//! Deliberately shares no code with the fast paths: matches are found by a
//! direct scan over every previous position with symbol-by-symbol
//! comparison, following the greedy definitions literally.

use super::{Factor, Factorization, Mode, SymbolString};

pub fn oracle_factorize(s: &SymbolString, mode: Mode) -> Factorization {
    let text = s.symbols();
    let n = text.len();
    let mut factors = Vec::new();
    let mut u = 0usize;
    while u < n {
        // Longest previous match, leftmost wins ties.
        let mut best_len = 0usize;
        let mut best_src = 0usize;
        for j in 0..u {
            let window = match mode {
                Mode::Lzn | Mode::Cn => u - j,
                Mode::Lzs => n - j,
            };
            let mut l = 0usize;
            while l < window && u + l < n && text[j + l] == text[u + l] {
                l += 1;
            }
            if l > best_len {
                best_len = l;
                best_src = j;
            }
        }
        if best_len == 0 {
            factors.push(Factor {
                source: 0,
                length: 1,
                last_symbol: text[u],
                truncated: false,
            });
            u += 1;
        } else if mode == Mode::Cn {
            factors.push(Factor {
                source: best_src + 1,
                length: best_len,
                last_symbol: text[u + best_len - 1],
                truncated: false,
            });
            u += best_len;
        } else if u + best_len < n {
            factors.push(Factor {
                source: best_src + 1,
                length: best_len + 1,
                last_symbol: text[u + best_len],
                truncated: false,
            });
            u += best_len + 1;
        } else {
            factors.push(Factor {
                source: best_src + 1,
                length: best_len,
                last_symbol: text[n - 1],
                truncated: true,
            });
            u += best_len;
        }
    }
    Factorization {
        mode,
        factors,
        original_len: n,
    }
}
