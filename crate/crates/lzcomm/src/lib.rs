//! Factorization-compressed string machinery and a two-party protocol engine.
//!
//! The crate has four layers:
//!
//! * [`strings`] — symbol strings, the LZN/LZS/CN greedy factorizations with
//!   brute-force oracles, and positionwise utilities (lcp, Hamming distance,
//!   sentinel wrapping).
//! * [`grammar`] — balanced straight-line programs built from the
//!   C-factorization, with concatenate/split/expand and a structural
//!   validator.
//! * [`fingerprint`] — a seed-shared coin stream and Karp-Rabin style
//!   fingerprints over factor sequences.
//! * [`protocol`] — the two-party engine: a doubling-then-binary LCP search
//!   over factor sequences and the kangaroo-jump Hamming protocol, with exact
//!   per-message bit accounting over in-process or socket transports.
//!
//! [`experiments`] layers corpus generators, suffix-growth scans and protocol
//! benchmarks on top, emitting deterministic CSV.

pub mod constants;
pub mod experiments;
pub mod fingerprint;
pub mod grammar;
pub mod protocol;
pub mod strings;
