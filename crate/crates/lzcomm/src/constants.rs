//! Pinned implementation constants.
//!
//! The asymptotic bounds on grammar growth hide constants that depend on the
//! concrete join/split implementation. The values here were measured once
//! over the test corpus (exhaustive short binary strings, random strings up
//! to 2^14, the alternating-block family, unary runs) and then pinned with
//! headroom. The test suites assert against them as a regression guard; they
//! are not ground truth.

/// Grammar built from the C-factorization:
/// size(build(S)) <= C_BUILD * cn(S) * ceil(log2(n + 1)).
/// Measured maximum over the corpus: 1.00.
pub const C_BUILD: f64 = 2.0;

/// Concatenation growth:
/// size(concat(a, b)) <= size(a) + size(b) + C_CAT * (1 + max(h_a, h_b)).
/// Measured maximum over random pairs: 0.16.
pub const C_CAT: f64 = 1.0;

/// Split growth: size(suffix) <= size(g) + C_SPLIT * ceil(log2 n).
/// Measured maximum over the corpus: 0.75.
pub const C_SPLIT: f64 = 2.0;

/// Suffix factorization blowup through the grammar chain:
/// zn(S[i..]) <= 2 * C_CHAIN * zn(S)^2.
/// Measured maximum over the corpus: 0.50.
pub const C_CHAIN: f64 = 1.0;

/// AVL height bound: height <= AVL_HEIGHT_SLOPE * log2(len + 2) + AVL_HEIGHT_OFFSET.
pub const AVL_HEIGHT_SLOPE: f64 = 1.45;
pub const AVL_HEIGHT_OFFSET: f64 = 2.0;
