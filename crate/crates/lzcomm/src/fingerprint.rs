//! Shared public-coin randomness and Karp-Rabin style fingerprints over
//! factor sequences.
//!
//! The coin stream is a splitmix64 generator, fixed bit-exactly so that two
//! parties seeded alike draw identical values on any platform. Test vectors
//! for seed 0 (first three raw draws):
//!
//! ```text
//! 0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4, 0x06C45D188009454F
//! ```
//!
//! Fingerprints are polynomial evaluations over the Mersenne prime 2^61 - 1.
//! Each factor contributes three field elements (source, length, last
//! symbol, each offset by one so no element is zero), so two distinct
//! prefixes of combined element count <= 3k collide with probability at most
//! 3k/(modulus - 1) over the base draw.

use thiserror::Error;

/// Fingerprint field modulus, the Mersenne prime 2^61 - 1.
pub const FIELD_PRIME: u64 = (1 << 61) - 1;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FingerprintError {
    #[error("prefix count {count} exceeds sequence length {len}")]
    PrefixOutOfRange { count: usize, len: usize },
}

/// Deterministic shared coin stream (splitmix64).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoinStream {
    seed: u64,
    state: u64,
    counter: u64,
}

impl CoinStream {
    pub fn new(seed: u64) -> Self {
        CoinStream {
            seed,
            state: seed,
            counter: 0,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Number of raw 64-bit draws consumed so far.
    pub fn counter(&self) -> u64 {
        self.counter
    }

    pub fn next_u64(&mut self) -> u64 {
        self.counter += 1;
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Skips `n` raw draws.
    pub fn advance(&mut self, n: u64) {
        for _ in 0..n {
            self.next_u64();
        }
    }
}

/// Draws a fingerprint base uniformly from [2, FIELD_PRIME - 2] by rejection
/// sampling the top 61 bits of raw draws.
pub fn draw_base(coins: &mut CoinStream) -> u64 {
    loop {
        let v = coins.next_u64() >> 3;
        if (2..=FIELD_PRIME - 2).contains(&v) {
            return v;
        }
    }
}

/// A fingerprinting scheme: the seed-shared base plus the number of bits
/// charged per transmitted fingerprint.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FingerprintScheme {
    pub base: u64,
    pub width: u32,
}

impl FingerprintScheme {
    pub fn draw(coins: &mut CoinStream, width: u32) -> Self {
        FingerprintScheme {
            base: draw_base(coins),
            width,
        }
    }

    /// Mask applied to fingerprints on the wire.
    pub fn wire_mask(&self) -> u64 {
        if self.width >= 64 {
            u64::MAX
        } else {
            (1u64 << self.width) - 1
        }
    }
}

pub fn add_mod(a: u64, b: u64) -> u64 {
    let s = a + b;
    if s >= FIELD_PRIME {
        s - FIELD_PRIME
    } else {
        s
    }
}

pub fn mul_mod(a: u64, b: u64) -> u64 {
    let p = a as u128 * b as u128;
    let lo = (p & FIELD_PRIME as u128) as u64;
    let hi = (p >> 61) as u64;
    let mut s = lo + hi;
    while s >= FIELD_PRIME {
        s -= FIELD_PRIME;
    }
    s
}

/// Injective encoding of a factor into three nonzero field elements.
pub type FactorElements = [u64; 3];

/// Running prefix fingerprints of an encoded factor sequence: `get(k)` is
/// the fingerprint of the first `k` factors and is 0 for k = 0.
#[derive(Clone, Debug)]
pub struct PrefixFingerprints {
    fps: Vec<u64>,
}

impl PrefixFingerprints {
    pub fn compute(seq: &[FactorElements], scheme: &FingerprintScheme) -> Self {
        let mut fps = Vec::with_capacity(seq.len() + 1);
        fps.push(0);
        let mut acc = 0u64;
        let mut power = 1u64;
        for elems in seq {
            for &e in elems {
                debug_assert!(e > 0 && e < FIELD_PRIME);
                power = mul_mod(power, scheme.base);
                acc = add_mod(acc, mul_mod(e, power));
            }
            fps.push(acc);
        }
        PrefixFingerprints { fps }
    }

    pub fn len(&self) -> usize {
        self.fps.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, k: usize) -> u64 {
        self.fps[k]
    }
}

/// Fingerprint of the first `k` factors of `seq`.
pub fn fp_of_prefix(
    seq: &[FactorElements],
    k: usize,
    scheme: &FingerprintScheme,
) -> Result<u64, FingerprintError> {
    if k > seq.len() {
        return Err(FingerprintError::PrefixOutOfRange {
            count: k,
            len: seq.len(),
        });
    }
    Ok(PrefixFingerprints::compute(&seq[..k], scheme).get(k))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splitmix_test_vectors() {
        let mut c = CoinStream::new(0);
        assert_eq!(c.next_u64(), 0xE220A8397B1DCDAF);
        assert_eq!(c.next_u64(), 0x6E789E6AA1B965F4);
        assert_eq!(c.next_u64(), 0x06C45D188009454F);
        assert_eq!(c.counter(), 3);
    }

    #[test]
    fn golden_base_for_seed_zero() {
        // Pinned once from the implementation: first raw draw >> 3, which is
        // already inside [2, FIELD_PRIME - 2].
        let mut c = CoinStream::new(0);
        assert_eq!(draw_base(&mut c), 0x1C4415072F63B9B5);
        assert_eq!(draw_base(&mut c), 0x0DCF13CD54372CBE);
    }

    #[test]
    fn identical_streams_agree() {
        let mut a = CoinStream::new(0xDEADBEEF);
        let mut b = CoinStream::new(0xDEADBEEF);
        for _ in 0..1000 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn advance_zero_is_identity() {
        let mut a = CoinStream::new(7);
        let before = a.clone();
        a.advance(0);
        assert_eq!(a, before);
    }

    #[test]
    fn empty_prefix_fingerprint_is_zero() {
        let scheme = FingerprintScheme { base: 12345, width: 64 };
        assert_eq!(fp_of_prefix(&[], 0, &scheme).unwrap(), 0);
        assert!(fp_of_prefix(&[], 1, &scheme).is_err());
    }

    #[test]
    fn equal_sequences_equal_fingerprints() {
        let seq: Vec<FactorElements> = (1..50u64).map(|i| [i, i * 2 + 1, 3]).collect();
        for seed in [0u64, 1, 99] {
            let mut coins = CoinStream::new(seed);
            let scheme = FingerprintScheme::draw(&mut coins, 64);
            let a = PrefixFingerprints::compute(&seq, &scheme);
            let b = PrefixFingerprints::compute(&seq.clone(), &scheme);
            for k in 0..=seq.len() {
                assert_eq!(a.get(k), b.get(k));
            }
        }
    }

    #[test]
    fn collision_rate_monte_carlo() {
        // 10^6 random unequal prefix pairs; with a 61-bit field any collision
        // at all would already be far above the analytic bound.
        let mut coins = CoinStream::new(42);
        let scheme = FingerprintScheme::draw(&mut coins, 64);
        let mut collisions = 0u64;
        for _ in 0..1_000_000 {
            let len = 1 + (coins.next_u64() % 8) as usize;
            let mut a = Vec::with_capacity(len);
            let mut b = Vec::with_capacity(len);
            for _ in 0..len {
                a.push([
                    1 + coins.next_u64() % 1000,
                    1 + coins.next_u64() % 1000,
                    1 + coins.next_u64() % 4,
                ]);
                b.push([
                    1 + coins.next_u64() % 1000,
                    1 + coins.next_u64() % 1000,
                    1 + coins.next_u64() % 4,
                ]);
            }
            if a == b {
                continue;
            }
            let fa = PrefixFingerprints::compute(&a, &scheme).get(len);
            let fb = PrefixFingerprints::compute(&b, &scheme).get(len);
            if fa == fb {
                collisions += 1;
            }
        }
        assert_eq!(collisions, 0);
    }
}
