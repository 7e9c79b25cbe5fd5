//! Corpus generators, suffix-growth scans and protocol benchmarks.
//!
//! Everything here is driven by explicit seeds through [`CoinStream`], so
//! every report and CSV is a deterministic function of its parameters. Scans
//! fan out over rayon and merge in input order.

use crate::fingerprint::CoinStream;
use crate::grammar::GrammarPool;
use crate::protocol::{run_hamming_in_process, ProtocolConfig};
use crate::strings::{
    factorize, factorize_cn, factorize_lzn, factorize_lzs, hamming_oracle, Mode,
    SymbolString,
};
use rayon::prelude::*;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExperimentError {
    #[error("sigma must be even and >= 4, got {0}")]
    BadSigma(u32),
    #[error("h must lie in 1..=sigma, got h={h} for sigma={sigma}")]
    BadRunLength { sigma: u32, h: u32 },
    #[error("protocol failure: {0}")]
    Protocol(String),
}

/// Parameters of the alternating-block family over the alphabet {0..sigma}.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FamilyParams {
    pub sigma: u32,
    /// Every 0 in the base string becomes a run 0^h.
    pub h: u32,
}

impl FamilyParams {
    pub fn new(sigma: u32, h: u32) -> Result<Self, ExperimentError> {
        if sigma < 4 || sigma % 2 != 0 {
            return Err(ExperimentError::BadSigma(sigma));
        }
        if h < 1 || h > sigma {
            return Err(ExperimentError::BadRunLength { sigma, h });
        }
        Ok(FamilyParams { sigma, h })
    }
}

/// First block (0..sigma), then blocks (0..2k, 2k+2) for k = 1..sigma/2-1,
/// with every 0 expanded to 0^h. Removing the leading zero run makes the
/// factor count grow toward 4/3 of the original.
pub fn gen_family(params: &FamilyParams) -> SymbolString {
    let sigma = params.sigma;
    let mut symbols: Vec<u32> = Vec::new();
    let mut push_block = |upto: u32, then: Option<u32>| {
        for _ in 0..params.h {
            symbols.push(0);
        }
        for v in 1..=upto {
            symbols.push(v);
        }
        if let Some(t) = then {
            symbols.push(t);
        }
    };
    push_block(sigma, None);
    for k in 1..sigma / 2 {
        push_block(2 * k, Some(2 * k + 2));
    }
    SymbolString::from_symbols(symbols).expect("family symbols are plain ids")
}

/// One row of the lower-bound verification: factor counts of the family
/// string and of its suffix with the leading zero run removed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LowerBoundRow {
    pub sigma: u32,
    pub h: u32,
    pub n: usize,
    pub zn: usize,
    pub zn_suffix: usize,
    pub ratio: f64,
    /// Exact expected counts, only for h = 1.
    pub expected_zn: Option<usize>,
    pub expected_suffix: Option<usize>,
    /// Formula check for h = 1; ratio threshold check for h > 1.
    pub ok: bool,
}

/// Verifies zn(S) = 3*sigma/2 and zn(S[2..]) = 2*sigma - 2 for h = 1, and
/// the ratio threshold 4/3 - 4/(3*sigma) for the run-length variants.
pub fn verify_lower_bound(sigmas: &[u32], hs: &[u32]) -> Vec<LowerBoundRow> {
    let mut rows = Vec::new();
    for &sigma in sigmas {
        for &h in hs {
            if h > sigma {
                continue;
            }
            let params = match FamilyParams::new(sigma, h) {
                Ok(p) => p,
                Err(_) => continue,
            };
            let s = gen_family(&params);
            let zn = factorize_lzn(&s).size();
            let suffix = s.suffix(h as usize);
            let zn_suffix = factorize_lzn(&suffix).size();
            let ratio = zn_suffix as f64 / zn as f64;
            let (expected_zn, expected_suffix, ok) = if h == 1 {
                let want_zn = 3 * sigma as usize / 2;
                let want_suffix = 2 * sigma as usize - 2;
                (
                    Some(want_zn),
                    Some(want_suffix),
                    zn == want_zn && zn_suffix == want_suffix,
                )
            } else {
                let threshold = 4.0 / 3.0 - 4.0 / (3.0 * sigma as f64);
                (None, None, ratio >= threshold)
            };
            rows.push(LowerBoundRow {
                sigma,
                h,
                n: s.len(),
                zn,
                zn_suffix,
                ratio,
                expected_zn,
                expected_suffix,
                ok,
            });
        }
    }
    rows
}

pub fn lower_bound_csv(rows: &[LowerBoundRow]) -> String {
    let mut out = String::from("sigma,h,n,zn,zn_suffix,ratio,expected_zn,expected_suffix,ok\n");
    for r in rows {
        let fmt_opt = |v: Option<usize>| v.map(|x| x.to_string()).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{},{:.6},{},{},{}",
            r.sigma,
            r.h,
            r.n,
            r.zn,
            r.zn_suffix,
            r.ratio,
            fmt_opt(r.expected_zn),
            fmt_opt(r.expected_suffix),
            r.ok
        )
        .unwrap();
    }
    out
}

/// Corpus selector for the suffix scan.
#[derive(Clone, Debug)]
pub enum ZetaCorpus {
    /// Every string over {0..sigma-1} of length 1..=max_len.
    Exhaustive { sigma: u32, max_len: usize },
    /// `count` random strings of length `len` over {0..sigma-1}.
    Random {
        count: usize,
        len: usize,
        sigma: u32,
        seed: u64,
    },
    Strings(Vec<SymbolString>),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZetaRow {
    pub string_id: usize,
    pub n: usize,
    pub i: usize,
    pub z_full: usize,
    pub z_suffix: usize,
    pub ratio: f64,
}

#[derive(Clone, Debug)]
pub struct ZetaScanReport {
    pub mode: Mode,
    pub rows: Vec<ZetaRow>,
    pub max_ratio: f64,
    /// Rows with ratio > 1 witness non-monotonicity.
    pub witnesses: usize,
}

fn corpus_strings(corpus: &ZetaCorpus) -> Vec<SymbolString> {
    match corpus {
        ZetaCorpus::Exhaustive { sigma, max_len } => {
            let mut out = Vec::new();
            for n in 1..=*max_len {
                let total = (*sigma as u128).pow(n as u32);
                for mut code in 0..total {
                    let mut symbols = Vec::with_capacity(n);
                    for _ in 0..n {
                        symbols.push((code % *sigma as u128) as u32);
                        code /= *sigma as u128;
                    }
                    out.push(SymbolString::from_symbols(symbols).unwrap());
                }
            }
            out
        }
        ZetaCorpus::Random {
            count,
            len,
            sigma,
            seed,
        } => {
            let mut coins = CoinStream::new(*seed);
            (0..*count)
                .map(|_| random_string(&mut coins, *len, *sigma))
                .collect()
        }
        ZetaCorpus::Strings(v) => v.clone(),
    }
}

pub fn random_string(coins: &mut CoinStream, len: usize, sigma: u32) -> SymbolString {
    SymbolString::from_symbols((0..len).map(|_| (coins.next_u64() % sigma as u64) as u32).collect())
        .expect("random symbols are plain ids")
}

/// Factor counts of every proper suffix against the whole string; records
/// every ratio and flags those above 1.
pub fn zeta_scan(corpus: &ZetaCorpus, mode: Mode) -> ZetaScanReport {
    let strings = corpus_strings(corpus);
    let rows: Vec<ZetaRow> = strings
        .par_iter()
        .enumerate()
        .flat_map_iter(|(string_id, s)| {
            let n = s.len();
            let z_full = factorize(s, mode).size();
            (2..=n).map(move |i| {
                let z_suffix = factorize(&s.suffix(i - 1), mode).size();
                ZetaRow {
                    string_id,
                    n,
                    i,
                    z_full,
                    z_suffix,
                    ratio: z_suffix as f64 / z_full as f64,
                }
            })
        })
        .collect();
    let max_ratio = rows.iter().map(|r| r.ratio).fold(0.0f64, f64::max);
    let witnesses = rows.iter().filter(|r| r.ratio > 1.0).count();
    ZetaScanReport {
        mode,
        rows,
        max_ratio,
        witnesses,
    }
}

pub fn zeta_csv(report: &ZetaScanReport) -> String {
    let mut out = String::from("string_id,n,i,zn,zn_suffix,ratio\n");
    for r in &report.rows {
        writeln!(
            out,
            "{},{},{},{},{},{:.6}",
            r.string_id, r.n, r.i, r.z_full, r.z_suffix, r.ratio
        )
        .unwrap();
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChainRow {
    pub n: usize,
    pub i: usize,
    pub zn_suffix: usize,
    pub cn_suffix: usize,
    pub avl_suffix: usize,
    pub avl_full: usize,
    /// (avl_suffix - avl_full) / ceil(log2 n), the split growth per level.
    pub growth_per_log: f64,
    /// zn(S') <= cn(S') <= avl(S') holds on this row.
    pub ok: bool,
}

/// For sampled suffix positions, checks the inequality chain between factor
/// counts and grammar sizes and measures the split growth.
pub fn avl_chain_scan(strings: &[SymbolString], samples_per_string: usize, seed: u64) -> Vec<ChainRow> {
    strings
        .par_iter()
        .enumerate()
        .flat_map_iter(|(idx, s)| {
            let n = s.len();
            let mut coins = CoinStream::new(seed ^ (idx as u64).wrapping_mul(0x9E3779B97F4A7C15));
            let mut pool = GrammarPool::new();
            let g = pool.build(s).expect("nonempty string");
            let avl_full = pool.reachable_size(g);
            let positions: Vec<usize> = if n <= samples_per_string {
                (1..=n).collect()
            } else {
                (0..samples_per_string)
                    .map(|_| 1 + (coins.next_u64() % n as u64) as usize)
                    .collect()
            };
            let log_n = ((n.max(2)) as f64).log2().ceil();
            positions
                .into_iter()
                .map(move |i| {
                    let suffix = s.suffix(i - 1);
                    let zn_suffix = factorize_lzn(&suffix).size();
                    let cn_suffix = factorize_cn(&suffix).size();
                    let mut pool = pool.clone();
                    let (_, suf) = pool.split_at(g, (i - 1) as u64).expect("in range");
                    let suf = suf.expect("suffix nonempty");
                    let avl_suffix = pool.reachable_size(suf);
                    ChainRow {
                        n,
                        i,
                        zn_suffix,
                        cn_suffix,
                        avl_suffix,
                        avl_full,
                        growth_per_log: (avl_suffix as f64 - avl_full as f64) / log_n,
                        ok: zn_suffix <= cn_suffix && cn_suffix <= avl_suffix,
                    }
                })
                .collect::<Vec<_>>()
        })
        .collect()
}

pub fn chain_csv(rows: &[ChainRow]) -> String {
    let mut out = String::from("n,i,zn_suffix,cn_suffix,avl_suffix,avl_full,growth_per_log,ok\n");
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{:.6},{}",
            r.n, r.i, r.zn_suffix, r.cn_suffix, r.avl_suffix, r.avl_full, r.growth_per_log, r.ok
        )
        .unwrap();
    }
    out
}

#[derive(Clone, Copy, Debug)]
pub struct BenchParams {
    pub n: usize,
    pub sigma: u32,
    pub pairs: usize,
    pub seed: u64,
    pub sentinel: bool,
    pub width: u32,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BenchRow {
    pub n: usize,
    pub z: usize,
    pub d: usize,
    pub l_max: u64,
    pub rounds: usize,
    pub bits: u64,
    pub lcp_invocations: usize,
    pub errors: usize,
}

#[derive(Clone, Debug)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    /// Least-squares slope of rounds against d * log2(zn), through the origin.
    pub rounds_slope: f64,
}

/// Pairs with planted mismatch counts; `base` gets `d` symbols flipped at
/// distinct random positions.
pub fn plant_mismatches(
    coins: &mut CoinStream,
    base: &SymbolString,
    d: usize,
    sigma: u32,
) -> SymbolString {
    let n = base.len();
    assert!(d <= n && sigma >= 2);
    let mut symbols = base.symbols().to_vec();
    let mut chosen = std::collections::BTreeSet::new();
    while chosen.len() < d {
        chosen.insert((coins.next_u64() % n as u64) as usize);
    }
    for &pos in &chosen {
        let bump = 1 + (coins.next_u64() % (sigma as u64 - 1)) as u32;
        symbols[pos] = (symbols[pos] + bump) % sigma;
    }
    SymbolString::from_symbols(symbols).unwrap()
}

/// Runs the Hamming protocol over generated pairs and records the measured
/// round/bit aggregates per planted distance.
pub fn protocol_bench(params: &BenchParams, d_values: &[usize]) -> Result<BenchReport, ExperimentError> {
    let jobs: Vec<(usize, usize)> = d_values
        .iter()
        .flat_map(|&d| (0..params.pairs).map(move |p| (d, p)))
        .collect();
    let rows: Vec<BenchRow> = jobs
        .par_iter()
        .map(|&(d, pair)| -> Result<BenchRow, ExperimentError> {
            let mut coins = CoinStream::new(
                params
                    .seed
                    .wrapping_add((d as u64) << 32)
                    .wrapping_add(pair as u64),
            );
            let a = random_string(&mut coins, params.n, params.sigma);
            let b = plant_mismatches(&mut coins, &a, d, params.sigma);
            let fa = factorize_lzn(&a);
            let fb = factorize_lzn(&b);
            let cfg = ProtocolConfig {
                seed: params.seed ^ ((d as u64) << 40) ^ pair as u64,
                width: params.width,
                sentinel: params.sentinel,
                ..ProtocolConfig::default()
            };
            let outcome = run_hamming_in_process(&fa, &fb, &cfg)
                .map_err(|e| ExperimentError::Protocol(e.to_string()))?;
            let oracle = hamming_oracle(&a, &b).expect("equal lengths");
            let errors = usize::from(
                outcome.distance != oracle.distance as u64
                    || outcome.positions != oracle.positions.iter().map(|&p| p as u64).collect::<Vec<_>>(),
            );
            Ok(BenchRow {
                n: params.n,
                z: fa.size(),
                d,
                l_max: outcome.gap_max,
                rounds: outcome.transcript.rounds(),
                bits: outcome.transcript.total_bits(),
                lcp_invocations: outcome.invocations.len(),
                errors,
            })
        })
        .collect::<Result<_, _>>()?;

    // Slope of rounds vs d*log2(z) through the origin (d = 0 rows contribute
    // nothing to either sum).
    let (mut xy, mut xx) = (0.0f64, 0.0f64);
    for r in &rows {
        let x = r.d as f64 * (r.z.max(2) as f64).log2();
        xy += x * r.rounds as f64;
        xx += x * x;
    }
    let rounds_slope = if xx > 0.0 { xy / xx } else { 0.0 };
    Ok(BenchReport { rows, rounds_slope })
}

pub fn bench_csv(report: &BenchReport) -> String {
    let mut out = String::from("n,z,d,l_max,rounds,bits,lcp_invocations,errors\n");
    for r in &report.rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.n, r.z, r.d, r.l_max, r.rounds, r.bits, r.lcp_invocations, r.errors
        )
        .unwrap();
    }
    out
}

/// Convenience wrapper used by tests and the CLI to expose zs suffix ratios
/// next to zn ones (the self-referencing scan is measurement only).
pub fn factorization_size(s: &SymbolString, mode: Mode) -> usize {
    factorize(s, mode).size()
}

/// zs suffix scan helper: factor counts for both factorization flavours.
pub fn suffix_sizes(s: &SymbolString, i: usize) -> (usize, usize) {
    let suffix = s.suffix(i - 1);
    (factorize_lzn(&suffix).size(), factorize_lzs(&suffix).size())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_smallest_instance() {
        let s = gen_family(&FamilyParams::new(4, 1).unwrap());
        assert_eq!(s.symbols(), &[0, 1, 2, 3, 4, 0, 1, 2, 4]);
    }

    #[test]
    fn family_run_length_substitution() {
        let s = gen_family(&FamilyParams::new(4, 2).unwrap());
        assert_eq!(s.symbols(), &[0, 0, 1, 2, 3, 4, 0, 0, 1, 2, 4]);
    }

    #[test]
    fn family_rejects_bad_params() {
        assert!(FamilyParams::new(3, 1).is_err());
        assert!(FamilyParams::new(2, 1).is_err());
        assert!(FamilyParams::new(8, 0).is_err());
        assert!(FamilyParams::new(8, 9).is_err());
    }

    #[test]
    fn family_length_is_quadratic() {
        // n = sigma^2/4 + O(sigma): within a factor of 2 of sigma^2/2... the
        // exact sum is sigma + 1 + sum_{k=1..sigma/2-1} (2k + 2).
        for sigma in (4..=64).step_by(2) {
            let s = gen_family(&FamilyParams::new(sigma, 1).unwrap());
            let n = s.len() as f64;
            let q = (sigma as f64).powi(2);
            assert!(n >= q / 4.0 && n <= q, "sigma={sigma} n={n}");
        }
    }

    #[test]
    fn lower_bound_formulas_small_sigmas() {
        let rows = verify_lower_bound(&[4, 8, 64], &[1]);
        let by_sigma: std::collections::HashMap<u32, &LowerBoundRow> =
            rows.iter().map(|r| (r.sigma, r)).collect();
        let r4 = by_sigma[&4];
        assert!(r4.ok && r4.zn == 6 && r4.zn_suffix == 6);
        assert!((r4.ratio - 1.0).abs() < 1e-12);
        let r8 = by_sigma[&8];
        assert!(r8.ok && r8.zn == 12 && r8.zn_suffix == 14);
        assert!((r8.ratio - 7.0 / 6.0).abs() < 1e-12);
        let r64 = by_sigma[&64];
        assert!(r64.ok && r64.zn == 96 && r64.zn_suffix == 126);
        assert!((r64.ratio - 1.3125).abs() < 1e-12);
    }

    #[test]
    fn zeta_scan_finds_family_witness() {
        let s = gen_family(&FamilyParams::new(8, 1).unwrap());
        let report = zeta_scan(&ZetaCorpus::Strings(vec![s]), Mode::Lzn);
        let row = report.rows.iter().find(|r| r.i == 2).unwrap();
        assert!((row.ratio - 7.0 / 6.0).abs() < 1e-12);
        assert!(report.witnesses > 0);
    }

    #[test]
    fn zeta_scan_unary_never_grows() {
        let s = SymbolString::from_text(&"a".repeat(64));
        let report = zeta_scan(&ZetaCorpus::Strings(vec![s]), Mode::Lzn);
        assert!(report.max_ratio <= 1.0);
        assert_eq!(report.witnesses, 0);
    }

    #[test]
    fn bench_single_invocation_without_mismatches() {
        let report = protocol_bench(
            &BenchParams {
                n: 128,
                sigma: 2,
                pairs: 3,
                seed: 7,
                sentinel: false,
                width: 64,
            },
            &[0],
        )
        .unwrap();
        for row in &report.rows {
            assert_eq!(row.lcp_invocations, 1);
            assert_eq!(row.errors, 0);
        }
    }
}
