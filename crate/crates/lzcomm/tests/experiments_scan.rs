//! Experiment-level invariants: exact family formulas, the logarithmic cap
//! on suffix growth implied by the pinned chain constants, oracle-checked
//! benches and CSV determinism.

use lzcomm::constants::{C_BUILD, C_SPLIT};
use lzcomm::experiments::{
    avl_chain_scan, bench_csv, gen_family, lower_bound_csv, protocol_bench, suffix_sizes,
    verify_lower_bound, zeta_csv, zeta_scan, BenchParams, FamilyParams, ZetaCorpus,
};
use lzcomm::fingerprint::CoinStream;
use lzcomm::strings::{Mode, SymbolString};

#[test]
fn lower_bound_formulas_hold_for_every_even_sigma() {
    let sigmas: Vec<u32> = (4..=128).filter(|s| s % 2 == 0).collect();
    let rows = verify_lower_bound(&sigmas, &[1]);
    assert_eq!(rows.len(), sigmas.len());
    for r in &rows {
        assert!(r.ok, "sigma={}: zn={} zn_suffix={}", r.sigma, r.zn, r.zn_suffix);
        assert_eq!(r.zn, 3 * r.sigma as usize / 2);
        assert_eq!(r.zn_suffix, 2 * r.sigma as usize - 2);
    }
}

#[test]
fn exhaustive_zeta_scan_respects_the_chain_bound() {
    // Every binary string up to length 14; the pinned constants imply
    // zn(S[i..]) / zn(S) <= (2*C_BUILD + C_SPLIT) * ceil(log2 n).
    let report = zeta_scan(
        &ZetaCorpus::Exhaustive {
            sigma: 2,
            max_len: 14,
        },
        Mode::Lzn,
    );
    let cap = 2.0 * C_BUILD + C_SPLIT;
    for r in &report.rows {
        let bound = cap * (r.n as f64).log2().ceil().max(1.0);
        assert!(
            r.ratio <= bound,
            "n={} i={}: ratio {} above {}",
            r.n,
            r.i,
            r.ratio,
            bound
        );
    }
    // Non-monotonicity witnesses exist even over binary strings.
    assert!(report.witnesses > 0);
    assert!(report.max_ratio > 1.0);
}

#[test]
fn zs_suffix_scan_is_measured_alongside_zn() {
    // Exploratory only: record the self-referencing suffix ratios for the
    // family; no bound is asserted.
    let s = gen_family(&FamilyParams::new(16, 1).unwrap());
    let (zn2, zs2) = suffix_sizes(&s, 2);
    let (zn1, zs1) = suffix_sizes(&s, 1);
    assert!(zs1 <= zn1 && zs2 <= zn2);
    assert!(zn1 > 0 && zs1 > 0);
}

#[test]
fn chain_scan_rows_all_satisfy_the_inequalities() {
    let mut strings = vec![
        gen_family(&FamilyParams::new(8, 1).unwrap()),
        gen_family(&FamilyParams::new(16, 1).unwrap()),
        SymbolString::from_text(&"a".repeat(100)),
    ];
    let mut coins = CoinStream::new(5);
    for _ in 0..20 {
        strings.push(lzcomm::experiments::random_string(&mut coins, 400, 2));
    }
    let rows = avl_chain_scan(&strings, 25, 99);
    assert!(!rows.is_empty());
    for r in &rows {
        assert!(r.ok, "chain violated at n={} i={}", r.n, r.i);
        assert!(
            r.growth_per_log <= C_SPLIT,
            "split growth {} above pinned constant",
            r.growth_per_log
        );
    }
}

#[test]
fn bench_is_oracle_checked_and_deterministic() {
    let params = BenchParams {
        n: 512,
        sigma: 2,
        pairs: 5,
        seed: 11,
        sentinel: true,
        width: 64,
    };
    let a = protocol_bench(&params, &[0, 1, 3]).unwrap();
    let b = protocol_bench(&params, &[0, 1, 3]).unwrap();
    assert_eq!(bench_csv(&a), bench_csv(&b));
    for row in &a.rows {
        assert_eq!(row.errors, 0);
        // Sentinel mode: raw distance is d + 2.
        assert_eq!(row.lcp_invocations, row.d + 3);
    }
    assert!(a.rounds_slope > 0.0);
}

#[test]
fn csv_emitters_are_deterministic() {
    let corpus = ZetaCorpus::Random {
        count: 10,
        len: 64,
        sigma: 2,
        seed: 3,
    };
    assert_eq!(
        zeta_csv(&zeta_scan(&corpus, Mode::Lzn)),
        zeta_csv(&zeta_scan(&corpus, Mode::Lzn))
    );
    let rows = verify_lower_bound(&[4, 8], &[1, 2]);
    let csv = lower_bound_csv(&rows);
    assert!(csv.starts_with("sigma,h,n,zn,zn_suffix,ratio"));
    assert_eq!(csv, lower_bound_csv(&rows));
}
