//! Property tests for the factorization and grammar invariants.

use lzcomm::grammar::GrammarPool;
use lzcomm::strings::{
    factorize, factorize_cn, factorize_lzn, factorize_lzs, hamming_oracle, oracle_factorize,
    wrap_sentinels, Factorization, Mode, SymbolString,
};
use proptest::prelude::*;

fn symbol_string(max_len: usize, sigma: u32) -> impl Strategy<Value = SymbolString> {
    prop::collection::vec(0..sigma, 0..=max_len)
        .prop_map(|v| SymbolString::from_symbols(v).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn factorize_round_trips(s in symbol_string(200, 4)) {
        for mode in [Mode::Lzn, Mode::Lzs, Mode::Cn] {
            let fz = factorize(&s, mode);
            prop_assert_eq!(fz.decompress().unwrap(), s.clone());
        }
    }

    #[test]
    fn fast_paths_equal_oracles(s in symbol_string(80, 3)) {
        for mode in [Mode::Lzn, Mode::Lzs, Mode::Cn] {
            prop_assert_eq!(factorize(&s, mode), oracle_factorize(&s, mode));
        }
    }

    #[test]
    fn size_sandwich_and_dominance(s in symbol_string(300, 5)) {
        let zn = factorize_lzn(&s).size();
        let zs = factorize_lzs(&s).size();
        let cn = factorize_cn(&s).size();
        prop_assert!(zn <= cn);
        prop_assert!(cn <= 2 * zn.max(1) || zn == 0);
        prop_assert!(zs <= zn);
    }

    #[test]
    fn factorization_text_round_trips(s in symbol_string(120, 4), mode_idx in 0usize..3) {
        let mode = [Mode::Lzn, Mode::Lzs, Mode::Cn][mode_idx];
        let fz = factorize(&s, mode);
        let parsed = Factorization::parse(&fz.to_text()).unwrap();
        prop_assert_eq!(parsed, fz);
    }

    #[test]
    fn sentinel_wrap_shifts_distance_by_two(
        pair in prop::collection::vec((0u32..4, 0u32..4), 0..100)
    ) {
        let a = SymbolString::from_symbols(pair.iter().map(|p| p.0).collect()).unwrap();
        let b = SymbolString::from_symbols(pair.iter().map(|p| p.1).collect()).unwrap();
        let raw = hamming_oracle(&a, &b).unwrap().distance;
        let (wa, wb) = wrap_sentinels(&a, &b);
        prop_assert_eq!(hamming_oracle(&wa, &wb).unwrap().distance, raw + 2);
    }

    #[test]
    fn grammar_expand_inverts_build(s in symbol_string(200, 4)) {
        prop_assume!(!s.is_empty());
        let mut pool = GrammarPool::new();
        let g = pool.build(&s).unwrap();
        prop_assert_eq!(pool.expand(g), s);
        prop_assert!(pool.validate(g).is_ok());
    }

    #[test]
    fn grammar_split_expansions_are_exact(s in symbol_string(200, 3), split in 0usize..=200) {
        prop_assume!(!s.is_empty());
        let k = split.min(s.len());
        let mut pool = GrammarPool::new();
        let g = pool.build(&s).unwrap();
        let (p, suf) = pool.split_at(g, k as u64).unwrap();
        let symbols = s.symbols();
        if let Some(p) = p {
            let exp = pool.expand(p);
            prop_assert_eq!(exp.symbols(), &symbols[..k]);
            prop_assert!(pool.validate(p).is_ok());
        } else {
            prop_assert_eq!(k, 0);
        }
        if let Some(suf) = suf {
            let exp = pool.expand(suf);
            prop_assert_eq!(exp.symbols(), &symbols[k..]);
            prop_assert!(pool.validate(suf).is_ok());
        } else {
            prop_assert_eq!(k, s.len());
        }
    }

    #[test]
    fn grammar_concat_is_string_concat(
        a in symbol_string(120, 3),
        b in symbol_string(120, 3),
    ) {
        prop_assume!(!a.is_empty() && !b.is_empty());
        let mut pool = GrammarPool::new();
        let ga = pool.build(&a).unwrap();
        let gb = pool.build(&b).unwrap();
        let gc = pool.concat(ga, gb);
        let mut want = a.symbols().to_vec();
        want.extend_from_slice(b.symbols());
        let exp = pool.expand(gc);
        prop_assert_eq!(exp.symbols(), &want[..]);
        prop_assert!(pool.validate(gc).is_ok());
    }

    #[test]
    fn suffix_chain_holds(s in symbol_string(150, 3), pos in 1usize..=150) {
        prop_assume!(!s.is_empty());
        let i = pos.min(s.len());
        let suffix = s.suffix(i - 1);
        let zn = factorize_lzn(&suffix).size();
        let cn = factorize_cn(&suffix).size();
        let mut pool = GrammarPool::new();
        let g = pool.build(&s).unwrap();
        let (_, suf) = pool.split_at(g, (i - 1) as u64).unwrap();
        let avl = pool.reachable_size(suf.unwrap());
        prop_assert!(zn <= cn && cn <= avl);
    }
}
