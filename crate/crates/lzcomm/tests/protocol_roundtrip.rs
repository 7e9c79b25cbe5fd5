//! End-to-end protocol checks against the positionwise oracles, plus
//! accounting bounds and transport fidelity.

use lzcomm::fingerprint::CoinStream;
use lzcomm::protocol::{
    replay, run_hamming_in_process, run_lcp_in_process, run_socket_party, summary_for, to_jsonl,
    MessageKind, ProtocolConfig, ProtocolError, ProtocolKind, SessionParams, Speaker,
};
use lzcomm::strings::{factorize_lzn, hamming_oracle, lcp, Mode, SymbolString};
use std::net::TcpListener;

fn random_string(coins: &mut CoinStream, len: usize, sigma: u32) -> SymbolString {
    SymbolString::from_symbols((0..len).map(|_| (coins.next_u64() % sigma as u64) as u32).collect())
        .unwrap()
}

/// A pair that shares a prefix of roughly `div` symbols and then diverges.
fn planted_divergence(coins: &mut CoinStream, len: usize, sigma: u32) -> (SymbolString, SymbolString) {
    let a = random_string(coins, len, sigma);
    let div = (coins.next_u64() % (len as u64 + 1)) as usize;
    let mut b: Vec<u32> = a.symbols().to_vec();
    if div < len {
        b[div] = (b[div] + 1 + (coins.next_u64() % (sigma as u64 - 1)) as u32) % sigma;
        for v in b.iter_mut().skip(div + 1) {
            *v = (coins.next_u64() % sigma as u64) as u32;
        }
    }
    (a, SymbolString::from_symbols(b).unwrap())
}

fn ceil_log2(x: u64) -> u64 {
    assert!(x >= 2);
    (64 - (x - 1).leading_zeros()) as u64
}

#[test]
fn lcp_identical_inputs_skip_the_mismatch_phase() {
    let s = SymbolString::from_text("abaababaabaabaabaabaabb");
    let fz = factorize_lzn(&s);
    let cfg = ProtocolConfig::default();
    let out = run_lcp_in_process(&fz, &fz, &cfg).unwrap();
    assert_eq!(out.ell, s.len() as u64);
    assert!(out
        .transcript
        .messages
        .iter()
        .all(|m| m.kind != MessageKind::Triple));
}

#[test]
fn lcp_matches_oracle_with_round_and_bit_bounds() {
    let mut coins = CoinStream::new(2024);
    for trial in 0..400 {
        let len = 1 + (coins.next_u64() % 300) as usize;
        let sigma = 2 + (coins.next_u64() % 3) as u32;
        let (a, b) = planted_divergence(&mut coins, len, sigma);
        let fa = factorize_lzn(&a);
        let fb = factorize_lzn(&b);
        let cfg = ProtocolConfig {
            seed: coins.next_u64(),
            ..ProtocolConfig::default()
        };
        let out = run_lcp_in_process(&fa, &fb, &cfg).unwrap();
        assert_eq!(out.ell, lcp(&a, &b) as u64, "trial {trial}");

        let rounds = out.transcript.rounds() as u64;
        let bound = 4 * ceil_log2(out.matched + 2) + 2;
        assert!(rounds <= bound, "trial {trial}: rounds {rounds} > {bound}");

        let sess = SessionParams {
            n: a.len().max(b.len()) as u64,
            sigma: sigma as u64, // alphabet used by both strings
            width: cfg.width,
            verify_pass: false,
        };
        let bits = out.transcript.total_bits();
        let bit_bound =
            cfg.width as u64 * (4 * ceil_log2(out.matched + 2)) + sess.triple_bits() + sess.len_bits();
        assert!(bits <= bit_bound, "trial {trial}: bits {bits} > {bit_bound}");
    }
}

#[test]
fn lcp_prefix_inputs_return_the_shorter_length() {
    // One input a strict prefix of the other, both directions.
    let long = SymbolString::from_text("abaababaabaabaabaabaabb");
    let short = SymbolString::from_text("abaabab");
    let fl = factorize_lzn(&long);
    let fs = factorize_lzn(&short);
    let cfg = ProtocolConfig::default();
    assert_eq!(run_lcp_in_process(&fs, &fl, &cfg).unwrap().ell, 7);
    assert_eq!(run_lcp_in_process(&fl, &fs, &cfg).unwrap().ell, 7);
}

#[test]
fn lcp_empty_inputs() {
    let empty = factorize_lzn(&SymbolString::new());
    let some = factorize_lzn(&SymbolString::from_text("xy"));
    let cfg = ProtocolConfig::default();
    assert_eq!(run_lcp_in_process(&empty, &empty, &cfg).unwrap().ell, 0);
    assert_eq!(run_lcp_in_process(&empty, &some, &cfg).unwrap().ell, 0);
    assert_eq!(run_lcp_in_process(&some, &empty, &cfg).unwrap().ell, 0);
}

#[test]
fn lcp_first_mismatch_lands_inside_alices_factor() {
    let mut coins = CoinStream::new(77);
    for _ in 0..200 {
        let len = 2 + (coins.next_u64() % 200) as usize;
        let (a, b) = planted_divergence(&mut coins, len, 2);
        let fa = factorize_lzn(&a);
        let fb = factorize_lzn(&b);
        let cfg = ProtocolConfig::default();
        let out = run_lcp_in_process(&fa, &fb, &cfg).unwrap();
        let k = out.matched as usize;
        if k < fa.size() && k < fb.size() {
            assert_ne!(fa.factors[k], fb.factors[k], "triples at k+1 must differ");
            let l0: usize = fa.factors[..k].iter().map(|f| f.length).sum();
            let fk = fa.factors[k];
            assert!(out.ell >= l0 as u64);
            if fk.truncated {
                assert!(out.ell <= (l0 + fk.length) as u64);
            } else {
                assert!(out.ell < (l0 + fk.length) as u64);
            }
        }
    }
}

#[test]
fn hamming_identical_inputs() {
    let s = SymbolString::from_text("compressed communication");
    let fz = factorize_lzn(&s);
    let cfg = ProtocolConfig::default(); // sentinel mode on
    let out = run_hamming_in_process(&fz, &fz, &cfg).unwrap();
    assert_eq!(out.distance, 0);
    assert_eq!(out.raw_distance, 2); // both sentinel ends mismatch
    assert_eq!(out.invocations.len() as u64, out.raw_distance + 1);

    let cfg = ProtocolConfig {
        sentinel: false,
        ..ProtocolConfig::default()
    };
    let out = run_hamming_in_process(&fz, &fz, &cfg).unwrap();
    assert_eq!(out.distance, 0);
    assert_eq!(out.raw_distance, 0);
    assert_eq!(out.invocations.len(), 1);
}

#[test]
fn hamming_matches_oracle_with_planted_mismatches() {
    let mut coins = CoinStream::new(5150);
    for &d in &[0usize, 1, 2, 5, 9] {
        for trial in 0..40 {
            let len = d.max(1) * 3 + 16 + (coins.next_u64() % 200) as usize;
            let a = random_string(&mut coins, len, 4);
            let b = lzcomm::experiments::plant_mismatches(&mut coins, &a, d, 4);
            let fa = factorize_lzn(&a);
            let fb = factorize_lzn(&b);
            let cfg = ProtocolConfig {
                seed: coins.next_u64(),
                ..ProtocolConfig::default()
            };
            let out = run_hamming_in_process(&fa, &fb, &cfg).unwrap();
            let want = hamming_oracle(&a, &b).unwrap();
            assert_eq!(out.distance as usize, want.distance, "d={d} trial={trial}");
            assert_eq!(
                out.positions,
                want.positions.iter().map(|&p| p as u64).collect::<Vec<_>>()
            );
            // Exactly raw-distance + 1 sub-invocations.
            assert_eq!(out.invocations.len() as u64, out.raw_distance + 1);
            // Counted aggregate bound over the implemented schedule.
            let bound: u64 = out
                .invocations
                .iter()
                .map(|inv| 4 * ceil_log2(inv.z_alice as u64 + 2) + 2)
                .sum();
            let rounds = out.transcript.rounds() as u64;
            assert!(rounds <= bound, "d={d} trial={trial}: {rounds} > {bound}");
        }
    }
}

#[test]
fn hamming_gap_max_conventions() {
    let mut coins = CoinStream::new(31);
    let a = random_string(&mut coins, 64, 4);
    let fa = factorize_lzn(&a);
    let cfg = ProtocolConfig::default();

    // d = 0: gap is the whole length.
    let out = run_hamming_in_process(&fa, &fa, &cfg).unwrap();
    assert_eq!(out.gap_max, 64);

    // d = 1: gap is the mismatch position.
    let b = lzcomm::experiments::plant_mismatches(&mut coins, &a, 1, 4);
    let out = run_hamming_in_process(&fa, &factorize_lzn(&b), &cfg).unwrap();
    assert_eq!(out.gap_max, out.positions[0]);

    // d >= 2: largest adjacent gap + 1.
    let b = lzcomm::experiments::plant_mismatches(&mut coins, &a, 5, 4);
    let out = run_hamming_in_process(&fa, &factorize_lzn(&b), &cfg).unwrap();
    let want = out
        .positions
        .windows(2)
        .map(|w| w[1] - w[0] + 1)
        .max()
        .unwrap();
    assert_eq!(out.gap_max, want);
}

#[test]
fn hamming_rejects_unequal_lengths() {
    let a = factorize_lzn(&SymbolString::from_text("abcabc"));
    let b = factorize_lzn(&SymbolString::from_text("abc"));
    let cfg = ProtocolConfig::default();
    match run_hamming_in_process(&a, &b, &cfg) {
        Err(ProtocolError::LengthMismatch { .. }) => {}
        other => panic!("expected LengthMismatch, got {other:?}"),
    }
}

#[test]
fn protocol_rejects_non_lzn_inputs() {
    let s = SymbolString::from_text("abcabc");
    let wrong_mode = lzcomm::strings::factorize(&s, Mode::Lzs);
    let ok = factorize_lzn(&s);
    let cfg = ProtocolConfig::default();
    assert!(matches!(
        run_lcp_in_process(&wrong_mode, &ok, &cfg),
        Err(ProtocolError::InvalidInput(_))
    ));
}

#[test]
fn verify_pass_adds_two_rounds_per_invocation_and_stays_correct() {
    let mut coins = CoinStream::new(404);
    let (a, b) = planted_divergence(&mut coins, 120, 2);
    let fa = factorize_lzn(&a);
    let fb = factorize_lzn(&b);
    let base = ProtocolConfig::default();
    let with_verify = ProtocolConfig {
        verify_pass: true,
        ..base
    };
    let plain = run_lcp_in_process(&fa, &fb, &base).unwrap();
    let checked = run_lcp_in_process(&fa, &fb, &with_verify).unwrap();
    assert_eq!(plain.ell, checked.ell);
    assert_eq!(checked.transcript.rounds(), plain.transcript.rounds() + 2);
}

#[test]
fn same_seed_same_transcript() {
    let mut coins = CoinStream::new(11);
    let (a, b) = planted_divergence(&mut coins, 250, 2);
    let fa = factorize_lzn(&a);
    let fb = factorize_lzn(&b);
    let cfg = ProtocolConfig {
        seed: 99,
        ..ProtocolConfig::default()
    };
    let first = run_hamming_in_process(&fa, &fb, &cfg).unwrap();
    let second = run_hamming_in_process(&fa, &fb, &cfg).unwrap();
    assert_eq!(first.transcript, second.transcript);
    assert_eq!(first.distance, second.distance);
}

#[test]
fn socket_transport_replays_the_in_process_transcript() {
    let mut coins = CoinStream::new(8080);
    for kind in [ProtocolKind::Lcp, ProtocolKind::Hamming] {
        let (a, b) = planted_divergence(&mut coins, 200, 2);
        let fa = factorize_lzn(&a);
        let fb = factorize_lzn(&b);
        let cfg = ProtocolConfig {
            seed: 1234,
            ..ProtocolConfig::default()
        };

        let in_process = match kind {
            ProtocolKind::Lcp => {
                let o = run_lcp_in_process(&fa, &fb, &cfg).unwrap();
                (o.ell, o.transcript)
            }
            ProtocolKind::Hamming => {
                let o = run_hamming_in_process(&fa, &fb, &cfg).unwrap();
                (o.distance, o.transcript)
            }
        };

        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let addr = listener.local_addr().unwrap();
        let fa_clone = fa.clone();
        let alice = std::thread::spawn(move || {
            let (stream, _) = listener.accept().unwrap();
            run_socket_party(stream, Speaker::Alice, kind, &cfg, &fa_clone).unwrap()
        });
        let stream = std::net::TcpStream::connect(addr).unwrap();
        let bob = run_socket_party(stream, Speaker::Bob, kind, &cfg, &fb).unwrap();
        let alice = alice.join().unwrap();

        assert_eq!(alice.value, in_process.0);
        assert_eq!(bob.value, in_process.0);
        assert_eq!(alice.transcript, in_process.1);
        assert_eq!(bob.transcript, in_process.1);
    }
}

#[test]
fn replay_validates_and_detects_tampering() {
    let s = SymbolString::from_text("mississippi");
    let t = SymbolString::from_text("mississouri");
    let fa = factorize_lzn(&s);
    let fb = factorize_lzn(&t);
    let cfg = ProtocolConfig::default();
    let out = run_lcp_in_process(&fa, &fb, &cfg).unwrap();
    let sess = SessionParams {
        n: s.len().max(t.len()) as u64,
        sigma: s
            .max_symbol()
            .unwrap()
            .max(t.max_symbol().unwrap()) as u64
            + 1,
        width: cfg.width,
        verify_pass: false,
    };
    let summary = summary_for(ProtocolKind::Lcp, out.ell, &out.transcript, &sess, cfg.seed);
    let jsonl = to_jsonl(&out.transcript, &summary);
    let report = replay(&jsonl).unwrap();
    assert_eq!(report.messages, out.transcript.rounds());
    assert_eq!(report.total_bits, out.transcript.total_bits());

    // Tamper with one payload bit count.
    let tampered = jsonl.replacen("\"bits\":64", "\"bits\":63", 1);
    assert_ne!(tampered, jsonl);
    assert!(replay(&tampered).is_err());
}
