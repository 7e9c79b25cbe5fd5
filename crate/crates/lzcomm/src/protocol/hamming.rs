//! Kangaroo-jump Hamming distance over the LCP sub-protocol.
//!
//! After one charged length exchange, the parties repeatedly run the LCP
//! sub-protocol on their remaining suffixes. Every sub-result that stops
//! short of the end pins the next mismatching position; both parties then
//! refactorize their suffix after it (local work, never charged) and jump
//! again. The run always ends with a sub-invocation that reaches the end of
//! the (possibly empty) remainder, so the number of LCP invocations is
//! exactly the wrapped mismatch count plus one. Alice finally echoes the
//! raw distance once so both sides hold the value.
//!
//! With sentinel wrapping on, Alice frames her string as `#A$` and Bob as
//! `$B#`; both endpoints then mismatch by construction and the reported
//! distance subtracts 2.

use super::lcp::{lcp_alice, lcp_bob, LcpPartyCtx, SchemePair};
use super::wire::{recv_msg, send_msg, Channel, ControlCode, Payload};
use super::{MessageKind, ProtocolConfig, ProtocolError, SessionParams, Speaker, Transcript};
use crate::fingerprint::{CoinStream, FingerprintScheme};
use crate::strings::{Mode, SuffixFactorizer, SymbolString, SENTINEL_CLOSE, SENTINEL_OPEN};

#[derive(Clone, Debug)]
pub struct HammingPartyOutcome {
    /// Mismatch count of the (possibly wrapped) strings.
    pub raw_distance: u64,
    /// 1-based mismatch positions in the wrapped strings.
    pub wrapped_positions: Vec<u64>,
    /// Sentinel-adjusted distance; this is the protocol's output value.
    pub reported_distance: u64,
    /// 1-based mismatch positions in the raw strings.
    pub reported_positions: Vec<u64>,
    /// Largest gap between adjacent reported mismatches (whole length when
    /// there are none, first position when there is exactly one).
    pub gap_max: u64,
    pub invocations: Vec<PartyInvocation>,
    pub transcript: Transcript,
}

#[derive(Clone, Copy, Debug)]
pub struct PartyInvocation {
    pub z_self: usize,
    pub matched: u64,
    pub ell: u64,
    pub rounds: usize,
    pub bits: u64,
}

fn wrap_for_role(raw: &SymbolString, role: Speaker) -> SymbolString {
    let (first, last) = match role {
        Speaker::Alice => (SENTINEL_OPEN, SENTINEL_CLOSE),
        Speaker::Bob => (SENTINEL_CLOSE, SENTINEL_OPEN),
    };
    let mut symbols = Vec::with_capacity(raw.len() + 2);
    symbols.push(first);
    symbols.extend_from_slice(raw.symbols());
    symbols.push(last);
    SymbolString::from_raw(symbols)
}

pub(crate) fn hamming_party<C: Channel>(
    ch: &mut C,
    role: Speaker,
    cfg: &ProtocolConfig,
    sess: &SessionParams,
    raw_text: &SymbolString,
) -> Result<HammingPartyOutcome, ProtocolError> {
    let wrapped = if cfg.sentinel {
        wrap_for_role(raw_text, role)
    } else {
        raw_text.clone()
    };
    let n_wrapped = wrapped.len() as u64;
    let mut tr = Transcript::new();

    // Length exchange, counted: Alice announces, Bob checks.
    match role {
        Speaker::Alice => {
            send_msg(ch, &mut tr, sess, Speaker::Alice, Payload::Length(n_wrapped))?;
        }
        Speaker::Bob => {
            match recv_msg(ch, &mut tr, sess, Speaker::Alice, &[MessageKind::Length])? {
                Payload::Length(n) if n == n_wrapped => {}
                Payload::Length(n) => {
                    send_msg(
                        ch,
                        &mut tr,
                        sess,
                        Speaker::Bob,
                        Payload::Control(ControlCode::Abort),
                    )?;
                    return Err(ProtocolError::LengthMismatch {
                        alice: n,
                        bob: n_wrapped,
                    });
                }
                other => {
                    return Err(ProtocolError::Desync(format!(
                        "expected length announcement, got {:?}",
                        other.kind()
                    )))
                }
            }
        }
    }

    let mut coins = CoinStream::new(cfg.seed);
    let refactorizer = SuffixFactorizer::new(&wrapped);
    let mut offset = 0u64;
    let mut mismatches: Vec<u64> = Vec::new();
    let mut invocations: Vec<PartyInvocation> = Vec::new();
    loop {
        let suffix = &wrapped.symbols()[offset as usize..];
        let fz = refactorizer.factorize_suffix(offset as usize, Mode::Lzn);
        let ctx = LcpPartyCtx::new(&fz, suffix, sess);
        let schemes: SchemePair = (
            FingerprintScheme::draw(&mut coins, cfg.width),
            cfg.verify_pass
                .then(|| FingerprintScheme::draw(&mut coins, cfg.width)),
        );
        let mut seg = Transcript::new();
        let result = match role {
            Speaker::Alice => lcp_alice(
                ch,
                &mut seg,
                sess,
                &schemes,
                &ctx,
                invocations.is_empty(),
            )?,
            Speaker::Bob => lcp_bob(ch, &mut seg, sess, &schemes, &ctx)?,
        };
        invocations.push(PartyInvocation {
            z_self: fz.size(),
            matched: result.matched,
            ell: result.ell,
            rounds: seg.rounds(),
            bits: seg.total_bits(),
        });
        tr.extend_from(&seg);
        let ell = result.ell.min(suffix.len() as u64);
        if ell == suffix.len() as u64 {
            break; // remainder fully matched (or empty)
        }
        let pos = offset + ell + 1;
        mismatches.push(pos);
        offset = pos;
    }

    // Final echo of the raw distance, counted.
    let d_raw = mismatches.len() as u64;
    match role {
        Speaker::Alice => {
            send_msg(ch, &mut tr, sess, Speaker::Alice, Payload::Length(d_raw))?;
        }
        Speaker::Bob => {
            match recv_msg(ch, &mut tr, sess, Speaker::Alice, &[MessageKind::Length])? {
                Payload::Length(d) if d == d_raw => {}
                Payload::Length(d) => {
                    return Err(ProtocolError::Desync(format!(
                        "distance echo {d} disagrees with local count {d_raw}"
                    )))
                }
                other => {
                    return Err(ProtocolError::Desync(format!(
                        "expected distance echo, got {:?}",
                        other.kind()
                    )))
                }
            }
        }
    }

    let (reported_positions, reported_distance) = if cfg.sentinel {
        let inner: Vec<u64> = mismatches
            .iter()
            .copied()
            .filter(|&p| p >= 2 && p + 1 <= n_wrapped)
            .map(|p| p - 1)
            .collect();
        let d = inner.len() as u64;
        (inner, d)
    } else {
        (mismatches.clone(), d_raw)
    };
    let gap_max = match reported_positions.len() {
        0 => raw_text.len() as u64,
        1 => reported_positions[0],
        _ => reported_positions
            .windows(2)
            .map(|w| w[1] - w[0] + 1)
            .max()
            .unwrap(),
    };

    Ok(HammingPartyOutcome {
        raw_distance: d_raw,
        wrapped_positions: mismatches,
        reported_distance,
        reported_positions,
        gap_max,
        invocations,
        transcript: tr,
    })
}
