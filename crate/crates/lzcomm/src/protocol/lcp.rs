//! The LCP sub-protocol over factor sequences.
//!
//! Both factor lists are treated as strings over the triple alphabet. A
//! doubling search followed by a binary search locates the largest equal
//! factor prefix via fingerprint/boolean probe pairs; a probe at index `m`
//! compares the fingerprints of the first `min(m, z)` factors on each side,
//! so running past either list shows up as a fingerprint mismatch and no
//! factor counts ever travel. Afterwards either Alice's factor list is
//! exhausted (she signals with a control message and Bob answers with the
//! expansion length of his matching prefix) or Alice sends her first
//! mismatching triple and Bob extends the answer inside his own string.
//! Exactly one length value travels back, so both parties end up with the
//! result.

use super::wire::{recv_msg, send_msg, Channel, ControlCode, Payload, WireTriple};
use super::{MessageKind, ProtocolError, SessionParams, Speaker, Transcript};
use crate::fingerprint::{FactorElements, FingerprintScheme, PrefixFingerprints};
use crate::strings::Factorization;

/// Per-invocation party state: wire triples, cumulative expansion lengths
/// and the party's own decompressed text.
pub(crate) struct LcpPartyCtx<'a> {
    pub triples: Vec<WireTriple>,
    pub cum_len: Vec<u64>,
    pub text: &'a [u32],
}

impl<'a> LcpPartyCtx<'a> {
    pub fn new(fz: &Factorization, text: &'a [u32], sess: &SessionParams) -> Self {
        let mut triples = Vec::with_capacity(fz.factors.len());
        let mut cum_len = Vec::with_capacity(fz.factors.len() + 1);
        cum_len.push(0);
        let mut acc = 0u64;
        for f in &fz.factors {
            triples.push(WireTriple {
                source: f.source as u64,
                length: f.length as u64,
                symbol: sess.map_symbol(f.last_symbol),
            });
            acc += f.length as u64;
            cum_len.push(acc);
        }
        LcpPartyCtx {
            triples,
            cum_len,
            text,
        }
    }

    /// Nonzero field elements for fingerprinting the first `k` factors.
    fn elements(&self, k: usize) -> Vec<FactorElements> {
        self.triples[..k]
            .iter()
            .map(|t| [t.source + 1, t.length + 1, t.symbol + 1])
            .collect()
    }

    fn prefix_fps(&self, scheme: &FingerprintScheme) -> PrefixFingerprints {
        PrefixFingerprints::compute(&self.elements(self.triples.len()), scheme)
    }
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct LcpPartyResult {
    pub ell: u64,
    pub matched: u64,
}

/// Fingerprint base for the search plus an optional independent base for
/// the verification pass.
pub(crate) type SchemePair = (FingerprintScheme, Option<FingerprintScheme>);

pub(crate) fn lcp_alice<C: Channel>(
    ch: &mut C,
    tr: &mut Transcript,
    sess: &SessionParams,
    schemes: &SchemePair,
    ctx: &LcpPartyCtx,
    abort_aware: bool,
) -> Result<LcpPartyResult, ProtocolError> {
    let za = ctx.triples.len();
    let fps = ctx.prefix_fps(&schemes.0);
    let mask = schemes.0.wire_mask();
    let bool_expect: &[MessageKind] = if abort_aware {
        &[MessageKind::Boolean, MessageKind::Control]
    } else {
        &[MessageKind::Boolean]
    };

    let probe = |ch: &mut C, tr: &mut Transcript, eff: usize| -> Result<bool, ProtocolError> {
        send_msg(ch, tr, sess, Speaker::Alice, Payload::Fingerprint(fps.get(eff) & mask))?;
        match recv_msg(ch, tr, sess, Speaker::Bob, bool_expect)? {
            Payload::Boolean(b) => Ok(b),
            Payload::Control(ControlCode::Abort) => Err(ProtocolError::Aborted),
            other => Err(ProtocolError::Desync(format!(
                "expected probe reply, got {:?}",
                other.kind()
            ))),
        }
    };

    // Doubling until the first mismatch or until my whole list has matched.
    let mut matched = 0usize;
    let mut last_true = 0usize;
    let mut first_false: Option<usize> = None;
    let mut m = 1usize;
    loop {
        let eff = m.min(za);
        if probe(ch, tr, eff)? {
            matched = eff;
            last_true = m;
            if m >= za {
                break;
            }
            m *= 2;
        } else {
            first_false = Some(m);
            break;
        }
    }

    // Binary search between the last equal and first unequal probe index.
    if let Some(mut hi) = first_false {
        let mut lo = last_true;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            let eff = mid.min(za);
            if probe(ch, tr, eff)? {
                lo = mid;
                matched = eff;
            } else {
                hi = mid;
            }
        }
    }

    // Phase 2: settle the answer in two messages.
    let reply = if matched == za {
        send_msg(
            ch,
            tr,
            sess,
            Speaker::Alice,
            Payload::Control(ControlCode::PrefixEnd),
        )?;
        recv_msg(ch, tr, sess, Speaker::Bob, &[MessageKind::Length])?
    } else {
        send_msg(
            ch,
            tr,
            sess,
            Speaker::Alice,
            Payload::Triple(ctx.triples[matched]),
        )?;
        recv_msg(ch, tr, sess, Speaker::Bob, &[MessageKind::Length])?
    };
    let ell = match reply {
        Payload::Length(v) => v,
        other => {
            return Err(ProtocolError::Desync(format!(
                "expected length, got {:?}",
                other.kind()
            )))
        }
    };

    if let Some(vscheme) = &schemes.1 {
        verify_alice(ch, tr, sess, vscheme, ctx, matched)?;
    }

    Ok(LcpPartyResult {
        ell,
        matched: matched as u64,
    })
}

pub(crate) fn lcp_bob<C: Channel>(
    ch: &mut C,
    tr: &mut Transcript,
    sess: &SessionParams,
    schemes: &SchemePair,
    ctx: &LcpPartyCtx,
) -> Result<LcpPartyResult, ProtocolError> {
    let zb = ctx.triples.len();
    let fps = ctx.prefix_fps(&schemes.0);
    let mask = schemes.0.wire_mask();

    enum Search {
        Doubling { m: usize },
        Binary { lo: usize, hi: usize },
    }

    let mut matched = 0usize;
    let mut state = Search::Doubling { m: 1 };
    // Run probes until the search converges or Alice cuts it short.
    let closing = loop {
        let (probe_index, expected): (usize, &[MessageKind]) = match state {
            Search::Doubling { m } => (m, &[MessageKind::Fingerprint, MessageKind::Control]),
            Search::Binary { lo, hi } if hi - lo > 1 => {
                ((lo + hi) / 2, &[MessageKind::Fingerprint])
            }
            Search::Binary { .. } => {
                break recv_msg(
                    ch,
                    tr,
                    sess,
                    Speaker::Alice,
                    &[MessageKind::Triple, MessageKind::Control],
                )?;
            }
        };
        match recv_msg(ch, tr, sess, Speaker::Alice, expected)? {
            Payload::Fingerprint(fp_alice) => {
                let eff = probe_index.min(zb);
                let ok = fp_alice == fps.get(eff) & mask;
                send_msg(ch, tr, sess, Speaker::Bob, Payload::Boolean(ok))?;
                state = match state {
                    Search::Doubling { m } => {
                        if ok {
                            matched = eff;
                            Search::Doubling { m: m * 2 }
                        } else {
                            Search::Binary { lo: m / 2, hi: m }
                        }
                    }
                    Search::Binary { lo, hi } => {
                        let mid = (lo + hi) / 2;
                        if ok {
                            matched = eff;
                            Search::Binary { lo: mid, hi }
                        } else {
                            Search::Binary { lo, hi: mid }
                        }
                    }
                };
            }
            closing => break closing,
        }
    };

    let ell = match closing {
        Payload::Control(ControlCode::PrefixEnd) => {
            // Alice's whole list matched my first `matched` factors; the
            // answer is their expansion length.
            ctx.cum_len[matched]
        }
        Payload::Control(ControlCode::Abort) => return Err(ProtocolError::Aborted),
        Payload::Triple(t) => {
            if t.length == 0 {
                return Err(ProtocolError::Desync("triple with zero length".into()));
            }
            let l0 = ctx.cum_len[matched] as usize;
            // Expand Alice's mismatching factor against the common prefix,
            // which is my own text up to l0.
            let mut expanded: Vec<u32> = Vec::with_capacity(t.length as usize);
            if t.source > 0 {
                let src = (t.source - 1) as usize;
                let copy = (t.length - 1) as usize;
                let end = (src + copy).min(l0);
                if src < end {
                    expanded.extend_from_slice(&ctx.text[src..end]);
                }
            }
            expanded.push(sess.unmap_symbol(t.symbol)?);
            let suffix = &ctx.text[l0.min(ctx.text.len())..];
            let extension = expanded
                .iter()
                .zip(suffix)
                .take_while(|(a, b)| a == b)
                .count();
            l0 as u64 + extension as u64
        }
        other => {
            return Err(ProtocolError::Desync(format!(
                "expected closing message, got {:?}",
                other.kind()
            )))
        }
    };
    send_msg(ch, tr, sess, Speaker::Bob, Payload::Length(ell))?;

    if let Some(vscheme) = &schemes.1 {
        verify_bob(ch, tr, sess, vscheme, ctx, matched)?;
    }

    Ok(LcpPartyResult {
        ell,
        matched: matched as u64,
    })
}

/// Optional error-amplification pass: one extra probe of the located factor
/// prefix under an independent base.
fn verify_alice<C: Channel>(
    ch: &mut C,
    tr: &mut Transcript,
    sess: &SessionParams,
    scheme: &FingerprintScheme,
    ctx: &LcpPartyCtx,
    matched: usize,
) -> Result<(), ProtocolError> {
    let fp = PrefixFingerprints::compute(&ctx.elements(matched), scheme).get(matched);
    send_msg(
        ch,
        tr,
        sess,
        Speaker::Alice,
        Payload::Fingerprint(fp & scheme.wire_mask()),
    )?;
    match recv_msg(ch, tr, sess, Speaker::Bob, &[MessageKind::Boolean])? {
        Payload::Boolean(true) => Ok(()),
        Payload::Boolean(false) => Err(ProtocolError::VerificationFailed),
        other => Err(ProtocolError::Desync(format!(
            "expected verification reply, got {:?}",
            other.kind()
        ))),
    }
}

fn verify_bob<C: Channel>(
    ch: &mut C,
    tr: &mut Transcript,
    sess: &SessionParams,
    scheme: &FingerprintScheme,
    ctx: &LcpPartyCtx,
    matched: usize,
) -> Result<(), ProtocolError> {
    let want = PrefixFingerprints::compute(&ctx.elements(matched), scheme).get(matched);
    let got = match recv_msg(ch, tr, sess, Speaker::Alice, &[MessageKind::Fingerprint])? {
        Payload::Fingerprint(v) => v,
        other => {
            return Err(ProtocolError::Desync(format!(
                "expected verification fingerprint, got {:?}",
                other.kind()
            )))
        }
    };
    let ok = got == want & scheme.wire_mask();
    send_msg(ch, tr, sess, Speaker::Bob, Payload::Boolean(ok))?;
    if ok {
        Ok(())
    } else {
        Err(ProtocolError::VerificationFailed)
    }
}
