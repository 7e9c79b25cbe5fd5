//! Protocol drivers.
//!
//! The in-process engine runs the two party state machines on their own
//! threads connected by queue channels; the protocols alternate strictly, so
//! the resulting transcripts are deterministic and both sides' logs are
//! asserted identical before an outcome is returned. The socket runner
//! drives one party over TCP after an uncharged JSON handshake that
//! establishes the session parameters both sides must share.

use super::hamming::{hamming_party, HammingPartyOutcome};
use super::lcp::{lcp_alice, lcp_bob, LcpPartyCtx, SchemePair};
use super::wire::{InProcessChannel, TcpChannel};
use super::{
    check_lzn_input, InputMeta, ProtocolConfig, ProtocolError, ProtocolKind, SessionParams,
    Speaker, Transcript,
};
use crate::fingerprint::{CoinStream, FingerprintScheme};
use crate::strings::{factorize_lzn, Factorization, SymbolString};
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};
use std::net::TcpStream;
use std::thread;

/// Joint LCP outcome assembled from both parties of an in-process run.
#[derive(Clone, Debug)]
pub struct LcpOutcome {
    pub ell: u64,
    /// Count of equal leading factors located by the search.
    pub matched: u64,
    /// zn of the common prefix A[..ell], computed locally for reporting.
    pub z_ell: usize,
    pub transcript: Transcript,
}

/// Joint Hamming outcome assembled from both parties of an in-process run.
#[derive(Clone, Debug)]
pub struct HammingOutcome {
    /// Sentinel-adjusted distance (the protocol's output value).
    pub distance: u64,
    pub raw_distance: u64,
    /// 1-based mismatch positions in the raw strings.
    pub positions: Vec<u64>,
    pub gap_max: u64,
    pub invocations: Vec<InvocationStats>,
    pub transcript: Transcript,
}

#[derive(Clone, Copy, Debug)]
pub struct InvocationStats {
    pub z_alice: usize,
    pub z_bob: usize,
    pub matched: u64,
    pub ell: u64,
    pub rounds: usize,
    pub bits: u64,
}

fn decompress_input(fz: &Factorization) -> Result<SymbolString, ProtocolError> {
    check_lzn_input(fz)?;
    fz.decompress()
        .map_err(|e| ProtocolError::InvalidInput(e.to_string()))
}

fn draw_schemes(cfg: &ProtocolConfig) -> (CoinStream, impl FnMut(&mut CoinStream) -> SchemePair) {
    let coins = CoinStream::new(cfg.seed);
    let verify = cfg.verify_pass;
    let width = cfg.width;
    (coins, move |c: &mut CoinStream| {
        (
            FingerprintScheme::draw(c, width),
            verify.then(|| FingerprintScheme::draw(c, width)),
        )
    })
}

/// Runs the LCP protocol with both parties in this process.
pub fn run_lcp_in_process(
    alice_input: &Factorization,
    bob_input: &Factorization,
    cfg: &ProtocolConfig,
) -> Result<LcpOutcome, ProtocolError> {
    cfg.validate()?;
    let text_a = decompress_input(alice_input)?;
    let text_b = decompress_input(bob_input)?;
    let sess = SessionParams::derive(
        ProtocolKind::Lcp,
        cfg,
        [InputMeta::of(&text_a), InputMeta::of(&text_b)],
    );

    let (mut ch_a, mut ch_b) = InProcessChannel::pair();
    let (alice, bob) = thread::scope(|s| {
        let alice = s.spawn(|| {
            let (mut coins, mut draw) = draw_schemes(cfg);
            let schemes = draw(&mut coins);
            let ctx = LcpPartyCtx::new(alice_input, text_a.symbols(), &sess);
            let mut tr = Transcript::new();
            let r = lcp_alice(&mut ch_a, &mut tr, &sess, &schemes, &ctx, false)?;
            Ok::<_, ProtocolError>((r, tr))
        });
        let bob = s.spawn(|| {
            let (mut coins, mut draw) = draw_schemes(cfg);
            let schemes = draw(&mut coins);
            let ctx = LcpPartyCtx::new(bob_input, text_b.symbols(), &sess);
            let mut tr = Transcript::new();
            let r = lcp_bob(&mut ch_b, &mut tr, &sess, &schemes, &ctx)?;
            Ok::<_, ProtocolError>((r, tr))
        });
        (alice.join().expect("alice panicked"), bob.join().expect("bob panicked"))
    });
    let (ra, tra) = alice?;
    let (rb, trb) = bob?;
    if ra.ell != rb.ell {
        return Err(ProtocolError::Desync(format!(
            "parties disagree on the result: {} vs {}",
            ra.ell, rb.ell
        )));
    }
    if tra != trb {
        return Err(ProtocolError::Desync("transcripts diverged".into()));
    }
    let prefix = SymbolString::from_raw(text_a.symbols()[..ra.ell as usize].to_vec());
    let z_ell = factorize_lzn(&prefix).size();
    Ok(LcpOutcome {
        ell: ra.ell,
        matched: ra.matched,
        z_ell,
        transcript: tra,
    })
}

/// Runs the Hamming protocol with both parties in this process.
pub fn run_hamming_in_process(
    alice_input: &Factorization,
    bob_input: &Factorization,
    cfg: &ProtocolConfig,
) -> Result<HammingOutcome, ProtocolError> {
    cfg.validate()?;
    let text_a = decompress_input(alice_input)?;
    let text_b = decompress_input(bob_input)?;
    let sess = SessionParams::derive(
        ProtocolKind::Hamming,
        cfg,
        [InputMeta::of(&text_a), InputMeta::of(&text_b)],
    );

    let (mut ch_a, mut ch_b) = InProcessChannel::pair();
    let (alice, bob) = thread::scope(|s| {
        let alice = s.spawn(|| hamming_party(&mut ch_a, Speaker::Alice, cfg, &sess, &text_a));
        let bob = s.spawn(|| hamming_party(&mut ch_b, Speaker::Bob, cfg, &sess, &text_b));
        (alice.join().expect("alice panicked"), bob.join().expect("bob panicked"))
    });
    // A length mismatch surfaces on Bob's side as the specific error while
    // Alice merely sees the abort; prefer the specific one.
    let (oa, ob) = match (alice, bob) {
        (Err(ProtocolError::Aborted), Err(e)) => return Err(e),
        (Err(e), _) => return Err(e),
        (_, Err(e)) => return Err(e),
        (Ok(a), Ok(b)) => (a, b),
    };
    merge_hamming(oa, ob)
}

fn merge_hamming(
    alice: HammingPartyOutcome,
    bob: HammingPartyOutcome,
) -> Result<HammingOutcome, ProtocolError> {
    if alice.transcript != bob.transcript {
        return Err(ProtocolError::Desync("transcripts diverged".into()));
    }
    if alice.reported_distance != bob.reported_distance
        || alice.invocations.len() != bob.invocations.len()
    {
        return Err(ProtocolError::Desync(
            "parties disagree on the outcome".into(),
        ));
    }
    let invocations = alice
        .invocations
        .iter()
        .zip(&bob.invocations)
        .map(|(a, b)| InvocationStats {
            z_alice: a.z_self,
            z_bob: b.z_self,
            matched: a.matched,
            ell: a.ell,
            rounds: a.rounds,
            bits: a.bits,
        })
        .collect();
    Ok(HammingOutcome {
        distance: alice.reported_distance,
        raw_distance: alice.raw_distance,
        positions: alice.reported_positions,
        gap_max: alice.gap_max,
        invocations,
        transcript: alice.transcript,
    })
}

/// What one side of a socket run learns.
#[derive(Clone, Debug)]
pub struct PartyOutcome {
    pub value: u64,
    pub transcript: Transcript,
    pub session: SessionParams,
}

#[derive(Serialize, Deserialize, Debug)]
struct Handshake {
    magic: String,
    version: u32,
    kind: ProtocolKind,
    role: Speaker,
    config: ProtocolConfig,
    meta: InputMeta,
}

const MAGIC: &str = "lzcomm";
const VERSION: u32 = 1;

fn write_json_frame<W: Write, T: Serialize>(w: &mut W, value: &T) -> Result<(), ProtocolError> {
    let bytes = serde_json::to_vec(value)
        .map_err(|e| ProtocolError::Transport(format!("handshake encode: {e}")))?;
    w.write_all(&(bytes.len() as u32).to_be_bytes())?;
    w.write_all(&bytes)?;
    w.flush()?;
    Ok(())
}

fn read_json_frame<R: Read, T: for<'de> Deserialize<'de>>(r: &mut R) -> Result<T, ProtocolError> {
    let mut header = [0u8; 4];
    r.read_exact(&mut header)?;
    let len = u32::from_be_bytes(header) as usize;
    if len > 1 << 20 {
        return Err(ProtocolError::Transport("oversized handshake".into()));
    }
    let mut bytes = vec![0u8; len];
    r.read_exact(&mut bytes)?;
    serde_json::from_slice(&bytes)
        .map_err(|e| ProtocolError::Transport(format!("handshake decode: {e}")))
}

/// Runs one party of a protocol over an established TCP connection. The
/// handshake (uncharged session setup) exchanges input metadata and checks
/// that both processes were started with the same configuration.
pub fn run_socket_party(
    mut stream: TcpStream,
    role: Speaker,
    kind: ProtocolKind,
    cfg: &ProtocolConfig,
    input: &Factorization,
) -> Result<PartyOutcome, ProtocolError> {
    cfg.validate()?;
    let text = decompress_input(input)?;
    stream.set_nodelay(true).ok();
    write_json_frame(
        &mut stream,
        &Handshake {
            magic: MAGIC.into(),
            version: VERSION,
            kind,
            role,
            config: *cfg,
            meta: InputMeta::of(&text),
        },
    )?;
    let peer: Handshake = read_json_frame(&mut stream)?;
    if peer.magic != MAGIC || peer.version != VERSION {
        return Err(ProtocolError::Config("peer is not a compatible engine".into()));
    }
    if peer.kind != kind {
        return Err(ProtocolError::Config(format!(
            "peer runs {} but this side runs {}",
            peer.kind.as_str(),
            kind.as_str()
        )));
    }
    if peer.role != role.other() {
        return Err(ProtocolError::Config("both sides claim the same role".into()));
    }
    if peer.config != *cfg {
        return Err(ProtocolError::Config(
            "peer configuration (seed/width/epsilon/sentinel/verify) differs".into(),
        ));
    }
    let metas = match role {
        Speaker::Alice => [InputMeta::of(&text), peer.meta],
        Speaker::Bob => [peer.meta, InputMeta::of(&text)],
    };
    let sess = SessionParams::derive(kind, cfg, metas);
    let mut ch = TcpChannel::new(stream);

    match kind {
        ProtocolKind::Lcp => {
            let (mut coins, mut draw) = draw_schemes(cfg);
            let schemes = draw(&mut coins);
            let ctx = LcpPartyCtx::new(input, text.symbols(), &sess);
            let mut tr = Transcript::new();
            let r = match role {
                Speaker::Alice => lcp_alice(&mut ch, &mut tr, &sess, &schemes, &ctx, false)?,
                Speaker::Bob => lcp_bob(&mut ch, &mut tr, &sess, &schemes, &ctx)?,
            };
            Ok(PartyOutcome {
                value: r.ell,
                transcript: tr,
                session: sess,
            })
        }
        ProtocolKind::Hamming => {
            let o = hamming_party(&mut ch, role, cfg, &sess, &text)?;
            Ok(PartyOutcome {
                value: o.reported_distance,
                transcript: o.transcript,
                session: sess,
            })
        }
    }
}
