//! Two-party protocol engine with exact round and bit accounting.
//!
//! Two protocols are implemented on top of a message channel abstraction:
//!
//! * an LCP protocol over canonical LZN factorizations — a doubling then
//!   binary fingerprint search over the factor sequences locates the first
//!   mismatching factor, after which one factor triple and one length value
//!   settle the answer;
//! * a Hamming-distance protocol that kangaroo-jumps over mismatches,
//!   invoking the LCP protocol once per mismatch plus once to confirm the
//!   end of the strings. Between invocations each party refactorizes its
//!   remaining suffix locally; local computation is never charged.
//!
//! One message is one round. Only payload bits are charged, at the fixed
//! per-kind encodings in [`SessionParams::kind_bits`]. Both parties append
//! every message (sent or received) to their own transcript, so the two
//! transcripts of a run are identical and independent of the transport.

mod engine;
mod hamming;
mod lcp;
mod replay;
mod wire;

pub use engine::{
    run_hamming_in_process, run_lcp_in_process, run_socket_party, HammingOutcome,
    InvocationStats, LcpOutcome, PartyOutcome,
};
pub use hamming::HammingPartyOutcome;
pub use replay::{replay, summary_for, to_jsonl, ReplayError, ReplayReport, TranscriptSummary};
pub use wire::{Channel, ControlCode, Frame, InProcessChannel, Payload, TcpChannel, WireTriple};

use crate::strings::{Factorization, Mode, SymbolString, SENTINEL_CLOSE, SENTINEL_OPEN};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ProtocolError {
    #[error("input is not a canonical LZN factorization: {0}")]
    InvalidInput(String),
    #[error("string lengths differ ({alice} vs {bob})")]
    LengthMismatch { alice: u64, bob: u64 },
    #[error("peer aborted")]
    Aborted,
    #[error("protocol desynchronized: {0}")]
    Desync(String),
    #[error("verification pass rejected the located boundary")]
    VerificationFailed,
    #[error("transport error: {0}")]
    Transport(String),
    #[error("invalid config: {0}")]
    Config(String),
}

impl From<std::io::Error> for ProtocolError {
    fn from(e: std::io::Error) -> Self {
        ProtocolError::Transport(e.to_string())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Speaker {
    Alice,
    Bob,
}

impl Speaker {
    pub fn other(self) -> Speaker {
        match self {
            Speaker::Alice => Speaker::Bob,
            Speaker::Bob => Speaker::Alice,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Speaker::Alice => "alice",
            Speaker::Bob => "bob",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MessageKind {
    Fingerprint,
    Boolean,
    Length,
    Triple,
    Control,
}

impl MessageKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MessageKind::Fingerprint => "fingerprint",
            MessageKind::Boolean => "boolean",
            MessageKind::Length => "length",
            MessageKind::Triple => "triple",
            MessageKind::Control => "control",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "fingerprint" => MessageKind::Fingerprint,
            "boolean" => MessageKind::Boolean,
            "length" => MessageKind::Length,
            "triple" => MessageKind::Triple,
            "control" => MessageKind::Control,
            _ => return None,
        })
    }
}

/// One logged message: who sent it, what kind, and its exact payload bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Message {
    pub speaker: Speaker,
    pub kind: MessageKind,
    pub bits: u64,
}

/// Ordered message log; rounds = message count, totalBits = payload sum.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Transcript {
    pub messages: Vec<Message>,
}

impl Transcript {
    pub fn new() -> Self {
        Transcript::default()
    }

    pub fn rounds(&self) -> usize {
        self.messages.len()
    }

    pub fn total_bits(&self) -> u64 {
        self.messages.iter().map(|m| m.bits).sum()
    }

    pub fn push(&mut self, m: Message) {
        self.messages.push(m);
    }

    pub fn extend_from(&mut self, other: &Transcript) {
        self.messages.extend_from_slice(&other.messages);
    }
}

/// Engine configuration shared by both parties.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    pub seed: u64,
    pub width: u32,
    pub epsilon: f64,
    pub sentinel: bool,
    pub verify_pass: bool,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        ProtocolConfig {
            seed: 0,
            width: 64,
            // 2^-20; fingerprints at width 64 stay far below this budget.
            epsilon: 9.5367431640625e-7,
            sentinel: true,
            verify_pass: false,
        }
    }
}

impl ProtocolConfig {
    pub fn validate(&self) -> Result<(), ProtocolError> {
        if !(self.epsilon > 0.0 && self.epsilon < 0.5) {
            return Err(ProtocolError::Config(format!(
                "epsilon must lie in (0, 1/2), got {}",
                self.epsilon
            )));
        }
        if !(8..=64).contains(&self.width) {
            return Err(ProtocolError::Config(format!(
                "fingerprint width must lie in [8, 64], got {}",
                self.width
            )));
        }
        Ok(())
    }
}

/// Common knowledge both parties hold before the protocol starts: the length
/// bound `n` and alphabet size `sigma` fix the per-kind payload widths.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SessionParams {
    pub n: u64,
    pub sigma: u64,
    pub width: u32,
    pub verify_pass: bool,
}

impl SessionParams {
    /// Length bound and alphabet derived from both raw input strings.
    /// Hamming sessions account for the two sentinel positions up front.
    pub fn derive(kind: ProtocolKind, cfg: &ProtocolConfig, meta: [InputMeta; 2]) -> SessionParams {
        let mut n = meta[0].len.max(meta[1].len);
        if kind == ProtocolKind::Hamming && cfg.sentinel {
            n += 2;
        }
        let sigma = meta[0]
            .max_symbol
            .max(meta[1].max_symbol)
            .map(|m| m as u64 + 1)
            .unwrap_or(1);
        SessionParams {
            n,
            sigma,
            width: cfg.width,
            verify_pass: cfg.verify_pass,
        }
    }

    /// Bits of a length-value payload.
    pub fn len_bits(&self) -> u64 {
        bits_for(self.n + 2)
    }

    /// Bits of the symbol field inside a factor triple.
    pub fn sym_bits(&self) -> u64 {
        bits_for(self.sigma + 3)
    }

    pub fn triple_bits(&self) -> u64 {
        2 * self.len_bits() + self.sym_bits()
    }

    pub fn kind_bits(&self, kind: MessageKind) -> u64 {
        match kind {
            MessageKind::Fingerprint => self.width as u64,
            MessageKind::Boolean => 1,
            MessageKind::Length => self.len_bits(),
            MessageKind::Triple => self.triple_bits(),
            MessageKind::Control => 2,
        }
    }

    /// Maps a raw symbol id into the dense wire alphabet [0, sigma + 2):
    /// ordinary symbols keep their value, sentinels take the two slots just
    /// above the alphabet.
    pub fn map_symbol(&self, raw: u32) -> u64 {
        match raw {
            SENTINEL_OPEN => self.sigma,
            SENTINEL_CLOSE => self.sigma + 1,
            s => s as u64,
        }
    }

    pub fn unmap_symbol(&self, wire: u64) -> Result<u32, ProtocolError> {
        if wire == self.sigma {
            Ok(SENTINEL_OPEN)
        } else if wire == self.sigma + 1 {
            Ok(SENTINEL_CLOSE)
        } else if wire < self.sigma {
            Ok(wire as u32)
        } else {
            Err(ProtocolError::Desync(format!(
                "wire symbol {wire} outside alphabet of size {}",
                self.sigma
            )))
        }
    }
}

/// Smallest bit count that can represent values in [0, v).
pub fn bits_for(v: u64) -> u64 {
    debug_assert!(v >= 2);
    (64 - (v - 1).leading_zeros()) as u64
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProtocolKind {
    Lcp,
    Hamming,
}

impl ProtocolKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ProtocolKind::Lcp => "lcp",
            ProtocolKind::Hamming => "hamming",
        }
    }
}

/// Per-input metadata exchanged during (uncharged) session setup.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputMeta {
    pub len: u64,
    pub max_symbol: Option<u32>,
}

impl InputMeta {
    pub fn of(s: &SymbolString) -> InputMeta {
        InputMeta {
            len: s.len() as u64,
            max_symbol: s.max_symbol(),
        }
    }
}

/// Checks that a protocol input is a structurally valid LZN factorization.
pub(crate) fn check_lzn_input(fz: &Factorization) -> Result<(), ProtocolError> {
    if fz.mode != Mode::Lzn {
        return Err(ProtocolError::InvalidInput(format!(
            "expected LZN mode, got {}",
            fz.mode
        )));
    }
    fz.validate()
        .map_err(|e| ProtocolError::InvalidInput(e.to_string()))
}
