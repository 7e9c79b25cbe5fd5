//! Message payload encodings and the channel transports.
//!
//! A frame is the payload bit count followed by the payload packed MSB-first
//! into whole bytes. On sockets the bit count travels as a 4-byte big-endian
//! header; in process the frame struct is passed through a pair of queues
//! unchanged, so both transports move byte-identical payloads.
//!
//! Frames carry no kind tag: within any protocol state the small set of
//! kinds a party may legally receive have pairwise distinct bit counts
//! (enforced by the width >= 8 config check), so the receiver dispatches on
//! the bit length alone.

use super::{Message, MessageKind, ProtocolError, SessionParams, Speaker, Transcript};
use std::io::{Read, Write};
use std::net::TcpStream;
use std::sync::mpsc::{channel, Receiver, Sender};

/// Triple encoding of one factor as sent on the wire: `(source, totalLen,
/// lastSymbol)` with the symbol already mapped into the session alphabet.
/// Expanding `totalLen - 1` copied symbols plus `lastSymbol` reproduces the
/// factor content for plain, fresh and truncated factors alike.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct WireTriple {
    pub source: u64,
    pub length: u64,
    pub symbol: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ControlCode {
    /// "My factor list ended inside the common prefix"; the responder
    /// answers with the expansion length of its matching prefix.
    PrefixEnd,
    /// Unrecoverable precondition failure; both sides error out.
    Abort,
}

impl ControlCode {
    fn to_u64(self) -> u64 {
        match self {
            ControlCode::PrefixEnd => 0,
            ControlCode::Abort => 1,
        }
    }

    fn from_u64(v: u64) -> Result<Self, ProtocolError> {
        match v {
            0 => Ok(ControlCode::PrefixEnd),
            1 => Ok(ControlCode::Abort),
            _ => Err(ProtocolError::Desync(format!("unknown control code {v}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Payload {
    Fingerprint(u64),
    Boolean(bool),
    Length(u64),
    Triple(WireTriple),
    Control(ControlCode),
}

impl Payload {
    pub fn kind(&self) -> MessageKind {
        match self {
            Payload::Fingerprint(_) => MessageKind::Fingerprint,
            Payload::Boolean(_) => MessageKind::Boolean,
            Payload::Length(_) => MessageKind::Length,
            Payload::Triple(_) => MessageKind::Triple,
            Payload::Control(_) => MessageKind::Control,
        }
    }
}

/// A fully encoded message payload.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frame {
    pub bits: u64,
    pub bytes: Vec<u8>,
}

fn pack_fields(fields: &[(u64, u64)]) -> Vec<u8> {
    let total: u64 = fields.iter().map(|&(_, w)| w).sum();
    let mut bytes = vec![0u8; total.div_ceil(8) as usize];
    let mut pos = 0u64;
    for &(value, width) in fields {
        debug_assert!(width == 64 || value < (1u64 << width));
        for i in (0..width).rev() {
            if (value >> i) & 1 == 1 {
                bytes[(pos / 8) as usize] |= 1 << (7 - pos % 8);
            }
            pos += 1;
        }
    }
    bytes
}

fn unpack_fields(bytes: &[u8], widths: &[u64]) -> Vec<u64> {
    let mut out = Vec::with_capacity(widths.len());
    let mut pos = 0u64;
    for &width in widths {
        let mut v = 0u64;
        for _ in 0..width {
            let bit = (bytes[(pos / 8) as usize] >> (7 - pos % 8)) & 1;
            v = (v << 1) | bit as u64;
            pos += 1;
        }
        out.push(v);
    }
    out
}

pub(crate) fn encode(payload: &Payload, sess: &SessionParams) -> Frame {
    let bits = sess.kind_bits(payload.kind());
    let bytes = match *payload {
        Payload::Fingerprint(v) => pack_fields(&[(v, sess.width as u64)]),
        Payload::Boolean(b) => pack_fields(&[(b as u64, 1)]),
        Payload::Length(v) => pack_fields(&[(v, sess.len_bits())]),
        Payload::Triple(t) => pack_fields(&[
            (t.source, sess.len_bits()),
            (t.length, sess.len_bits()),
            (t.symbol, sess.sym_bits()),
        ]),
        Payload::Control(c) => pack_fields(&[(c.to_u64(), 2)]),
    };
    Frame { bits, bytes }
}

pub(crate) fn decode(
    frame: &Frame,
    expected: &[MessageKind],
    sess: &SessionParams,
) -> Result<Payload, ProtocolError> {
    let kind = expected
        .iter()
        .copied()
        .find(|&k| sess.kind_bits(k) == frame.bits)
        .ok_or_else(|| {
            ProtocolError::Desync(format!(
                "unexpected frame of {} bits (expected kinds {:?})",
                frame.bits, expected
            ))
        })?;
    if frame.bytes.len() as u64 != frame.bits.div_ceil(8) {
        return Err(ProtocolError::Desync(format!(
            "frame length {} bytes does not match {} bits",
            frame.bytes.len(),
            frame.bits
        )));
    }
    Ok(match kind {
        MessageKind::Fingerprint => {
            Payload::Fingerprint(unpack_fields(&frame.bytes, &[sess.width as u64])[0])
        }
        MessageKind::Boolean => Payload::Boolean(unpack_fields(&frame.bytes, &[1])[0] == 1),
        MessageKind::Length => Payload::Length(unpack_fields(&frame.bytes, &[sess.len_bits()])[0]),
        MessageKind::Triple => {
            let f = unpack_fields(
                &frame.bytes,
                &[sess.len_bits(), sess.len_bits(), sess.sym_bits()],
            );
            Payload::Triple(WireTriple {
                source: f[0],
                length: f[1],
                symbol: f[2],
            })
        }
        MessageKind::Control => Payload::Control(ControlCode::from_u64(unpack_fields(
            &frame.bytes,
            &[2],
        )[0])?),
    })
}

/// Blocking bidirectional message transport.
pub trait Channel {
    fn send(&mut self, frame: Frame) -> Result<(), ProtocolError>;
    fn recv(&mut self) -> Result<Frame, ProtocolError>;
}

/// In-process transport: a pair of unbounded queues.
pub struct InProcessChannel {
    tx: Sender<Frame>,
    rx: Receiver<Frame>,
}

impl InProcessChannel {
    pub fn pair() -> (InProcessChannel, InProcessChannel) {
        let (ta, ra) = channel();
        let (tb, rb) = channel();
        (
            InProcessChannel { tx: ta, rx: rb },
            InProcessChannel { tx: tb, rx: ra },
        )
    }
}

impl Channel for InProcessChannel {
    fn send(&mut self, frame: Frame) -> Result<(), ProtocolError> {
        self.tx
            .send(frame)
            .map_err(|_| ProtocolError::Transport("peer hung up".into()))
    }

    fn recv(&mut self) -> Result<Frame, ProtocolError> {
        self.rx
            .recv()
            .map_err(|_| ProtocolError::Transport("peer hung up".into()))
    }
}

/// Socket transport: 4-byte big-endian payload bit-length, then the payload
/// padded to whole bytes.
pub struct TcpChannel {
    stream: TcpStream,
}

impl TcpChannel {
    pub fn new(stream: TcpStream) -> Self {
        TcpChannel { stream }
    }
}

impl Channel for TcpChannel {
    fn send(&mut self, frame: Frame) -> Result<(), ProtocolError> {
        let header = (frame.bits as u32).to_be_bytes();
        self.stream.write_all(&header)?;
        self.stream.write_all(&frame.bytes)?;
        self.stream.flush()?;
        Ok(())
    }

    fn recv(&mut self) -> Result<Frame, ProtocolError> {
        let mut header = [0u8; 4];
        self.stream.read_exact(&mut header)?;
        let bits = u32::from_be_bytes(header) as u64;
        let mut bytes = vec![0u8; bits.div_ceil(8) as usize];
        self.stream.read_exact(&mut bytes)?;
        Ok(Frame { bits, bytes })
    }
}

/// Sends a payload and logs it under `speaker` (the sender).
pub(crate) fn send_msg<C: Channel>(
    ch: &mut C,
    tr: &mut Transcript,
    sess: &SessionParams,
    speaker: Speaker,
    payload: Payload,
) -> Result<(), ProtocolError> {
    let frame = encode(&payload, sess);
    tr.push(Message {
        speaker,
        kind: payload.kind(),
        bits: frame.bits,
    });
    ch.send(frame)
}

/// Receives a payload from `sender`, dispatching on the expected kinds.
pub(crate) fn recv_msg<C: Channel>(
    ch: &mut C,
    tr: &mut Transcript,
    sess: &SessionParams,
    sender: Speaker,
    expected: &[MessageKind],
) -> Result<Payload, ProtocolError> {
    let frame = ch.recv()?;
    let payload = decode(&frame, expected, sess)?;
    tr.push(Message {
        speaker: sender,
        kind: payload.kind(),
        bits: frame.bits,
    });
    Ok(payload)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sess() -> SessionParams {
        SessionParams {
            n: 1000,
            sigma: 7,
            width: 61,
            verify_pass: false,
        }
    }

    #[test]
    fn payload_round_trips() {
        let sess = sess();
        let payloads = [
            Payload::Fingerprint(0x1234_5678_9abc_def),
            Payload::Boolean(true),
            Payload::Boolean(false),
            Payload::Length(999),
            Payload::Triple(WireTriple {
                source: 1000,
                length: 513,
                symbol: 8, // mapped sentinel slot
            }),
            Payload::Control(ControlCode::PrefixEnd),
            Payload::Control(ControlCode::Abort),
        ];
        for p in payloads {
            let frame = encode(&p, &sess);
            assert_eq!(frame.bits, sess.kind_bits(p.kind()));
            assert_eq!(frame.bytes.len() as u64, frame.bits.div_ceil(8));
            let back = decode(&frame, &[p.kind()], &sess).unwrap();
            assert_eq!(back, p);
        }
    }

    #[test]
    fn decode_dispatches_on_bit_length() {
        let sess = sess();
        let frame = encode(&Payload::Boolean(true), &sess);
        let got = decode(
            &frame,
            &[MessageKind::Boolean, MessageKind::Control],
            &sess,
        )
        .unwrap();
        assert_eq!(got, Payload::Boolean(true));
        assert!(decode(&frame, &[MessageKind::Fingerprint], &sess).is_err());
    }

    #[test]
    fn in_process_pair_delivers_in_order() {
        let (mut a, mut b) = InProcessChannel::pair();
        let sess = sess();
        let f1 = encode(&Payload::Length(1), &sess);
        let f2 = encode(&Payload::Length(2), &sess);
        a.send(f1.clone()).unwrap();
        a.send(f2.clone()).unwrap();
        assert_eq!(b.recv().unwrap(), f1);
        assert_eq!(b.recv().unwrap(), f2);
    }
}
