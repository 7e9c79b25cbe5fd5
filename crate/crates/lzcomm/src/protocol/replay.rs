//! Transcript export and offline re-validation.
//!
//! Transcripts travel as JSON lines, one `{speaker, kind, bits}` object per
//! message followed by a summary record carrying the session parameters.
//! `replay` re-derives the expected payload width of every message from the
//! summary and checks the logged bit counts and totals.

use super::{MessageKind, ProtocolKind, SessionParams, Transcript};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReplayError {
    #[error("line {line}: not valid transcript JSON: {reason}")]
    Parse { line: usize, reason: String },
    #[error("line {line}: {kind} message logs {got} bits, encoding requires {want}")]
    BitsMismatch {
        line: usize,
        kind: String,
        got: u64,
        want: u64,
    },
    #[error("summary declares {declared} rounds but {counted} messages are logged")]
    RoundsMismatch { declared: usize, counted: usize },
    #[error("summary declares {declared} total bits but messages sum to {counted}")]
    TotalBitsMismatch { declared: u64, counted: u64 },
    #[error("messages present but no summary record")]
    MissingSummary,
    #[error("message records found after the summary")]
    TrailingMessages,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TranscriptSummary {
    #[serde(rename = "type")]
    pub record_type: String,
    pub protocol: String,
    pub value: u64,
    pub rounds: usize,
    pub bits: u64,
    pub n: u64,
    pub sigma: u64,
    pub width: u32,
    pub seed: u64,
}

pub fn summary_for(
    kind: ProtocolKind,
    value: u64,
    transcript: &Transcript,
    sess: &SessionParams,
    seed: u64,
) -> TranscriptSummary {
    TranscriptSummary {
        record_type: "summary".into(),
        protocol: kind.as_str().into(),
        value,
        rounds: transcript.rounds(),
        bits: transcript.total_bits(),
        n: sess.n,
        sigma: sess.sigma,
        width: sess.width,
        seed,
    }
}

/// Serializes a transcript plus its summary as JSON lines.
pub fn to_jsonl(transcript: &Transcript, summary: &TranscriptSummary) -> String {
    let mut out = String::new();
    for m in &transcript.messages {
        out.push_str(&serde_json::to_string(m).expect("message serializes"));
        out.push('\n');
    }
    out.push_str(&serde_json::to_string(summary).expect("summary serializes"));
    out.push('\n');
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReplayReport {
    pub messages: usize,
    pub total_bits: u64,
}

#[derive(Deserialize)]
struct MessageLine {
    #[allow(dead_code)]
    speaker: String,
    kind: String,
    bits: u64,
}

/// Re-validates an exported transcript. An empty input passes vacuously.
pub fn replay(jsonl: &str) -> Result<ReplayReport, ReplayError> {
    let mut messages: Vec<(usize, MessageLine)> = Vec::new();
    let mut summary: Option<TranscriptSummary> = None;
    for (i, line) in jsonl.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        if summary.is_some() {
            return Err(ReplayError::TrailingMessages);
        }
        let value: serde_json::Value = serde_json::from_str(line).map_err(|e| ReplayError::Parse {
            line: i + 1,
            reason: e.to_string(),
        })?;
        if value.get("type").and_then(|t| t.as_str()) == Some("summary") {
            summary = Some(serde_json::from_value(value).map_err(|e| ReplayError::Parse {
                line: i + 1,
                reason: e.to_string(),
            })?);
        } else {
            messages.push((
                i + 1,
                serde_json::from_value(value).map_err(|e| ReplayError::Parse {
                    line: i + 1,
                    reason: e.to_string(),
                })?,
            ));
        }
    }
    let Some(summary) = summary else {
        if messages.is_empty() {
            return Ok(ReplayReport {
                messages: 0,
                total_bits: 0,
            });
        }
        return Err(ReplayError::MissingSummary);
    };
    let sess = SessionParams {
        n: summary.n,
        sigma: summary.sigma,
        width: summary.width,
        verify_pass: false,
    };
    let mut total = 0u64;
    for (line, m) in &messages {
        let kind = MessageKind::parse(&m.kind).ok_or_else(|| ReplayError::Parse {
            line: *line,
            reason: format!("unknown message kind {:?}", m.kind),
        })?;
        let want = sess.kind_bits(kind);
        if m.bits != want {
            return Err(ReplayError::BitsMismatch {
                line: *line,
                kind: m.kind.clone(),
                got: m.bits,
                want,
            });
        }
        total += m.bits;
    }
    if summary.rounds != messages.len() {
        return Err(ReplayError::RoundsMismatch {
            declared: summary.rounds,
            counted: messages.len(),
        });
    }
    if summary.bits != total {
        return Err(ReplayError::TotalBitsMismatch {
            declared: summary.bits,
            counted: total,
        });
    }
    Ok(ReplayReport {
        messages: messages.len(),
        total_bits: total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_transcript_passes() {
        assert_eq!(
            replay("").unwrap(),
            ReplayReport {
                messages: 0,
                total_bits: 0
            }
        );
    }
}
