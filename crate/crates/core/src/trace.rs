//! Landmark trace files: UTF-8, one JSON record per line, `#` comments.
//!
//! ```text
//! {"t":0,"p":0,"lm":{"head":[0.5,0.2,0.99],...,"right_ankle":[0.56,0.93,0.99]}}
//! ```
//!
//! Records are written with keys in the order `t`, `p`, `lm` and landmarks in
//! [`LandmarkId::ALL`] order. The full schema lives in `docs/formats.md`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Deserialize;
use thiserror::Error;

use crate::landmark::{LandmarkFrame, LandmarkId, RawLandmark};

#[derive(Debug, Clone, PartialEq, Error)]
#[error("line {line}: {message}")]
pub struct TraceError {
    /// 1-based line number in the source text.
    pub line: usize,
    pub message: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WireRecord {
    t: u64,
    p: u8,
    lm: BTreeMap<String, [f64; 3]>,
}

/// Parses one non-comment record.
pub fn parse_record(text: &str) -> Result<LandmarkFrame, String> {
    let wire: WireRecord = serde_json::from_str(text).map_err(|e| e.to_string())?;
    let mut landmarks = [RawLandmark::default(); LandmarkId::COUNT];
    let mut seen = [false; LandmarkId::COUNT];
    for (name, [x, y, c]) in &wire.lm {
        let id = LandmarkId::from_name(name).ok_or_else(|| format!("unknown landmark {name:?}"))?;
        landmarks[id.index()] = RawLandmark::new(*x, *y, *c);
        seen[id.index()] = true;
    }
    if let Some(missing) = LandmarkId::ALL.iter().find(|id| !seen[id.index()]) {
        return Err(format!("missing landmark {:?}", missing.name()));
    }
    let frame = LandmarkFrame::new(wire.t, wire.p, landmarks);
    frame.validate().map_err(|e| e.to_string())?;
    Ok(frame)
}

/// Parses a whole trace. Blank lines and lines starting with `#` are skipped.
/// Ordering is not checked here; ingestion enforces it.
pub fn parse_trace(text: &str) -> Result<Vec<LandmarkFrame>, TraceError> {
    parse_trace_lines(text).map(|v| v.into_iter().map(|(_, f)| f).collect())
}

/// Like [`parse_trace`], keeping each record's source line number.
pub fn parse_trace_lines(text: &str) -> Result<Vec<(usize, LandmarkFrame)>, TraceError> {
    let mut frames = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let frame = parse_record(trimmed).map_err(|message| TraceError { line: i + 1, message })?;
        frames.push((i + 1, frame));
    }
    Ok(frames)
}

fn push_number(out: &mut String, v: f64) {
    // serde_json formatting is shortest-roundtrip and platform independent
    out.push_str(&serde_json::Number::from_f64(v).map(|n| n.to_string()).unwrap_or_else(|| "0".into()));
}

/// Canonical single-line encoding of a frame (no trailing newline).
pub fn format_record(frame: &LandmarkFrame) -> String {
    let mut out = String::with_capacity(512);
    let _ = write!(out, "{{\"t\":{},\"p\":{},\"lm\":{{", frame.timestamp_ms, frame.player_slot);
    for (i, id) in LandmarkId::ALL.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let lm = &frame[*id];
        let _ = write!(out, "\"{}\":[", id.name());
        push_number(&mut out, lm.x);
        out.push(',');
        push_number(&mut out, lm.y);
        out.push(',');
        push_number(&mut out, lm.confidence);
        out.push(']');
    }
    out.push_str("}}");
    out
}

pub fn format_trace<'a>(frames: impl IntoIterator<Item = &'a LandmarkFrame>) -> String {
    let mut out = String::new();
    for f in frames {
        out.push_str(&format_record(f));
        out.push('\n');
    }
    out
}
