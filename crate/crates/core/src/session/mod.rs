//! Session logs, engagement summaries and study statistics.
//!
//! A log is line-delimited JSON. The first line is the `hdr` record, the last
//! the `ftr` record, and every line carries a `rec` tag.

mod ttest;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::{EventKind, GameEvent, GameMode};
use crate::gesture::GestureEvent;
use crate::pipeline::EngineConfig;

pub use ttest::{inc_beta, paired_t_test, t_upper_tail, TTestError, TTestResult, Tail};

pub const LOG_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RatingPhase {
    Pre,
    Mid,
    Post,
}

/// One Feeling Scale answer, from -5 to +5.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeelingScaleRating {
    #[serde(rename = "t")]
    pub timestamp_ms: u64,
    pub value: i8,
    pub phase: RatingPhase,
}

impl FeelingScaleRating {
    pub fn new(timestamp_ms: u64, value: i8, phase: RatingPhase) -> Result<Self, LogError> {
        if !(-5..=5).contains(&value) {
            return Err(LogError::Rating(value));
        }
        Ok(FeelingScaleRating { timestamp_ms, value, phase })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Header {
    pub v: u32,
    pub session_id: String,
    pub seed: u64,
    pub mode: GameMode,
    pub config: EngineConfig,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Totals {
    pub frames: u64,
    pub gestures: u64,
    pub game_events: u64,
    pub ratings: u64,
    pub questions: u64,
    pub answered: u64,
    pub correct: u64,
    pub score: u64,
}

#[allow(clippy::large_enum_variant)]
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rec", rename_all = "snake_case")]
pub enum Record {
    Hdr(Header),
    /// Reference to one ingested landmark frame.
    Frame {
        t: u64,
        p: u8,
    },
    Gesture(GestureEvent),
    Game(GameEvent),
    Rating(FeelingScaleRating),
    Ftr(Totals),
}

impl Record {
    /// Timestamp of a body record.
    pub fn time(&self) -> Option<u64> {
        match self {
            Record::Frame { t, .. } => Some(*t),
            Record::Gesture(g) => Some(g.timestamp_ms),
            Record::Game(e) => Some(e.t),
            Record::Rating(r) => Some(r.timestamp_ms),
            Record::Hdr(_) | Record::Ftr(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LogError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("log integrity: {0}")]
    Integrity(String),
    #[error("feeling scale rating {0} outside [-5, 5]")]
    Rating(i8),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SessionLog {
    pub header: Header,
    pub records: Vec<Record>,
    pub footer: Totals,
}

/// Recounts footer totals from body records.
pub fn count_totals(records: &[Record]) -> Totals {
    let mut t = Totals::default();
    for r in records {
        match r {
            Record::Frame { .. } => t.frames += 1,
            Record::Gesture(_) => t.gestures += 1,
            Record::Rating(_) => t.ratings += 1,
            Record::Game(e) => {
                t.game_events += 1;
                match e.kind {
                    EventKind::Question { .. } => t.questions += 1,
                    EventKind::Answer { correct, .. } => {
                        t.answered += 1;
                        t.correct += u64::from(correct);
                    }
                    EventKind::Progress { score, .. } => t.score = u64::from(score),
                    _ => {}
                }
            }
            Record::Hdr(_) | Record::Ftr(_) => {}
        }
    }
    t
}

impl SessionLog {
    pub fn new(header: Header) -> Self {
        SessionLog { header, records: Vec::new(), footer: Totals::default() }
    }

    /// Recomputes the footer from the records.
    pub fn seal(&mut self) {
        self.footer = count_totals(&self.records);
    }

    pub fn game_events(&self) -> impl Iterator<Item = &GameEvent> {
        self.records.iter().filter_map(|r| match r {
            Record::Game(e) => Some(e),
            _ => None,
        })
    }

    pub fn gesture_events(&self) -> impl Iterator<Item = &GestureEvent> {
        self.records.iter().filter_map(|r| match r {
            Record::Gesture(g) => Some(g),
            _ => None,
        })
    }

    /// The full log as JSONL, header first and footer last.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        let mut line = |r: &Record| {
            out.push_str(&serde_json::to_string(r).expect("records serialize"));
            out.push('\n');
        };
        line(&Record::Hdr(self.header.clone()));
        for r in &self.records {
            line(r);
        }
        line(&Record::Ftr(self.footer));
        out
    }

    /// The game events alone, one JSON object per line.
    pub fn game_log(&self) -> String {
        self.game_events().map(|e| serde_json::to_string(e).expect("events serialize") + "\n").collect()
    }

    pub fn from_jsonl(text: &str) -> Result<SessionLog, LogError> {
        let mut header = None;
        let mut footer = None;
        let mut records = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            if raw.trim().is_empty() {
                continue;
            }
            let rec: Record =
                serde_json::from_str(raw).map_err(|e| LogError::Parse { line, message: e.to_string() })?;
            if footer.is_some() {
                return Err(LogError::Parse { line, message: "record after footer".into() });
            }
            match rec {
                Record::Hdr(h) if header.is_none() && records.is_empty() => {
                    if h.v != LOG_VERSION {
                        return Err(LogError::Parse { line, message: format!("unsupported log version {}", h.v) });
                    }
                    header = Some(h);
                }
                Record::Hdr(_) => {
                    return Err(LogError::Parse { line, message: "header must be the first line".into() })
                }
                _ if header.is_none() => return Err(LogError::Parse { line, message: "missing header".into() }),
                Record::Ftr(t) => footer = Some(t),
                r => records.push(r),
            }
        }
        let header = header.ok_or_else(|| LogError::Integrity("missing header".into()))?;
        let footer = footer.ok_or_else(|| LogError::Integrity("missing footer".into()))?;
        Ok(SessionLog { header, records, footer })
    }

    /// Checks time order and that the footer matches a recount.
    pub fn verify(&self) -> Result<(), LogError> {
        let mut last = 0;
        for (i, r) in self.records.iter().enumerate() {
            let t = r.time().unwrap_or(last);
            if t < last {
                return Err(LogError::Integrity(format!("record {} at {t} ms follows {last} ms", i + 1)));
            }
            last = t;
        }
        let recount = count_totals(&self.records);
        if recount != self.footer {
            return Err(LogError::Integrity(format!("footer {:?} disagrees with records {:?}", self.footer, recount)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StatsSummary {
    /// Number of Feeling Scale ratings.
    pub n: usize,
    pub mean: Option<f64>,
    /// Sample standard deviation, defined for `n >= 2`.
    pub sd: Option<f64>,
    pub answered: u64,
    pub correct: u64,
    /// `None` when nothing was graded.
    pub accuracy: Option<f64>,
    pub mean_response_latency_ms: Option<f64>,
    pub questions: u64,
    pub score: u64,
    pub mastery: u8,
}

/// Mean and sample standard deviation.
pub fn mean_sd(values: &[f64]) -> (Option<f64>, Option<f64>) {
    if values.is_empty() {
        return (None, None);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (Some(mean), None);
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (Some(mean), Some((ss / (n - 1.0)).sqrt()))
}

pub fn summarize(log: &SessionLog) -> Result<StatsSummary, LogError> {
    log.verify()?;
    let ratings: Vec<f64> = log
        .records
        .iter()
        .filter_map(|r| match r {
            Record::Rating(x) => Some(f64::from(x.value)),
            _ => None,
        })
        .collect();
    let (mean, sd) = mean_sd(&ratings);
    let mut presented: BTreeMap<u32, u64> = BTreeMap::new();
    let mut latencies = Vec::new();
    let (mut answered, mut correct, mut mastery) = (0u64, 0u64, 0u8);
    for e in log.game_events() {
        match e.kind {
            EventKind::Question { q, .. } => {
                presented.insert(q, e.t);
            }
            EventKind::Answer { q, correct: c, .. } => {
                answered += 1;
                correct += u64::from(c);
                let shown = presented
                    .get(&q)
                    .ok_or_else(|| LogError::Integrity(format!("answer to question {q} before it was shown")))?;
                latencies.push((e.t - shown) as f64);
            }
            EventKind::Progress { mastery: m, .. } => mastery = m,
            _ => {}
        }
    }
    let accuracy = (answered > 0).then(|| correct as f64 / answered as f64);
    Ok(StatsSummary {
        n: ratings.len(),
        mean,
        sd,
        answered,
        correct,
        accuracy,
        mean_response_latency_ms: mean_sd(&latencies).0,
        questions: presented.len() as u64,
        score: log.footer.score,
        mastery,
    })
}
