use serde::{Deserialize, Serialize};

use crate::content::{GridPoint, QuestionKind};
use crate::landmark::Point;

use super::{EndCondition, GameMode, Mechanic, Phase};

/// One line of the game event log: `{"t":ms,"ev":name,...}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameEvent {
    pub t: u64,
    #[serde(flatten)]
    pub kind: EventKind,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "ev", rename_all = "snake_case")]
pub enum EventKind {
    Start {
        mode: GameMode,
        players: u8,
        end: EndCondition,
    },
    Question {
        q: u32,
        kind: QuestionKind,
        mechanic: Mechanic,
        prompt: String,
    },
    Spawn {
        target: u32,
        option: usize,
        label: String,
        pos: Point,
        correct: bool,
    },
    Pop {
        target: u32,
        player: u8,
        correct: bool,
    },
    Penalty {
        target: u32,
        player: u8,
    },
    Grab {
        target: u32,
        player: u8,
    },
    Release {
        target: u32,
        player: u8,
    },
    Ditch {
        target: u32,
        player: u8,
    },
    /// Running knee-raise total inside the answer window.
    Tally {
        count: u32,
        player: u8,
    },
    Cursor {
        player: u8,
        point: Option<GridPoint>,
    },
    Answer {
        q: u32,
        correct: bool,
        latency_ms: u64,
        player: Option<u8>,
    },
    Progress {
        score: u32,
        streak: u32,
        mastery: u8,
    },
    Expire {
        target: u32,
    },
    Timeout {
        q: u32,
    },
    Phase {
        phase: Phase,
    },
    Cue {
        cue: Cue,
    },
    End {
        reason: EndReason,
        score: u32,
        correct: u32,
        answered: u32,
        mastery: u8,
    },
}

impl EventKind {
    pub fn name(&self) -> &'static str {
        match self {
            EventKind::Start { .. } => "start",
            EventKind::Question { .. } => "question",
            EventKind::Spawn { .. } => "spawn",
            EventKind::Pop { .. } => "pop",
            EventKind::Penalty { .. } => "penalty",
            EventKind::Grab { .. } => "grab",
            EventKind::Release { .. } => "release",
            EventKind::Ditch { .. } => "ditch",
            EventKind::Tally { .. } => "tally",
            EventKind::Cursor { .. } => "cursor",
            EventKind::Answer { .. } => "answer",
            EventKind::Progress { .. } => "progress",
            EventKind::Expire { .. } => "expire",
            EventKind::Timeout { .. } => "timeout",
            EventKind::Phase { .. } => "phase",
            EventKind::Cue { .. } => "cue",
            EventKind::End { .. } => "end",
        }
    }
}

/// Audio cue hooks for the play surface.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Cue {
    Question,
    Correct,
    Wrong,
    Tick,
    Grab,
    Ditch,
    End,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EndReason {
    Mastery,
    TimeLimit,
}
