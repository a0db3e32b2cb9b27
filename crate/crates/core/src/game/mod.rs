//! The six mini-games as one deterministic state machine.
//!
//! A round starts in [`Phase::Ready`], moves to `Playing` on [`GameState::start`]
//! and alternates with `BetweenQuestions` until the end condition holds.
//! [`GameState::advance`] is the in-place transition; [`step`] is its pure form.

pub mod audit;
mod event;
pub mod layout;

use std::collections::BTreeSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::content::{gen_question, grade, AnswerKey, GridPoint, OptionValue, Payload, Question, QuestionKind};
use crate::gesture::{hit_test, knee_count_window, GestureEvent, GestureKind};
use crate::landmark::{body_scale, CleanFrame, LandmarkId, Point};

pub use event::{Cue, EndReason, EventKind, GameEvent};
use layout::{
    catch_layout, ditch_layout, grid_cursor, grid_display, knee_layout, zone_layout, Rect, CATCH_FIELD, DITCH_BOX,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GameMode {
    CentralTendencyCatch,
    ElbowSkew,
    KneeCount,
    OutlierDitch,
    CoordinateQuest,
    CollaborativeMixed,
}

impl GameMode {
    pub const ALL: [GameMode; 6] = [
        GameMode::CentralTendencyCatch,
        GameMode::ElbowSkew,
        GameMode::KneeCount,
        GameMode::OutlierDitch,
        GameMode::CoordinateQuest,
        GameMode::CollaborativeMixed,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GameMode::CentralTendencyCatch => "central_tendency_catch",
            GameMode::ElbowSkew => "elbow_skew",
            GameMode::KneeCount => "knee_count",
            GameMode::OutlierDitch => "outlier_ditch",
            GameMode::CoordinateQuest => "coordinate_quest",
            GameMode::CollaborativeMixed => "collaborative_mixed",
        }
    }

    /// Accepts the full name or the short form (`catch`, `elbow`, `knee`,
    /// `ditch`, `grid`, `mixed`).
    pub fn from_name(name: &str) -> Option<GameMode> {
        let short = match name {
            "catch" => Some(GameMode::CentralTendencyCatch),
            "elbow" => Some(GameMode::ElbowSkew),
            "knee" => Some(GameMode::KneeCount),
            "ditch" => Some(GameMode::OutlierDitch),
            "grid" => Some(GameMode::CoordinateQuest),
            "mixed" => Some(GameMode::CollaborativeMixed),
            _ => None,
        };
        short.or_else(|| GameMode::ALL.into_iter().find(|m| m.name() == name))
    }

    /// Default player count.
    pub fn players(self) -> u8 {
        if self == GameMode::CollaborativeMixed {
            2
        } else {
            1
        }
    }
}

impl std::fmt::Display for GameMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// How a question is answered with the body.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mechanic {
    Catch,
    Zones,
    Knees,
    Ditch,
    Grid,
}

const MIXED_ROTATION: [Mechanic; 5] =
    [Mechanic::Catch, Mechanic::Zones, Mechanic::Knees, Mechanic::Ditch, Mechanic::Grid];
const CATCH_KINDS: [QuestionKind; 3] = [QuestionKind::Mean, QuestionKind::Median, QuestionKind::Mode];

impl Mechanic {
    /// Mechanic and question kind for the `index`-th question (1-based).
    pub fn for_question(mode: GameMode, index: u32) -> (Mechanic, QuestionKind) {
        let i = index.saturating_sub(1) as usize;
        let (mechanic, catch_turn) = match mode {
            GameMode::CentralTendencyCatch => (Mechanic::Catch, i),
            GameMode::ElbowSkew => (Mechanic::Zones, 0),
            GameMode::KneeCount => (Mechanic::Knees, 0),
            GameMode::OutlierDitch => (Mechanic::Ditch, 0),
            GameMode::CoordinateQuest => (Mechanic::Grid, 0),
            GameMode::CollaborativeMixed => (MIXED_ROTATION[i % 5], i / 5),
        };
        let kind = match mechanic {
            Mechanic::Catch => CATCH_KINDS[catch_turn % 3],
            Mechanic::Zones => QuestionKind::SkewClass,
            Mechanic::Knees => QuestionKind::NumericCount,
            Mechanic::Ditch => QuestionKind::OutlierPick,
            Mechanic::Grid => QuestionKind::CoordinatePoint,
        };
        (mechanic, kind)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EndCondition {
    /// Ends when this many answers were correct.
    MasteryCount(u32),
    /// Ends when the round clock reaches this many seconds.
    TimeLimit(f64),
}

impl EndCondition {
    /// Parses `mastery:N` or `time:S`.
    pub fn parse(s: &str) -> Result<EndCondition, GameError> {
        let bad = || GameError::Config(format!("end condition `{s}`: expected mastery:N or time:S"));
        let (k, v) = s.split_once(':').ok_or_else(bad)?;
        let end = match k {
            "mastery" => EndCondition::MasteryCount(v.parse().map_err(|_| bad())?),
            "time" => EndCondition::TimeLimit(v.parse().map_err(|_| bad())?),
            _ => return Err(bad()),
        };
        end.validate()?;
        Ok(end)
    }

    pub fn validate(&self) -> Result<(), GameError> {
        match *self {
            EndCondition::MasteryCount(0) => Err(GameError::Config("mastery count must be positive".into())),
            EndCondition::TimeLimit(s) if !(s.is_finite() && s > 0.0) => {
                Err(GameError::Config("time limit must be positive".into()))
            }
            _ => Ok(()),
        }
    }

    fn limit_ms(&self) -> Option<u64> {
        match *self {
            EndCondition::TimeLimit(s) => Some((s * 1000.0).round() as u64),
            EndCondition::MasteryCount(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GameConfig {
    pub end: EndCondition,
    /// Catch bubble speed, units per second.
    pub target_speed: f64,
    pub target_radius: f64,
    pub effector_radius: f64,
    pub question_difficulty: u8,
    pub players: u8,
    pub between_ms: u64,
    /// Unanswered questions are graded incorrect after this long.
    pub question_timeout_ms: u64,
    /// How long a reach or head bump keeps its effector live for contact.
    pub touch_ms: u64,
    pub grab_dwell_ms: u64,
    pub dwell_ms: u64,
    pub knee_window_ms: u64,
    /// The knee window closes this long after the last raise.
    pub knee_close_ms: u64,
    pub stale_limit_ms: u64,
}

impl Default for GameConfig {
    fn default() -> Self {
        GameConfig {
            end: EndCondition::MasteryCount(5),
            target_speed: 0.08,
            target_radius: 0.06,
            effector_radius: 0.04,
            question_difficulty: 1,
            players: 1,
            between_ms: 1000,
            question_timeout_ms: 20_000,
            touch_ms: 600,
            grab_dwell_ms: 400,
            dwell_ms: 1500,
            knee_window_ms: 8000,
            knee_close_ms: 1500,
            stale_limit_ms: 500,
        }
    }
}

impl GameConfig {
    pub fn for_mode(mode: GameMode) -> Self {
        GameConfig { players: mode.players(), ..Default::default() }
    }

    pub fn validate(&self, mode: GameMode) -> Result<(), GameError> {
        self.end.validate()?;
        let positive = [
            ("target_speed", self.target_speed),
            ("target_radius", self.target_radius),
            ("effector_radius", self.effector_radius),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(GameError::Config(format!("{name} must be positive")));
            }
        }
        let timings = [
            ("between_ms", self.between_ms),
            ("question_timeout_ms", self.question_timeout_ms),
            ("touch_ms", self.touch_ms),
            ("grab_dwell_ms", self.grab_dwell_ms),
            ("dwell_ms", self.dwell_ms),
            ("knee_window_ms", self.knee_window_ms),
            ("knee_close_ms", self.knee_close_ms),
        ];
        for (name, v) in timings {
            if v == 0 {
                return Err(GameError::Config(format!("{name} must be positive")));
            }
        }
        if !(1..=3).contains(&self.question_difficulty) {
            return Err(GameError::Config("question_difficulty must be 1, 2 or 3".into()));
        }
        match (mode, self.players) {
            (GameMode::CollaborativeMixed, 2) => Ok(()),
            (GameMode::CollaborativeMixed, n) => {
                Err(GameError::Config(format!("collaborative_mixed needs 2 players, got {n}")))
            }
            (_, 1 | 2) => Ok(()),
            (_, n) => Err(GameError::Config(format!("players must be 1 or 2, got {n}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Ready,
    Playing,
    BetweenQuestions,
    Ended,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetState {
    Active,
    Popped,
    Ditched,
    Expired,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Target {
    pub id: u32,
    /// Index into the current question's options.
    pub option: usize,
    pub position: Point,
    /// Units per second.
    pub velocity: Point,
    pub radius: f64,
    pub label: String,
    pub is_correct: bool,
    pub state: TargetState,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GameError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("cannot step a round in phase {0:?}")]
    Phase(Phase),
    #[error("time step must be positive")]
    ZeroStep,
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct Armed {
    player: u8,
    part: LandmarkId,
    until_ms: u64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct Hand {
    player: u8,
    wrist: LandmarkId,
    holding: Option<u32>,
    /// Target under the wrist and since when.
    hover: Option<(u32, u64)>,
}

/// Per-question input bookkeeping.
#[derive(Clone, Debug, Default, PartialEq)]
struct Inputs {
    armed: Vec<Armed>,
    knees: Vec<GestureEvent>,
    last_knee_ms: Option<u64>,
    hands: Vec<Hand>,
    cursors: [Option<GridPoint>; 2],
    dwell: [Option<(GridPoint, u64)>; 2],
}

#[derive(Clone, Debug, PartialEq)]
pub struct GameState {
    pub mode: GameMode,
    pub config: GameConfig,
    pub phase: Phase,
    pub question: Question,
    pub mechanic: Mechanic,
    /// 1-based index of the current question.
    pub question_index: u32,
    pub presented_ms: u64,
    pub targets: Vec<Target>,
    pub score: u32,
    pub streak: u32,
    pub mastery: u8,
    pub correct_total: u32,
    pub answered_total: u32,
    /// Session clock. The round started at `started_ms`.
    pub clock_ms: u64,
    pub started_ms: u64,
    resume_ms: u64,
    pub players: u8,
    pub rng_state: u64,
    next_target: u32,
    inputs: Inputs,
}

/// SplitMix64 step.
pub fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mastery points for one graded answer: `min(10, 5 + streak)` when correct,
/// nothing otherwise, capped at 100.
pub fn mastery_gain(mastery: u8, streak: u32, correct: bool) -> u8 {
    if !correct {
        return mastery;
    }
    let gain = (5 + streak).min(10);
    (u32::from(mastery) + gain).min(100) as u8
}

/// Pure form of [`GameState::mastery_update`].
pub fn mastery_update(mut state: GameState, correct: bool) -> GameState {
    state.mastery_update(correct);
    state
}

pub fn new_round(mode: GameMode, seed: u64, config: GameConfig) -> Result<GameState, GameError> {
    GameState::new(mode, seed, config)
}

/// Pure form of [`GameState::advance`].
pub fn step(
    state: &GameState,
    dt_ms: u64,
    gestures: &[GestureEvent],
    frames: &[CleanFrame],
) -> Result<(GameState, Vec<GameEvent>), GameError> {
    let mut next = state.clone();
    let events = next.advance(dt_ms, gestures, frames)?;
    Ok((next, events))
}

impl GameState {
    /// A round in phase `Ready` with its first question and targets in place.
    pub fn new(mode: GameMode, seed: u64, config: GameConfig) -> Result<GameState, GameError> {
        config.validate(mode)?;
        let players = config.players;
        let mut state = GameState {
            mode,
            config,
            phase: Phase::Ready,
            question: gen_question(0, QuestionKind::Mean, 1),
            mechanic: Mechanic::Catch,
            question_index: 0,
            presented_ms: 0,
            targets: Vec::new(),
            score: 0,
            streak: 0,
            mastery: 0,
            correct_total: 0,
            answered_total: 0,
            clock_ms: 0,
            started_ms: 0,
            resume_ms: 0,
            players,
            rng_state: seed,
            next_target: 0,
            inputs: Inputs::default(),
        };
        state.load_question();
        Ok(state)
    }

    /// Enters `Playing` at session time `now_ms` and announces the first question.
    pub fn start(&mut self, now_ms: u64) -> Result<Vec<GameEvent>, GameError> {
        if self.phase != Phase::Ready {
            return Err(GameError::Phase(self.phase));
        }
        self.clock_ms = now_ms;
        self.started_ms = now_ms;
        self.presented_ms = now_ms;
        let mut out = Vec::new();
        self.emit(&mut out, EventKind::Start { mode: self.mode, players: self.players, end: self.config.end });
        self.announce(&mut out);
        Ok(out)
    }

    pub fn elapsed_ms(&self) -> u64 {
        self.clock_ms - self.started_ms
    }

    /// Grid cursor of each player, for rendering.
    pub fn cursors(&self) -> [Option<GridPoint>; 2] {
        self.inputs.cursors
    }

    /// Targets currently held in the ditch game, as `(player, wrist, target)`.
    pub fn holds(&self) -> Vec<(u8, LandmarkId, u32)> {
        self.inputs.hands.iter().filter_map(|h| h.holding.map(|t| (h.player, h.wrist, t))).collect()
    }

    /// Running knee-raise total of the open answer window.
    pub fn knee_tally(&self) -> u32 {
        self.inputs.knees.iter().map(|e| e.count).sum()
    }

    pub fn mastery_update(&mut self, correct: bool) {
        self.mastery = mastery_gain(self.mastery, self.streak, correct);
    }

    /// Advances the clock by `dt_ms` and applies this tick's gestures and
    /// frames. The time limit is checked before any input.
    pub fn advance(
        &mut self,
        dt_ms: u64,
        gestures: &[GestureEvent],
        frames: &[CleanFrame],
    ) -> Result<Vec<GameEvent>, GameError> {
        match self.phase {
            Phase::Playing | Phase::BetweenQuestions => {}
            p => return Err(GameError::Phase(p)),
        }
        if dt_ms == 0 {
            return Err(GameError::ZeroStep);
        }
        self.clock_ms += dt_ms;
        let mut out = Vec::new();
        if self.config.end.limit_ms().is_some_and(|limit| self.elapsed_ms() >= limit) {
            self.finish(EndReason::TimeLimit, &mut out);
            return Ok(out);
        }
        if self.phase == Phase::BetweenQuestions {
            if self.clock_ms >= self.resume_ms {
                self.load_question();
                self.presented_ms = self.clock_ms;
                self.announce(&mut out);
            }
            return Ok(out);
        }
        self.move_targets(dt_ms);
        let gestures: Vec<&GestureEvent> = gestures.iter().filter(|g| g.player_slot < self.players).collect();
        let frames: Vec<&CleanFrame> = frames.iter().filter(|f| f.player_slot < self.players).collect();
        match self.mechanic {
            Mechanic::Catch => self.play_catch(&gestures, &frames, &mut out),
            Mechanic::Zones => self.play_zones(&gestures, &mut out),
            Mechanic::Knees => self.play_knees(&gestures, &mut out),
            Mechanic::Ditch => self.play_ditch(&gestures, &frames, &mut out),
            Mechanic::Grid => self.play_grid(&frames, &mut out),
        }
        if self.phase == Phase::Playing
            && self.mechanic != Mechanic::Knees
            && self.clock_ms - self.presented_ms >= self.config.question_timeout_ms
        {
            self.emit(&mut out, EventKind::Timeout { q: self.question.id });
            if self.mechanic == Mechanic::Ditch {
                self.submit_ditch(None, &mut out);
            } else {
                self.grade_response(None, None, &mut out);
                self.conclude(&mut out);
            }
        }
        Ok(out)
    }

    fn emit(&self, out: &mut Vec<GameEvent>, kind: EventKind) {
        out.push(GameEvent { t: self.clock_ms, kind });
    }

    /// Generates the next question and its targets without emitting anything.
    fn load_question(&mut self) {
        self.question_index += 1;
        let (mechanic, kind) = Mechanic::for_question(self.mode, self.question_index);
        let seed = splitmix64(&mut self.rng_state);
        self.mechanic = mechanic;
        self.question = gen_question(seed, kind, self.config.question_difficulty).with_id(self.question_index);
        self.inputs = Inputs::default();
        self.inputs.hands = (0..self.players)
            .flat_map(|p| {
                [LandmarkId::LeftWrist, LandmarkId::RightWrist].map(|wrist| Hand {
                    player: p,
                    wrist,
                    holding: None,
                    hover: None,
                })
            })
            .collect();

        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5EED_0F7A_26E7_0000);
        let n = self.question.options.len();
        let placed: Vec<(Point, Point)> = match mechanic {
            Mechanic::Catch => catch_layout(&mut rng, n, self.config.target_speed),
            Mechanic::Zones => zone_layout(&self.question).into_iter().map(still).collect(),
            Mechanic::Knees => knee_layout(n).into_iter().map(still).collect(),
            Mechanic::Ditch => ditch_layout(n).into_iter().map(still).collect(),
            Mechanic::Grid => self
                .question
                .options
                .iter()
                .map(|o| match o.value {
                    OptionValue::Point(p) => still(grid_display(p)),
                    _ => still(Point::new(0.5, 0.5)),
                })
                .collect(),
        };
        let correct = self.question.correct_options();
        self.targets = placed
            .into_iter()
            .enumerate()
            .map(|(i, (position, velocity))| {
                let id = self.next_target;
                self.next_target += 1;
                Target {
                    id,
                    option: i,
                    position,
                    velocity,
                    radius: self.config.target_radius,
                    label: self.question.options[i].label.clone(),
                    is_correct: correct.contains(&i),
                    state: TargetState::Active,
                }
            })
            .collect();
    }

    fn announce(&mut self, out: &mut Vec<GameEvent>) {
        self.phase = Phase::Playing;
        let q = &self.question;
        self.emit(
            out,
            EventKind::Question { q: q.id, kind: q.kind, mechanic: self.mechanic, prompt: q.prompt.clone() },
        );
        for t in &self.targets {
            self.emit(
                out,
                EventKind::Spawn {
                    target: t.id,
                    option: t.option,
                    label: t.label.clone(),
                    pos: t.position,
                    correct: t.is_correct,
                },
            );
        }
        self.emit(out, EventKind::Phase { phase: Phase::Playing });
        self.emit(out, EventKind::Cue { cue: Cue::Question });
    }

    fn move_targets(&mut self, dt_ms: u64) {
        let dt = dt_ms as f64 / 1000.0;
        for t in self.targets.iter_mut().filter(|t| t.state == TargetState::Active) {
            if t.velocity == Point::default() {
                continue;
            }
            let f = CATCH_FIELD;
            let (x, vx) = reflect(t.position.x + t.velocity.x * dt, t.velocity.x, f.x0, f.x1);
            let (y, vy) = reflect(t.position.y + t.velocity.y * dt, t.velocity.y, f.y0, f.y1);
            t.position = Point::new(x, y);
            t.velocity = Point::new(vx, vy);
        }
    }

    fn target_index(&self, id: u32) -> usize {
        self.targets.iter().position(|t| t.id == id).expect("target of the current question")
    }

    /// Grades `response` (`None` for a timeout) and applies scoring. Returns
    /// whether it was correct.
    fn grade_response(&mut self, response: Option<AnswerKey>, player: Option<u8>, out: &mut Vec<GameEvent>) -> bool {
        let correct = match &response {
            Some(r) => grade(&self.question, r).map(|g| g.correct).unwrap_or(false),
            None => false,
        };
        self.answered_total += 1;
        self.mastery_update(correct);
        if correct {
            self.streak += 1;
            self.score += 1;
            self.correct_total += 1;
        } else {
            self.streak = 0;
        }
        self.emit(
            out,
            EventKind::Answer { q: self.question.id, correct, latency_ms: self.clock_ms - self.presented_ms, player },
        );
        self.emit(out, EventKind::Progress { score: self.score, streak: self.streak, mastery: self.mastery });
        self.emit(out, EventKind::Cue { cue: if correct { Cue::Correct } else { Cue::Wrong } });
        correct
    }

    fn expire_active(&mut self, out: &mut Vec<GameEvent>) {
        let ids: Vec<u32> = self.targets.iter().filter(|t| t.state == TargetState::Active).map(|t| t.id).collect();
        for id in ids {
            let i = self.target_index(id);
            self.targets[i].state = TargetState::Expired;
            self.emit(out, EventKind::Expire { target: id });
        }
    }

    /// Closes the current question and either ends the round or pauses.
    fn conclude(&mut self, out: &mut Vec<GameEvent>) {
        self.expire_active(out);
        self.inputs = Inputs::default();
        if let EndCondition::MasteryCount(n) = self.config.end {
            if self.correct_total >= n {
                self.finish(EndReason::Mastery, out);
                return;
            }
        }
        self.phase = Phase::BetweenQuestions;
        self.resume_ms = self.clock_ms + self.config.between_ms;
        self.emit(out, EventKind::Phase { phase: Phase::BetweenQuestions });
    }

    fn finish(&mut self, reason: EndReason, out: &mut Vec<GameEvent>) {
        let held: Vec<(u8, u32)> = self.inputs.hands.iter().filter_map(|h| h.holding.map(|t| (h.player, t))).collect();
        for (player, target) in held {
            self.emit(out, EventKind::Release { target, player });
        }
        self.inputs = Inputs::default();
        self.expire_active(out);
        self.phase = Phase::Ended;
        self.emit(out, EventKind::Phase { phase: Phase::Ended });
        self.emit(out, EventKind::Cue { cue: Cue::End });
        self.emit(
            out,
            EventKind::End {
                reason,
                score: self.score,
                correct: self.correct_total,
                answered: self.answered_total,
                mastery: self.mastery,
            },
        );
    }

    fn play_catch(&mut self, gestures: &[&GestureEvent], frames: &[&CleanFrame], out: &mut Vec<GameEvent>) {
        for g in gestures {
            if !matches!(g.kind, GestureKind::ReachTouch | GestureKind::HeadBump) {
                continue;
            }
            let until_ms = g.timestamp_ms + self.config.touch_ms;
            let armed = &mut self.inputs.armed;
            armed.retain(|a| !(a.player == g.player_slot && a.part == g.body_part));
            armed.push(Armed { player: g.player_slot, part: g.body_part, until_ms });
        }
        let now = self.clock_ms;
        self.inputs.armed.retain(|a| a.until_ms >= now);

        let mut spent = Vec::new();
        for (k, a) in self.inputs.armed.clone().into_iter().enumerate() {
            let Some(pos) = frames
                .iter()
                .find(|f| f.player_slot == a.player)
                .and_then(|f| f.usable(a.part, self.config.stale_limit_ms))
            else {
                continue;
            };
            let Some(id) = self.nearest_hit(pos, self.config.effector_radius, |_| true) else { continue };
            spent.push(k);
            let i = self.target_index(id);
            let correct = self.targets[i].is_correct;
            self.targets[i].state = TargetState::Popped;
            self.emit(out, EventKind::Pop { target: id, player: a.player, correct });
            if !correct {
                self.emit(out, EventKind::Penalty { target: id, player: a.player });
            }
            let option = self.targets[i].option;
            self.grade_response(Some(AnswerKey::Options(BTreeSet::from([option]))), Some(a.player), out);
            if correct {
                self.conclude(out);
                return;
            }
        }
        for k in spent.into_iter().rev() {
            self.inputs.armed.remove(k);
        }
    }

    /// Nearest active target within reach of an effector, lowest id on ties.
    fn nearest_hit(&self, pos: Point, radius: f64, allow: impl Fn(&Target) -> bool) -> Option<u32> {
        self.targets
            .iter()
            .filter(|t| t.state == TargetState::Active && allow(t))
            .filter(|t| hit_test(pos, radius, t.position, t.radius))
            .map(|t| (pos.distance(t.position), t.id))
            .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
            .map(|(_, id)| id)
    }

    fn play_zones(&mut self, gestures: &[&GestureEvent], out: &mut Vec<GameEvent>) {
        for g in gestures {
            let zone_x = match g.kind {
                GestureKind::ElbowExtendLeft => layout::ZONE_X[0],
                GestureKind::HeadBump => layout::ZONE_X[1],
                GestureKind::ElbowExtendRight => layout::ZONE_X[2],
                _ => continue,
            };
            let Some(i) = self.targets.iter().position(|t| t.state == TargetState::Active && t.position.x == zone_x)
            else {
                continue;
            };
            let t = &mut self.targets[i];
            t.state = TargetState::Popped;
            let (id, option, correct) = (t.id, t.option, t.is_correct);
            self.emit(out, EventKind::Pop { target: id, player: g.player_slot, correct });
            self.grade_response(Some(AnswerKey::Options(BTreeSet::from([option]))), Some(g.player_slot), out);
            self.conclude(out);
            return;
        }
    }

    fn play_knees(&mut self, gestures: &[&GestureEvent], out: &mut Vec<GameEvent>) {
        for g in gestures.iter().filter(|g| g.kind == GestureKind::KneeRaise) {
            self.inputs.knees.push((*g).clone());
            self.inputs.last_knee_ms = Some(g.timestamp_ms);
            self.emit(out, EventKind::Tally { count: self.knee_tally(), player: g.player_slot });
            self.emit(out, EventKind::Cue { cue: Cue::Tick });
        }
        let start = self.presented_ms;
        let mut end = start + self.config.knee_window_ms;
        if let Some(last) = self.inputs.last_knee_ms {
            end = end.min(last + self.config.knee_close_ms);
        }
        if self.clock_ms < end {
            return;
        }
        let count = knee_count_window(&self.inputs.knees, start, end).unwrap_or(0);
        let chosen = self
            .targets
            .iter()
            .position(|t| matches!(self.question.options[t.option].value, OptionValue::Count(c) if c == count));
        if let Some(i) = chosen {
            self.targets[i].state = TargetState::Popped;
            let (id, correct) = (self.targets[i].id, self.targets[i].is_correct);
            self.emit(out, EventKind::Pop { target: id, player: 0, correct });
        }
        let player = self.inputs.knees.first().map(|e| e.player_slot);
        self.grade_response(Some(AnswerKey::Integer(count)), player, out);
        self.conclude(out);
    }

    fn play_ditch(&mut self, gestures: &[&GestureEvent], frames: &[&CleanFrame], out: &mut Vec<GameEvent>) {
        let now = self.clock_ms;
        for k in 0..self.inputs.hands.len() {
            let hand = self.inputs.hands[k];
            let wrist = frames
                .iter()
                .find(|f| f.player_slot == hand.player)
                .and_then(|f| f.usable(hand.wrist, self.config.stale_limit_ms));
            match (hand.holding, wrist) {
                (Some(id), Some(w)) => {
                    let i = self.target_index(id);
                    self.targets[i].position = w;
                    if !DITCH_BOX.contains(w) {
                        self.targets[i].state = TargetState::Ditched;
                        self.inputs.hands[k].holding = None;
                        self.emit(out, EventKind::Ditch { target: id, player: hand.player });
                        self.emit(out, EventKind::Cue { cue: Cue::Ditch });
                    }
                }
                (Some(id), None) => {
                    self.inputs.hands[k].holding = None;
                    self.emit(out, EventKind::Release { target: id, player: hand.player });
                }
                (None, Some(w)) => {
                    let held: Vec<u32> = self.inputs.hands.iter().filter_map(|h| h.holding).collect();
                    let hit = self.nearest_hit(w, self.config.effector_radius, |t| !held.contains(&t.id));
                    let hover = match (hit, hand.hover) {
                        (Some(id), Some((prev, since))) if id == prev => Some((id, since)),
                        (Some(id), _) => Some((id, now)),
                        (None, _) => None,
                    };
                    self.inputs.hands[k].hover = hover;
                    if let Some((id, since)) = hover {
                        if now - since >= self.config.grab_dwell_ms {
                            self.inputs.hands[k].holding = Some(id);
                            self.inputs.hands[k].hover = None;
                            self.emit(out, EventKind::Grab { target: id, player: hand.player });
                            self.emit(out, EventKind::Cue { cue: Cue::Grab });
                        }
                    }
                }
                (None, None) => self.inputs.hands[k].hover = None,
            }
        }
        if let Some(g) = gestures.iter().find(|g| g.kind == GestureKind::HeadBump) {
            self.submit_ditch(Some(g.player_slot), out);
        }
    }

    fn submit_ditch(&mut self, player: Option<u8>, out: &mut Vec<GameEvent>) {
        for k in 0..self.inputs.hands.len() {
            let hand = self.inputs.hands[k];
            if let Some(id) = hand.holding {
                self.inputs.hands[k].holding = None;
                self.emit(out, EventKind::Release { target: id, player: hand.player });
            }
        }
        let ditched: BTreeSet<usize> =
            self.targets.iter().filter(|t| t.state == TargetState::Ditched).map(|t| t.option).collect();
        self.grade_response(Some(AnswerKey::Options(ditched)), player, out);
        self.conclude(out);
    }

    fn play_grid(&mut self, frames: &[&CleanFrame], out: &mut Vec<GameEvent>) {
        let Payload::Grid { size, .. } = self.question.payload else { return };
        let now = self.clock_ms;
        for f in frames {
            let p = f.player_slot;
            let limit = self.config.stale_limit_ms;
            let cursor = match (
                f.usable(LandmarkId::RightShoulder, limit),
                f.usable(LandmarkId::RightWrist, limit),
                body_scale(f),
            ) {
                (Some(s), Some(w), Ok(scale)) => grid_cursor(s, w, scale.shoulder_width, size),
                _ => None,
            };
            let slot = usize::from(p);
            if cursor != self.inputs.cursors[slot] {
                self.inputs.cursors[slot] = cursor;
                self.emit(out, EventKind::Cursor { player: p, point: cursor });
            }
            let on_option = cursor.filter(|c| self.question.options.iter().any(|o| o.value == OptionValue::Point(*c)));
            self.inputs.dwell[slot] = match (on_option, self.inputs.dwell[slot]) {
                (Some(c), Some((prev, since))) if c == prev => Some((c, since)),
                (Some(c), _) => Some((c, now)),
                (None, _) => None,
            };
            let Some((point, since)) = self.inputs.dwell[slot] else { continue };
            if now - since < self.config.dwell_ms {
                continue;
            }
            if let Some(i) = self.targets.iter().position(|t| {
                t.state == TargetState::Active && self.question.options[t.option].value == OptionValue::Point(point)
            }) {
                self.targets[i].state = TargetState::Popped;
                let (id, correct) = (self.targets[i].id, self.targets[i].is_correct);
                self.emit(out, EventKind::Pop { target: id, player: p, correct });
            }
            self.grade_response(Some(AnswerKey::Point(point)), Some(p), out);
            self.conclude(out);
            return;
        }
    }
}

fn still(p: Point) -> (Point, Point) {
    (p, Point::default())
}

/// Position and velocity after reflecting at `[lo, hi]`.
fn reflect(x: f64, v: f64, lo: f64, hi: f64) -> (f64, f64) {
    if x < lo {
        ((2.0 * lo - x).min(hi), v.abs())
    } else if x > hi {
        ((2.0 * hi - x).max(lo), -v.abs())
    } else {
        (x, v)
    }
}

/// Whether every active target of `state` lies inside its field.
pub fn targets_in_bounds(state: &GameState) -> bool {
    let field: Rect = match state.mechanic {
        Mechanic::Catch => CATCH_FIELD,
        Mechanic::Ditch => DITCH_BOX,
        _ => Rect::new(0.0, 0.0, 1.0, 1.0),
    };
    state.targets.iter().filter(|t| t.state == TargetState::Active).all(|t| field.contains(t.position))
}
