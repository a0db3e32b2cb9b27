//! The per-frame engine: ingest, smooth, detect, then step the game.
//!
//! [`Engine`] is the stepping facade used by the CLI, the autopilot and the
//! play surface. [`Session`] wraps it and records a [`SessionLog`].

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::{GameConfig, GameError, GameEvent, GameMode, GameState, Phase};
use crate::gesture::{GestureConfig, GestureConfigError, GestureEvent, GestureState};
use crate::landmark::{
    body_scale, smooth, CleanFrame, IngestConfig, IngestError, Ingestor, LandmarkFrame, SmoothConfig, SmoothState,
};
use crate::session::{FeelingScaleRating, Header, Record, SessionLog, LOG_VERSION};
use crate::trace::{parse_trace_lines, TraceError};

/// Highest supported player slot count.
pub const MAX_PLAYERS: usize = 2;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EngineConfig {
    pub ingest: IngestConfig,
    pub smooth: SmoothConfig,
    pub gesture: GestureConfig,
    pub game: GameConfig,
    /// Reflect camera-view input into learner view before ingestion.
    pub mirror: bool,
}

impl EngineConfig {
    pub fn for_mode(mode: GameMode) -> Self {
        EngineConfig { game: GameConfig::for_mode(mode), ..Default::default() }
    }

    pub fn validate(&self, mode: GameMode) -> Result<(), EngineError> {
        self.gesture.validate()?;
        if !(self.smooth.alpha > 0.0 && self.smooth.alpha <= 1.0) {
            return Err(EngineError::Config("smooth.alpha must be in (0, 1]".into()));
        }
        if !(0.0..=1.0).contains(&self.ingest.confidence_gate)
            || self.ingest.margin.is_nan()
            || self.ingest.margin < 0.0
        {
            return Err(EngineError::Config("ingest gate must be in [0, 1] and margin non-negative".into()));
        }
        self.game.validate(mode)?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error("frames of one tick must share a timestamp ({0} ms and {1} ms)")]
    MixedTick(u64, u64),
    #[error("tick at {got} ms does not follow {previous} ms")]
    TickOrder { previous: u64, got: u64 },
    #[error("player slot {0} out of range")]
    Slot(u8),
}

impl From<GestureConfigError> for EngineError {
    fn from(e: GestureConfigError) -> Self {
        EngineError::Config(e.0)
    }
}

/// Everything one camera tick produced.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Tick {
    pub t: u64,
    pub clean: Vec<CleanFrame>,
    pub gestures: Vec<GestureEvent>,
    pub events: Vec<GameEvent>,
}

#[derive(Clone, Debug)]
pub struct Engine {
    config: EngineConfig,
    ingestor: Ingestor,
    smooth: [SmoothState; MAX_PLAYERS],
    gestures: [GestureState; MAX_PLAYERS],
    latest: [Option<CleanFrame>; MAX_PLAYERS],
    game: GameState,
    last_tick: Option<u64>,
}

impl Engine {
    pub fn new(mode: GameMode, seed: u64, config: EngineConfig) -> Result<Engine, EngineError> {
        config.validate(mode)?;
        let game = GameState::new(mode, seed, config.game.clone())?;
        Ok(Engine {
            ingestor: Ingestor::new(config.ingest),
            smooth: Default::default(),
            gestures: Default::default(),
            latest: Default::default(),
            game,
            last_tick: None,
            config,
        })
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    pub fn game(&self) -> &GameState {
        &self.game
    }

    /// Latest smoothed frame of a player.
    pub fn latest(&self, player: u8) -> Option<&CleanFrame> {
        self.latest.get(usize::from(player)).and_then(Option::as_ref)
    }

    /// Processes one camera tick: every frame must carry the same timestamp,
    /// later than the previous tick. The round starts on the first tick.
    pub fn tick(&mut self, frames: &[LandmarkFrame]) -> Result<Tick, EngineError> {
        let Some(first) = frames.first() else { return Ok(Tick::default()) };
        let t = first.timestamp_ms;
        if let Some(f) = frames.iter().find(|f| f.timestamp_ms != t) {
            return Err(EngineError::MixedTick(t, f.timestamp_ms));
        }
        if let Some(previous) = self.last_tick {
            if t <= previous {
                return Err(EngineError::TickOrder { previous, got: t });
            }
        }
        if let Some(f) = frames.iter().find(|f| usize::from(f.player_slot) >= MAX_PLAYERS) {
            return Err(EngineError::Slot(f.player_slot));
        }
        let mut out = Tick { t, ..Tick::default() };
        for raw in frames {
            let raw = if self.config.mirror { raw.mirrored() } else { raw.clone() };
            let slot = usize::from(raw.player_slot);
            let clean = self.ingestor.push(&raw)?;
            let (state, smoothed) = smooth(&self.smooth[slot], &clean, &self.config.smooth);
            self.smooth[slot] = state;
            if let Ok(scale) = body_scale(&smoothed) {
                out.gestures.extend(self.gestures[slot].step(&smoothed, &scale, &self.config.gesture));
            }
            self.latest[slot] = Some(smoothed.clone());
            out.clean.push(smoothed);
        }
        self.last_tick = Some(t);
        out.events = match self.game.phase {
            Phase::Ready => self.game.start(t)?,
            Phase::Ended => Vec::new(),
            _ => self.game.advance(t - self.game.clock_ms, &out.gestures, &out.clean)?,
        };
        Ok(out)
    }
}

/// Deterministic session id for a seed.
pub fn session_id(seed: u64) -> String {
    let mut s = seed;
    format!("{:016x}", crate::game::splitmix64(&mut s))
}

/// An engine that records every tick into a session log.
#[derive(Clone, Debug)]
pub struct Session {
    pub engine: Engine,
    log: SessionLog,
}

impl Session {
    pub fn new(mode: GameMode, seed: u64, config: EngineConfig) -> Result<Session, EngineError> {
        let engine = Engine::new(mode, seed, config.clone())?;
        let header = Header { v: LOG_VERSION, session_id: session_id(seed), seed, mode, config };
        Ok(Session { engine, log: SessionLog::new(header) })
    }

    pub fn tick(&mut self, frames: &[LandmarkFrame]) -> Result<Tick, EngineError> {
        let tick = self.engine.tick(frames)?;
        let records = &mut self.log.records;
        records.extend(tick.clean.iter().map(|f| Record::Frame { t: f.timestamp_ms, p: f.player_slot }));
        records.extend(tick.gestures.iter().cloned().map(Record::Gesture));
        records.extend(tick.events.iter().cloned().map(Record::Game));
        Ok(tick)
    }

    pub fn rate(&mut self, rating: FeelingScaleRating) {
        self.log.records.push(Record::Rating(rating));
    }

    pub fn log(&self) -> &SessionLog {
        &self.log
    }

    /// Seals the footer and returns the log.
    pub fn finish(mut self) -> SessionLog {
        self.log.seal();
        self.log
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReplayError {
    #[error(transparent)]
    Trace(#[from] TraceError),
    #[error("line {line}: {source}")]
    Engine { line: usize, source: EngineError },
    #[error(transparent)]
    Setup(EngineError),
}

impl ReplayError {
    /// Trace line the failure points at, when there is one.
    pub fn line(&self) -> Option<usize> {
        match self {
            ReplayError::Trace(e) => Some(e.line),
            ReplayError::Engine { line, .. } => Some(*line),
            ReplayError::Setup(_) => None,
        }
    }
}

/// Runs a trace through the engine. Consecutive records with equal
/// timestamps form one tick.
pub fn replay_frames(
    frames: &[(usize, LandmarkFrame)],
    mode: GameMode,
    seed: u64,
    config: &EngineConfig,
) -> Result<SessionLog, ReplayError> {
    let mut session = Session::new(mode, seed, config.clone()).map_err(ReplayError::Setup)?;
    let mut i = 0;
    while i < frames.len() {
        let t = frames[i].1.timestamp_ms;
        let j = i + frames[i..].iter().take_while(|(_, f)| f.timestamp_ms == t).count();
        let tick: Vec<LandmarkFrame> = frames[i..j].iter().map(|(_, f)| f.clone()).collect();
        session.tick(&tick).map_err(|source| ReplayError::Engine { line: frames[i].0, source })?;
        i = j;
    }
    Ok(session.finish())
}

/// Parses and replays a trace document.
pub fn replay(trace: &str, mode: GameMode, seed: u64, config: &EngineConfig) -> Result<SessionLog, ReplayError> {
    let frames = parse_trace_lines(trace)?;
    replay_frames(&frames, mode, seed, config)
}
