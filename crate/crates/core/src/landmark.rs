//! Landmark ingestion: validation, occlusion masking, smoothing, body-scale
//! normalization and selfie-view mirroring.
//!
//! Everything here is a pure function over explicit state. The engine never
//! reads a wall clock; timestamps come from the pose provider.

use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The 13 body points the gesture vocabulary needs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LandmarkId {
    Head,
    LeftShoulder,
    RightShoulder,
    LeftElbow,
    RightElbow,
    LeftWrist,
    RightWrist,
    LeftHip,
    RightHip,
    LeftKnee,
    RightKnee,
    LeftAnkle,
    RightAnkle,
}

impl LandmarkId {
    pub const COUNT: usize = 13;

    pub const ALL: [LandmarkId; LandmarkId::COUNT] = [
        LandmarkId::Head,
        LandmarkId::LeftShoulder,
        LandmarkId::RightShoulder,
        LandmarkId::LeftElbow,
        LandmarkId::RightElbow,
        LandmarkId::LeftWrist,
        LandmarkId::RightWrist,
        LandmarkId::LeftHip,
        LandmarkId::RightHip,
        LandmarkId::LeftKnee,
        LandmarkId::RightKnee,
        LandmarkId::LeftAnkle,
        LandmarkId::RightAnkle,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Wire name used in trace files and event logs.
    pub fn name(self) -> &'static str {
        match self {
            LandmarkId::Head => "head",
            LandmarkId::LeftShoulder => "left_shoulder",
            LandmarkId::RightShoulder => "right_shoulder",
            LandmarkId::LeftElbow => "left_elbow",
            LandmarkId::RightElbow => "right_elbow",
            LandmarkId::LeftWrist => "left_wrist",
            LandmarkId::RightWrist => "right_wrist",
            LandmarkId::LeftHip => "left_hip",
            LandmarkId::RightHip => "right_hip",
            LandmarkId::LeftKnee => "left_knee",
            LandmarkId::RightKnee => "right_knee",
            LandmarkId::LeftAnkle => "left_ankle",
            LandmarkId::RightAnkle => "right_ankle",
        }
    }

    pub fn from_name(name: &str) -> Option<LandmarkId> {
        LandmarkId::ALL.into_iter().find(|id| id.name() == name)
    }

    /// The same point on the other side of the body; midline points map to
    /// themselves.
    pub fn mirrored(self) -> LandmarkId {
        use LandmarkId::*;
        match self {
            Head => Head,
            LeftShoulder => RightShoulder,
            RightShoulder => LeftShoulder,
            LeftElbow => RightElbow,
            RightElbow => LeftElbow,
            LeftWrist => RightWrist,
            RightWrist => LeftWrist,
            LeftHip => RightHip,
            RightHip => LeftHip,
            LeftKnee => RightKnee,
            RightKnee => LeftKnee,
            LeftAnkle => RightAnkle,
            RightAnkle => LeftAnkle,
        }
    }
}

impl std::fmt::Display for LandmarkId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// A 2D position in normalized image coordinates. Serialized as `[x, y]`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance(self, other: Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        (dx * dx + dy * dy).sqrt()
    }

    pub fn midpoint(self, other: Point) -> Point {
        Point::new((self.x + other.x) * 0.5, (self.y + other.y) * 0.5)
    }

    pub fn lerp(self, other: Point, t: f64) -> Point {
        Point::new(self.x + (other.x - self.x) * t, self.y + (other.y - self.y) * t)
    }

    pub fn offset(self, dx: f64, dy: f64) -> Point {
        Point::new(self.x + dx, self.y + dy)
    }
}

impl From<[f64; 2]> for Point {
    fn from([x, y]: [f64; 2]) -> Self {
        Point { x, y }
    }
}

impl From<Point> for [f64; 2] {
    fn from(p: Point) -> Self {
        [p.x, p.y]
    }
}

/// One provider keypoint. `x`/`y` may lie outside `[0, 1]` when the provider
/// extrapolates off-frame points; `confidence` never does.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct RawLandmark {
    pub x: f64,
    pub y: f64,
    pub confidence: f64,
}

impl RawLandmark {
    pub fn new(x: f64, y: f64, confidence: f64) -> Self {
        RawLandmark { x, y, confidence }
    }

    pub fn position(&self) -> Point {
        Point::new(self.x, self.y)
    }
}

/// One timestamped provider sample for one player.
#[derive(Clone, Debug, PartialEq)]
pub struct LandmarkFrame {
    pub timestamp_ms: u64,
    pub player_slot: u8,
    pub landmarks: [RawLandmark; LandmarkId::COUNT],
}

impl LandmarkFrame {
    pub fn new(timestamp_ms: u64, player_slot: u8, landmarks: [RawLandmark; LandmarkId::COUNT]) -> Self {
        LandmarkFrame { timestamp_ms, player_slot, landmarks }
    }

    /// Checks the value-level schema constraints that the type system cannot.
    pub fn validate(&self) -> Result<(), IngestError> {
        for id in LandmarkId::ALL {
            let lm = &self[id];
            if !(0.0..=1.0).contains(&lm.confidence) {
                return Err(IngestError::Schema(format!("{id}: confidence {} outside [0, 1]", lm.confidence)));
            }
            if !lm.x.is_finite() || !lm.y.is_finite() {
                return Err(IngestError::Schema(format!("{id}: non-finite coordinate")));
            }
        }
        Ok(())
    }

    /// Horizontal reflection with left/right ids swapped.
    pub fn mirrored(&self) -> LandmarkFrame {
        let mut out = self.clone();
        for id in LandmarkId::ALL {
            let src = self[id];
            out[id.mirrored()] = RawLandmark::new(1.0 - src.x, src.y, src.confidence);
        }
        out
    }
}

impl Index<LandmarkId> for LandmarkFrame {
    type Output = RawLandmark;
    fn index(&self, id: LandmarkId) -> &RawLandmark {
        &self.landmarks[id.index()]
    }
}

impl IndexMut<LandmarkId> for LandmarkFrame {
    fn index_mut(&mut self, id: LandmarkId) -> &mut RawLandmark {
        &mut self.landmarks[id.index()]
    }
}

/// A masked landmark. After [`smooth`], `position` is `None` exactly when the
/// landmark has never been observed unoccluded.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CleanLandmark {
    pub position: Option<Point>,
    pub occluded: bool,
    /// Time since the last trusted observation; zero when not occluded.
    pub stale_ms: u64,
}

impl CleanLandmark {
    /// Position, if fresh enough for gesture evaluation.
    pub fn usable(&self, stale_limit_ms: u64) -> Option<Point> {
        if self.occluded && self.stale_ms > stale_limit_ms {
            return None;
        }
        self.position
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CleanFrame {
    pub timestamp_ms: u64,
    pub player_slot: u8,
    pub landmarks: [CleanLandmark; LandmarkId::COUNT],
}

impl CleanFrame {
    /// Position of a landmark only if it is currently observed (not occluded).
    pub fn visible(&self, id: LandmarkId) -> Option<Point> {
        let lm = &self[id];
        if lm.occluded {
            None
        } else {
            lm.position
        }
    }

    pub fn usable(&self, id: LandmarkId, stale_limit_ms: u64) -> Option<Point> {
        self[id].usable(stale_limit_ms)
    }

    pub fn occluded_count(&self) -> usize {
        self.landmarks.iter().filter(|l| l.occluded).count()
    }
}

impl Index<LandmarkId> for CleanFrame {
    type Output = CleanLandmark;
    fn index(&self, id: LandmarkId) -> &CleanLandmark {
        &self.landmarks[id.index()]
    }
}

impl IndexMut<LandmarkId> for CleanFrame {
    fn index_mut(&mut self, id: LandmarkId) -> &mut CleanLandmark {
        &mut self.landmarks[id.index()]
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IngestError {
    #[error("stream order: player {slot} timestamp {got} ms does not follow {previous} ms")]
    StreamOrder { slot: u8, previous: u64, got: u64 },
    #[error("schema: {0}")]
    Schema(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IngestConfig {
    pub confidence_gate: f64,
    /// Off-frame tolerance around the unit square.
    pub margin: f64,
}

impl Default for IngestConfig {
    fn default() -> Self {
        IngestConfig { confidence_gate: 0.5, margin: 0.05 }
    }
}

impl IngestConfig {
    pub fn is_occluded(&self, lm: &RawLandmark) -> bool {
        let lo = -self.margin;
        let hi = 1.0 + self.margin;
        lm.confidence < self.confidence_gate || lm.x < lo || lm.x > hi || lm.y < lo || lm.y > hi
    }
}

/// Masks occluded and off-frame landmarks. `prev` is the previous clean frame
/// of the same player, used for ordering and stale-time accounting.
pub fn ingest(
    prev: Option<&CleanFrame>,
    raw: &LandmarkFrame,
    config: &IngestConfig,
) -> Result<CleanFrame, IngestError> {
    raw.validate()?;
    let dt = match prev {
        Some(p) if raw.timestamp_ms <= p.timestamp_ms => {
            return Err(IngestError::StreamOrder {
                slot: raw.player_slot,
                previous: p.timestamp_ms,
                got: raw.timestamp_ms,
            })
        }
        Some(p) => raw.timestamp_ms - p.timestamp_ms,
        None => 0,
    };
    let mut landmarks = [CleanLandmark { position: None, occluded: false, stale_ms: 0 }; LandmarkId::COUNT];
    for id in LandmarkId::ALL {
        let lm = &raw[id];
        let occluded = config.is_occluded(lm);
        let stale_ms = match (occluded, prev) {
            (false, _) => 0,
            (true, Some(p)) => p[id].stale_ms + dt,
            (true, None) => 0,
        };
        landmarks[id.index()] = CleanLandmark { position: Some(lm.position()), occluded, stale_ms };
    }
    Ok(CleanFrame { timestamp_ms: raw.timestamp_ms, player_slot: raw.player_slot, landmarks })
}

/// Per-player ingestion with the previous frame kept for ordering checks.
#[derive(Clone, Debug, Default)]
pub struct Ingestor {
    config: IngestConfig,
    previous: Vec<Option<CleanFrame>>,
}

impl Ingestor {
    pub fn new(config: IngestConfig) -> Self {
        Ingestor { config, previous: Vec::new() }
    }

    pub fn push(&mut self, raw: &LandmarkFrame) -> Result<CleanFrame, IngestError> {
        let slot = raw.player_slot as usize;
        if self.previous.len() <= slot {
            self.previous.resize(slot + 1, None);
        }
        let clean = ingest(self.previous[slot].as_ref(), raw, &self.config)?;
        self.previous[slot] = Some(clean.clone());
        Ok(clean)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SmoothConfig {
    /// Weight of the new observation, in (0, 1]. 1 disables smoothing.
    pub alpha: f64,
}

impl Default for SmoothConfig {
    fn default() -> Self {
        SmoothConfig { alpha: 0.4 }
    }
}

/// Last smoothed value per landmark; `None` until first observed.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SmoothState {
    pub positions: [Option<Point>; LandmarkId::COUNT],
}

/// Exponential smoothing of unoccluded landmarks. Occluded landmarks hold
/// their last smoothed value (or no value, if never observed).
pub fn smooth(prev: &SmoothState, frame: &CleanFrame, config: &SmoothConfig) -> (SmoothState, CleanFrame) {
    let a = config.alpha;
    let mut next = prev.clone();
    let mut out = frame.clone();
    for id in LandmarkId::ALL {
        let i = id.index();
        let lm = &frame.landmarks[i];
        let held = prev.positions[i];
        let value = match (lm.occluded, lm.position, held) {
            (false, Some(obs), Some(old)) => {
                Some(Point::new(a * obs.x + (1.0 - a) * old.x, a * obs.y + (1.0 - a) * old.y))
            }
            (false, Some(obs), None) => Some(obs),
            _ => held,
        };
        next.positions[i] = value;
        out.landmarks[i].position = value;
    }
    (next, out)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BodyScale {
    pub shoulder_width: f64,
    pub torso_length: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScaleError {
    #[error("body scale unavailable: {0} is occluded")]
    Occluded(LandmarkId),
    #[error("body scale unavailable: degenerate geometry")]
    Degenerate,
}

pub fn body_scale(frame: &CleanFrame) -> Result<BodyScale, ScaleError> {
    let get = |id| frame.visible(id).ok_or(ScaleError::Occluded(id));
    let ls = get(LandmarkId::LeftShoulder)?;
    let rs = get(LandmarkId::RightShoulder)?;
    let lh = get(LandmarkId::LeftHip)?;
    let rh = get(LandmarkId::RightHip)?;
    let shoulder_width = ls.distance(rs);
    let torso_length = ls.midpoint(rs).distance(lh.midpoint(rh));
    if shoulder_width > 0.0 && torso_length > 0.0 {
        Ok(BodyScale { shoulder_width, torso_length })
    } else {
        Err(ScaleError::Degenerate)
    }
}

/// Selfie-view reflection: `x -> 1 - x` with left and right swapped.
pub fn mirror(frame: &CleanFrame) -> CleanFrame {
    let mut out = frame.clone();
    for id in LandmarkId::ALL {
        let mut lm = frame[id];
        lm.position = lm.position.map(|p| Point::new(1.0 - p.x, p.y));
        out[id.mirrored()] = lm;
    }
    out
}
