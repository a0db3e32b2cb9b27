//! Gesture recognition over clean landmark streams.
//!
//! Every gesture is a hysteresis machine over one scalar signal normalized by
//! its trigger threshold: it fires when the signal reaches 1 and re-arms once
//! the signal falls to `1 - rearm_hysteresis` and `debounce_ms` has passed.
//! Thresholds are multiples of the learner's own shoulder width or torso
//! length, so framing and body size do not matter.

mod detect;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::landmark::{LandmarkId, Point};

pub use detect::{detect, lean_dodge, GestureState};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GestureKind {
    ReachTouch,
    HeadBump,
    ElbowExtendLeft,
    ElbowExtendRight,
    KneeRaise,
    LeanLeft,
    LeanRight,
    Dodge,
}

impl GestureKind {
    pub const ALL: [GestureKind; 8] = [
        GestureKind::ReachTouch,
        GestureKind::HeadBump,
        GestureKind::ElbowExtendLeft,
        GestureKind::ElbowExtendRight,
        GestureKind::KneeRaise,
        GestureKind::LeanLeft,
        GestureKind::LeanRight,
        GestureKind::Dodge,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            GestureKind::ReachTouch => "reach_touch",
            GestureKind::HeadBump => "head_bump",
            GestureKind::ElbowExtendLeft => "elbow_extend_left",
            GestureKind::ElbowExtendRight => "elbow_extend_right",
            GestureKind::KneeRaise => "knee_raise",
            GestureKind::LeanLeft => "lean_left",
            GestureKind::LeanRight => "lean_right",
            GestureKind::Dodge => "dodge",
        }
    }

    pub fn from_name(name: &str) -> Option<GestureKind> {
        GestureKind::ALL.into_iter().find(|k| k.name() == name)
    }
}

impl std::fmt::Display for GestureKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// A recognized discrete gesture. Serialized as one event-log line:
/// `{"t":ms,"p":slot,"kind":..,"part":..,"pos":[x,y],"count":n}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GestureEvent {
    #[serde(rename = "t")]
    pub timestamp_ms: u64,
    #[serde(rename = "p")]
    pub player_slot: u8,
    pub kind: GestureKind,
    #[serde(rename = "part")]
    pub body_part: LandmarkId,
    #[serde(rename = "pos")]
    pub position: Point,
    /// Completed repetitions carried by this event; one knee raise per event.
    pub count: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GestureConfig {
    /// Minimum shoulder-elbow-wrist angle for an elbow extension.
    pub elbow_angle_deg: f64,
    /// Outward wrist displacement from the shoulder, in shoulder widths.
    pub extend_reach_factor: f64,
    /// Knee lift above its standing baseline, in torso lengths.
    pub knee_raise_factor: f64,
    /// Shoulder-over-hip offset in torso lengths (lean), and lateral torso
    /// translation in shoulder widths (dodge).
    pub lean_factor: f64,
    /// Wrist height above its shoulder, in torso lengths.
    pub reach_factor: f64,
    /// Head displacement from its resting offset, in shoulder widths.
    pub head_bump_factor: f64,
    pub debounce_ms: u64,
    pub rearm_hysteresis: f64,
    /// Seated / low-amplitude multiplier on every movement threshold.
    pub amplitude_scale: f64,
    pub dodge_window_ms: u64,
    pub stale_limit_ms: u64,
    /// Length of the standing calibration period for knee and head baselines.
    pub calibration_ms: u64,
}

impl Default for GestureConfig {
    fn default() -> Self {
        GestureConfig {
            elbow_angle_deg: 150.0,
            extend_reach_factor: 1.4,
            knee_raise_factor: 0.35,
            lean_factor: 0.25,
            reach_factor: 0.5,
            head_bump_factor: 0.3,
            debounce_ms: 250,
            rearm_hysteresis: 0.3,
            amplitude_scale: 1.0,
            dodge_window_ms: 600,
            stale_limit_ms: 500,
            calibration_ms: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid gesture config: {0}")]
pub struct GestureConfigError(pub String);

impl GestureConfig {
    pub fn validate(&self) -> Result<(), GestureConfigError> {
        let factors = [
            ("elbow_angle_deg", self.elbow_angle_deg),
            ("extend_reach_factor", self.extend_reach_factor),
            ("knee_raise_factor", self.knee_raise_factor),
            ("lean_factor", self.lean_factor),
            ("reach_factor", self.reach_factor),
            ("head_bump_factor", self.head_bump_factor),
        ];
        for (name, v) in factors {
            if !(v > 0.0 && v.is_finite()) {
                return Err(GestureConfigError(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.amplitude_scale > 0.0 && self.amplitude_scale <= 1.0) {
            return Err(GestureConfigError(format!("amplitude_scale must be in (0, 1], got {}", self.amplitude_scale)));
        }
        if !(self.rearm_hysteresis > 0.0 && self.rearm_hysteresis < 1.0) {
            return Err(GestureConfigError(format!(
                "rearm_hysteresis must be in (0, 1), got {}",
                self.rearm_hysteresis
            )));
        }
        if self.elbow_angle_deg * self.amplitude_scale >= 180.0 {
            return Err(GestureConfigError("elbow_angle_deg must be below 180".into()));
        }
        Ok(())
    }
}

/// Inclusive circle overlap test.
pub fn hit_test(effector: Point, effector_radius: f64, target: Point, target_radius: f64) -> bool {
    effector.distance(target) <= effector_radius + target_radius
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("empty counting window [{start}, {end})")]
pub struct EmptyWindow {
    pub start: u64,
    pub end: u64,
}

/// Knee-raise repetitions with timestamps in `[start_ms, end_ms)`.
pub fn knee_count_window(events: &[GestureEvent], start_ms: u64, end_ms: u64) -> Result<u32, EmptyWindow> {
    if end_ms <= start_ms {
        return Err(EmptyWindow { start: start_ms, end: end_ms });
    }
    Ok(events
        .iter()
        .filter(|e| e.kind == GestureKind::KneeRaise)
        .filter(|e| (start_ms..end_ms).contains(&e.timestamp_ms))
        .map(|e| e.count)
        .sum())
}
