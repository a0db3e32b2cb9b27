//! Synthetic landmark traces from gesture scripts.
//!
//! A script is line oriented, `#` starts a comment:
//!
//! ```text
//! # t_ms  kind         [magnitude] [side=left|right] [player=N]
//! 1500    knee_raise   1.5
//! 2500    reach_touch  side=left
//! ```
//!
//! `t_ms` is when the movement starts. Magnitude is the peak signal in units
//! of the default trigger threshold, so 1.5 overshoots by half and anything
//! below 1 stays silent at default thresholds. Each directive expands into a
//! rise/hold/fall envelope on a [`Rig`] parameter; overlapping envelopes add.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

use crate::gesture::GestureKind;
use crate::landmark::{LandmarkFrame, LandmarkId};
use crate::pipeline::MAX_PLAYERS;
use crate::pose::{frame_time_ms, Arm, Rig};

pub const FPS: u64 = 30;
/// Directives may not start before the head and knee baselines settle.
pub const LEAD_IN_MS: u64 = 1200;
pub const TAIL_MS: u64 = 1500;
pub const MIN_DURATION_MS: u64 = 2000;
pub const DEFAULT_MAGNITUDE: f64 = 1.5;
pub const CONFIDENCE: f64 = 0.9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    fn index(self) -> usize {
        match self {
            Side::Left => 0,
            Side::Right => 1,
        }
    }

    fn sign(self) -> f64 {
        match self {
            Side::Left => -1.0,
            Side::Right => 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Directive {
    pub t_ms: u64,
    pub kind: GestureKind,
    pub magnitude: f64,
    /// Only meaningful for reach, head bump, knee raise and dodge.
    pub side: Option<Side>,
    pub player: u8,
}

impl Directive {
    pub fn new(t_ms: u64, kind: GestureKind) -> Directive {
        Directive { t_ms, kind, magnitude: DEFAULT_MAGNITUDE, side: None, player: 0 }
    }

    fn side_or_default(&self) -> Side {
        self.side.unwrap_or(match self.kind {
            GestureKind::Dodge => Side::Left,
            _ => Side::Right,
        })
    }

    /// (rise, hold, fall) in milliseconds.
    pub fn envelope(&self) -> (u64, u64, u64) {
        match self.kind {
            GestureKind::ReachTouch | GestureKind::ElbowExtendLeft | GestureKind::ElbowExtendRight => (250, 150, 250),
            GestureKind::HeadBump => (150, 100, 150),
            GestureKind::KneeRaise => (200, 100, 200),
            GestureKind::LeanLeft | GestureKind::LeanRight => (300, 200, 300),
            // slow return so the way back stays under the dodge threshold
            GestureKind::Dodge => (250, 600, (1600.0 * self.magnitude.max(1.0)) as u64),
        }
    }

    pub fn end_ms(&self) -> u64 {
        let (r, h, f) = self.envelope();
        self.t_ms + r + h + f
    }

    pub(crate) fn weight(&self, t: u64) -> f64 {
        let (r, h, f) = self.envelope();
        if t <= self.t_ms {
            return 0.0;
        }
        let dt = t - self.t_ms;
        if dt < r {
            smoothstep(dt as f64 / r as f64)
        } else if dt < r + h {
            1.0
        } else if dt < r + h + f {
            1.0 - smoothstep((dt - r - h) as f64 / f as f64)
        } else {
            0.0
        }
    }

    pub(crate) fn apply(&self, rig: &mut Rig, w: f64) {
        if w == 0.0 {
            return;
        }
        let m = self.magnitude;
        let side = self.side_or_default();
        let sw = rig.shoulder_width();
        let torso = rig.torso_length();
        match self.kind {
            GestureKind::ReachTouch => {
                let down = -m * 0.5 * torso / sw;
                blend_arm(
                    &mut rig.arms[side.index()],
                    Arm { out: Arm::REST.out, down, bend_deg: Arm::REST.bend_deg },
                    w,
                );
            }
            GestureKind::HeadBump => rig.head.0 += w * side.sign() * m * 0.3,
            GestureKind::ElbowExtendLeft | GestureKind::ElbowExtendRight => {
                let side = if self.kind == GestureKind::ElbowExtendLeft { Side::Left } else { Side::Right };
                let shoulder_x = rig.center_x + side.sign() * 0.5 * sw;
                // keep the wrist inside the camera frame
                let room = if side == Side::Left { shoulder_x + 0.04 } else { 1.04 - shoulder_x };
                let out = (m * 1.4).min(room / sw);
                let target = Arm { out, down: 0.0, bend_deg: (150.0 * m).min(178.0) };
                blend_arm(&mut rig.arms[side.index()], target, w);
            }
            GestureKind::KneeRaise => rig.knee_lift[side.index()] += w * m * 0.35,
            GestureKind::LeanLeft => rig.lean -= w * m * 0.25,
            GestureKind::LeanRight => rig.lean += w * m * 0.25,
            GestureKind::Dodge => rig.center_x += w * side.sign() * m * 0.25 * sw,
        }
    }
}

fn smoothstep(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    x * x * (3.0 - 2.0 * x)
}

fn blend_arm(arm: &mut Arm, target: Arm, w: f64) {
    arm.out += w * (target.out - Arm::REST.out);
    arm.down += w * (target.down - Arm::REST.down);
    arm.bend_deg += w * (target.bend_deg - Arm::REST.bend_deg);
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("line {line}: {message}")]
pub struct ScriptError {
    pub line: usize,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Script {
    pub directives: Vec<Directive>,
}

impl Script {
    pub fn parse(text: &str) -> Result<Script, ScriptError> {
        let mut directives = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| ScriptError { line: i + 1, message };
            let mut parts = line.split_whitespace();
            let t = parts.next().unwrap_or_default();
            let t_ms: u64 = t.parse().map_err(|_| err(format!("bad time {t:?}")))?;
            let kind = parts.next().ok_or_else(|| err("missing gesture kind".into()))?;
            let kind = GestureKind::from_name(kind).ok_or_else(|| err(format!("unknown gesture kind {kind:?}")))?;
            let mut d = Directive::new(t_ms, kind);
            let mut magnitude_seen = false;
            for tok in parts {
                match tok.split_once('=') {
                    Some(("side", "left")) => d.side = Some(Side::Left),
                    Some(("side", "right")) => d.side = Some(Side::Right),
                    Some(("player", p)) => {
                        d.player = p
                            .parse()
                            .ok()
                            .filter(|&p: &u8| usize::from(p) < MAX_PLAYERS)
                            .ok_or_else(|| err(format!("bad player {p:?}")))?;
                    }
                    None if !magnitude_seen => {
                        d.magnitude = tok
                            .parse()
                            .ok()
                            .filter(|m: &f64| m.is_finite() && *m > 0.0)
                            .ok_or_else(|| err(format!("bad magnitude {tok:?}")))?;
                        magnitude_seen = true;
                    }
                    _ => return Err(err(format!("unexpected token {tok:?}"))),
                }
            }
            if d.t_ms < LEAD_IN_MS {
                return Err(err(format!("directive at {} ms is inside the {LEAD_IN_MS} ms lead-in", d.t_ms)));
            }
            directives.push(d);
        }
        directives.sort_by_key(|d| (d.t_ms, d.player));
        Ok(Script { directives })
    }

    /// `count` directives of one kind, each starting 500 ms after the
    /// previous one has settled.
    pub fn repeated(kind: GestureKind, count: usize, magnitude: f64) -> Script {
        let mut t = LEAD_IN_MS + 300;
        let mut directives = Vec::with_capacity(count);
        for _ in 0..count {
            let d = Directive { magnitude, ..Directive::new(t, kind) };
            t = d.end_ms() + 500;
            directives.push(d);
        }
        Script { directives }
    }

    pub fn players(&self) -> u8 {
        self.directives.iter().map(|d| d.player + 1).max().unwrap_or(1)
    }

    pub fn end_ms(&self) -> u64 {
        let last = self.directives.iter().map(Directive::end_ms).max().unwrap_or(0);
        (last + TAIL_MS).max(MIN_DURATION_MS)
    }

    /// Events a replay should produce on a clean trace, in time order, for
    /// directives with magnitude above 1.
    pub fn expected_events(&self) -> Vec<(u8, GestureKind)> {
        self.directives.iter().filter(|d| d.magnitude > 1.0).map(|d| (d.player, d.kind)).collect()
    }

    /// Canonical text form, parseable by [`Script::parse`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for d in &self.directives {
            out.push_str(&format!("{} {} {}", d.t_ms, d.kind, d.magnitude));
            if let Some(side) = d.side {
                out.push_str(if side == Side::Left { " side=left" } else { " side=right" });
            }
            if d.player > 0 {
                out.push_str(&format!(" player={}", d.player));
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SynthOptions {
    pub seed: u64,
    /// Standard deviation of Gaussian noise added to every coordinate.
    pub jitter: f64,
    /// Player count; the script's own count is used when larger.
    pub players: u8,
    /// Overrides the script-derived duration.
    pub duration_ms: Option<u64>,
}

impl SynthOptions {
    pub fn new(seed: u64) -> SynthOptions {
        SynthOptions { seed, jitter: 0.0, players: 1, duration_ms: None }
    }
}

/// Per-seed body placement: solo players stand near the middle, pairs split
/// the frame.
pub fn bodies(rng: &mut impl Rng, players: u8) -> Vec<Rig> {
    if players <= 1 {
        vec![Rig::standing(0.5 + rng.random_range(-0.05..=0.05), rng.random_range(0.9..=1.1))]
    } else {
        [0.32, 0.68]
            .iter()
            .map(|c| Rig::standing(c + rng.random_range(-0.02..=0.02), 0.8 * rng.random_range(0.95..=1.05)))
            .collect()
    }
}

pub(crate) fn round6(v: f64) -> f64 {
    (v * 1e6).round() / 1e6
}

/// Expands a script into a landmark trace, one frame per player per tick.
pub fn synthesize(script: &Script, opts: &SynthOptions) -> Vec<LandmarkFrame> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let players = opts.players.max(script.players()).min(MAX_PLAYERS as u8);
    let rest = bodies(&mut rng, players);
    let noise = (opts.jitter > 0.0).then(|| Normal::new(0.0, opts.jitter).expect("finite jitter"));
    let end = opts.duration_ms.unwrap_or_else(|| script.end_ms());
    let mut frames = Vec::new();
    for i in 0.. {
        let t = frame_time_ms(i, FPS);
        if t >= end {
            break;
        }
        for (slot, body) in rest.iter().enumerate() {
            let mut rig = *body;
            for d in script.directives.iter().filter(|d| usize::from(d.player) == slot) {
                d.apply(&mut rig, d.weight(t));
            }
            let pose = rig.pose();
            let mut frame = pose.to_frame(t, slot as u8, CONFIDENCE);
            for id in LandmarkId::ALL {
                let lm = &mut frame[id];
                if let Some(n) = &noise {
                    lm.x += n.sample(&mut rng);
                    lm.y += n.sample(&mut rng);
                }
                lm.x = round6(lm.x);
                lm.y = round6(lm.y);
            }
            frames.push(frame);
        }
    }
    frames
}
