use std::collections::VecDeque;

use super::{GestureConfig, GestureEvent, GestureKind};
use crate::landmark::{BodyScale, CleanFrame, LandmarkId, Point};

const REACH_LEFT: usize = 0;
const REACH_RIGHT: usize = 1;
const HEAD: usize = 2;
const ELBOW_LEFT: usize = 3;
const ELBOW_RIGHT: usize = 4;
const KNEE_LEFT: usize = 5;
const KNEE_RIGHT: usize = 6;
const LEAN_LEFT: usize = 7;
const LEAN_RIGHT: usize = 8;
const DODGE: usize = 9;
const MACHINES: usize = 10;

/// Armed/triggered state of one gesture machine.
///
/// A machine starts disarmed and arms the first time its signal is inside the
/// re-arm band, so a pose held at session start never fires.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
struct Machine {
    armed: bool,
    last_fire_ms: Option<u64>,
}

fn elapsed(last: Option<u64>, now: u64, debounce_ms: u64) -> bool {
    last.is_none_or(|l| now >= l + debounce_ms)
}

impl Machine {
    /// `signal` is normalized so that 1.0 is the trigger level.
    fn update(&mut self, signal: f64, now: u64, config: &GestureConfig, kind_last: &mut Option<u64>) -> bool {
        if self.armed {
            if signal >= 1.0 && elapsed(*kind_last, now, config.debounce_ms) {
                self.armed = false;
                self.last_fire_ms = Some(now);
                *kind_last = Some(now);
                return true;
            }
        } else if signal <= 1.0 - config.rearm_hysteresis && elapsed(self.last_fire_ms, now, config.debounce_ms) {
            self.armed = true;
        }
        false
    }
}

/// Running mean over the first `calibration_ms` of trackable frames.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
struct Baseline {
    start_ms: Option<u64>,
    sum: Point,
    samples: u32,
    value: Option<Point>,
}

impl Baseline {
    fn observe(&mut self, now: u64, p: Point, calibration_ms: u64) -> Option<Point> {
        if self.value.is_some() {
            return self.value;
        }
        let start = *self.start_ms.get_or_insert(now);
        if now < start + calibration_ms {
            self.sum = self.sum.offset(p.x, p.y);
            self.samples += 1;
            return None;
        }
        let value = if self.samples == 0 {
            p
        } else {
            let n = f64::from(self.samples);
            Point::new(self.sum.x / n, self.sum.y / n)
        };
        self.value = Some(value);
        self.value
    }
}

/// Per-player recognizer state. Independent across players.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct GestureState {
    machines: [Machine; MACHINES],
    last_emit: [Option<u64>; GestureKind::ALL.len()],
    knee_baseline: [Baseline; 2],
    head_baseline: Baseline,
    /// (t, shoulder-mid x, hip-mid x) over the dodge window.
    torso_history: VecDeque<(u64, f64, f64)>,
}

struct Ctx<'a> {
    frame: &'a CleanFrame,
    scale: &'a BodyScale,
    config: &'a GestureConfig,
    out: Vec<GestureEvent>,
}

impl Ctx<'_> {
    fn at(&self, id: LandmarkId) -> Option<Point> {
        self.frame.usable(id, self.config.stale_limit_ms)
    }

    fn threshold(&self, base: f64) -> f64 {
        base * self.config.amplitude_scale
    }
}

impl GestureState {
    pub fn new() -> Self {
        Self::default()
    }

    /// True once both knee baselines and the head baseline are calibrated.
    pub fn calibrated(&self) -> bool {
        self.knee_baseline.iter().all(|b| b.value.is_some()) && self.head_baseline.value.is_some()
    }

    fn fire(
        &mut self,
        ctx: &mut Ctx<'_>,
        machine: usize,
        kind: GestureKind,
        signal: f64,
        part: LandmarkId,
        position: Point,
    ) {
        let now = ctx.frame.timestamp_ms;
        let kind_last = &mut self.last_emit[kind.index()];
        if self.machines[machine].update(signal, now, ctx.config, kind_last) {
            ctx.out.push(GestureEvent {
                timestamp_ms: now,
                player_slot: ctx.frame.player_slot,
                kind,
                body_part: part,
                position,
                count: 1,
            });
        }
    }

    /// Advances every machine once and returns the events fired by this frame,
    /// in a fixed machine order.
    pub fn step(&mut self, frame: &CleanFrame, scale: &BodyScale, config: &GestureConfig) -> Vec<GestureEvent> {
        let mut ctx = Ctx { frame, scale, config, out: Vec::new() };
        self.reach(&mut ctx);
        self.head(&mut ctx);
        self.elbows(&mut ctx);
        self.knees(&mut ctx);
        self.lean_dodge_inner(&mut ctx);
        ctx.out
    }

    /// Advances only the lean and dodge machines.
    pub fn step_lean_dodge(
        &mut self,
        frame: &CleanFrame,
        scale: &BodyScale,
        config: &GestureConfig,
    ) -> Vec<GestureEvent> {
        let mut ctx = Ctx { frame, scale, config, out: Vec::new() };
        self.lean_dodge_inner(&mut ctx);
        ctx.out
    }

    fn reach(&mut self, ctx: &mut Ctx<'_>) {
        let sides = [
            (REACH_LEFT, LandmarkId::LeftShoulder, LandmarkId::LeftWrist),
            (REACH_RIGHT, LandmarkId::RightShoulder, LandmarkId::RightWrist),
        ];
        for (machine, shoulder, wrist) in sides {
            let (Some(s), Some(w)) = (ctx.at(shoulder), ctx.at(wrist)) else { continue };
            let lift = (s.y - w.y) / ctx.scale.torso_length;
            let signal = lift / ctx.threshold(ctx.config.reach_factor);
            self.fire(ctx, machine, GestureKind::ReachTouch, signal, wrist, w);
        }
    }

    fn head(&mut self, ctx: &mut Ctx<'_>) {
        let (Some(h), Some(ls), Some(rs)) =
            (ctx.at(LandmarkId::Head), ctx.at(LandmarkId::LeftShoulder), ctx.at(LandmarkId::RightShoulder))
        else {
            return;
        };
        let mid = ls.midpoint(rs);
        let rel = Point::new(h.x - mid.x, h.y - mid.y);
        let now = ctx.frame.timestamp_ms;
        let Some(rest) = self.head_baseline.observe(now, rel, ctx.config.calibration_ms) else {
            return;
        };
        let shift = rel.distance(rest) / ctx.scale.shoulder_width;
        let signal = shift / ctx.threshold(ctx.config.head_bump_factor);
        self.fire(ctx, HEAD, GestureKind::HeadBump, signal, LandmarkId::Head, h);
    }

    fn elbows(&mut self, ctx: &mut Ctx<'_>) {
        use LandmarkId::*;
        let sides = [
            (ELBOW_LEFT, GestureKind::ElbowExtendLeft, LeftShoulder, LeftElbow, LeftWrist, -1.0),
            (ELBOW_RIGHT, GestureKind::ElbowExtendRight, RightShoulder, RightElbow, RightWrist, 1.0),
        ];
        for (machine, kind, shoulder, elbow, wrist, outward) in sides {
            let (Some(s), Some(e), Some(w)) = (ctx.at(shoulder), ctx.at(elbow), ctx.at(wrist)) else {
                continue;
            };
            let Some(angle) = joint_angle_deg(s, e, w) else { continue };
            let lateral = outward * (w.x - s.x) / ctx.scale.shoulder_width;
            let signal = (angle / ctx.threshold(ctx.config.elbow_angle_deg))
                .min(lateral / ctx.threshold(ctx.config.extend_reach_factor));
            self.fire(ctx, machine, kind, signal, elbow, e);
        }
    }

    fn knees(&mut self, ctx: &mut Ctx<'_>) {
        let sides = [(KNEE_LEFT, LandmarkId::LeftKnee, 0), (KNEE_RIGHT, LandmarkId::RightKnee, 1)];
        let now = ctx.frame.timestamp_ms;
        for (machine, knee, b) in sides {
            let Some(k) = ctx.at(knee) else { continue };
            let Some(rest) = self.knee_baseline[b].observe(now, k, ctx.config.calibration_ms) else {
                continue;
            };
            let lift = (rest.y - k.y) / ctx.scale.torso_length;
            let signal = lift / ctx.threshold(ctx.config.knee_raise_factor);
            self.fire(ctx, machine, GestureKind::KneeRaise, signal, knee, k);
        }
    }

    fn lean_dodge_inner(&mut self, ctx: &mut Ctx<'_>) {
        let (Some(ls), Some(rs), Some(lh), Some(rh)) = (
            ctx.at(LandmarkId::LeftShoulder),
            ctx.at(LandmarkId::RightShoulder),
            ctx.at(LandmarkId::LeftHip),
            ctx.at(LandmarkId::RightHip),
        ) else {
            return;
        };
        let shoulders = ls.midpoint(rs);
        let hips = lh.midpoint(rh);
        let head = ctx.at(LandmarkId::Head).unwrap_or(shoulders);

        let offset = (shoulders.x - hips.x) / ctx.scale.torso_length;
        let lean_threshold = ctx.threshold(ctx.config.lean_factor);
        self.fire(ctx, LEAN_LEFT, GestureKind::LeanLeft, -offset / lean_threshold, LandmarkId::Head, head);
        self.fire(ctx, LEAN_RIGHT, GestureKind::LeanRight, offset / lean_threshold, LandmarkId::Head, head);

        let now = ctx.frame.timestamp_ms;
        let window = ctx.config.dodge_window_ms;
        while self.torso_history.front().is_some_and(|&(t, _, _)| t + window < now) {
            self.torso_history.pop_front();
        }
        let shift = self
            .torso_history
            .iter()
            .map(|&(_, sx, hx)| {
                let ds = shoulders.x - sx;
                let dh = hips.x - hx;
                if ds * dh > 0.0 {
                    ds.abs().min(dh.abs())
                } else {
                    0.0
                }
            })
            .fold(0.0, f64::max);
        self.torso_history.push_back((now, shoulders.x, hips.x));
        let signal = shift / ctx.scale.shoulder_width / lean_threshold;
        self.fire(ctx, DODGE, GestureKind::Dodge, signal, LandmarkId::Head, head);
    }
}

/// Interior angle at `joint` in degrees, or `None` for a zero-length limb.
fn joint_angle_deg(a: Point, joint: Point, b: Point) -> Option<f64> {
    let (ux, uy) = (a.x - joint.x, a.y - joint.y);
    let (vx, vy) = (b.x - joint.x, b.y - joint.y);
    let norm = ((ux * ux + uy * uy) * (vx * vx + vy * vy)).sqrt();
    if norm == 0.0 {
        return None;
    }
    let cos = ((ux * vx + uy * vy) / norm).clamp(-1.0, 1.0);
    // libm keeps the result identical across platforms
    Some(libm::acos(cos).to_degrees())
}

/// Pure form of [`GestureState::step`].
pub fn detect(
    state: &GestureState,
    frame: &CleanFrame,
    scale: &BodyScale,
    config: &GestureConfig,
) -> (GestureState, Vec<GestureEvent>) {
    let mut next = state.clone();
    let events = next.step(frame, scale, config);
    (next, events)
}

/// Pure form of [`GestureState::step_lean_dodge`].
pub fn lean_dodge(
    state: &GestureState,
    frame: &CleanFrame,
    scale: &BodyScale,
    config: &GestureConfig,
) -> (GestureState, Vec<GestureEvent>) {
    let mut next = state.clone();
    let events = next.step_lean_dodge(frame, scale, config);
    (next, events)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::landmark::body_scale;
    use crate::pose::{frame_time_ms, Pose};

    const FPS: u64 = 30;

    fn run(poses: &[Pose], config: &GestureConfig) -> Vec<GestureEvent> {
        let mut state = GestureState::new();
        let mut out = Vec::new();
        for (i, pose) in poses.iter().enumerate() {
            let frame = pose.to_clean(frame_time_ms(i as u64, FPS), 0);
            let scale = body_scale(&frame).unwrap();
            out.extend(state.step(&frame, &scale, config));
        }
        out
    }

    fn neutral_frames(n: usize) -> Vec<Pose> {
        vec![Pose::neutral(0.5, 1.0); n]
    }

    fn kinds(events: &[GestureEvent]) -> Vec<GestureKind> {
        events.iter().map(|e| e.kind).collect()
    }

    #[test]
    fn neutral_stream_is_silent() {
        assert!(run(&neutral_frames(300), &GestureConfig::default()).is_empty());
    }

    #[test]
    fn joint_angle_basics() {
        let a = joint_angle_deg(Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(2.0, 0.0));
        assert!((a.unwrap() - 180.0).abs() < 1e-9);
        let r = joint_angle_deg(Point::new(0.0, 1.0), Point::new(0.0, 0.0), Point::new(1.0, 0.0));
        assert!((r.unwrap() - 90.0).abs() < 1e-9);
        assert_eq!(joint_angle_deg(Point::new(1.0, 1.0), Point::new(1.0, 1.0), Point::new(0.0, 0.0)), None);
    }

    /// Right arm sweep: wrist goes from the shoulder to 1.6 shoulder widths
    /// outward while the elbow opens from 90 to 180 degrees.
    fn elbow_sweep(frames: usize) -> (Vec<Pose>, Vec<(f64, f64)>) {
        let base = Pose::neutral(0.5, 1.0);
        let s = base[LandmarkId::RightShoulder];
        let sw = base.shoulder_width();
        let mut poses = neutral_frames(10);
        let mut truth = vec![(0.0, 0.0); 10];
        for k in 0..=frames {
            let f = k as f64 / frames as f64;
            let reach = 1.6 * sw * f;
            let theta = 90.0 + 90.0 * f;
            let w = Point::new(s.x + reach, s.y);
            // isosceles elbow below the shoulder-wrist segment
            let half = reach / 2.0;
            let drop = if theta >= 180.0 { 0.0 } else { half / (theta.to_radians() / 2.0).tan() };
            let e = Point::new(s.x + half, s.y + drop);
            let mut p = base;
            p[LandmarkId::RightWrist] = w;
            p[LandmarkId::RightElbow] = e;
            poses.push(p);
            truth.push((theta, reach / sw));
        }
        (poses, truth)
    }

    #[test]
    fn elbow_sweep_fires_once_at_the_analytic_crossing() {
        let config = GestureConfig::default();
        let (poses, truth) = elbow_sweep(60);
        let events = run(&poses, &config);
        assert_eq!(kinds(&events), vec![GestureKind::ElbowExtendRight]);
        // hand oracle: first frame with both angle >= 150 and reach >= 1.4 sw
        let first = truth.iter().position(|&(theta, reach)| theta >= 150.0 + 1e-9 && reach >= 1.4 + 1e-9).unwrap();
        assert_eq!(events[0].timestamp_ms, frame_time_ms(first as u64, FPS));
        assert_eq!(events[0].body_part, LandmarkId::RightElbow);
    }

    #[test]
    fn elbow_needs_both_angle_and_reach() {
        let base = Pose::neutral(0.5, 1.0);
        let s = base[LandmarkId::RightShoulder];
        let mut bent = base;
        // far outward wrist but a 90 degree elbow
        bent[LandmarkId::RightWrist] = Point::new(s.x + 0.32, s.y);
        bent[LandmarkId::RightElbow] = Point::new(s.x + 0.16, s.y + 0.16);
        let mut poses = neutral_frames(10);
        poses.extend(vec![bent; 30]);
        assert!(run(&poses, &GestureConfig::default()).is_empty());
    }

    /// Knee raised to `lift` torso lengths above rest, `cycles` times.
    fn knee_cycles(cycles: usize, cycle_ms: u64, lift: f64) -> Vec<Pose> {
        let base = Pose::neutral(0.5, 1.0);
        let torso = base.torso_length();
        let mut poses = neutral_frames(40);
        let per_cycle = (cycle_ms * FPS / 1000) as usize;
        for _ in 0..cycles {
            for k in 0..per_cycle {
                let phase = k as f64 / per_cycle as f64;
                // triangle wave up then down
                let e = if phase < 0.5 { phase * 2.0 } else { 2.0 - phase * 2.0 };
                let mut p = base;
                p[LandmarkId::RightKnee].y -= e * lift * torso;
                p[LandmarkId::RightAnkle].y -= e * lift * torso;
                poses.push(p);
            }
        }
        poses.extend(neutral_frames(20));
        poses
    }

    #[test]
    fn three_knee_cycles_count_three() {
        let config = GestureConfig { debounce_ms: 200, ..Default::default() };
        let events = run(&knee_cycles(3, 600, 0.6), &config);
        assert_eq!(kinds(&events), vec![GestureKind::KneeRaise; 3]);
        let span = events.last().unwrap().timestamp_ms + 1;
        assert_eq!(super::super::knee_count_window(&events, 0, span), Ok(3));
        // hand-stepped triangle wave: with 18 frames per 600 ms cycle the lift
        // reaches 0.35/0.6 of its peak on frame ceil(0.5833 * 9) = 6 of each
        // cycle; cycle c starts at frame 40 + 18c
        let expected: Vec<u64> = (0..3).map(|c| frame_time_ms(40 + 18 * c + 6, FPS)).collect();
        let got: Vec<u64> = events.iter().map(|e| e.timestamp_ms).collect();
        assert_eq!(got, expected);
    }

    #[test]
    fn held_knee_counts_once() {
        let base = Pose::neutral(0.5, 1.0);
        let mut up = base;
        up[LandmarkId::LeftKnee].y -= 0.2;
        let mut poses = neutral_frames(40);
        poses.extend(vec![up; 120]);
        let events = run(&poses, &GestureConfig::default());
        assert_eq!(events.len(), 1);
        assert_eq!(events[0].body_part, LandmarkId::LeftKnee);
    }

    #[test]
    fn knee_waits_for_calibration() {
        let base = Pose::neutral(0.5, 1.0);
        let mut up = base;
        up[LandmarkId::LeftKnee].y -= 0.2;
        // raised from the very first frame: the baseline is the raised pose
        assert!(run(&vec![up; 90], &GestureConfig::default()).is_empty());
    }

    fn lean_poses(offsets: &[f64]) -> Vec<Pose> {
        let base = Pose::neutral(0.5, 1.0);
        let torso = base.torso_length();
        offsets
            .iter()
            .map(|&o| {
                let mut p = base;
                for id in [
                    LandmarkId::Head,
                    LandmarkId::LeftShoulder,
                    LandmarkId::RightShoulder,
                    LandmarkId::LeftElbow,
                    LandmarkId::RightElbow,
                    LandmarkId::LeftWrist,
                    LandmarkId::RightWrist,
                ] {
                    p[id].x += o * torso;
                }
                p
            })
            .collect()
    }

    #[test]
    fn lean_left_past_threshold() {
        let mut offsets = vec![0.0; 10];
        offsets.extend((1..=10).map(|i| -0.035 * i as f64));
        offsets.extend(vec![-0.35; 10]);
        let events = run(&lean_poses(&offsets), &GestureConfig::default());
        assert_eq!(kinds(&events), vec![GestureKind::LeanLeft]);
    }

    #[test]
    fn small_lean_oscillation_is_silent() {
        let offsets: Vec<f64> = (0..200).map(|i| if i % 2 == 0 { 0.1 } else { -0.1 }).collect();
        assert!(run(&lean_poses(&offsets), &GestureConfig::default()).is_empty());
    }

    #[test]
    fn lean_rearms_only_after_retreat() {
        // up past threshold, back to 0.2 (inside the band: no re-arm), up again,
        // then back to 0 (re-arm) and up again: two events
        let mut offsets = vec![0.0; 5];
        offsets.extend(vec![0.3; 10]);
        offsets.extend(vec![0.2; 10]);
        offsets.extend(vec![0.3; 10]);
        offsets.extend(vec![0.0; 10]);
        offsets.extend(vec![0.3; 10]);
        let events = run(&lean_poses(&offsets), &GestureConfig::default());
        assert_eq!(kinds(&events), vec![GestureKind::LeanRight; 2]);
    }

    #[test]
    fn dodge_translation_within_window() {
        let base = Pose::neutral(0.5, 1.0);
        let sw = base.shoulder_width();
        let config = GestureConfig { dodge_window_ms: 600, ..Default::default() };
        // about 0.5 shoulder widths left over 400 ms (12 frames), then hold
        let mut poses = neutral_frames(10);
        for k in 1..=12 {
            let mut p = base;
            p.translate(-0.5 * sw * (k as f64 - 0.5) / 12.0, 0.0);
            poses.push(p);
        }
        let mut held = base;
        held.translate(-0.5 * sw, 0.0);
        poses.extend(vec![held; 40]);
        let events = run(&poses, &config);
        assert_eq!(kinds(&events), vec![GestureKind::Dodge]);
        // hand oracle: displacement is (k - 0.5) / 24 sw, first above 0.25 at k = 7
        assert_eq!(events[0].timestamp_ms, frame_time_ms(10 + 7 - 1, FPS));
    }

    #[test]
    fn slow_drift_is_not_a_dodge() {
        let base = Pose::neutral(0.5, 1.0);
        let sw = base.shoulder_width();
        // 0.5 sw over 3 s: at most 0.1 sw per 600 ms window
        let poses: Vec<Pose> = (0..=90)
            .map(|k| {
                let mut p = base;
                p.translate(0.5 * sw * k as f64 / 90.0, 0.0);
                p
            })
            .collect();
        assert!(run(&poses, &GestureConfig::default()).is_empty());
    }

    #[test]
    fn head_bump_and_reach() {
        let base = Pose::neutral(0.5, 1.0);
        let mut poses = neutral_frames(40);
        let mut bump = base;
        bump[LandmarkId::Head].x += 0.1;
        poses.extend(vec![bump; 5]);
        poses.extend(neutral_frames(10));
        let mut reach = base;
        reach[LandmarkId::LeftWrist] = Point::new(0.4, 0.1);
        reach[LandmarkId::LeftElbow] = Point::new(0.4, 0.22);
        poses.extend(vec![reach; 5]);
        let events = run(&poses, &GestureConfig::default());
        assert_eq!(kinds(&events), vec![GestureKind::HeadBump, GestureKind::ReachTouch]);
        assert_eq!(events[1].body_part, LandmarkId::LeftWrist);
        assert_eq!(events[1].position, Point::new(0.4, 0.1));
    }

    #[test]
    fn debounce_is_shared_across_sides() {
        let base = Pose::neutral(0.5, 1.0);
        let mut both_at_once = base;
        both_at_once[LandmarkId::LeftKnee].y -= 0.2;
        both_at_once[LandmarkId::RightKnee].y -= 0.2;
        let mut poses = neutral_frames(40);
        poses.push(both_at_once);
        poses.extend(neutral_frames(5));
        let events = run(&poses, &GestureConfig::default());
        // second knee still up? no: it drops back before debounce elapses
        assert_eq!(events.len(), 1);
    }

    #[test]
    fn low_amplitude_mode_lowers_thresholds() {
        let base = Pose::neutral(0.5, 1.0);
        let mut small = base;
        small[LandmarkId::RightKnee].y -= 0.25 * base.torso_length();
        let mut poses = neutral_frames(40);
        poses.extend(vec![small; 10]);
        poses.extend(neutral_frames(10));
        assert!(run(&poses, &GestureConfig::default()).is_empty());
        let seated = GestureConfig { amplitude_scale: 0.6, ..Default::default() };
        assert_eq!(kinds(&run(&poses, &seated)), vec![GestureKind::KneeRaise]);
    }

    #[test]
    fn occluded_knee_holds_state() {
        let base = Pose::neutral(0.5, 1.0);
        let mut state = GestureState::new();
        let config = GestureConfig::default();
        let mut events = Vec::new();
        for i in 0..90u64 {
            let mut p = base;
            if i > 40 {
                p[LandmarkId::RightKnee].y -= 0.2;
            }
            let mut frame = p.to_clean(frame_time_ms(i, FPS), 0);
            if i > 40 {
                frame[LandmarkId::RightKnee].occluded = true;
                frame[LandmarkId::RightKnee].stale_ms = 600;
            }
            let scale = body_scale(&frame).unwrap();
            events.extend(state.step(&frame, &scale, &config));
        }
        assert!(events.is_empty());
    }

    #[test]
    fn pure_detect_matches_stateful_step() {
        let (poses, _) = elbow_sweep(30);
        let config = GestureConfig::default();
        let mut a = GestureState::new();
        let mut b = GestureState::new();
        for (i, p) in poses.iter().enumerate() {
            let frame = p.to_clean(frame_time_ms(i as u64, FPS), 0);
            let scale = body_scale(&frame).unwrap();
            let ev_a = a.step(&frame, &scale, &config);
            let (next, ev_b) = detect(&b, &frame, &scale, &config);
            b = next;
            assert_eq!(ev_a, ev_b);
        }
        assert_eq!(a, b);
    }
}
