//! Closed-loop scripted player.
//!
//! The autopilot watches the game state after every tick and moves a [`Rig`]
//! to answer each question correctly through the same landmark stream a
//! camera would deliver. Its trace replays to the identical session log, which
//! makes it the source of the golden fixtures and the bench trace.

use crate::content::{AnswerKey, Payload};
use crate::game::layout::{grid_wrist, ZONE_X};
use crate::game::{GameMode, GameState, Mechanic, Phase, Target, TargetState};
use crate::gesture::GestureKind;
use crate::landmark::{LandmarkFrame, LandmarkId, Point};
use crate::pipeline::{EngineConfig, EngineError, Session};
use crate::pose::{frame_time_ms, Arm, Rig};
use crate::session::SessionLog;
use crate::synth::{round6, Directive, Side, CONFIDENCE, FPS, LEAD_IN_MS};

/// Wrist speed in frame units per second.
const HAND_SPEED: f64 = 1.5;
const WALK_SPEED: f64 = 0.6;
const BEND_SPEED: f64 = 400.0;
/// Elbow angle while pointing.
const POINT_BEND: f64 = 165.0;
/// Gap between scheduled knee raises.
const KNEE_GAP_MS: u64 = 600;

#[derive(Clone, Debug)]
pub struct Run {
    pub frames: Vec<LandmarkFrame>,
    pub log: SessionLog,
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum ArmGoal {
    Rest,
    Wrist(Point),
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Reach {
    Ready,
    Strike { side: usize, since: u64 },
}

#[derive(Clone, Debug)]
struct Body {
    slot: u8,
    rig: Rig,
    home_x: f64,
    lane: (f64, f64),
    center_goal: f64,
    goals: [ArmGoal; 2],
    directives: Vec<Directive>,
    reach: Reach,
}

impl Body {
    fn new(slot: u8, center_x: f64, scale: f64, lane: (f64, f64)) -> Body {
        Body {
            slot,
            rig: Rig::standing(center_x, scale),
            home_x: center_x,
            lane,
            center_goal: center_x,
            goals: [ArmGoal::Rest; 2],
            directives: Vec::new(),
            reach: Reach::Ready,
        }
    }

    fn shoulder(&self, side: usize) -> Point {
        let id = if side == 0 { LandmarkId::LeftShoulder } else { LandmarkId::RightShoulder };
        self.rig.pose()[id]
    }

    fn wrist(&self, side: usize) -> Point {
        let id = if side == 0 { LandmarkId::LeftWrist } else { LandmarkId::RightWrist };
        self.rig.pose()[id]
    }

    fn relax(&mut self) {
        self.center_goal = self.home_x;
        self.goals = [ArmGoal::Rest; 2];
        self.reach = Reach::Ready;
    }

    /// True while a scheduled gesture has not finished.
    fn busy(&self, t: u64) -> bool {
        self.directives.iter().any(|d| d.end_ms() > t)
    }

    fn schedule(&mut self, d: Directive) {
        self.directives.push(Directive { player: self.slot, ..d });
    }

    fn advance(&mut self, dt_ms: u64) {
        let dt = dt_ms as f64 / 1000.0;
        let dx = (self.center_goal - self.rig.center_x).clamp(-WALK_SPEED * dt, WALK_SPEED * dt);
        self.rig.center_x += dx;
        let sw = self.rig.shoulder_width();
        for side in 0..2 {
            let outward = if side == 0 { -1.0 } else { 1.0 };
            let s = self.shoulder(side);
            let (goal, bend) = match self.goals[side] {
                ArmGoal::Rest => (s.offset(outward * Arm::REST.out * sw, Arm::REST.down * sw), Arm::REST.bend_deg),
                ArmGoal::Wrist(p) => (p, POINT_BEND),
            };
            let arm = &mut self.rig.arms[side];
            let w = s.offset(outward * arm.out * sw, arm.down * sw);
            let d = w.distance(goal);
            let next = if d <= HAND_SPEED * dt { goal } else { w.lerp(goal, HAND_SPEED * dt / d) };
            arm.out = outward * (next.x - s.x) / sw;
            arm.down = (next.y - s.y) / sw;
            arm.bend_deg += (bend - arm.bend_deg).clamp(-BEND_SPEED * dt, BEND_SPEED * dt);
        }
    }

    fn frame(&mut self, t: u64) -> LandmarkFrame {
        self.directives.retain(|d| d.end_ms() > t.saturating_sub(1000));
        let mut rig = self.rig;
        for d in &self.directives {
            d.apply(&mut rig, d.weight(t));
        }
        let mut frame = rig.pose().to_frame(t, self.slot, CONFIDENCE);
        for lm in frame.landmarks.iter_mut() {
            lm.x = round6(lm.x);
            lm.y = round6(lm.y);
        }
        frame
    }
}

/// Per-question plan state.
#[derive(Clone, Debug, Default)]
struct Plan {
    question: u32,
    /// Time the next one-shot gesture may start.
    next_try: u64,
    scheduled: bool,
}

struct Pilot {
    bodies: Vec<Body>,
    plan: Plan,
}

impl Pilot {
    fn new(players: u8) -> Pilot {
        let bodies = if players <= 1 {
            vec![Body::new(0, 0.5, 0.9, (0.25, 0.75))]
        } else {
            vec![Body::new(0, 0.32, 0.8, (0.2, 0.42)), Body::new(1, 0.68, 0.8, (0.58, 0.8))]
        };
        Pilot { bodies, plan: Plan::default() }
    }

    /// Body responsible for a screen position.
    fn owner(&self, x: f64) -> usize {
        if self.bodies.len() > 1 && x >= 0.5 {
            1
        } else {
            0
        }
    }

    fn decide(&mut self, t: u64, game: &GameState) {
        if game.phase != Phase::Playing {
            self.bodies.iter_mut().for_each(Body::relax);
            return;
        }
        if self.plan.question != game.question_index {
            self.plan = Plan { question: game.question_index, next_try: t + 300, scheduled: false };
            self.bodies.iter_mut().for_each(Body::relax);
        }
        let ready = t.max(LEAD_IN_MS + 100);
        match game.mechanic {
            Mechanic::Catch => self.catch(t, game),
            Mechanic::Zones => {
                if t < self.plan.next_try.max(ready) || self.bodies.iter().any(|b| b.busy(t)) {
                    return;
                }
                let Some(target) = game.targets.iter().find(|x| x.is_correct && x.state == TargetState::Active) else {
                    return;
                };
                let zone = ZONE_X.iter().position(|&x| x == target.position.x).unwrap_or(1);
                let (body, kind) = match zone {
                    0 => (0, GestureKind::ElbowExtendLeft),
                    2 => (self.bodies.len() - 1, GestureKind::ElbowExtendRight),
                    _ => (0, GestureKind::HeadBump),
                };
                let d = Directive::new(t, kind);
                self.plan.next_try = d.end_ms() + 400;
                self.bodies[body].schedule(d);
            }
            Mechanic::Knees => {
                if self.plan.scheduled || t < self.plan.next_try.max(ready) {
                    return;
                }
                let AnswerKey::Integer(n) = game.question.correct else { return };
                for k in 0..n {
                    let side = if k % 2 == 0 { Side::Right } else { Side::Left };
                    let body = k as usize % self.bodies.len();
                    let d = Directive {
                        side: Some(side),
                        ..Directive::new(t + u64::from(k) * KNEE_GAP_MS, GestureKind::KneeRaise)
                    };
                    self.bodies[body].schedule(d);
                }
                self.plan.scheduled = true;
            }
            Mechanic::Ditch => self.ditch(t, ready, game),
            Mechanic::Grid => {
                let (AnswerKey::Point(p), Payload::Grid { size, .. }) =
                    (&game.question.correct, &game.question.payload)
                else {
                    return;
                };
                let body = &mut self.bodies[0];
                let s = body.shoulder(1);
                body.goals[1] = ArmGoal::Wrist(grid_wrist(s, body.rig.shoulder_width(), *p, *size));
            }
        }
    }

    fn catch(&mut self, t: u64, game: &GameState) {
        let Some(target) = game.targets.iter().find(|x| x.is_correct && x.state == TargetState::Active) else {
            return;
        };
        let actor = self.owner(target.position.x);
        for (i, b) in self.bodies.iter_mut().enumerate() {
            if i != actor {
                b.relax();
            }
        }
        let clear = !game.targets.iter().any(|o| {
            o.id != target.id && o.state == TargetState::Active && o.position.distance(target.position) < 0.16
        });
        let b = &mut self.bodies[actor];
        let p = target.position;
        b.center_goal = p.x.clamp(b.lane.0, b.lane.1);
        match b.reach {
            Reach::Ready => {
                let side = usize::from(p.x >= b.rig.center_x);
                let aim = Point::new(p.x, p.y + 0.14);
                b.goals[side] = ArmGoal::Wrist(aim);
                b.goals[1 - side] = ArmGoal::Rest;
                if clear && t >= LEAD_IN_MS && b.wrist(side).distance(aim) < 0.03 {
                    b.reach = Reach::Strike { side, since: t };
                }
            }
            Reach::Strike { side, since } => {
                b.goals[side] = ArmGoal::Wrist(Point::new(p.x, p.y - 0.04));
                if t - since > 700 {
                    b.reach = Reach::Ready;
                }
            }
        }
    }

    fn ditch(&mut self, t: u64, ready: u64, game: &GameState) {
        let holds = game.holds();
        let remaining: Vec<&Target> =
            game.targets.iter().filter(|x| x.is_correct && x.state == TargetState::Active).collect();
        for i in 0..self.bodies.len() {
            let slot = self.bodies[i].slot;
            let held = holds.iter().find(|h| h.0 == slot);
            let b = &mut self.bodies[i];
            if let Some(&(_, wrist, id)) = held {
                let side = usize::from(wrist == LandmarkId::RightWrist);
                let x = game.targets.iter().find(|x| x.id == id).map_or(0.5, |x| x.position.x);
                b.goals[side] = ArmGoal::Wrist(Point::new(x, 0.06));
                continue;
            }
            let mine = remaining.iter().find(|x| self.bodies.len() == 1 || usize::from(x.position.x >= 0.5) == i);
            let b = &mut self.bodies[i];
            match mine {
                Some(x) => {
                    let side = usize::from(x.position.x >= b.rig.center_x);
                    b.goals[side] = ArmGoal::Wrist(x.position);
                    b.goals[1 - side] = ArmGoal::Rest;
                }
                None => b.goals = [ArmGoal::Rest; 2],
            }
        }
        let done = remaining.is_empty() && holds.is_empty();
        if done && t >= self.plan.next_try.max(ready) && !self.bodies[0].busy(t) {
            let d = Directive::new(t + 200, GestureKind::HeadBump);
            self.plan.next_try = d.end_ms() + 400;
            self.bodies[0].schedule(d);
        }
    }
}

/// Plays a round to its end, then records `tail_ms` more of standing still.
/// Stops at `max_ms` even if the round is still running.
pub fn play(mode: GameMode, seed: u64, config: EngineConfig, max_ms: u64, tail_ms: u64) -> Result<Run, EngineError> {
    let mut session = Session::new(mode, seed, config)?;
    let mut pilot = Pilot::new(session.engine.game().players);
    let mut frames = Vec::new();
    let mut ended_at = None;
    let mut last_t = 0;
    for i in 0.. {
        let t = frame_time_ms(i, FPS);
        if t > max_ms || ended_at.is_some_and(|e| t > e + tail_ms) {
            break;
        }
        pilot.decide(t, session.engine.game());
        let tick: Vec<LandmarkFrame> = pilot
            .bodies
            .iter_mut()
            .map(|b| {
                b.advance(t - last_t);
                b.frame(t)
            })
            .collect();
        last_t = t;
        session.tick(&tick)?;
        if ended_at.is_none() && session.engine.game().phase == Phase::Ended {
            ended_at = Some(t);
        }
        frames.extend(tick);
    }
    Ok(Run { frames, log: session.finish() })
}
