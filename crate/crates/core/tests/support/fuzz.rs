//! Random rounds for invariant checks. Shared with the CLI acceptance suite.

use movelearn_core::game::audit::{audit, AuditSummary};
use movelearn_core::game::{
    targets_in_bounds, EndCondition, GameConfig, GameEvent, GameMode, GameState, Phase, TargetState,
};
use movelearn_core::gesture::{GestureEvent, GestureKind};
use movelearn_core::landmark::{CleanFrame, LandmarkId, Point};
use movelearn_core::pose::Pose;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct FuzzOutcome {
    pub mode: GameMode,
    pub steps: usize,
    pub summary: AuditSummary,
    pub events: Vec<GameEvent>,
}

fn part_for(kind: GestureKind, rng: &mut ChaCha8Rng) -> LandmarkId {
    use LandmarkId::*;
    match kind {
        GestureKind::ReachTouch => *[LeftWrist, RightWrist].choose(rng).unwrap(),
        GestureKind::ElbowExtendLeft => LeftElbow,
        GestureKind::ElbowExtendRight => RightElbow,
        GestureKind::KneeRaise => *[LeftKnee, RightKnee].choose(rng).unwrap(),
        _ => Head,
    }
}

fn random_point(rng: &mut ChaCha8Rng) -> Point {
    Point::new(rng.random_range(-0.1..1.1), rng.random_range(-0.1..1.1))
}

fn random_frame(state: &GameState, t: u64, player: u8, rng: &mut ChaCha8Rng) -> CleanFrame {
    let center = if state.players > 1 { [0.3, 0.7][usize::from(player)] } else { 0.5 };
    let mut frame = Pose::neutral(center, rng.random_range(0.7..1.1)).to_clean(t, player);
    let active: Vec<Point> =
        state.targets.iter().filter(|x| x.state == TargetState::Active).map(|x| x.position).collect();
    for id in [LandmarkId::LeftWrist, LandmarkId::RightWrist, LandmarkId::Head] {
        let lm = &mut frame.landmarks[id.index()];
        let r: f64 = rng.random();
        if r < 0.45 && !active.is_empty() {
            let p = *active.choose(rng).unwrap();
            lm.position = Some(p.offset(rng.random_range(-0.05..0.05), rng.random_range(-0.05..0.05)));
        } else if r < 0.7 {
            lm.position = Some(random_point(rng));
        } else if r < 0.75 {
            lm.occluded = true;
            lm.stale_ms = rng.random_range(0..800);
        }
    }
    frame
}

/// Plays one random round and checks state invariants after every step.
pub fn fuzz_round(seed: u64) -> Result<FuzzOutcome, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mode = *GameMode::ALL.choose(&mut rng).unwrap();
    let mut config = GameConfig::for_mode(mode);
    config.end = if rng.random_bool(0.5) {
        EndCondition::MasteryCount(rng.random_range(1..=6))
    } else {
        EndCondition::TimeLimit(f64::from(rng.random_range(5..=60u32)))
    };
    config.target_speed = rng.random_range(0.0..0.3);
    config.question_difficulty = rng.random_range(1..=3);
    config.question_timeout_ms = rng.random_range(2000..=20000);
    let mut state = GameState::new(mode, seed, config).map_err(|e| e.to_string())?;
    let mut events = state.start(0).map_err(|e| e.to_string())?;
    let mut t = 0;
    let mut steps = 0;
    let mut mastery = state.mastery;
    while state.phase != Phase::Ended && steps < 4000 {
        let dt = rng.random_range(1..=120);
        t += dt;
        let mut gestures = Vec::new();
        if rng.random_bool(0.2) {
            let kind = *GestureKind::ALL.choose(&mut rng).unwrap();
            let player = rng.random_range(0..state.players);
            gestures.push(GestureEvent {
                timestamp_ms: t,
                player_slot: player,
                kind,
                body_part: part_for(kind, &mut rng),
                position: random_point(&mut rng),
                count: 1,
            });
        }
        let frames: Vec<CleanFrame> = (0..state.players).map(|p| random_frame(&state, t, p, &mut rng)).collect();
        let out = state.advance(dt, &gestures, &frames).map_err(|e| format!("seed {seed} step {steps}: {e}"))?;
        events.extend(out);
        steps += 1;
        let fail = |m: &str| Err(format!("seed {seed} ({mode}) step {steps}: {m}"));
        if state.mastery < mastery || state.mastery > 100 {
            return fail("mastery decreased");
        }
        mastery = state.mastery;
        if state.targets.len() != state.question.options.len() {
            return fail("target count differs from option count");
        }
        if !targets_in_bounds(&state) {
            return fail("active target out of its field");
        }
        if state.correct_total > state.answered_total || state.score != state.correct_total {
            return fail("score totals inconsistent");
        }
        if state.phase != Phase::Playing && state.targets.iter().any(|x| x.state == TargetState::Active) {
            return fail("active target outside play");
        }
    }
    let summary = audit(&events).map_err(|e| format!("seed {seed} ({mode}): {e}"))?;
    Ok(FuzzOutcome { mode, steps, summary, events })
}
