//! Synth-to-replay helpers shared by the gesture tests and the acceptance run.

use movelearn_core::game::GameMode;
use movelearn_core::gesture::{knee_count_window, GestureConfig, GestureEvent, GestureKind};
use movelearn_core::landmark::LandmarkFrame;
use movelearn_core::pipeline::{replay_frames, EngineConfig};
use movelearn_core::synth::{synthesize, Directive, Script, Side, SynthOptions, LEAD_IN_MS};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Slack after a directive settles in which its event may still land.
const LATE_MS: u64 = 200;

pub fn detect_all(frames: &[LandmarkFrame], gesture: GestureConfig) -> Vec<GestureEvent> {
    let config = EngineConfig { gesture, ..EngineConfig::for_mode(GameMode::CentralTendencyCatch) };
    let numbered: Vec<(usize, LandmarkFrame)> = frames.iter().cloned().enumerate().collect();
    let log = replay_frames(&numbered, GameMode::CentralTendencyCatch, 0, &config).expect("synthetic trace replays");
    log.gesture_events().cloned().collect()
}

pub fn run(script: &Script, seed: u64, jitter: f64, gesture: GestureConfig) -> Vec<GestureEvent> {
    let opts = SynthOptions { jitter, ..SynthOptions::new(seed) };
    detect_all(&synthesize(script, &opts), gesture)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Recovery {
    pub expected: usize,
    pub recovered: usize,
    /// Extra events of a kind the script asked for.
    pub repeated: usize,
    /// Events of a kind the script never asked for on that player.
    pub foreign: usize,
}

impl Recovery {
    pub fn add(self, o: Recovery) -> Recovery {
        Recovery {
            expected: self.expected + o.expected,
            recovered: self.recovered + o.recovered,
            repeated: self.repeated + o.repeated,
            foreign: self.foreign + o.foreign,
        }
    }
}

/// Matches events to directives above magnitude 1 by player, kind and time.
pub fn recovery(script: &Script, events: &[GestureEvent]) -> Recovery {
    let wanted: Vec<&Directive> = script.directives.iter().filter(|d| d.magnitude > 1.0).collect();
    let mut used = vec![false; wanted.len()];
    let mut r = Recovery { expected: wanted.len(), ..Recovery::default() };
    for e in events {
        let hit = wanted.iter().enumerate().position(|(i, d)| {
            !used[i]
                && d.player == e.player_slot
                && d.kind == e.kind
                && (d.t_ms..=d.end_ms() + LATE_MS).contains(&e.timestamp_ms)
        });
        match hit {
            Some(i) => {
                used[i] = true;
                r.recovered += 1;
            }
            None if script.directives.iter().any(|d| d.player == e.player_slot && d.kind == e.kind) => r.repeated += 1,
            None => r.foreign += 1,
        }
    }
    r
}

/// True when the replay produced exactly the expected (player, kind) sequence.
pub fn exact(script: &Script, events: &[GestureEvent]) -> bool {
    let got: Vec<(u8, GestureKind)> = events.iter().map(|e| (e.player_slot, e.kind)).collect();
    got == script.expected_events()
}

/// Three gestures of one kind with a per-seed side and magnitude.
pub fn kind_script(kind: GestureKind, seed: u64) -> Script {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut t = LEAD_IN_MS + 300;
    let mut directives = Vec::new();
    for _ in 0..3 {
        let side = if rng.random_bool(0.5) { Side::Left } else { Side::Right };
        let d = Directive { magnitude: rng.random_range(1.3..=2.0), side: Some(side), ..Directive::new(t, kind) };
        t = d.end_ms() + 500;
        directives.push(d);
    }
    Script { directives }
}

/// Synth-to-replay over every kind and `seeds` seeds; returns the failures.
pub fn exact_round_trips(seeds: u64) -> Vec<(GestureKind, u64)> {
    let mut failures = Vec::new();
    for kind in GestureKind::ALL {
        for seed in 0..seeds {
            let script = kind_script(kind, seed);
            if !exact(&script, &run(&script, seed, 0.0, GestureConfig::default())) {
                failures.push((kind, seed));
            }
        }
    }
    failures
}

/// Jittered round trips over every kind.
pub fn jitter_recovery(seeds: u64, jitter: f64) -> Recovery {
    let mut total = Recovery::default();
    for kind in GestureKind::ALL {
        for seed in 0..seeds {
            let script = kind_script(kind, seed);
            total = total.add(recovery(&script, &run(&script, seed, jitter, GestureConfig::default())));
        }
    }
    total
}

/// A run of `n` knee raises alternating sides.
pub fn knee_script(n: usize) -> Script {
    let mut script = Script::repeated(GestureKind::KneeRaise, n, 1.5);
    for (i, d) in script.directives.iter_mut().enumerate() {
        d.side = Some(if i % 2 == 0 { Side::Left } else { Side::Right });
    }
    script
}

pub fn knee_count(n: usize, seed: u64) -> u32 {
    let script = knee_script(n);
    let events = run(&script, seed, 0.0, GestureConfig::default());
    knee_count_window(&events, 0, script.end_ms()).expect("non-empty window")
}

/// (n, seed) pairs with a wrong count.
pub fn knee_miscounts(max: usize, seeds: u64) -> Vec<(usize, u64, u32)> {
    let mut bad = Vec::new();
    for n in 1..=max {
        for seed in 0..seeds {
            let got = knee_count(n, seed);
            if got as usize != n {
                bad.push((n, seed, got));
            }
        }
    }
    bad
}

/// For one directive of each kind at `magnitude`: (kind, all events, events of that kind).
pub fn seated(magnitude: f64, amplitude_scale: f64, seed: u64) -> Vec<(GestureKind, usize, usize)> {
    let gesture = GestureConfig { amplitude_scale, ..GestureConfig::default() };
    GestureKind::ALL
        .into_iter()
        .map(|kind| {
            let script = Script { directives: vec![Directive { magnitude, ..Directive::new(LEAD_IN_MS + 300, kind) }] };
            let events = run(&script, seed, 0.0, gesture);
            (kind, events.len(), events.iter().filter(|e| e.kind == kind).count())
        })
        .collect()
}
