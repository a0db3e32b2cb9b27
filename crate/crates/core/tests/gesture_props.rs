#[path = "support/roundtrip.rs"]
mod roundtrip;

use movelearn_core::gesture::{GestureConfig, GestureKind};
use movelearn_core::landmark::LandmarkFrame;
use movelearn_core::synth::{synthesize, Directive, Script, Side, SynthOptions, LEAD_IN_MS};
use proptest::prelude::*;
use roundtrip::*;

fn kind() -> impl Strategy<Value = GestureKind> {
    (0..GestureKind::ALL.len()).prop_map(|i| GestureKind::ALL[i])
}

/// Non-overlapping directives, each player free of its own overlap.
fn script(players: u8) -> impl Strategy<Value = Script> {
    prop::collection::vec((kind(), 1.3f64..2.0, any::<bool>(), 0..players, 300u64..900), 1..6).prop_map(|items| {
        let mut t = LEAD_IN_MS + 300;
        let directives = items
            .into_iter()
            .map(|(kind, magnitude, left, player, gap)| {
                let side = Some(if left { Side::Left } else { Side::Right });
                let d = Directive { magnitude, side, player, ..Directive::new(t, kind) };
                t = d.end_ms() + gap;
                d
            })
            .collect();
        Script { directives }
    })
}

fn transform(frames: &[LandmarkFrame], s: f64, dx: f64, dy: f64) -> Vec<LandmarkFrame> {
    let mut out = frames.to_vec();
    for f in &mut out {
        for lm in f.landmarks.iter_mut() {
            lm.x = 0.5 + s * (lm.x - 0.5) + dx;
            lm.y = 0.5 + s * (lm.y - 0.5) + dy;
        }
    }
    out
}

#[test]
fn every_kind_round_trips_exactly() {
    assert_eq!(exact_round_trips(20), vec![]);
}

#[test]
fn jittered_round_trips_recover_events() {
    let r = jitter_recovery(10, 0.01);
    assert_eq!(r.foreign, 0, "{r:?}");
    assert!(r.recovered * 100 >= r.expected * 95, "{r:?}");
}

#[test]
fn knee_counts_are_exact() {
    assert_eq!(knee_miscounts(10, 5), vec![]);
}

#[test]
fn seated_gestures_need_the_low_amplitude_scale() {
    for seed in 0..3 {
        for (kind, total, _) in seated(0.8, 1.0, seed) {
            assert_eq!(total, 0, "{kind} fired at full scale");
        }
        for (kind, _, hits) in seated(0.8, 0.6, seed) {
            assert!(hits >= 1, "{kind} silent at scale 0.6");
        }
    }
}

#[test]
fn players_are_recognized_independently() {
    let text = "1500 knee_raise\n1500 lean_left player=1\n3000 head_bump player=1\n3000 reach_touch\n";
    let script = Script::parse(text).unwrap();
    let events = run(&script, 3, 0.0, GestureConfig::default());
    let mut got: Vec<(u8, GestureKind)> = events.iter().map(|e| (e.player_slot, e.kind)).collect();
    got.sort();
    let mut want = script.expected_events();
    want.sort();
    assert_eq!(got, want);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn random_scripts_round_trip(script in script(2), seed in 0u64..1000) {
        let events = run(&script, seed, 0.0, GestureConfig::default());
        let r = recovery(&script, &events);
        prop_assert_eq!(r.recovered, r.expected, "{:?}\n{}", r, script.to_text());
        prop_assert_eq!(r.foreign, 0, "{:?}\n{}", r, script.to_text());
    }

    #[test]
    fn replay_is_deterministic(script in script(2), seed in 0u64..1000, jitter in 0.0f64..0.02) {
        let a = run(&script, seed, jitter, GestureConfig::default());
        let b = run(&script, seed, jitter, GestureConfig::default());
        prop_assert_eq!(a, b);
    }

    #[test]
    fn same_kind_events_respect_debounce(
        script in script(1),
        seed in 0u64..1000,
        jitter in 0.0f64..0.03,
        debounce in 100u64..600,
    ) {
        // tight packing: consecutive directives overlap
        let mut script = script;
        for (i, d) in script.directives.iter_mut().enumerate() {
            d.t_ms = LEAD_IN_MS + 300 + 150 * i as u64;
        }
        let config = GestureConfig { debounce_ms: debounce, ..GestureConfig::default() };
        let events = run(&script, seed, jitter, config);
        for kind in GestureKind::ALL {
            let times: Vec<u64> = events.iter().filter(|e| e.kind == kind).map(|e| e.timestamp_ms).collect();
            for w in times.windows(2) {
                prop_assert!(w[1] - w[0] >= debounce, "{kind}: {times:?}");
            }
        }
    }

    #[test]
    fn occluded_frames_fire_nothing(script in script(1), seed in 0u64..1000, from in 0usize..40) {
        let mut frames = synthesize(&script, &SynthOptions::new(seed));
        for f in frames.iter_mut().skip(from) {
            for lm in f.landmarks.iter_mut() {
                lm.confidence = 0.0;
            }
        }
        let events = detect_all(&frames, GestureConfig::default());
        let cut = frames.get(from).map_or(u64::MAX, |f| f.timestamp_ms);
        let stale = GestureConfig::default().stale_limit_ms;
        prop_assert!(events.iter().all(|e| e.timestamp_ms < cut + stale), "{events:?}");
    }

    #[test]
    fn framing_does_not_change_recognition(
        script in script(1),
        seed in 0u64..1000,
        s in 0.7f64..1.0,
        dx in -0.05f64..0.05,
        dy in -0.03f64..0.03,
    ) {
        let frames = synthesize(&script, &SynthOptions::new(seed));
        let moved = transform(&frames, s, dx, dy);
        // only while the body stays inside the off-frame margin
        let inside = |v: f64| (-0.045..=1.045).contains(&v);
        prop_assume!(moved.iter().all(|f| f.landmarks.iter().all(|lm| inside(lm.x) && inside(lm.y))));
        let base = detect_all(&frames, GestureConfig::default());
        let moved = detect_all(&moved, GestureConfig::default());
        let kinds = |v: &[movelearn_core::gesture::GestureEvent]| v.iter().map(|e| e.kind).collect::<Vec<_>>();
        prop_assert_eq!(kinds(&base), kinds(&moved));
        for (a, b) in base.iter().zip(&moved) {
            prop_assert!(a.timestamp_ms.abs_diff(b.timestamp_ms) <= 34, "{} vs {}", a.timestamp_ms, b.timestamp_ms);
        }
    }

    #[test]
    fn lower_amplitude_scale_never_loses_a_gesture(
        kind in kind(),
        magnitude in 0.5f64..2.0,
        seed in 0u64..1000,
        a in 0.5f64..1.0,
        b in 0.5f64..1.0,
    ) {
        let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
        let script = Script { directives: vec![Directive { magnitude, ..Directive::new(LEAD_IN_MS + 300, kind) }] };
        let fires = |scale: f64| {
            let config = GestureConfig { amplitude_scale: scale, ..GestureConfig::default() };
            run(&script, seed, 0.0, config).iter().any(|e| e.kind == kind)
        };
        prop_assert!(!fires(hi) || fires(lo), "{kind} m={magnitude}: fires at {hi} but not {lo}");
    }
}
