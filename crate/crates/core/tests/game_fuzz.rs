#[path = "support/fuzz.rs"]
mod fuzz;

use movelearn_core::game::GameMode;

#[test]
fn fuzzed_rounds_keep_targets_and_mastery_consistent() {
    let mut modes = std::collections::BTreeSet::new();
    let mut ended = 0;
    for seed in 0..300 {
        let out = fuzz::fuzz_round(seed).unwrap();
        modes.insert(out.mode.name());
        ended += usize::from(out.summary.ended);
        assert!(out.summary.spawned > 0 && out.steps > 0);
    }
    assert_eq!(modes.len(), GameMode::ALL.len());
    assert!(ended > 200, "{ended}");
}

#[test]
fn fuzzing_is_reproducible() {
    let a = fuzz::fuzz_round(42).unwrap();
    let b = fuzz::fuzz_round(42).unwrap();
    assert_eq!(a.events, b.events);
}
