use std::path::PathBuf;

use movelearn_core::game::audit::audit;
use movelearn_core::game::GameMode;
use movelearn_core::pipeline::replay;
use movelearn_core::session::{summarize, SessionLog};
use serde_json::Value;

fn data(name: &str) -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name);
    std::fs::read_to_string(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

#[test]
fn fixtures_replay_to_their_golden_logs() {
    for mode in GameMode::ALL {
        let trace = data(&format!("{mode}.trace.jsonl"));
        let golden = data(&format!("{mode}.log.jsonl"));
        let h = SessionLog::from_jsonl(&golden).unwrap().header;
        assert_eq!(h.mode, mode);
        let runs: Vec<SessionLog> = (0..3).map(|_| replay(&trace, h.mode, h.seed, &h.config).unwrap()).collect();
        for run in &runs {
            assert!(run.to_jsonl() == golden, "{mode}: replay differs from golden log");
            assert_eq!(run.game_log(), runs[0].game_log());
        }
        let events: Vec<_> = runs[0].game_events().cloned().collect();
        let s = audit(&events).unwrap();
        assert!(s.ended, "{mode} fixture does not reach the end");
    }
}

/// Counts straight from the JSON lines, without the log types.
#[test]
fn summary_matches_a_hand_count_of_the_fixture() {
    let golden = data("knee_count.log.jsonl");
    let lines: Vec<Value> = golden.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    let game = |ev: &'static str| lines.iter().filter(move |v| v["rec"] == "game" && v["ev"] == ev);
    let answered = game("answer").count() as u64;
    let correct = game("answer").filter(|v| v["correct"] == true).count() as u64;
    let q_times: Vec<u64> = game("question").map(|v| v["t"].as_u64().unwrap()).collect();
    let a_times: Vec<u64> = game("answer").map(|v| v["t"].as_u64().unwrap()).collect();
    let latency = a_times.iter().zip(&q_times).map(|(a, q)| (a - q) as f64).sum::<f64>() / answered as f64;

    let s = summarize(&SessionLog::from_jsonl(&golden).unwrap()).unwrap();
    assert_eq!((s.answered, s.correct), (answered, correct));
    assert_eq!(s.accuracy, Some(correct as f64 / answered as f64));
    assert!((s.mean_response_latency_ms.unwrap() - latency).abs() < 1e-9);
    assert_eq!(s.questions, q_times.len() as u64);
    assert_eq!(s.n, 0);
}

#[test]
fn malformed_fixture_line_is_reported() {
    let mut lines: Vec<String> = data("elbow_skew.trace.jsonl").lines().map(str::to_owned).collect();
    lines[16] = lines[16].replace("\"head\"", "\"hed\"");
    let err = replay(&lines.join("\n"), GameMode::ElbowSkew, 7, &Default::default()).unwrap_err();
    assert_eq!(err.line(), Some(17));
}
