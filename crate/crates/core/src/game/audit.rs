//! Consistency checks over a game event log.

use std::collections::BTreeSet;

use super::{EventKind, GameEvent, Phase};

/// Counts gathered while auditing a log.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct AuditSummary {
    pub questions: u32,
    pub spawned: u32,
    pub popped: u32,
    pub ditched: u32,
    pub expired: u32,
    pub answers: u32,
    pub ended: bool,
}

/// Checks target conservation and progress monotonicity:
///
/// - every target is spawned once and leaves play (pop, ditch or expire) at
///   most once, and only while active;
/// - grabs and releases refer to active targets;
/// - no target is active once a question closes or the round ends;
/// - event times never decrease;
/// - mastery and score never decrease, mastery stays within 0..=100;
/// - nothing follows the `end` event.
pub fn audit(events: &[GameEvent]) -> Result<AuditSummary, String> {
    let mut s = AuditSummary::default();
    let mut active: BTreeSet<u32> = BTreeSet::new();
    let mut seen: BTreeSet<u32> = BTreeSet::new();
    let (mut last_t, mut score, mut mastery) = (0u64, 0u32, 0u8);
    for (i, e) in events.iter().enumerate() {
        let at = |msg: String| format!("event {i} ({} at {} ms): {msg}", e.kind.name(), e.t);
        if s.ended {
            return Err(at("event after end".into()));
        }
        if e.t < last_t {
            return Err(at(format!("time went back from {last_t}")));
        }
        last_t = e.t;
        let mut leave = |id: u32, counter: &mut u32| -> Result<(), String> {
            if !active.remove(&id) {
                return Err(at(format!("target {id} is not active")));
            }
            *counter += 1;
            Ok(())
        };
        match &e.kind {
            EventKind::Question { .. } => {
                if !active.is_empty() {
                    return Err(at(format!("targets {active:?} still active")));
                }
                s.questions += 1;
            }
            EventKind::Spawn { target, .. } => {
                if !seen.insert(*target) {
                    return Err(at(format!("target {target} spawned twice")));
                }
                active.insert(*target);
                s.spawned += 1;
            }
            EventKind::Pop { target, .. } => leave(*target, &mut s.popped)?,
            EventKind::Ditch { target, .. } => leave(*target, &mut s.ditched)?,
            EventKind::Expire { target } => leave(*target, &mut s.expired)?,
            EventKind::Grab { target, .. } | EventKind::Release { target, .. } | EventKind::Penalty { target, .. } => {
                // a penalty follows the pop of the same target
                if !active.contains(target) && !matches!(e.kind, EventKind::Penalty { .. }) {
                    return Err(at(format!("target {target} is not active")));
                }
            }
            EventKind::Answer { .. } => s.answers += 1,
            EventKind::Progress { score: sc, mastery: m, .. } => {
                if *sc < score || *m < mastery || *m > 100 {
                    return Err(at(format!("progress went from ({score}, {mastery}) to ({sc}, {m})")));
                }
                score = *sc;
                mastery = *m;
            }
            EventKind::Phase { phase: Phase::BetweenQuestions | Phase::Ended } => {
                if !active.is_empty() {
                    return Err(at(format!("targets {active:?} still active")));
                }
            }
            EventKind::End { score: sc, mastery: m, .. } => {
                if *sc != score || *m != mastery {
                    return Err(at("end totals differ from the last progress".into()));
                }
                s.ended = true;
            }
            _ => {}
        }
    }
    if s.spawned != s.popped + s.ditched + s.expired + active.len() as u32 {
        return Err("spawned targets unaccounted for".into());
    }
    Ok(s)
}
