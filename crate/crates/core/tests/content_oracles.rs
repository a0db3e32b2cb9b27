#[path = "support/oracles.rs"]
mod oracles;

use movelearn_core::content::stats::{find_outliers, median, SkewClass};
use movelearn_core::content::{gen_question, grade, AnswerKey, QuestionKind};
use proptest::prelude::*;

#[test]
fn central_tendency_matches_on_every_small_dataset() {
    // 10 + 100 + ... + 10^6
    assert_eq!(oracles::exhaustive_central(6, 9).unwrap(), 1_111_110);
}

#[test]
fn outlier_and_skew_rules_match_on_random_datasets() {
    let (with_outliers, skewed) = oracles::random_rules(2024, 10_000).unwrap();
    assert!(with_outliers > 1000, "{with_outliers}");
    assert!(skewed > 1000, "{skewed}");
}

#[test]
fn references_agree_with_hand_examples() {
    assert_eq!(oracles::outliers_ref(&[1, 2, 3, 4, 5, 100]), [5].into());
    assert!(oracles::outliers_ref(&[1, 2, 3, 4, 100]).is_empty());
    assert_eq!(oracles::skew_ref(&[1, 1, 1, 2, 2, 3, 9]), Some(SkewClass::RightSkewed));
    assert_eq!(oracles::mode_ref(&[1, 1, 2, 2]), None);
    assert_eq!(oracles::median2(&[1, 9, 2, 8]), 10);
}

proptest! {
    #[test]
    fn reflection_mirrors_skew(v in proptest::collection::vec(0u32..=99, 4..=12)) {
        let r: Vec<u32> = v.iter().map(|x| 99 - x).collect();
        let a = oracles::skew_ref(&v).map(SkewClass::mirrored);
        prop_assert_eq!(movelearn_core::content::stats::classify_skew(&r).ok(), a);
    }

    #[test]
    fn outliers_ignore_order(mut v in proptest::collection::vec(0u32..=99, 4..=12), seed in any::<u64>()) {
        let before: Vec<u32> = find_outliers(&v).iter().map(|&i| v[i]).collect();
        let k = (seed as usize) % v.len();
        v.rotate_left(k);
        let mut after: Vec<u32> = find_outliers(&v).iter().map(|&i| v[i]).collect();
        let mut before = before;
        before.sort();
        after.sort();
        prop_assert_eq!(before, after);
    }

    #[test]
    fn median_is_shift_equivariant(v in proptest::collection::vec(0u32..=80, 1..=12), c in 0u32..=19) {
        let shifted: Vec<u32> = v.iter().map(|x| x + c).collect();
        prop_assert_eq!(median(&shifted), median(&v) + i64::from(c));
    }

    #[test]
    fn generated_keys_grade_correct(seed in any::<u64>(), k in 0usize..7, d in 1u8..=3) {
        let q = gen_question(seed, QuestionKind::ALL[k], d);
        prop_assert!(q.check_invariants().is_ok());
        prop_assert!(grade(&q, &q.correct).unwrap().correct);
        if let AnswerKey::Options(s) = &q.correct {
            if let Some(other) = (0..q.options.len()).find(|i| !s.contains(i)) {
                let wrong = AnswerKey::Options([other].into());
                prop_assert!(!grade(&q, &wrong).unwrap().correct);
            }
        }
    }
}
