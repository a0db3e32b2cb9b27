//! Independent integer-only references for the content statistics. Shared
//! with the CLI acceptance suite.

use std::collections::BTreeSet;

use movelearn_core::content::stats::{classify_skew, find_outliers, mean, median, mode, SkewClass};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Twice the median, by counting rather than sorting.
pub fn median2(v: &[u32]) -> i64 {
    let n = v.len();
    let kth = |k: usize| -> u32 {
        // smallest value with more than k elements at or below it
        (0..=u32::MAX).find(|&c| v.iter().filter(|&&x| x <= c).count() > k).unwrap()
    };
    if n % 2 == 1 {
        2 * i64::from(kth(n / 2))
    } else {
        i64::from(kth(n / 2 - 1)) + i64::from(kth(n / 2))
    }
}

pub fn mode_ref(v: &[u32]) -> Option<u32> {
    let max = *v.iter().max()?;
    let mut counts = vec![0usize; max as usize + 1];
    for &x in v {
        counts[x as usize] += 1;
    }
    let top = *counts.iter().max().unwrap();
    let winners: Vec<usize> = (0..counts.len()).filter(|&i| counts[i] == top).collect();
    (winners.len() == 1).then(|| winners[0] as u32)
}

/// Checks mean, median and mode on every dataset of length 1..=max_len over
/// 0..=max_value. Returns the number of datasets checked.
pub fn exhaustive_central(max_len: usize, max_value: u32) -> Result<u64, String> {
    let mut checked = 0;
    for len in 1..=max_len {
        let mut v = vec![0u32; len];
        loop {
            let sum: i64 = v.iter().map(|&x| i64::from(x)).sum();
            let m = mean(&v);
            if *m.numer() * len as i64 != sum * *m.denom() {
                return Err(format!("mean {v:?}"));
            }
            let md = median(&v);
            if *md.numer() * 2 != median2(&v) * *md.denom() {
                return Err(format!("median {v:?}"));
            }
            if mode(&v) != mode_ref(&v) {
                return Err(format!("mode {v:?}"));
            }
            checked += 1;
            // odometer increment
            let mut i = 0;
            while i < len && v[i] == max_value {
                v[i] = 0;
                i += 1;
            }
            if i == len {
                break;
            }
            v[i] += 1;
        }
    }
    Ok(checked)
}

/// Skew rule in scaled integers: with S = sum, Q = sum of squares and
/// M2 = twice the median, `(mean - median)^2 > (3/20)^2 * sample variance`
/// becomes `400 (n - 1) (2S - n M2)^2 > 36 n (n Q - S^2)`.
pub fn skew_ref(v: &[u32]) -> Option<SkewClass> {
    let n = v.len() as i128;
    if v.iter().all(|&x| x == v[0]) {
        return None;
    }
    let s: i128 = v.iter().map(|&x| i128::from(x)).sum();
    let q: i128 = v.iter().map(|&x| i128::from(x) * i128::from(x)).sum();
    let d = 2 * s - n * i128::from(median2(v));
    if 400 * (n - 1) * d * d <= 36 * n * (n * q - s * s) {
        Some(SkewClass::Symmetric)
    } else if d > 0 {
        Some(SkewClass::RightSkewed)
    } else {
        Some(SkewClass::LeftSkewed)
    }
}

/// Fences in quarter units: with a = 2 Q1 and b = 2 Q3, `x < Q1 - 1.5 IQR`
/// is `4x < 5a - 3b` and `x > Q3 + 1.5 IQR` is `4x > 5b - 3a`.
pub fn outliers_ref(v: &[u32]) -> BTreeSet<usize> {
    let mut s: Vec<u32> = v.to_vec();
    s.sort();
    let half = s.len() / 2;
    let (a, b) = if s.len() == 1 {
        (2 * i64::from(s[0]), 2 * i64::from(s[0]))
    } else {
        (median2(&s[..half]), median2(&s[s.len() - half..]))
    };
    v.iter()
        .enumerate()
        .filter(|(_, &x)| {
            let x4 = 4 * i64::from(x);
            x4 < 5 * a - 3 * b || x4 > 5 * b - 3 * a
        })
        .map(|(i, _)| i)
        .collect()
}

/// Random datasets as the generator draws them: length 4..=12, values 0..=99,
/// with a share of clustered data so both rules see non-trivial cases.
pub fn random_dataset(rng: &mut ChaCha8Rng) -> Vec<u32> {
    let len = rng.random_range(4..=12);
    if rng.random_bool(0.5) {
        (0..len).map(|_| rng.random_range(0..=99)).collect()
    } else {
        let c: i64 = rng.random_range(10..=90);
        (0..len)
            .map(|_| {
                let far = rng.random_bool(0.15);
                let off: i64 = if far { rng.random_range(-60..=60) } else { rng.random_range(-5..=5) };
                (c + off).clamp(0, 99) as u32
            })
            .collect()
    }
}

/// Compares find_outliers and classify_skew with the references on `count`
/// random datasets. Returns (outlier sets that were non-empty, non-symmetric
/// skew classes) so callers can see the cases were not all trivial.
pub fn random_rules(seed: u64, count: usize) -> Result<(usize, usize), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut with_outliers, mut skewed) = (0, 0);
    for _ in 0..count {
        let v = random_dataset(&mut rng);
        let got = find_outliers(&v);
        if got != outliers_ref(&v) {
            return Err(format!("find_outliers {v:?}: {got:?} vs {:?}", outliers_ref(&v)));
        }
        with_outliers += usize::from(!got.is_empty());
        let got = classify_skew(&v).ok();
        if got != skew_ref(&v) {
            return Err(format!("classify_skew {v:?}: {got:?} vs {:?}", skew_ref(&v)));
        }
        skewed += usize::from(matches!(got, Some(SkewClass::LeftSkewed | SkewClass::RightSkewed)));
    }
    Ok((with_outliers, skewed))
}
