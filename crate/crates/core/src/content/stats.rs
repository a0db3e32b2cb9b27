//! Exact statistics used to derive answer keys. No floating point.

use std::collections::BTreeSet;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::ContentError;

pub type Rational = Ratio<i64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SkewClass {
    LeftSkewed,
    Symmetric,
    RightSkewed,
}

impl SkewClass {
    pub fn mirrored(self) -> SkewClass {
        match self {
            SkewClass::LeftSkewed => SkewClass::RightSkewed,
            SkewClass::Symmetric => SkewClass::Symmetric,
            SkewClass::RightSkewed => SkewClass::LeftSkewed,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            SkewClass::LeftSkewed => "Left-Skewed",
            SkewClass::Symmetric => "Symmetric",
            SkewClass::RightSkewed => "Right-Skewed",
        }
    }
}

/// Default materiality margin, in standard deviations, for the skew rule.
pub fn default_skew_epsilon() -> Rational {
    Rational::new(3, 20)
}

fn sorted(values: &[u32]) -> Vec<i64> {
    let mut v: Vec<i64> = values.iter().map(|&x| i64::from(x)).collect();
    v.sort_unstable();
    v
}

fn median_sorted(v: &[i64]) -> Rational {
    let n = v.len();
    if n % 2 == 1 {
        Rational::from_integer(v[n / 2])
    } else {
        Rational::new(v[n / 2 - 1] + v[n / 2], 2)
    }
}

/// Panics on an empty slice.
pub fn mean(values: &[u32]) -> Rational {
    assert!(!values.is_empty(), "mean of empty data");
    let sum: i64 = values.iter().map(|&x| i64::from(x)).sum();
    Rational::new(sum, values.len() as i64)
}

/// Midpoint of the two central order statistics for even lengths. Panics on
/// an empty slice.
pub fn median(values: &[u32]) -> Rational {
    assert!(!values.is_empty(), "median of empty data");
    median_sorted(&sorted(values))
}

/// The most frequent value, or `None` when the top multiplicity is tied.
pub fn mode(values: &[u32]) -> Option<u32> {
    let v = sorted(values);
    let mut best: Option<(i64, usize)> = None;
    let mut tied = false;
    let mut i = 0;
    while i < v.len() {
        let j = v[i..].iter().take_while(|&&x| x == v[i]).count();
        match best {
            Some((_, n)) if j == n => tied = true,
            Some((_, n)) if j < n => {}
            _ => {
                best = Some((v[i], j));
                tied = false;
            }
        }
        i += j;
    }
    match best {
        Some((value, _)) if !tied => Some(value as u32),
        _ => None,
    }
}

/// Sample variance (divisor `n - 1`). Panics on fewer than two values.
pub fn variance(values: &[u32]) -> Rational {
    assert!(values.len() > 1, "variance needs two values");
    let m = mean(values);
    let sum: Rational = values
        .iter()
        .map(|&x| {
            let d = Rational::from_integer(i64::from(x)) - m;
            d * d
        })
        .sum();
    sum / Rational::from_integer(values.len() as i64 - 1)
}

/// First and third quartiles by the median-of-halves rule; for odd lengths the
/// overall median belongs to neither half.
pub fn quartiles(values: &[u32]) -> (Rational, Rational) {
    let v = sorted(values);
    let n = v.len();
    assert!(n > 0, "quartiles of empty data");
    if n == 1 {
        let m = Rational::from_integer(v[0]);
        return (m, m);
    }
    let half = n / 2;
    let lower = &v[..half];
    let upper = &v[n - half..];
    (median_sorted(lower), median_sorted(upper))
}

pub fn classify_skew(values: &[u32]) -> Result<SkewClass, ContentError> {
    classify_skew_with(values, default_skew_epsilon())
}

/// Right-skewed iff `mean - median > epsilon * sd`, left-skewed iff
/// `median - mean > epsilon * sd`, symmetric otherwise. Compared as squares so
/// the sample standard deviation never needs a square root.
pub fn classify_skew_with(values: &[u32], epsilon: Rational) -> Result<SkewClass, ContentError> {
    if values.is_empty() || values.iter().all(|&v| v == values[0]) {
        return Err(ContentError::DegenerateDistribution);
    }
    let diff = mean(values) - median(values);
    let material = diff * diff > epsilon * epsilon * variance(values);
    Ok(match (material, diff > Rational::from_integer(0)) {
        (false, _) => SkewClass::Symmetric,
        (true, true) => SkewClass::RightSkewed,
        (true, false) => SkewClass::LeftSkewed,
    })
}

/// Indices of values outside the 1.5 IQR fences.
pub fn find_outliers(values: &[u32]) -> BTreeSet<usize> {
    if values.is_empty() {
        return BTreeSet::new();
    }
    let (q1, q3) = quartiles(values);
    let reach = (q3 - q1) * Rational::new(3, 2);
    let lo = q1 - reach;
    let hi = q3 + reach;
    values
        .iter()
        .enumerate()
        .filter(|(_, &v)| {
            let v = Rational::from_integer(i64::from(v));
            v < lo || v > hi
        })
        .map(|(i, _)| i)
        .collect()
}

/// Short decimal label: `12`, `12.5`, or `37/3` when neither applies.
pub fn format_rational(r: Rational) -> String {
    if r.is_integer() {
        r.to_integer().to_string()
    } else if *r.denom() == 2 {
        let twice = *r.numer();
        let sign = if twice < 0 { "-" } else { "" };
        format!("{sign}{}.5", twice.abs() / 2)
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}
