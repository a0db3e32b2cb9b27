use std::collections::BTreeSet;
use std::ops::RangeInclusive;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::stats::{classify_skew, find_outliers, format_rational, mean, median, mode, Rational, SkewClass};
use super::{
    AnswerKey, AnswerOption, CountRule, Dataset, GridPoint, GridTask, OptionValue, Payload, Question, QuestionKind,
};

/// Grid lines per axis on the coordinate quest.
pub const GRID_SIZE: u8 = 6;
const HISTOGRAM_BINS: u32 = 5;

struct Profile {
    len: RangeInclusive<usize>,
    max: u32,
    count_answer: RangeInclusive<u32>,
}

fn profile(difficulty: u8) -> Profile {
    match difficulty {
        0 | 1 => Profile { len: 4..=6, max: 20, count_answer: 1..=5 },
        2 => Profile { len: 5..=9, max: 50, count_answer: 1..=7 },
        _ => Profile { len: 7..=12, max: 99, count_answer: 1..=10 },
    }
}

fn list(values: &[u32]) -> String {
    values.iter().map(u32::to_string).collect::<Vec<_>>().join(", ")
}

fn number_option(r: Rational) -> AnswerOption {
    AnswerOption { label: format_rational(r), value: OptionValue::Number(r) }
}

/// Correct value plus up to three near-miss distractors, shuffled. `also` holds
/// other statistics of the same data, used as distractors when they differ.
fn numeric_options(rng: &mut ChaCha8Rng, correct: Rational, also: &[Rational]) -> (Vec<AnswerOption>, usize) {
    let zero = Rational::from_integer(0);
    let mut pool: Vec<Rational> = Vec::new();
    for &r in also {
        if r != correct && *r.denom() <= 2 && !pool.contains(&r) {
            pool.push(r);
        }
    }
    pool.shuffle(rng);
    pool.truncate(1);
    let mut near: Vec<Rational> = [-2i64, -1, 1, 2]
        .iter()
        .map(|&d| correct + Rational::from_integer(d))
        .filter(|r| *r >= zero && !pool.contains(r))
        .collect();
    near.shuffle(rng);
    pool.extend(near);
    pool.truncate(3);
    pool.push(correct);
    pool.shuffle(rng);
    let at = pool.iter().position(|&r| r == correct).expect("pushed");
    (pool.into_iter().map(number_option).collect(), at)
}

fn single(at: usize) -> AnswerKey {
    AnswerKey::Options(BTreeSet::from([at]))
}

/// Values with a unique mode `m` of multiplicity `k`.
fn with_unique_mode(rng: &mut ChaCha8Rng, n: usize, m: u32, k: usize, range: RangeInclusive<u32>) -> Vec<u32> {
    let mut values = vec![m; k];
    let mut guard = 0;
    while values.len() < n && guard < 10_000 {
        guard += 1;
        let v = rng.random_range(range.clone());
        if v == m || values.iter().filter(|&&x| x == v).count() + 1 >= k {
            continue;
        }
        values.push(v);
    }
    values.shuffle(rng);
    values
}

fn gen_mean_or_median(rng: &mut ChaCha8Rng, kind: QuestionKind, difficulty: u8) -> Question {
    let p = profile(difficulty);
    let n = rng.random_range(p.len.clone());
    let mut values: Vec<u32> = (0..n - 1).map(|_| rng.random_range(0..=p.max)).collect();
    // last value keeps the mean an integer at difficulty 1 and a half-integer above
    let denom = if difficulty <= 1 { 1 } else { 2 };
    let sum: u32 = values.iter().sum();
    let fits: Vec<u32> = (0..=p.max).filter(|v| (denom * (sum + v)).is_multiple_of(n as u32)).collect();
    values.push(*fits.choose(rng).expect("range wider than length"));
    values.shuffle(rng);

    let (m, md) = (mean(&values), median(&values));
    let mo = mode(&values).map(|v| Rational::from_integer(i64::from(v)));
    let (correct, word, also) = match kind {
        QuestionKind::Mean => (m, "mean", [Some(md), mo]),
        _ => (md, "median", [Some(m), mo]),
    };
    let also: Vec<Rational> = also.into_iter().flatten().collect();
    let (options, at) = numeric_options(rng, correct, &also);
    Question {
        id: 0,
        kind,
        difficulty,
        prompt: format!("Catch the {word} of: {}", list(&values)),
        payload: Payload::Data { values: Dataset::new(values).expect("generated within bounds") },
        options,
        correct: single(at),
    }
}

fn gen_mode(rng: &mut ChaCha8Rng, difficulty: u8) -> Question {
    let p = profile(difficulty);
    let k = match difficulty {
        0 | 1 => 2,
        2 => rng.random_range(2..=3),
        _ => rng.random_range(2..=4),
    };
    let n = rng.random_range(p.len.clone()).max(k + 2);
    let m = rng.random_range(0..=p.max);
    let values = with_unique_mode(rng, n, m, k, 0..=p.max);
    let correct = Rational::from_integer(i64::from(m));
    let also = [mean(&values), median(&values)];
    let (options, at) = numeric_options(rng, correct, &also);
    Question {
        id: 0,
        kind: QuestionKind::Mode,
        difficulty,
        prompt: format!("Catch the mode of: {}", list(&values)),
        payload: Payload::Data { values: Dataset::new(values).expect("generated within bounds") },
        options,
        correct: single(at),
    }
}

fn right_skewed(rng: &mut ChaCha8Rng, n: usize, max: u32) -> Vec<u32> {
    let tail = rng.random_range(1..=2usize).min(n - 3);
    let body_hi = (max / 4).max(3);
    let mut v: Vec<u32> = (0..n - tail).map(|_| rng.random_range(0..=body_hi)).collect();
    v.extend((0..tail).map(|_| rng.random_range(max / 2..=max)));
    v
}

fn symmetric(rng: &mut ChaCha8Rng, n: usize, max: u32) -> Vec<u32> {
    let c = rng.random_range(max / 4..=3 * max / 4);
    let spread = (max / 4).clamp(1, c.min(max - c));
    let mut v = Vec::with_capacity(n);
    if n % 2 == 1 {
        v.push(c);
    }
    while v.len() < n {
        let d = rng.random_range(0..=spread);
        v.push(c - d);
        v.push(c + d);
    }
    v
}

fn gen_skew(rng: &mut ChaCha8Rng, difficulty: u8) -> Question {
    let p = profile(difficulty);
    let target = *[SkewClass::LeftSkewed, SkewClass::Symmetric, SkewClass::RightSkewed].choose(rng).expect("non-empty");
    let len = (*p.len.start()).max(6)..=(*p.len.end()).max(8);
    let mut values = Vec::new();
    let mut class = None;
    for _ in 0..64 {
        let n = rng.random_range(len.clone());
        let mut v = match target {
            SkewClass::RightSkewed => right_skewed(rng, n, p.max),
            SkewClass::LeftSkewed => right_skewed(rng, n, p.max).into_iter().map(|x| p.max - x).collect(),
            SkewClass::Symmetric => symmetric(rng, n, p.max),
        };
        v.shuffle(rng);
        let got = classify_skew(&v).ok();
        if got.is_some() {
            values = v;
            class = got;
        }
        if got == Some(target) {
            break;
        }
    }
    let class = class.expect("non-degenerate data within 64 draws");
    let bin_width = (p.max + 1).div_ceil(HISTOGRAM_BINS);
    let mut bins = vec![0u32; HISTOGRAM_BINS as usize];
    for &v in &values {
        bins[(v / bin_width) as usize] += 1;
    }
    let options: Vec<AnswerOption> = [SkewClass::LeftSkewed, SkewClass::Symmetric, SkewClass::RightSkewed]
        .into_iter()
        .map(|s| AnswerOption { label: s.label().into(), value: OptionValue::Skew(s) })
        .collect();
    let at = options.iter().position(|o| o.value == OptionValue::Skew(class)).expect("all classes listed");
    Question {
        id: 0,
        kind: QuestionKind::SkewClass,
        difficulty,
        prompt: format!("Which way is this distribution skewed? {}", list(&values)),
        payload: Payload::Histogram { values: Dataset::new(values).expect("generated within bounds"), bin_width, bins },
        options,
        correct: single(at),
    }
}

fn gen_outliers(rng: &mut ChaCha8Rng, difficulty: u8) -> Question {
    let p = profile(difficulty);
    let len = (*p.len.start()).max(5)..=*p.len.end();
    let max_out = match difficulty {
        0 | 1 => 1,
        2 => 2,
        _ => 3,
    };
    loop {
        let n = rng.random_range(len.clone());
        let c: u32 = rng.random_range(25..=70);
        let s: u32 = rng.random_range(2..=6);
        let outliers = rng.random_range(1..=max_out).min(n - 3);
        let mut values: Vec<u32> = (0..n - outliers).map(|_| rng.random_range(c - s..=c + s)).collect();
        for _ in 0..outliers {
            let far = 4 * s + rng.random_range(4..=20);
            let v = if rng.random_bool(0.5) && c + far <= Dataset::MAX_VALUE { c + far } else { c.saturating_sub(far) };
            values.push(v);
        }
        values.shuffle(rng);
        let key = find_outliers(&values);
        if key.is_empty() || key.len() == values.len() {
            continue;
        }
        let options = values
            .iter()
            .enumerate()
            .map(|(index, &value)| AnswerOption {
                label: value.to_string(),
                value: OptionValue::Entry { index, value },
            })
            .collect();
        return Question {
            id: 0,
            kind: QuestionKind::OutlierPick,
            difficulty,
            prompt: format!("Move the outliers out of the box: {}", list(&values)),
            payload: Payload::Data { values: Dataset::new(values).expect("generated within bounds") },
            options,
            correct: AnswerKey::Options(key),
        };
    }
}

fn point_label(p: GridPoint) -> String {
    format!("({}, {})", p.x, p.y)
}

fn gen_coordinate(rng: &mut ChaCha8Rng, difficulty: u8) -> Question {
    let hi = GRID_SIZE - 1;
    let (task, point, prompt) = if difficulty <= 1 {
        let point = GridPoint::new(rng.random_range(0..=hi), rng.random_range(0..=hi));
        (GridTask::Direct { point }, point, format!("Go to the point {}", point_label(point)))
    } else {
        let nx = *[5usize, 7].choose(rng).expect("non-empty");
        let x_values: Vec<u32> = (0..nx).map(|_| rng.random_range(0..=u32::from(hi))).collect();
        let m = rng.random_range(0..=u32::from(hi));
        let ny = rng.random_range(4..=6);
        let y_values = with_unique_mode(rng, ny, m, 2, 0..=u32::from(hi));
        let x = median(&x_values).to_integer() as u8;
        let prompt = format!("Go to x = median of ({}), y = mode of ({})", list(&x_values), list(&y_values));
        (GridTask::Statistics { x_values, y_values }, GridPoint::new(x, m as u8), prompt)
    };
    let (x, y) = (i16::from(point.x), i16::from(point.y));
    let mut pool: Vec<GridPoint> =
        [(x - 1, y), (x + 1, y), (x, y - 1), (x, y + 1), (y, x), (x + 1, y + 1), (x - 1, y - 1)]
            .into_iter()
            .filter(|&(a, b)| (0..=i16::from(hi)).contains(&a) && (0..=i16::from(hi)).contains(&b))
            .map(|(a, b)| GridPoint::new(a as u8, b as u8))
            .filter(|&q| q != point)
            .collect();
    pool.sort();
    pool.dedup();
    pool.shuffle(rng);
    pool.truncate(3);
    pool.push(point);
    pool.shuffle(rng);
    let options =
        pool.into_iter().map(|q| AnswerOption { label: point_label(q), value: OptionValue::Point(q) }).collect();
    Question {
        id: 0,
        kind: QuestionKind::CoordinatePoint,
        difficulty,
        prompt,
        payload: Payload::Grid { size: GRID_SIZE, task },
        options,
        correct: AnswerKey::Point(point),
    }
}

fn gen_count(rng: &mut ChaCha8Rng, difficulty: u8) -> Question {
    let p = profile(difficulty);
    let answer = rng.random_range(p.count_answer.clone());
    let (values, rule, prompt) = match rng.random_range(0..3) {
        0 => {
            let threshold = rng.random_range(5..=15u32);
            let extra = rng.random_range(1..=3);
            let mut v: Vec<u32> = (0..answer).map(|_| rng.random_range(threshold + 1..=threshold + 10)).collect();
            v.extend((0..extra).map(|_| rng.random_range(0..=threshold)));
            v.shuffle(rng);
            let prompt = format!("How many values are greater than {threshold}? {}", list(&v));
            (v, CountRule::Above { threshold }, prompt)
        }
        1 => {
            let value = rng.random_range(0..=20u32);
            let extra = rng.random_range(1..=4);
            let mut v = vec![value; answer as usize];
            while v.len() < answer as usize + extra {
                let x = rng.random_range(0..=20u32);
                if x != value {
                    v.push(x);
                }
            }
            v.shuffle(rng);
            let prompt = format!("How many times does {value} appear? {}", list(&v));
            (v, CountRule::Occurrences { value }, prompt)
        }
        _ => {
            let hi = (*p.count_answer.end()).max(5);
            let k = rng.random_range(2..=3);
            let n = rng.random_range(k + 1..=k + 3);
            let v = with_unique_mode(rng, n, answer, k, 1..=hi);
            let prompt = format!("What is the mode? {}", list(&v));
            (v, CountRule::Mode, prompt)
        }
    };
    let mut nums: Vec<u32> = [answer.wrapping_sub(2), answer.wrapping_sub(1), answer + 1, answer + 2]
        .into_iter()
        .filter(|&c| (1..=answer + 2).contains(&c))
        .collect();
    nums.shuffle(rng);
    nums.truncate(3);
    nums.push(answer);
    nums.sort_unstable();
    let options =
        nums.into_iter().map(|c| AnswerOption { label: c.to_string(), value: OptionValue::Count(c) }).collect();
    Question {
        id: 0,
        kind: QuestionKind::NumericCount,
        difficulty,
        prompt: format!("{prompt} (answer with knee raises)"),
        payload: Payload::Count { values, rule },
        options,
        correct: AnswerKey::Integer(answer),
    }
}

/// Generates a question. Deterministic in `seed`; `difficulty` is clamped to
/// `[1, 3]`. The returned id is 0; callers assign session ids.
pub fn gen_question(seed: u64, kind: QuestionKind, difficulty: u8) -> Question {
    let difficulty = difficulty.clamp(1, 3);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match kind {
        QuestionKind::Mean | QuestionKind::Median => gen_mean_or_median(&mut rng, kind, difficulty),
        QuestionKind::Mode => gen_mode(&mut rng, difficulty),
        QuestionKind::SkewClass => gen_skew(&mut rng, difficulty),
        QuestionKind::OutlierPick => gen_outliers(&mut rng, difficulty),
        QuestionKind::CoordinatePoint => gen_coordinate(&mut rng, difficulty),
        QuestionKind::NumericCount => gen_count(&mut rng, difficulty),
    }
}
