//! Data-literacy questions with exact answer keys, and grading.

mod generate;
pub mod stats;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use generate::gen_question;
pub use stats::{
    classify_skew, classify_skew_with, find_outliers, format_rational, mean, median, mode, quartiles, Rational,
    SkewClass,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ContentError {
    #[error("dataset must have 4 to 12 values, got {0}")]
    DatasetLength(usize),
    #[error("dataset value {0} outside [0, 99]")]
    DatasetValue(u32),
    #[error("all values are equal; skew is undefined")]
    DegenerateDistribution,
    #[error("payload does not determine an answer among the options: {0}")]
    UnkeyedPayload(String),
}

/// 4 to 12 integers in `[0, 99]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Dataset(Vec<u32>);

impl Dataset {
    pub const MIN_LEN: usize = 4;
    pub const MAX_LEN: usize = 12;
    pub const MAX_VALUE: u32 = 99;

    pub fn new(values: Vec<u32>) -> Result<Self, ContentError> {
        if !(Self::MIN_LEN..=Self::MAX_LEN).contains(&values.len()) {
            return Err(ContentError::DatasetLength(values.len()));
        }
        if let Some(&v) = values.iter().find(|&&v| v > Self::MAX_VALUE) {
            return Err(ContentError::DatasetValue(v));
        }
        Ok(Dataset(values))
    }

    pub fn values(&self) -> &[u32] {
        &self.0
    }

    /// `v -> (max + min) - v`, which swaps left and right skew.
    pub fn reflected(&self) -> Dataset {
        let lo = *self.0.iter().min().expect("non-empty");
        let hi = *self.0.iter().max().expect("non-empty");
        Dataset(self.0.iter().map(|&v| lo + hi - v).collect())
    }
}

impl TryFrom<Vec<u32>> for Dataset {
    type Error = ContentError;
    fn try_from(v: Vec<u32>) -> Result<Self, ContentError> {
        Dataset::new(v)
    }
}

impl From<Dataset> for Vec<u32> {
    fn from(d: Dataset) -> Vec<u32> {
        d.0
    }
}

impl std::ops::Deref for Dataset {
    type Target = [u32];
    fn deref(&self) -> &[u32] {
        &self.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuestionKind {
    Mean,
    Median,
    Mode,
    SkewClass,
    OutlierPick,
    CoordinatePoint,
    NumericCount,
}

impl QuestionKind {
    pub const ALL: [QuestionKind; 7] = [
        QuestionKind::Mean,
        QuestionKind::Median,
        QuestionKind::Mode,
        QuestionKind::SkewClass,
        QuestionKind::OutlierPick,
        QuestionKind::CoordinatePoint,
        QuestionKind::NumericCount,
    ];
}

/// A point on the coordinate-quest grid. Serialized as `[x, y]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[u8; 2]", into = "[u8; 2]")]
pub struct GridPoint {
    pub x: u8,
    pub y: u8,
}

impl GridPoint {
    pub fn new(x: u8, y: u8) -> Self {
        GridPoint { x, y }
    }
}

impl From<[u8; 2]> for GridPoint {
    fn from([x, y]: [u8; 2]) -> Self {
        GridPoint { x, y }
    }
}

impl From<GridPoint> for [u8; 2] {
    fn from(p: GridPoint) -> Self {
        [p.x, p.y]
    }
}

/// How a counting question turns its data into a number.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum CountRule {
    /// How many values are strictly greater than `threshold`.
    Above { threshold: u32 },
    /// How many times `value` appears.
    Occurrences { value: u32 },
    /// The (unique) mode itself.
    Mode,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "task", rename_all = "snake_case")]
pub enum GridTask {
    /// Go straight to a stated point.
    Direct { point: GridPoint },
    /// x is the median of `x_values`, y is the mode of `y_values`.
    Statistics { x_values: Vec<u32>, y_values: Vec<u32> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Payload {
    Data {
        values: Dataset,
    },
    /// Raw data plus equal-width histogram counts of it, for display.
    Histogram {
        values: Dataset,
        bin_width: u32,
        bins: Vec<u32>,
    },
    Count {
        values: Vec<u32>,
        rule: CountRule,
    },
    Grid {
        size: u8,
        task: GridTask,
    },
}

/// Typed value behind an option label.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OptionValue {
    #[serde(with = "rational_text")]
    Number(Rational),
    Skew(SkewClass),
    /// One entry of the payload dataset.
    Entry {
        index: usize,
        value: u32,
    },
    Count(u32),
    Point(GridPoint),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnswerOption {
    pub label: String,
    pub value: OptionValue,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnswerKey {
    Options(BTreeSet<usize>),
    Integer(u32),
    Point(GridPoint),
}

/// A learner's answer; the shape must match the question kind.
pub type Response = AnswerKey;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Question {
    pub id: u32,
    pub kind: QuestionKind,
    pub difficulty: u8,
    pub prompt: String,
    pub payload: Payload,
    pub options: Vec<AnswerOption>,
    pub correct: AnswerKey,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("response shape does not match a {kind:?} question")]
pub struct ShapeError {
    pub kind: QuestionKind,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradeResult {
    pub correct: bool,
    pub expected: AnswerKey,
    pub received: Response,
}

impl Question {
    pub fn with_id(mut self, id: u32) -> Self {
        self.id = id;
        self
    }

    pub fn dataset(&self) -> Option<&Dataset> {
        match &self.payload {
            Payload::Data { values } | Payload::Histogram { values, .. } => Some(values),
            _ => None,
        }
    }

    /// Recomputes the answer key from the payload and options alone.
    pub fn derive_key(&self) -> Result<AnswerKey, ContentError> {
        derive_key(self.kind, &self.payload, &self.options)
    }

    /// Option indices that are correct; empty for integer and point keys.
    pub fn correct_options(&self) -> BTreeSet<usize> {
        match &self.correct {
            AnswerKey::Options(s) => s.clone(),
            AnswerKey::Integer(n) => self.option_indices(|v| *v == OptionValue::Count(*n)),
            AnswerKey::Point(p) => self.option_indices(|v| *v == OptionValue::Point(*p)),
        }
    }

    fn option_indices(&self, pred: impl Fn(&OptionValue) -> bool) -> BTreeSet<usize> {
        self.options.iter().enumerate().filter(|(_, o)| pred(&o.value)).map(|(i, _)| i).collect()
    }

    /// Checks the structural invariants every question must satisfy.
    pub fn check_invariants(&self) -> Result<(), String> {
        let correct = self.correct_options();
        if correct.is_empty() {
            return Err("no correct option".into());
        }
        if correct.iter().any(|&i| i >= self.options.len()) {
            return Err("correct index out of range".into());
        }
        if correct.len() == self.options.len() {
            return Err("no incorrect option to avoid".into());
        }
        let labels: BTreeSet<&str> = self.options.iter().map(|o| o.label.as_str()).collect();
        if labels.len() != self.options.len() && self.kind != QuestionKind::OutlierPick {
            return Err("duplicate option labels".into());
        }
        match self.derive_key() {
            Ok(k) if k == self.correct => Ok(()),
            Ok(k) => Err(format!("key mismatch: stored {:?}, derived {:?}", self.correct, k)),
            Err(e) => Err(e.to_string()),
        }
    }
}

fn index_of(options: &[AnswerOption], want: &OptionValue) -> Result<usize, ContentError> {
    options
        .iter()
        .position(|o| &o.value == want)
        .ok_or_else(|| ContentError::UnkeyedPayload(format!("{want:?} is not an option")))
}

/// Answer key computed from the payload with this module's own statistics.
pub fn derive_key(kind: QuestionKind, payload: &Payload, options: &[AnswerOption]) -> Result<AnswerKey, ContentError> {
    let one = |i| AnswerKey::Options(BTreeSet::from([i]));
    match (kind, payload) {
        (QuestionKind::Mean, Payload::Data { values }) => {
            Ok(one(index_of(options, &OptionValue::Number(mean(values)))?))
        }
        (QuestionKind::Median, Payload::Data { values }) => {
            Ok(one(index_of(options, &OptionValue::Number(median(values)))?))
        }
        (QuestionKind::Mode, Payload::Data { values }) => {
            let m = mode(values).ok_or_else(|| ContentError::UnkeyedPayload("no unique mode".into()))?;
            let want = OptionValue::Number(Rational::from_integer(i64::from(m)));
            Ok(one(index_of(options, &want)?))
        }
        (QuestionKind::SkewClass, Payload::Histogram { values, .. } | Payload::Data { values }) => {
            Ok(one(index_of(options, &OptionValue::Skew(classify_skew(values)?))?))
        }
        (QuestionKind::OutlierPick, Payload::Data { values }) => {
            let out = find_outliers(values);
            let keyed: Result<BTreeSet<usize>, _> =
                out.iter().map(|&i| index_of(options, &OptionValue::Entry { index: i, value: values[i] })).collect();
            Ok(AnswerKey::Options(keyed?))
        }
        (QuestionKind::NumericCount, Payload::Count { values, rule }) => {
            let n = match rule {
                CountRule::Above { threshold } => values.iter().filter(|&&v| v > *threshold).count() as u32,
                CountRule::Occurrences { value } => values.iter().filter(|&&v| v == *value).count() as u32,
                CountRule::Mode => mode(values).ok_or_else(|| ContentError::UnkeyedPayload("no unique mode".into()))?,
            };
            Ok(AnswerKey::Integer(n))
        }
        (QuestionKind::CoordinatePoint, Payload::Grid { task, .. }) => {
            let p = match task {
                GridTask::Direct { point } => *point,
                GridTask::Statistics { x_values, y_values } => {
                    let x = median(x_values);
                    let y = mode(y_values).ok_or_else(|| ContentError::UnkeyedPayload("no unique mode".into()))?;
                    if !x.is_integer() {
                        return Err(ContentError::UnkeyedPayload("median is not a grid line".into()));
                    }
                    GridPoint::new(x.to_integer() as u8, y as u8)
                }
            };
            Ok(AnswerKey::Point(p))
        }
        (kind, payload) => Err(ContentError::UnkeyedPayload(format!("{kind:?} cannot be keyed from {payload:?}"))),
    }
}

/// Grades a response. Outlier picks are graded by exact set equality with the
/// recomputed outliers, not with the stored key.
pub fn grade(q: &Question, response: &Response) -> Result<GradeResult, ShapeError> {
    let shape_ok = matches!(
        (q.kind, response),
        (QuestionKind::NumericCount, AnswerKey::Integer(_))
            | (QuestionKind::CoordinatePoint, AnswerKey::Point(_))
            | (
                QuestionKind::Mean
                    | QuestionKind::Median
                    | QuestionKind::Mode
                    | QuestionKind::SkewClass
                    | QuestionKind::OutlierPick,
                AnswerKey::Options(_)
            )
    );
    if !shape_ok {
        return Err(ShapeError { kind: q.kind });
    }
    let expected = match q.kind {
        QuestionKind::OutlierPick => q.derive_key().unwrap_or_else(|_| q.correct.clone()),
        _ => q.correct.clone(),
    };
    Ok(GradeResult { correct: &expected == response, expected, received: response.clone() })
}

mod rational_text {
    use super::Rational;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        if r.is_integer() {
            s.serialize_str(&r.to_integer().to_string())
        } else {
            s.serialize_str(&format!("{}/{}", r.numer(), r.denom()))
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        let parse = |s: &str| s.trim().parse::<i64>().map_err(D::Error::custom);
        match text.split_once('/') {
            Some((n, den)) => {
                let den = parse(den)?;
                if den == 0 {
                    return Err(D::Error::custom("zero denominator"));
                }
                Ok(Rational::new(parse(n)?, den))
            }
            None => Ok(Rational::from_integer(parse(&text)?)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct BankError {
    pub line: usize,
    pub message: String,
}

/// One question per line; blank lines and `#` comments are skipped. Every
/// question must pass [`Question::check_invariants`], so a stored key that
/// disagrees with its payload is rejected.
pub fn read_bank(text: &str) -> Result<Vec<Question>, BankError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: String| BankError { line: i + 1, message };
        let q: Question = serde_json::from_str(line).map_err(|e| err(e.to_string()))?;
        q.check_invariants().map_err(err)?;
        out.push(q);
    }
    Ok(out)
}

pub fn write_bank<'a>(questions: impl IntoIterator<Item = &'a Question>) -> String {
    let mut out = String::new();
    for q in questions {
        out.push_str(&serde_json::to_string(q).expect("question serializes"));
        out.push('\n');
    }
    out
}
