//! Lag-1 sliding-window datasets, chronological splits and recursive forecasts.

use std::collections::BTreeMap;

use chrono::{Duration, NaiveDate};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::features::{FeatureFrame, FEATURE_COLUMNS, PREV_POLL_COLUMN};
use crate::ingest::PollSnapshot;
use crate::models::{ModelError, Predictor};

/// Number of model inputs: five features plus the lagged poll.
pub const N_INPUTS: usize = 6;

/// Column order of every supervised matrix.
pub fn input_columns() -> [&'static str; N_INPUTS] {
    [
        FEATURE_COLUMNS[0],
        FEATURE_COLUMNS[1],
        FEATURE_COLUMNS[2],
        FEATURE_COLUMNS[3],
        FEATURE_COLUMNS[4],
        PREV_POLL_COLUMN,
    ]
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SuperviseError {
    #[error("no polling target for {0}")]
    MissingTarget(NaiveDate),
    #[error("split {n_train}/{n_val}/{n_test} does not cover {len} rows")]
    SpecMismatch { n_train: usize, n_val: usize, n_test: usize, len: usize },
    #[error("every split part needs at least one row")]
    EmptyPart,
}

/// What the model is asked to predict.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TargetMode {
    /// Polling share on the day.
    #[default]
    Level,
    /// Day-over-day change in polling share.
    Difference,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupervisedSet {
    pub dates: Vec<NaiveDate>,
    pub x: Vec<[f64; N_INPUTS]>,
    pub y: Vec<f64>,
}

impl SupervisedSet {
    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }

    pub fn x_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.len(), N_INPUTS, |r, c| self.x[r][c])
    }

    pub fn y_vector(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.y)
    }

    /// The five feature inputs of each row, without the lag.
    pub fn feature_rows(&self) -> Vec<[f64; 5]> {
        self.x.iter().map(|r| [r[0], r[1], r[2], r[3], r[4]]).collect()
    }

    pub fn slice(&self, range: std::ops::Range<usize>) -> SupervisedSet {
        SupervisedSet {
            dates: self.dates[range.clone()].to_vec(),
            x: self.x[range.clone()].to_vec(),
            y: self.y[range].to_vec(),
        }
    }

    /// Row-wise concatenation of `self` followed by `other`.
    pub fn concat(&self, other: &SupervisedSet) -> SupervisedSet {
        let mut out = self.clone();
        out.dates.extend_from_slice(&other.dates);
        out.x.extend_from_slice(&other.x);
        out.y.extend_from_slice(&other.y);
        out
    }
}

/// Model inputs of every frame row: five features then the lagged poll.
pub fn input_rows(frame: &FeatureFrame) -> Vec<[f64; N_INPUTS]> {
    frame
        .rows
        .iter()
        .zip(&frame.prev_poll)
        .map(|(row, &lag)| {
            let f = row.features();
            [f[0], f[1], f[2], f[3], f[4], lag]
        })
        .collect()
}

/// Pairs each frame row with its target from `polls`.
pub fn make_sliding_window(frame: &FeatureFrame, polls: &[PollSnapshot], mode: TargetMode) -> Result<SupervisedSet, SuperviseError> {
    let table: BTreeMap<NaiveDate, f64> = polls.iter().map(|p| (p.date, p.share(frame.candidate))).collect();
    let mut set = SupervisedSet { dates: Vec::new(), x: Vec::new(), y: Vec::new() };
    for (row, &lag) in frame.rows.iter().zip(&frame.prev_poll) {
        let today = *table.get(&row.date).ok_or(SuperviseError::MissingTarget(row.date))?;
        let target = match mode {
            TargetMode::Level => today,
            TargetMode::Difference => {
                let before = row.date - Duration::days(1);
                today - *table.get(&before).ok_or(SuperviseError::MissingTarget(before))?
            }
        };
        let f = row.features();
        set.dates.push(row.date);
        set.x.push([f[0], f[1], f[2], f[3], f[4], lag]);
        set.y.push(target);
    }
    Ok(set)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub n_train: usize,
    pub n_val: usize,
    pub n_test: usize,
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self { n_train: 12, n_val: 3, n_test: 4 }
    }
}

impl SplitSpec {
    pub fn total(&self) -> usize {
        self.n_train + self.n_val + self.n_test
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Split {
    pub train: SupervisedSet,
    pub val: SupervisedSet,
    pub test: SupervisedSet,
}

impl Split {
    /// Training plus validation rows, used for the final refit.
    pub fn train_val(&self) -> SupervisedSet {
        self.train.concat(&self.val)
    }
}

/// Chronological train/validation/test partition.
pub fn split(set: &SupervisedSet, spec: SplitSpec) -> Result<Split, SuperviseError> {
    if spec.n_train == 0 || spec.n_val == 0 || spec.n_test == 0 {
        return Err(SuperviseError::EmptyPart);
    }
    if spec.total() != set.len() {
        return Err(SuperviseError::SpecMismatch {
            n_train: spec.n_train,
            n_val: spec.n_val,
            n_test: spec.n_test,
            len: set.len(),
        });
    }
    let a = spec.n_train;
    let b = a + spec.n_val;
    Ok(Split {
        train: set.slice(0..a),
        val: set.slice(a..b),
        test: set.slice(b..set.len()),
    })
}

/// Multi-step forecast where each day's lag input is the previous prediction.
///
/// Day one uses `anchor`. Only feature rows are accepted, so realized
/// targets of the horizon cannot leak in.
pub fn recursive_forecast<P: Predictor + ?Sized>(model: &P, features: &[[f64; 5]], anchor: f64) -> Result<Vec<f64>, ModelError> {
    let mut lag = anchor;
    let mut out = Vec::with_capacity(features.len());
    for f in features {
        let x = [f[0], f[1], f[2], f[3], f[4], lag];
        lag = model.predict_one(&x)?;
        out.push(lag);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::candidate::Candidate;
    use crate::features::DailyFeatureRow;

    fn d(i: i64) -> NaiveDate {
        NaiveDate::from_ymd_opt(2020, 10, 1).unwrap() + Duration::days(i)
    }

    fn set(n: usize) -> SupervisedSet {
        SupervisedSet {
            dates: (0..n as i64).map(d).collect(),
            x: (0..n).map(|i| [i as f64; N_INPUTS]).collect(),
            y: (0..n).map(|i| i as f64).collect(),
        }
    }

    #[test]
    fn split_shapes() {
        let s = split(&set(19), SplitSpec::default()).unwrap();
        assert_eq!((s.train.len(), s.val.len(), s.test.len()), (12, 3, 4));
        assert_eq!(s.train_val().len(), 15);
        let s = split(&set(3), SplitSpec { n_train: 1, n_val: 1, n_test: 1 }).unwrap();
        assert_eq!((s.train.dates[0], s.val.dates[0], s.test.dates[0]), (d(0), d(1), d(2)));
        assert!(matches!(
            split(&set(19), SplitSpec { n_train: 12, n_val: 3, n_test: 5 }),
            Err(SuperviseError::SpecMismatch { .. })
        ));
    }

    #[test]
    fn split_concatenation_is_input() {
        let input = set(19);
        let s = split(&input, SplitSpec::default()).unwrap();
        assert_eq!(s.train_val().concat(&s.test), input);
    }

    #[test]
    fn recursive_fixed_point_and_induction() {
        let identity = |x: &[f64]| x[5];
        assert_eq!(recursive_forecast(&identity, &[[0.0; 5]; 4], 51.3).unwrap(), vec![51.3; 4]);
        let plus_one = |x: &[f64]| x[5] + 1.0;
        assert_eq!(recursive_forecast(&plus_one, &[[0.0; 5]; 4], 50.0).unwrap(), vec![51.0, 52.0, 53.0, 54.0]);
    }

    #[test]
    fn horizon_one_is_single_prediction() {
        let model = |x: &[f64]| 0.5 * x[0] - x[3] + 0.9 * x[5];
        let f = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(
            recursive_forecast(&model, &[f], 50.0).unwrap(),
            vec![model(&[1.0, 2.0, 3.0, 4.0, 5.0, 50.0])]
        );
    }

    #[test]
    fn sliding_window_targets() {
        let frame = FeatureFrame {
            candidate: Candidate::B,
            rows: vec![DailyFeatureRow::from_features(d(1), [1.0, 2.0, 3.0, 4.0, 5.0])],
            prev_poll: vec![47.0],
        };
        let polls = [
            PollSnapshot { date: d(0), shares: [52.0, 47.0] },
            PollSnapshot { date: d(1), shares: [51.5, 47.5] },
        ];
        let s = make_sliding_window(&frame, &polls, TargetMode::Level).unwrap();
        assert_eq!(s.x, vec![[1.0, 2.0, 3.0, 4.0, 5.0, 47.0]]);
        assert_eq!(s.y, vec![47.5]);
        let s = make_sliding_window(&frame, &polls, TargetMode::Difference).unwrap();
        assert_eq!(s.y, vec![0.5]);
        assert_eq!(
            make_sliding_window(&frame, &polls[..1], TargetMode::Level),
            Err(SuperviseError::MissingTarget(d(1)))
        );
    }
}
