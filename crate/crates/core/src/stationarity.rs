//! Augmented Dickey-Fuller unit-root tests and first differencing.
//!
//! Lag selection and p-values follow the conventions of the statsmodels
//! `adfuller` routine: AIC over lags `0..=max_lag` fitted on a common sample,
//! then a refit at the chosen lag on the longest available sample, with
//! p-values from MacKinnon's (1994) response-surface approximation.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::candidate::Candidate;
use crate::features::{DailyFeatureRow, FeatureFrame, FEATURE_COLUMNS};
use crate::numeric::ols;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StationarityError {
    #[error("series of length {len} is too short (need at least {needed})")]
    SeriesTooShort { len: usize, needed: usize },
    #[error("series is constant")]
    ConstantSeries,
    #[error("series contains non-finite values")]
    NonFinite,
    #[error("regression design is singular")]
    DegenerateRegression,
    #[error("{candidate} column {column}: {source}")]
    Column {
        candidate: Candidate,
        column: &'static str,
        #[source]
        source: Box<StationarityError>,
    },
}

/// Deterministic terms in the test regression.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AdfRegression {
    /// No constant.
    #[serde(rename = "n")]
    None,
    /// Constant only.
    #[default]
    #[serde(rename = "c")]
    Constant,
    /// Constant and linear trend.
    #[serde(rename = "ct")]
    ConstantTrend,
}

impl AdfRegression {
    fn n_terms(self) -> usize {
        match self {
            AdfRegression::None => 0,
            AdfRegression::Constant => 1,
            AdfRegression::ConstantTrend => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdfOptions {
    /// Largest lag considered; `None` uses `⌈12·(n/100)^¼⌉` capped by sample size.
    pub max_lag: Option<usize>,
    pub alpha: f64,
    pub regression: AdfRegression,
}

impl Default for AdfOptions {
    fn default() -> Self {
        Self {
            max_lag: None,
            alpha: 0.05,
            regression: AdfRegression::Constant,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdfResult {
    pub statistic: f64,
    pub p_value: f64,
    pub lag_used: usize,
    pub n_obs: usize,
    pub reject_unit_root: bool,
}

/// Default lag ceiling for a series of length `n`.
pub fn default_max_lag(n: usize, regression: AdfRegression) -> Option<usize> {
    let schwert = (12.0 * (n as f64 / 100.0).powf(0.25)).ceil() as i64;
    let cap = (n / 2) as i64 - regression.n_terms() as i64 - 1;
    let lag = schwert.min(cap);
    (lag >= 0).then_some(lag as usize)
}

/// Builds `[trend terms..., y_{t−1}, Δy_{t−1}, ..., Δy_{t−lags}]` over the last `nobs` rows.
fn design(series: &[f64], diffs: &[f64], lags: usize, nobs: usize, regression: AdfRegression) -> (DMatrix<f64>, DVector<f64>) {
    let n_terms = regression.n_terms();
    let cols = n_terms + 1 + lags;
    let first = diffs.len() - nobs;
    let x = DMatrix::from_fn(nobs, cols, |r, c| {
        let t = first + r;
        match c {
            c if c < n_terms => {
                if c == 0 {
                    1.0
                } else {
                    (r + 1) as f64
                }
            }
            c if c == n_terms => series[t],
            c => diffs[t - (c - n_terms)],
        }
    });
    let y = DVector::from_iterator(nobs, diffs[first..].iter().copied());
    (x, y)
}

/// The ADF test for a unit root in `series`.
pub fn adf_test(series: &[f64], options: &AdfOptions) -> Result<AdfResult, StationarityError> {
    let n = series.len();
    if series.iter().any(|v| !v.is_finite()) {
        return Err(StationarityError::NonFinite);
    }
    let needed = options.max_lag.unwrap_or(0) + 4;
    if n < needed {
        return Err(StationarityError::SeriesTooShort { len: n, needed });
    }
    let (min, max) = series
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    if min == max {
        return Err(StationarityError::ConstantSeries);
    }
    let regression = options.regression;
    let cap = default_max_lag(n, regression).ok_or(StationarityError::SeriesTooShort { len: n, needed })?;
    let max_lag = match options.max_lag {
        Some(m) if m > cap => {
            return Err(StationarityError::SeriesTooShort {
                len: n,
                needed: 2 * (m + regression.n_terms() + 1),
            })
        }
        Some(m) => m,
        None => cap,
    };

    let diffs: Vec<f64> = series.windows(2).map(|w| w[1] - w[0]).collect();
    let common = n - 1 - max_lag;
    let mut best: Option<(f64, usize)> = None;
    for lags in 0..=max_lag {
        let (x, y) = design(series, &diffs, lags, common, regression);
        let Some(fit) = ols(&x, &y) else { continue };
        let aic = fit.aic();
        if best.is_none_or(|(b, _)| aic < b) {
            best = Some((aic, lags));
        }
    }
    let (_, lag) = best.ok_or(StationarityError::DegenerateRegression)?;

    let nobs = n - 1 - lag;
    let (x, y) = design(series, &diffs, lag, nobs, regression);
    let fit = ols(&x, &y).ok_or(StationarityError::DegenerateRegression)?;
    let statistic = fit.t_value(regression.n_terms());
    if !statistic.is_finite() {
        return Err(StationarityError::DegenerateRegression);
    }
    let p_value = mackinnon_p(statistic, regression);
    Ok(AdfResult {
        statistic,
        p_value,
        lag_used: lag,
        n_obs: nobs,
        reject_unit_root: p_value < options.alpha,
    })
}

struct Surface {
    tau_star: f64,
    tau_min: f64,
    tau_max: f64,
    small: [f64; 3],
    large: [f64; 4],
}

const SMALL_SCALING: [f64; 3] = [1.0, 1.0, 1e-2];
const LARGE_SCALING: [f64; 4] = [1.0, 1e-1, 1e-1, 1e-2];

// MacKinnon, J.G. (1994) "Approximate asymptotic distribution functions for
// unit-root and cointegration tests", JBES 12, 167-176; one-variable rows.
fn surface(regression: AdfRegression) -> Surface {
    match regression {
        AdfRegression::None => Surface {
            tau_star: -1.04,
            tau_min: -19.04,
            tau_max: f64::INFINITY,
            small: [0.6344, 1.2378, 3.2496],
            large: [0.4797, 9.3557, -0.6999, 3.3066],
        },
        AdfRegression::Constant => Surface {
            tau_star: -1.61,
            tau_min: -18.83,
            tau_max: 2.74,
            small: [2.1659, 1.4412, 3.8269],
            large: [1.7339, 9.3202, -1.2745, -1.0368],
        },
        AdfRegression::ConstantTrend => Surface {
            tau_star: -2.89,
            tau_min: -16.18,
            tau_max: 0.7,
            small: [3.2512, 1.6047, 4.9588],
            large: [2.5261, 6.1654, -3.7956, -6.0285],
        },
    }
}

fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// Asymptotic p-value of an ADF statistic.
pub fn mackinnon_p(statistic: f64, regression: AdfRegression) -> f64 {
    let s = surface(regression);
    if statistic > s.tau_max {
        return 1.0;
    }
    if statistic < s.tau_min {
        return 0.0;
    }
    let coefs: Vec<f64> = if statistic <= s.tau_star {
        s.small.iter().zip(SMALL_SCALING).map(|(c, k)| c * k).collect()
    } else {
        s.large.iter().zip(LARGE_SCALING).map(|(c, k)| c * k).collect()
    };
    // Horner from the highest power down, as numpy's polyval does.
    let poly = coefs.iter().rev().fold(0.0, |acc, c| acc * statistic + c);
    normal_cdf(poly)
}

/// Applies first differences `order` times.
pub fn difference(series: &[f64], order: usize) -> Result<Vec<f64>, StationarityError> {
    if series.len() <= order {
        return Err(StationarityError::SeriesTooShort {
            len: series.len(),
            needed: order + 1,
        });
    }
    let mut out = series.to_vec();
    for _ in 0..order {
        out = out.windows(2).map(|w| w[1] - w[0]).collect();
    }
    Ok(out)
}

/// Inverse of a single difference: cumulative sum starting at `anchor`.
pub fn integrate(anchor: f64, diffs: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(diffs.len() + 1);
    out.push(anchor);
    let mut level = anchor;
    for d in diffs {
        level += d;
        out.push(level);
    }
    out
}

/// Which frame columns a differencing pass touches.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DifferencingMode {
    /// Feature columns only; the lagged poll stays in levels.
    #[default]
    FeaturesOnly,
    /// Feature columns and the lagged poll.
    All,
}

/// One differencing pass over a frame; the first row is dropped.
pub fn apply_differencing(frame: &FeatureFrame, mode: DifferencingMode) -> Result<FeatureFrame, StationarityError> {
    if frame.len() < 2 {
        return Err(StationarityError::SeriesTooShort { len: frame.len(), needed: 2 });
    }
    let rows = frame
        .rows
        .windows(2)
        .map(|w| {
            let (a, b) = (w[0].features(), w[1].features());
            let mut f = [0.0; 5];
            for j in 0..5 {
                f[j] = b[j] - a[j];
            }
            DailyFeatureRow::from_features(w[1].date, f)
        })
        .collect();
    let prev_poll = match mode {
        DifferencingMode::FeaturesOnly => frame.prev_poll[1..].to_vec(),
        DifferencingMode::All => frame.prev_poll.windows(2).map(|w| w[1] - w[0]).collect(),
    };
    Ok(FeatureFrame {
        candidate: frame.candidate,
        rows,
        prev_poll,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnStationarity {
    pub candidate: Candidate,
    pub column: String,
    pub levels: AdfResult,
    pub differenced: AdfResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StationarityReport {
    pub alpha: f64,
    pub columns: Vec<ColumnStationarity>,
}

impl StationarityReport {
    pub fn stationary_before(&self) -> usize {
        self.columns.iter().filter(|c| c.levels.reject_unit_root).count()
    }

    pub fn stationary_after(&self) -> usize {
        self.columns.iter().filter(|c| c.differenced.reject_unit_root).count()
    }

    pub fn non_stationary_before(&self) -> usize {
        self.columns.len() - self.stationary_before()
    }

    pub fn non_stationary_after(&self) -> usize {
        self.columns.len() - self.stationary_after()
    }

    /// Aligned plain-text table.
    pub fn render(&self) -> String {
        let mut out = format!(
            "{:<10} {:<28} {:>10} {:>8} {:>4} {:>10} {:>8} {:>8}\n",
            "candidate", "column", "stat", "p", "lag", "diff_stat", "diff_p", "diff_lag"
        );
        for c in &self.columns {
            out.push_str(&format!(
                "{:<10} {:<28} {:>10.4} {:>8.4} {:>4} {:>10.4} {:>8.4} {:>8}\n",
                c.candidate.to_string(),
                c.column,
                c.levels.statistic,
                c.levels.p_value,
                c.levels.lag_used,
                c.differenced.statistic,
                c.differenced.p_value,
                c.differenced.lag_used
            ));
        }
        out.push_str(&format!(
            "stationary at alpha={}: {}/{} in levels, {}/{} after one difference\n",
            self.alpha,
            self.stationary_before(),
            self.columns.len(),
            self.stationary_after(),
            self.columns.len()
        ));
        out
    }
}

/// Tests every feature column of each frame in levels and after one difference.
pub fn frame_stationarity_report(frames: &[FeatureFrame], options: &AdfOptions) -> Result<StationarityReport, StationarityError> {
    let mut columns = Vec::new();
    for frame in frames {
        for (j, name) in FEATURE_COLUMNS.iter().enumerate() {
            let wrap = |e: StationarityError| StationarityError::Column {
                candidate: frame.candidate,
                column: name,
                source: Box::new(e),
            };
            let series = frame.column(j);
            let levels = adf_test(&series, options).map_err(wrap)?;
            let differenced = adf_test(&difference(&series, 1).map_err(wrap)?, options).map_err(wrap)?;
            columns.push(ColumnStationarity {
                candidate: frame.candidate,
                column: name.to_string(),
                levels,
                differenced,
            });
        }
    }
    Ok(StationarityReport {
        alpha: options.alpha,
        columns,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn difference_examples() {
        assert_eq!(difference(&[3.0, 5.0, 4.0], 1).unwrap(), vec![2.0, -1.0]);
        assert_eq!(difference(&[7.0; 5], 1).unwrap(), vec![0.0; 4]);
        assert_eq!(difference(&[1.0, 4.0, 9.0, 16.0], 2).unwrap(), vec![2.0, 2.0]);
        assert!(matches!(difference(&[1.0], 1), Err(StationarityError::SeriesTooShort { .. })));
    }

    #[test]
    fn constant_series_is_rejected() {
        assert_eq!(adf_test(&[2.0; 50], &AdfOptions::default()), Err(StationarityError::ConstantSeries));
    }

    #[test]
    fn short_series_is_rejected() {
        let opts = AdfOptions { max_lag: Some(3), ..Default::default() };
        assert!(matches!(adf_test(&[1.0, 2.0, 0.5], &opts), Err(StationarityError::SeriesTooShort { .. })));
    }

    #[test]
    fn default_lag_ceiling() {
        assert_eq!(default_max_lag(200, AdfRegression::Constant), Some(15));
        assert_eq!(default_max_lag(100, AdfRegression::Constant), Some(12));
        assert_eq!(default_max_lag(19, AdfRegression::Constant), Some(7));
        assert_eq!(default_max_lag(3, AdfRegression::Constant), None);
    }

    #[test]
    fn p_value_table_edges() {
        assert_eq!(mackinnon_p(3.0, AdfRegression::Constant), 1.0);
        assert_eq!(mackinnon_p(-20.0, AdfRegression::Constant), 0.0);
        // Known 5% critical value for the constant case, n → ∞.
        let p = mackinnon_p(-2.8621, AdfRegression::Constant);
        assert!((p - 0.05).abs() < 2e-3, "{p}");
    }

    #[test]
    fn normal_cdf_reference_points() {
        assert_eq!(normal_cdf(0.0), 0.5);
        assert!((normal_cdf(1.959963984540054) - 0.975).abs() < 1e-15);
    }

    #[test]
    fn frame_differencing_modes() {
        let d0 = chrono::NaiveDate::from_ymd_opt(2020, 10, 15).unwrap();
        let frame = FeatureFrame {
            candidate: Candidate::A,
            rows: (0..3)
                .map(|i| DailyFeatureRow::from_features(d0 + chrono::Duration::days(i), [i as f64, 1.0, 2.0 * i as f64, 0.0, 5.0]))
                .collect(),
            prev_poll: vec![50.0, 51.0, 50.5],
        };
        let f = apply_differencing(&frame, DifferencingMode::FeaturesOnly).unwrap();
        assert_eq!(f.len(), 2);
        assert_eq!(f.rows[0].features(), [1.0, 0.0, 2.0, 0.0, 0.0]);
        assert_eq!(f.prev_poll, vec![51.0, 50.5]);
        let f = apply_differencing(&frame, DifferencingMode::All).unwrap();
        assert_eq!(f.prev_poll, vec![1.0, -0.5]);
        assert!(apply_differencing(&frame.slice(0..1), DifferencingMode::All).is_err());
        assert_eq!(apply_differencing(&frame.slice(0..2), DifferencingMode::All).unwrap().len(), 1);
    }

    proptest! {
        #[test]
        fn difference_then_integrate_is_identity(values in proptest::collection::vec(-1_000_000i64..1_000_000, 2..60)) {
            let series: Vec<f64> = values.iter().map(|&v| v as f64).collect();
            let d = difference(&series, 1).unwrap();
            prop_assert_eq!(integrate(series[0], &d), series);
        }

        #[test]
        fn p_value_is_monotone(a in -25.0f64..5.0, b in -25.0f64..5.0) {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            for r in [AdfRegression::None, AdfRegression::Constant] {
                prop_assert!(mackinnon_p(lo, r) <= mackinnon_p(hi, r));
                let p = mackinnon_p(lo, r);
                prop_assert!((0.0..=1.0).contains(&p));
            }
        }
    }
}
