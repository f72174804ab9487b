//! Model selection on the validation window and the final forecast report.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::candidate::{Candidate, CandidateNames};
use crate::models::{fit, FittedModel, ModelError, ModelSpec};
use crate::numeric::exact_sum;
use crate::supervise::{recursive_forecast, Split, SupervisedSet};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("sequences differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("no values to compare")]
    Empty,
    #[error("R² needs at least two points")]
    TooShort,
    #[error("reference series is constant")]
    ConstantReference,
    #[error("no model specs supplied")]
    NoCandidates,
    #[error("every model spec failed to fit: {0}")]
    AllFailed(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("report does not recompute: {0}")]
    Inconsistent(String),
}

/// Mean absolute error, in the units of the inputs.
pub fn mae(predicted: &[f64], actual: &[f64]) -> Result<f64, EvalError> {
    if predicted.len() != actual.len() {
        return Err(EvalError::LengthMismatch(predicted.len(), actual.len()));
    }
    if predicted.is_empty() {
        return Err(EvalError::Empty);
    }
    Ok(exact_sum(predicted.iter().zip(actual).map(|(p, a)| (p - a).abs())) / predicted.len() as f64)
}

/// `1 − SS_res/SS_tot` about the mean of `reference`; may be negative.
pub fn r_squared(predicted: &[f64], reference: &[f64]) -> Result<f64, EvalError> {
    if predicted.len() != reference.len() {
        return Err(EvalError::LengthMismatch(predicted.len(), reference.len()));
    }
    if reference.len() < 2 {
        return Err(EvalError::TooShort);
    }
    let m = exact_sum(reference.iter().copied()) / reference.len() as f64;
    let ss_tot = exact_sum(reference.iter().map(|r| (r - m) * (r - m)));
    if ss_tot == 0.0 {
        return Err(EvalError::ConstantReference);
    }
    let ss_res = exact_sum(predicted.iter().zip(reference).map(|(p, r)| (p - r) * (p - r)));
    Ok(1.0 - ss_res / ss_tot)
}

/// Validation outcome of one spec.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpecOutcome {
    pub model: String,
    pub spec: ModelSpec,
    pub validation_mae: Option<f64>,
    pub validation_predictions: Vec<f64>,
    /// Why the spec was disqualified, if it was.
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    pub outcomes: Vec<SpecOutcome>,
    pub selected: usize,
}

impl Selection {
    pub fn selected_spec(&self) -> ModelSpec {
        self.outcomes[self.selected].spec
    }

    pub fn selected_outcome(&self) -> &SpecOutcome {
        &self.outcomes[self.selected]
    }
}

fn anchor_of(set: &SupervisedSet) -> f64 {
    *set.y.last().expect("non-empty training set")
}

/// Fits each spec on `train`, forecasts `val` recursively from the last
/// training target and keeps the lowest MAE. Ties go to the earlier spec;
/// failing specs are recorded and skipped.
pub fn pick_model(specs: &[ModelSpec], train: &SupervisedSet, val: &SupervisedSet, standardize: bool) -> Result<Selection, EvalError> {
    if specs.is_empty() {
        return Err(EvalError::NoCandidates);
    }
    if train.is_empty() || val.is_empty() {
        return Err(EvalError::Empty);
    }
    let x = train.x_matrix();
    let y = train.y_vector();
    let anchor = anchor_of(train);
    let features = val.feature_rows();
    let mut outcomes = Vec::with_capacity(specs.len());
    let mut selected: Option<(f64, usize)> = None;
    for (idx, spec) in specs.iter().enumerate() {
        let attempt = fit(spec, &x, &y, standardize)
            .and_then(|m| recursive_forecast(&m, &features, anchor))
            .map_err(EvalError::from)
            .and_then(|p| mae(&p, &val.y).map(|e| (p, e)));
        let outcome = match attempt {
            Ok((predictions, err)) if err.is_finite() => {
                if selected.is_none_or(|(best, _)| err < best) {
                    selected = Some((err, idx));
                }
                SpecOutcome {
                    model: spec.name().to_string(),
                    spec: *spec,
                    validation_mae: Some(err),
                    validation_predictions: predictions,
                    error: None,
                }
            }
            Ok(_) => disqualified(spec, "non-finite validation error".into()),
            Err(e) => disqualified(spec, e.to_string()),
        };
        outcomes.push(outcome);
    }
    match selected {
        Some((_, idx)) => Ok(Selection { outcomes, selected: idx }),
        None => Err(EvalError::AllFailed(
            outcomes.iter().filter_map(|o| o.error.clone()).collect::<Vec<_>>().join("; "),
        )),
    }
}

fn disqualified(spec: &ModelSpec, reason: String) -> SpecOutcome {
    log::warn!("{} disqualified: {reason}", spec.name());
    SpecOutcome {
        model: spec.name().to_string(),
        spec: *spec,
        validation_mae: None,
        validation_predictions: Vec::new(),
        error: Some(reason),
    }
}

/// Refit on train + validation and forecast the test window recursively.
pub fn forecast_test(spec: &ModelSpec, split: &Split, standardize: bool) -> Result<(FittedModel, Vec<f64>), EvalError> {
    let full = split.train_val();
    let model = fit(spec, &full.x_matrix(), &full.y_vector(), standardize)?;
    let predictions = recursive_forecast(&model, &split.test.feature_rows(), anchor_of(&full))?;
    Ok((model, predictions))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateReport {
    pub candidate: Candidate,
    pub name: String,
    pub selected_model: String,
    pub validation_mae: f64,
    pub validation_table: Vec<SpecOutcome>,
    pub training_rows: usize,
    pub test_dates: Vec<NaiveDate>,
    pub test_predictions: Vec<f64>,
    /// Aggregate polling over the test window.
    pub polling_reference: Vec<f64>,
    /// Mean absolute error of the test forecasts against `polling_reference`.
    pub test_mae_vs_polling: f64,
    pub r_squared_vs_polling: Option<f64>,
    pub election_day_prediction: f64,
    pub actual_share: Option<f64>,
}

impl CandidateReport {
    fn polling_election_day(&self) -> f64 {
        *self.polling_reference.last().expect("non-empty test window")
    }
}

/// Everything the final evaluation reports, in a self-checking form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastReport {
    pub candidates: Vec<CandidateReport>,
    pub winner_predicted: Candidate,
    pub winner_predicted_name: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub winner_correct: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub mae_vs_actual: Option<f64>,
    pub mean_r2_vs_polling: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub baseline_mae: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub delta_vs_baseline: Option<f64>,
    pub metadata: ReportMetadata,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMetadata {
    pub input_columns: Vec<String>,
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub config_hash: Option<String>,
}

impl Default for ReportMetadata {
    fn default() -> Self {
        Self {
            input_columns: crate::supervise::input_columns().iter().map(|s| s.to_string()).collect(),
            notes: vec![
                "validation forecasts are recursive, anchored at the last training-day share".into(),
                "mean_r2_vs_polling is the arithmetic mean of per-candidate R² over the test window".into(),
                "baseline_mae compares election-day aggregate polling with the supplied actual shares".into(),
            ],
            config_hash: None,
        }
    }
}

/// Headline comparison against the polling baseline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Headline {
    pub mae_vs_actual: f64,
    pub baseline_mae: f64,
    pub delta_vs_baseline: f64,
}

impl Headline {
    pub fn new(mae_vs_actual: f64, baseline_mae: f64) -> Self {
        Self { mae_vs_actual, baseline_mae, delta_vs_baseline: mae_vs_actual - baseline_mae }
    }

    pub fn render(&self) -> String {
        format!(
            "MAE vs actual {:.2} pp, polling baseline {:.2} pp, delta {:+.2} pp",
            self.mae_vs_actual, self.baseline_mae, self.delta_vs_baseline
        )
    }
}

/// Per-candidate inputs to [`build_report`].
#[derive(Debug, Clone)]
pub struct CandidateOutcome {
    pub candidate: Candidate,
    pub selection: Selection,
    pub training_rows: usize,
    pub test_dates: Vec<NaiveDate>,
    pub test_predictions: Vec<f64>,
    pub polling_reference: Vec<f64>,
}

/// Winner call, metrics and baseline comparison from per-candidate forecasts.
/// `actual` holds user-supplied vote shares indexed `[A, B]`.
pub fn build_report(
    outcomes: Vec<CandidateOutcome>,
    names: &CandidateNames,
    actual: [Option<f64>; 2],
    metadata: ReportMetadata,
) -> Result<ForecastReport, EvalError> {
    let mut candidates = Vec::with_capacity(outcomes.len());
    for o in outcomes {
        let election_day_prediction = *o.test_predictions.last().ok_or(EvalError::Empty)?;
        let r2 = match r_squared(&o.test_predictions, &o.polling_reference) {
            Ok(v) => Some(v),
            Err(EvalError::ConstantReference | EvalError::TooShort) => None,
            Err(e) => return Err(e),
        };
        let test_mae = mae(&o.test_predictions, &o.polling_reference)?;
        let chosen = o.selection.selected_outcome();
        candidates.push(CandidateReport {
            candidate: o.candidate,
            name: names.name(o.candidate).to_string(),
            selected_model: chosen.model.clone(),
            validation_mae: chosen.validation_mae.expect("selected spec has a score"),
            validation_table: o.selection.outcomes.clone(),
            training_rows: o.training_rows,
            test_dates: o.test_dates,
            test_predictions: o.test_predictions,
            polling_reference: o.polling_reference,
            test_mae_vs_polling: test_mae,
            r_squared_vs_polling: r2,
            election_day_prediction,
            actual_share: actual[o.candidate.index()],
        });
    }
    let mut report = ForecastReport {
        candidates,
        winner_predicted: Candidate::A,
        winner_predicted_name: String::new(),
        winner_correct: None,
        mae_vs_actual: None,
        mean_r2_vs_polling: None,
        baseline_mae: None,
        delta_vs_baseline: None,
        metadata,
    };
    report.recompute(names)?;
    Ok(report)
}

impl ForecastReport {
    fn derived(&self, names: &CandidateNames) -> Result<ForecastReport, EvalError> {
        let mut out = self.clone();
        let share = |c: Candidate| self.candidates.iter().find(|r| r.candidate == c).map(|r| r.election_day_prediction);
        let (a, b) = (share(Candidate::A), share(Candidate::B));
        out.winner_predicted = match (a, b) {
            (Some(a), Some(b)) if b > a => Candidate::B,
            (None, Some(_)) => Candidate::B,
            _ => Candidate::A,
        };
        out.winner_predicted_name = names.name(out.winner_predicted).to_string();

        let r2: Vec<f64> = self.candidates.iter().filter_map(|c| c.r_squared_vs_polling).collect();
        out.mean_r2_vs_polling = (!r2.is_empty() && r2.len() == self.candidates.len())
            .then(|| exact_sum(r2.iter().copied()) / r2.len() as f64);

        let actuals: Option<Vec<f64>> = self.candidates.iter().map(|c| c.actual_share).collect();
        match actuals {
            Some(actual) if !actual.is_empty() => {
                let predicted: Vec<f64> = self.candidates.iter().map(|c| c.election_day_prediction).collect();
                let polling: Vec<f64> = self.candidates.iter().map(|c| c.polling_election_day()).collect();
                let headline = Headline::new(mae(&predicted, &actual)?, mae(&polling, &actual)?);
                out.mae_vs_actual = Some(headline.mae_vs_actual);
                out.baseline_mae = Some(headline.baseline_mae);
                out.delta_vs_baseline = Some(headline.delta_vs_baseline);
                out.winner_correct = match (actual.len(), self.candidates.as_slice()) {
                    (2, [x, y]) => {
                        let actual_winner = if y.actual_share > x.actual_share { y.candidate } else { x.candidate };
                        Some(actual_winner == out.winner_predicted)
                    }
                    _ => None,
                };
            }
            _ => {
                out.mae_vs_actual = None;
                out.baseline_mae = None;
                out.delta_vs_baseline = None;
                out.winner_correct = None;
            }
        }
        Ok(out)
    }

    fn recompute(&mut self, names: &CandidateNames) -> Result<(), EvalError> {
        *self = self.derived(names)?;
        Ok(())
    }

    /// Checks every derived field against a recomputation from the per-day values.
    pub fn verify(&self, names: &CandidateNames) -> Result<(), EvalError> {
        for c in &self.candidates {
            if c.test_predictions.last() != Some(&c.election_day_prediction) {
                return Err(EvalError::Inconsistent(format!("{} election-day prediction", c.name)));
            }
            if mae(&c.test_predictions, &c.polling_reference).ok() != Some(c.test_mae_vs_polling) {
                return Err(EvalError::Inconsistent(format!("{} test MAE", c.name)));
            }
            let r2 = r_squared(&c.test_predictions, &c.polling_reference).ok();
            if r2 != c.r_squared_vs_polling {
                return Err(EvalError::Inconsistent(format!("{} R²", c.name)));
            }
        }
        let expected = self.derived(names)?;
        if &expected != self {
            return Err(EvalError::Inconsistent("aggregate fields".into()));
        }
        Ok(())
    }

    pub fn headline(&self) -> Option<Headline> {
        Some(Headline::new(self.mae_vs_actual?, self.baseline_mae?))
    }

    /// Aligned human-readable summary.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.candidates {
            out.push_str(&format!(
                "{} ({}): selected {} | validation MAE {:.4} | trained on {} rows\n",
                c.name, c.candidate, c.selected_model, c.validation_mae, c.training_rows
            ));
            out.push_str(&format!("  {:<14} {:>12}\n", "model", "val_mae"));
            for o in &c.validation_table {
                let score = match (o.validation_mae, &o.error) {
                    (Some(v), _) => format!("{v:.4}"),
                    (None, Some(e)) => format!("failed: {e}"),
                    (None, None) => "-".into(),
                };
                out.push_str(&format!("  {:<14} {:>12}\n", o.model, score));
            }
            out.push_str(&format!("  {:<12} {:>10} {:>10}\n", "date", "predicted", "polling"));
            for ((d, p), r) in c.test_dates.iter().zip(&c.test_predictions).zip(&c.polling_reference) {
                out.push_str(&format!("  {:<12} {:>10.3} {:>10.3}\n", d.to_string(), p, r));
            }
            let r2 = c.r_squared_vs_polling.map_or("n/a".to_string(), |v| format!("{v:.4}"));
            out.push_str(&format!(
                "  election day {:.3}, test MAE vs polling {:.3}, R² vs polling {r2}\n",
                c.election_day_prediction, c.test_mae_vs_polling
            ));
        }
        out.push_str(&format!("winner predicted: {}\n", self.winner_predicted_name));
        if let Some(ok) = self.winner_correct {
            out.push_str(&format!("winner correct: {ok}\n"));
        }
        match self.mean_r2_vs_polling {
            Some(v) => out.push_str(&format!("mean R² vs polling: {v:.4}\n")),
            None => out.push_str("mean R² vs polling: n/a\n"),
        }
        if let Some(h) = self.headline() {
            out.push_str(&h.render());
            out.push('\n');
        }
        out
    }
}
