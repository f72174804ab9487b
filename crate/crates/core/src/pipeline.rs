//! End-to-end run: corpus in, forecast report out.

use std::collections::BTreeMap;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::candidate::{Candidate, CandidateNames};
use crate::evaluate::{build_report, forecast_test, pick_model, CandidateOutcome, EvalError, ForecastReport, ReportMetadata};
use crate::features::{aggregate_candidate_engagement, aggregate_hashtag_tweets, assemble_frame, AssembleOptions, FeatureError, FeatureFrame};
use crate::ingest::{fill_polls, Corpus, DateRange, IngestError, PollSnapshot};
use crate::models::{FittedModel, ModelSpec};
use crate::plot::{report_svg, PlotError};
use crate::sentiment::SentimentAnalyzer;
use crate::stationarity::{apply_differencing, frame_stationarity_report, integrate, AdfOptions, DifferencingMode, StationarityError, StationarityReport};
use crate::supervise::{make_sliding_window, split, Split, SplitSpec, SuperviseError, SupervisedSet, TargetMode};
use crate::synth::{gen_corpus, SynthError, SynthSpec};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error(transparent)]
    Stationarity(#[from] StationarityError),
    #[error(transparent)]
    Supervise(#[from] SuperviseError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Plot(#[from] PlotError),
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error("cannot infer a date range from an empty corpus")]
    NoDateRange,
    #[error("date range has {days} days but the split needs {needed} (one extra day is consumed by differencing)")]
    RangeMismatch { days: usize, needed: usize },
    #[error("no polling value for {0}")]
    MissingPoll(NaiveDate),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineOptions {
    /// Modeled days; `None` uses the corpus range, then the span of its tweets.
    pub range: Option<DateRange>,
    pub names: CandidateNames,
    pub split: SplitSpec,
    pub specs: Vec<ModelSpec>,
    pub adf: AdfOptions,
    pub fill_polls: bool,
    pub fill_engagement: bool,
    pub standardize: bool,
    /// Difference the lagged poll too and model day-over-day poll changes.
    pub difference_all: bool,
    /// Realized vote shares `[A, B]`.
    pub actual_shares: [Option<f64>; 2],
    pub config_hash: Option<String>,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        Self {
            range: None,
            names: CandidateNames::default(),
            split: SplitSpec::default(),
            specs: ModelSpec::registry().to_vec(),
            adf: AdfOptions::default(),
            fill_polls: false,
            fill_engagement: false,
            standardize: false,
            difference_all: false,
            actual_shares: [None, None],
            config_hash: None,
        }
    }
}

impl PipelineOptions {
    fn differencing(&self) -> DifferencingMode {
        if self.difference_all {
            DifferencingMode::All
        } else {
            DifferencingMode::FeaturesOnly
        }
    }

    fn target(&self) -> TargetMode {
        if self.difference_all {
            TargetMode::Difference
        } else {
            TargetMode::Level
        }
    }
}

/// Every intermediate product of one run.
#[derive(Debug, Clone)]
pub struct PipelineRun {
    pub range: DateRange,
    pub polls: Vec<PollSnapshot>,
    pub filled_poll_days: Vec<NaiveDate>,
    /// Frames in levels, one per candidate.
    pub frames: Vec<FeatureFrame>,
    pub differenced: Vec<FeatureFrame>,
    pub stationarity: StationarityReport,
    pub supervised: Vec<SupervisedSet>,
    pub splits: Vec<Split>,
    /// Selected spec per candidate, refit on training plus validation rows.
    pub models: Vec<FittedModel>,
    pub report: ForecastReport,
}

impl PipelineRun {
    pub fn report_json(&self) -> String {
        serde_json::to_string_pretty(&self.report).expect("report serializes") + "\n"
    }

    pub fn svg(&self) -> Result<String, PlotError> {
        let comments: Vec<String> = self.report.metadata.config_hash.iter().map(|h| format!("config sha256 {h}")).collect();
        report_svg(&self.report, &comments)
    }
}

/// Range to model when none is given.
pub fn infer_range(corpus: &Corpus) -> Result<DateRange, PipelineError> {
    if let Some(r) = corpus.date_range {
        return Ok(r);
    }
    let mut days = corpus.tweets.iter().map(|t| t.created_at.date_naive());
    let first = days.next().ok_or(PipelineError::NoDateRange)?;
    let (lo, hi) = days.fold((first, first), |(lo, hi), d| (lo.min(d), hi.max(d)));
    Ok(DateRange::new(lo, hi))
}

/// Scores the corpus and builds one level frame per candidate.
pub fn build_frames(
    corpus: &Corpus,
    analyzer: &SentimentAnalyzer,
    polls: &[PollSnapshot],
    range: &DateRange,
    fill_engagement: bool,
) -> Result<Vec<FeatureFrame>, FeatureError> {
    let mut frames = Vec::with_capacity(2);
    for c in Candidate::ALL {
        let sums = aggregate_hashtag_tweets(corpus.tweets_for(c), |text| analyzer.compound(text));
        let means = aggregate_candidate_engagement(corpus.posts_for(c));
        frames.push(assemble_frame(&sums, &means, polls, c, range, AssembleOptions { fill_engagement })?);
    }
    Ok(frames)
}

pub fn run_pipeline(corpus: &Corpus, analyzer: &SentimentAnalyzer, options: &PipelineOptions) -> Result<PipelineRun, PipelineError> {
    let range = match options.range {
        Some(r) => r,
        None => infer_range(corpus)?,
    };
    let needed = options.split.total() + 1;
    if range.len() != needed {
        return Err(PipelineError::RangeMismatch { days: range.len(), needed });
    }
    let (polls, filled_poll_days) = if options.fill_polls {
        fill_polls(&corpus.polls, &range)?
    } else {
        (corpus.polls.clone(), Vec::new())
    };
    if !filled_poll_days.is_empty() {
        log::warn!("carried polling forward over {} day(s)", filled_poll_days.len());
    }
    let poll_table: BTreeMap<NaiveDate, [f64; 2]> = polls.iter().map(|p| (p.date, p.shares)).collect();

    let frames = build_frames(corpus, analyzer, &polls, &range, options.fill_engagement)?;
    let stationarity = frame_stationarity_report(&frames, &options.adf)?;
    log::info!(
        "stationary feature columns: {} of {} in levels, {} after differencing",
        stationarity.stationary_before(),
        stationarity.columns.len(),
        stationarity.stationary_after()
    );

    let mut differenced = Vec::with_capacity(2);
    let mut supervised = Vec::with_capacity(2);
    let mut splits = Vec::with_capacity(2);
    let mut models = Vec::with_capacity(2);
    let mut outcomes = Vec::with_capacity(2);
    for frame in &frames {
        let c = frame.candidate;
        let diffed = apply_differencing(frame, options.differencing())?;
        let set = make_sliding_window(&diffed, &polls, options.target())?;
        let parts = split(&set, options.split)?;
        let selection = pick_model(&options.specs, &parts.train, &parts.val, options.standardize)?;
        let (model, raw) = forecast_test(&selection.selected_spec(), &parts, options.standardize)?;
        let level = |d: NaiveDate| poll_table.get(&d).map(|s| s[c.index()]).ok_or(PipelineError::MissingPoll(d));
        let test_predictions = match options.target() {
            TargetMode::Level => raw,
            TargetMode::Difference => {
                let before = parts.test.dates[0].pred_opt().expect("valid date");
                integrate(level(before)?, &raw)[1..].to_vec()
            }
        };
        let polling_reference = parts.test.dates.iter().map(|&d| level(d)).collect::<Result<Vec<_>, _>>()?;
        outcomes.push(CandidateOutcome {
            candidate: c,
            selection,
            training_rows: parts.train.len() + parts.val.len(),
            test_dates: parts.test.dates.clone(),
            test_predictions,
            polling_reference,
        });
        models.push(model);
        differenced.push(diffed);
        supervised.push(set);
        splits.push(parts);
    }

    let mut metadata = ReportMetadata { config_hash: options.config_hash.clone(), ..Default::default() };
    if options.difference_all {
        metadata.notes.push("targets are day-over-day poll changes; test forecasts are integrated back to levels".into());
    }
    if !filled_poll_days.is_empty() {
        metadata.notes.push(format!("polling carried forward over {} day(s)", filled_poll_days.len()));
    }
    let report = build_report(outcomes, &options.names, options.actual_shares, metadata)?;
    Ok(PipelineRun { range, polls, filled_poll_days, frames, differenced, stationarity, supervised, splits, models, report })
}

/// Generates a synthetic corpus and runs the pipeline on it. Missing actual
/// shares are taken from the generator's realized outcome.
pub fn run_synthetic(spec: &SynthSpec, options: &PipelineOptions) -> Result<(Corpus, PipelineRun), PipelineError> {
    let (corpus, outcome) = gen_corpus(spec)?;
    let mut options = options.clone();
    options.range.get_or_insert(spec.range());
    for c in Candidate::ALL {
        options.actual_shares[c.index()].get_or_insert(outcome[c.index()]);
    }
    let run = run_pipeline(&corpus, &SentimentAnalyzer::bundled(), &options)?;
    Ok((corpus, run))
}
