//! Social-media polling forecasts.
//!
//! The pipeline scores tweet text with a lexicon-and-rules sentiment engine,
//! folds sentiment and engagement into daily per-candidate feature frames,
//! tests and differences the feature series for stationarity, turns the
//! frames into a lag-1 supervised problem, picks one of five regressors on a
//! validation window and forecasts polling share recursively through
//! election day.
//!
//! Every stage is a plain function over immutable records, so the whole run
//! is a deterministic function of its inputs and configuration.

pub mod evaluate;
pub mod features;
pub mod ingest;
pub mod models;
pub mod numeric;
pub mod pipeline;
pub mod plot;
pub mod sentiment;
pub mod stationarity;
pub mod supervise;
pub mod synth;

mod candidate;

pub use candidate::{Candidate, CandidateNames};
pub use evaluate::{ForecastReport, Selection};
pub use features::{DailyFeatureRow, FeatureFrame};
pub use ingest::{CandidatePost, Corpus, DateRange, PollSnapshot, RawTweet};
pub use models::{FittedModel, ModelSpec, Predictor};
pub use pipeline::{PipelineOptions, PipelineRun};
pub use sentiment::{Lexicon, SentimentAnalyzer, SentimentScore};
pub use stationarity::AdfResult;
pub use supervise::{SplitSpec, SupervisedSet};
