//! Run configuration: a flat TOML or JSON file, overridden by flags.

use std::path::{Path, PathBuf};

use ballotwire::models::ModelSpec;
use ballotwire::stationarity::AdfOptions;
use ballotwire::synth::{EngagementLaw, SynthSpec};
use ballotwire::{CandidateNames, DateRange, PipelineOptions, SplitSpec};
use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub tweets_a: Option<PathBuf>,
    pub tweets_b: Option<PathBuf>,
    pub posts_a: Option<PathBuf>,
    pub posts_b: Option<PathBuf>,
    pub polls: Option<PathBuf>,
    /// Replacement sentiment lexicon; the bundled one is used otherwise.
    pub lexicon: Option<PathBuf>,
    pub candidate_a: String,
    pub candidate_b: String,
    pub start: Option<NaiveDate>,
    pub end: Option<NaiveDate>,
    pub n_train: usize,
    pub n_val: usize,
    pub n_test: usize,
    /// Replaces the default five-model registry.
    pub models: Option<Vec<ModelSpec>>,
    pub alpha: f64,
    pub fill_polls: bool,
    pub fill_engagement: bool,
    pub standardize: bool,
    pub difference_all: bool,
    pub strict: bool,
    pub actual_share_a: Option<f64>,
    pub actual_share_b: Option<f64>,
    /// Never serialized, so it stays out of the config hash.
    #[serde(skip_serializing)]
    pub out_dir: PathBuf,
    pub seed: u64,
    pub synth_days: usize,
    pub synth_law: EngagementLaw,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        let names = CandidateNames::default();
        let split = SplitSpec::default();
        Self {
            tweets_a: None,
            tweets_b: None,
            posts_a: None,
            posts_b: None,
            polls: None,
            lexicon: None,
            candidate_a: names.name(ballotwire::Candidate::A).to_string(),
            candidate_b: names.name(ballotwire::Candidate::B).to_string(),
            start: None,
            end: None,
            n_train: split.n_train,
            n_val: split.n_val,
            n_test: split.n_test,
            models: None,
            alpha: AdfOptions::default().alpha,
            fill_polls: false,
            fill_engagement: false,
            standardize: false,
            difference_all: false,
            strict: false,
            actual_share_a: None,
            actual_share_b: None,
            out_dir: PathBuf::from("out"),
            seed: SynthSpec::default().seed,
            synth_days: SynthSpec::default().n_days,
            synth_law: EngagementLaw::default(),
        }
    }
}

impl PipelineConfig {
    /// Reads `path` as JSON when it ends in `.json`, TOML otherwise.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
        let mut config: Self = if is_json {
            serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
        } else {
            toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
        };
        // Relative input paths are taken from the config file's directory.
        if let Some(dir) = path.parent() {
            for p in [&mut config.tweets_a, &mut config.tweets_b, &mut config.posts_a, &mut config.posts_b, &mut config.polls, &mut config.lexicon]
                .into_iter()
                .flatten()
            {
                if p.is_relative() {
                    *p = dir.join(&*p);
                }
            }
        }
        Ok(config)
    }

    pub fn names(&self) -> CandidateNames {
        CandidateNames::new(&self.candidate_a, &self.candidate_b)
    }

    pub fn range(&self) -> Result<Option<DateRange>, CliError> {
        match (self.start, self.end) {
            (Some(s), Some(e)) if s <= e => Ok(Some(DateRange::new(s, e))),
            (Some(s), Some(e)) => Err(CliError::Config(format!("start {s} is after end {e}"))),
            (None, None) => Ok(None),
            _ => Err(CliError::Config("start and end must be given together".into())),
        }
    }

    /// Synthetic mode: no input files are configured.
    pub fn is_synthetic(&self) -> bool {
        self.input_paths().iter().all(|p| p.is_none())
    }

    fn input_paths(&self) -> [&Option<PathBuf>; 5] {
        [&self.tweets_a, &self.tweets_b, &self.posts_a, &self.posts_b, &self.polls]
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(CliError::Config(format!("alpha must be in (0, 1), got {}", self.alpha)));
        }
        if self.candidate_a.trim().is_empty() || self.candidate_b.trim().is_empty() || self.candidate_a == self.candidate_b {
            return Err(CliError::Config("candidate names must be distinct and non-empty".into()));
        }
        if self.n_train == 0 || self.n_val == 0 || self.n_test == 0 {
            return Err(CliError::Config("every split part needs at least one row".into()));
        }
        if let Some(specs) = &self.models {
            if specs.is_empty() {
                return Err(CliError::Config("models must list at least one spec".into()));
            }
            for s in specs {
                s.validate().map_err(|e| CliError::Config(format!("{}: {e}", s.name())))?;
            }
        }
        if !self.is_synthetic() {
            const KEYS: [&str; 5] = ["tweets_a", "tweets_b", "posts_a", "posts_b", "polls"];
            for (key, path) in KEYS.iter().zip(self.input_paths()) {
                match path {
                    None => return Err(CliError::Config(format!("`{key}` is required when any input file is given"))),
                    Some(p) if !p.exists() => return Err(CliError::Config(format!("{key}: {} does not exist", p.display()))),
                    _ => {}
                }
            }
        }
        if let Some(p) = &self.lexicon {
            if !p.exists() {
                return Err(CliError::Config(format!("lexicon: {} does not exist", p.display())));
            }
        }
        self.range()?;
        Ok(())
    }

    /// SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }

    pub fn synth_spec(&self) -> SynthSpec {
        let mut spec = SynthSpec { seed: self.seed, n_days: self.synth_days, law: self.synth_law, ..Default::default() };
        if let Some(start) = self.start {
            spec.start = start;
        }
        spec
    }

    pub fn pipeline_options(&self) -> Result<PipelineOptions, CliError> {
        Ok(PipelineOptions {
            range: self.range()?,
            names: self.names(),
            split: SplitSpec { n_train: self.n_train, n_val: self.n_val, n_test: self.n_test },
            specs: self.models.clone().unwrap_or_else(|| ModelSpec::registry().to_vec()),
            adf: AdfOptions { alpha: self.alpha, ..Default::default() },
            fill_polls: self.fill_polls,
            fill_engagement: self.fill_engagement,
            standardize: self.standardize,
            difference_all: self.difference_all,
            actual_shares: [self.actual_share_a, self.actual_share_b],
            config_hash: Some(self.hash()),
        })
    }
}
