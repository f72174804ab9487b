use ballotwire::evaluate::EvalError;
use ballotwire::features::FeatureError;
use ballotwire::ingest::IngestError;
use ballotwire::pipeline::PipelineError;
use ballotwire::plot::PlotError;
use ballotwire::sentiment::SentimentError;
use ballotwire::stationarity::StationarityError;
use ballotwire::supervise::SuperviseError;
use ballotwire::synth::SynthError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Numeric(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config(_) | CliError::Io { .. } => 1,
            CliError::Data(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }

    /// Stable tag printed as `error[<tag>]: <message>`.
    pub fn tag(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Config(_) => "config",
            CliError::Io { .. } => "io",
            CliError::Data(_) => "data",
            CliError::Numeric(_) => "numeric",
        }
    }

    pub fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.display().to_string(), source }
    }
}

impl From<IngestError> for CliError {
    fn from(e: IngestError) -> Self {
        match e {
            IngestError::Io { source_name, source } => CliError::Io { path: source_name, source },
            other => CliError::Data(other.to_string()),
        }
    }
}

impl From<FeatureError> for CliError {
    fn from(e: FeatureError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<SuperviseError> for CliError {
    fn from(e: SuperviseError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<StationarityError> for CliError {
    fn from(e: StationarityError) -> Self {
        CliError::Numeric(e.to_string())
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::LengthMismatch(..) | EvalError::Empty | EvalError::TooShort => CliError::Data(e.to_string()),
            other => CliError::Numeric(other.to_string()),
        }
    }
}

impl From<PlotError> for CliError {
    fn from(e: PlotError) -> Self {
        match e {
            PlotError::NonFinite => CliError::Numeric(e.to_string()),
            other => CliError::Data(other.to_string()),
        }
    }
}

impl From<SynthError> for CliError {
    fn from(e: SynthError) -> Self {
        match e {
            SynthError::InvalidSpec(_) => CliError::Config(e.to_string()),
            other => CliError::Numeric(other.to_string()),
        }
    }
}

impl From<SentimentError> for CliError {
    fn from(e: SentimentError) -> Self {
        match e {
            SentimentError::Io { path, source } => CliError::Io { path, source },
            other => CliError::Data(other.to_string()),
        }
    }
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::Ingest(e) => e.into(),
            PipelineError::Feature(e) => e.into(),
            PipelineError::Stationarity(e) => e.into(),
            PipelineError::Supervise(e) => e.into(),
            PipelineError::Eval(e) => e.into(),
            PipelineError::Plot(e) => e.into(),
            PipelineError::Synth(e) => e.into(),
            PipelineError::RangeMismatch { .. } => CliError::Config(e.to_string()),
            PipelineError::NoDateRange | PipelineError::MissingPoll(_) => CliError::Data(e.to_string()),
        }
    }
}
