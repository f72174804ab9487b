//! `ballotwire`: batch driver for the polling-forecast pipeline.

mod commands;
mod config;
mod error;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::PipelineConfig;
use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "ballotwire", version, about = "Forecast polling share from tweet sentiment and engagement")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Validate inputs and export tweet IDs
    Ingest,
    /// Write per-candidate daily feature frames
    Featurize,
    /// Stationarity report for every feature column
    Adf,
    /// Model selection table and the refit models
    Train,
    /// Recursive test-window forecasts
    Forecast,
    /// Forecast report as JSON and text
    Evaluate,
    /// SVG of predictions against aggregate polling
    Plot,
    /// Generate a synthetic input corpus
    Synth,
    /// Run every stage end to end
    All,
    /// Score texts (or stdin lines) with the sentiment engine
    SentimentScore { texts: Vec<String> },
}

#[derive(Debug, Args)]
struct Flags {
    /// TOML or JSON config file; flags override its values
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Seed for synthetic mode
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// ADF significance level
    #[arg(long, global = true)]
    alpha: Option<f64>,
    #[arg(long, global = true)]
    fill_polls: bool,
    #[arg(long, global = true)]
    fill_engagement: bool,
    #[arg(long, global = true)]
    standardize: bool,
    #[arg(long, global = true)]
    difference_all: bool,
    /// Reject malformed rows and coverage gaps instead of warning
    #[arg(long, global = true)]
    strict: bool,
    /// Realized vote share, e.g. `Biden=51.3`; repeatable
    #[arg(long = "actual-share", value_name = "CANDIDATE=PCT", global = true)]
    actual_share: Vec<String>,
    /// Engagement law for synthetic mode (`polling-linked` or `random-walk`)
    #[arg(long, global = true)]
    synth_law: Option<String>,
}

fn resolve(flags: &Flags) -> Result<PipelineConfig, CliError> {
    let mut config = match &flags.config {
        Some(path) => PipelineConfig::load(path)?,
        None => PipelineConfig::default(),
    };
    if let Some(d) = &flags.out_dir {
        config.out_dir = d.clone();
    }
    if let Some(s) = flags.seed {
        config.seed = s;
    }
    if let Some(a) = flags.alpha {
        config.alpha = a;
    }
    config.fill_polls |= flags.fill_polls;
    config.fill_engagement |= flags.fill_engagement;
    config.standardize |= flags.standardize;
    config.difference_all |= flags.difference_all;
    config.strict |= flags.strict;
    if let Some(law) = &flags.synth_law {
        config.synth_law = serde_json::from_value(serde_json::Value::String(law.clone()))
            .map_err(|_| CliError::Usage(format!("unknown synth law `{law}`")))?;
    }
    let names = config.names();
    for entry in &flags.actual_share {
        let (label, pct) = entry
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("--actual-share expects CANDIDATE=PCT, got `{entry}`")))?;
        let candidate = names.resolve(label).ok_or_else(|| CliError::Usage(format!("unknown candidate `{label}`")))?;
        let pct: f64 = pct.trim().parse().map_err(|_| CliError::Usage(format!("bad share `{pct}`")))?;
        if !(0.0..=100.0).contains(&pct) {
            return Err(CliError::Usage(format!("share {pct} is outside [0, 100]")));
        }
        match candidate {
            ballotwire::Candidate::A => config.actual_share_a = Some(pct),
            ballotwire::Candidate::B => config.actual_share_b = Some(pct),
        }
    }
    config.validate()?;
    Ok(config)
}

fn execute(cli: &Cli) -> Result<String, CliError> {
    let config = resolve(&cli.flags)?;
    log::debug!("config sha256 {}", config.hash());
    if let Command::SentimentScore { texts } = &cli.command {
        return commands::sentiment_score(&config, texts);
    }
    let mut out = commands::Output::new(&config)?;
    let summary = match cli.command {
        Command::Ingest => commands::ingest(&config, &mut out),
        Command::Featurize => commands::featurize(&config, &mut out),
        Command::Adf => commands::adf(&config, &mut out),
        Command::Train => commands::train(&config, &mut out),
        Command::Forecast => commands::forecast(&config, &mut out),
        Command::Evaluate => commands::evaluate(&config, &mut out),
        Command::Plot => commands::plot(&config, &mut out),
        Command::Synth => commands::synth(&config, &mut out),
        Command::All => commands::all(&config, &mut out),
        Command::SentimentScore { .. } => unreachable!("handled above"),
    }?;
    log::info!("{} artifact(s) written", out.written().len());
    Ok(summary)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("BALLOTWIRE_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let first = e.to_string().lines().next().unwrap_or_default().trim_start_matches("error: ").to_string();
            eprintln!("error[usage]: {first}");
            return ExitCode::from(1);
        }
    };
    match execute(&cli) {
        Ok(summary) => {
            let _ = std::io::stdout().write_all(summary.as_bytes());
            ExitCode::SUCCESS
        }
        Err(e) => {
            let message = e.to_string().replace('\n', " ");
            eprintln!("error[{}]: {message}", e.tag());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
