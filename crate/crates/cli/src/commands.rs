//! Subcommand bodies. Each writes its artifacts under the output directory
//! and returns a short summary for stdout.

use std::fs;
use std::io::BufRead;
use std::path::{Path, PathBuf};

use ballotwire::features::write_frame_csv;
use ballotwire::ingest::{
    parse_candidate_csv, parse_polling_csv, parse_tweet_csv, validate_corpus, write_polls, write_posts, write_tweet_ids,
    write_tweets, Parsed, PostSchema, TweetSchema,
};
use ballotwire::pipeline::{build_frames, infer_range, run_pipeline, PipelineRun};
use ballotwire::sentiment::{load_lexicon, EmojiLexicon};
use ballotwire::stationarity::{frame_stationarity_report, StationarityReport};
use ballotwire::supervise::input_columns;
use ballotwire::synth::gen_corpus;
use ballotwire::{Candidate, Corpus, FeatureFrame, PollSnapshot, SentimentAnalyzer};
use serde::Serialize;

use crate::config::PipelineConfig;
use crate::error::CliError;

/// A loaded corpus plus the realized shares when it was generated.
struct Inputs {
    corpus: Corpus,
    outcome: Option<[f64; 2]>,
    dropped: Vec<(String, usize)>,
}

fn keep<T>(parsed: Parsed<T>, path: &Path, strict: bool, dropped: &mut Vec<(String, usize)>) -> Result<Vec<T>, CliError> {
    let name = path.display().to_string();
    if strict {
        return Ok(parsed.strict(&name)?);
    }
    if parsed.dropped_count() > 0 {
        log::warn!("{name}: dropped {} malformed row(s)", parsed.dropped_count());
    }
    dropped.push((name, parsed.dropped_count()));
    Ok(parsed.records)
}

fn load(config: &PipelineConfig) -> Result<Inputs, CliError> {
    if config.is_synthetic() {
        log::info!("no input files configured; generating a synthetic corpus with seed {}", config.seed);
        let (corpus, outcome) = gen_corpus(&config.synth_spec())?;
        return Ok(Inputs { corpus, outcome: Some(outcome), dropped: Vec::new() });
    }
    let path = |p: &Option<PathBuf>| p.clone().expect("validated config has every input path");
    let mut dropped = Vec::new();
    let tweet_schema = TweetSchema::default();
    let post_schema = PostSchema::default();
    let mut tweets = Vec::new();
    for (c, p) in [(Candidate::A, path(&config.tweets_a)), (Candidate::B, path(&config.tweets_b))] {
        tweets.extend(keep(parse_tweet_csv(&p, c, &tweet_schema)?, &p, config.strict, &mut dropped)?);
    }
    let mut posts = Vec::new();
    for (c, p) in [(Candidate::A, path(&config.posts_a)), (Candidate::B, path(&config.posts_b))] {
        posts.extend(keep(parse_candidate_csv(&p, c, &post_schema)?, &p, config.strict, &mut dropped)?);
    }
    let polls = parse_polling_csv(path(&config.polls), &config.names())?;
    let corpus = Corpus { tweets, posts, polls, date_range: config.range()? };
    Ok(Inputs { corpus, outcome: None, dropped })
}

fn analyzer(config: &PipelineConfig) -> Result<SentimentAnalyzer, CliError> {
    match &config.lexicon {
        Some(p) => Ok(SentimentAnalyzer::new(load_lexicon(p)?).with_emoji(EmojiLexicon::bundled())),
        None => Ok(SentimentAnalyzer::bundled()),
    }
}

/// Writes artifacts for one invocation.
pub struct Output {
    dir: PathBuf,
    hash: String,
    written: Vec<PathBuf>,
}

impl Output {
    pub fn new(config: &PipelineConfig) -> Result<Self, CliError> {
        fs::create_dir_all(&config.out_dir).map_err(|e| CliError::io(&config.out_dir, e))?;
        Ok(Self { dir: config.out_dir.clone(), hash: config.hash(), written: Vec::new() })
    }

    fn write(&mut self, name: &str, content: impl AsRef<[u8]>) -> Result<(), CliError> {
        let path = self.dir.join(name);
        fs::write(&path, content).map_err(|e| CliError::io(&path, e))?;
        log::info!("wrote {}", path.display());
        self.written.push(path);
        Ok(())
    }

    /// JSON artifact wrapped with the config hash and model input columns.
    fn write_json<T: Serialize>(&mut self, name: &str, body: &T) -> Result<(), CliError> {
        #[derive(Serialize)]
        struct Envelope<'a, T> {
            config_hash: &'a str,
            input_columns: [&'static str; 6],
            #[serde(flatten)]
            body: &'a T,
        }
        let env = Envelope { config_hash: &self.hash, input_columns: input_columns(), body };
        let json = serde_json::to_string_pretty(&env).expect("artifact serializes") + "\n";
        self.write(name, json)
    }

    fn comment_lines(&self) -> Vec<String> {
        vec![format!("config sha256 {}", self.hash), format!("columns: {}", input_columns().join(", "))]
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }
}

fn suffix(c: Candidate) -> &'static str {
    match c {
        Candidate::A => "a",
        Candidate::B => "b",
    }
}

/// Level frames over the modeled range, without the split or model stages.
fn frames(config: &PipelineConfig) -> Result<Vec<FeatureFrame>, CliError> {
    let inputs = load(config)?;
    let range = match config.range()? {
        Some(r) => r,
        None => infer_range(&inputs.corpus)?,
    };
    let polls: Vec<PollSnapshot> = if config.fill_polls {
        ballotwire::ingest::fill_polls(&inputs.corpus.polls, &range)?.0
    } else {
        inputs.corpus.polls.clone()
    };
    Ok(build_frames(&inputs.corpus, &analyzer(config)?, &polls, &range, config.fill_engagement)?)
}

fn run(config: &PipelineConfig) -> Result<PipelineRun, CliError> {
    run_on(config, load(config)?)
}

fn run_on(config: &PipelineConfig, inputs: Inputs) -> Result<PipelineRun, CliError> {
    let mut options = config.pipeline_options()?;
    if let Some(outcome) = inputs.outcome {
        for c in Candidate::ALL {
            options.actual_shares[c.index()].get_or_insert(outcome[c.index()]);
        }
    }
    Ok(run_pipeline(&inputs.corpus, &analyzer(config)?, &options)?)
}

pub fn ingest(config: &PipelineConfig, out: &mut Output) -> Result<String, CliError> {
    let inputs = load(config)?;
    let range = match config.range()? {
        Some(r) => r,
        None => infer_range(&inputs.corpus)?,
    };
    let validation = validate_corpus(&inputs.corpus, &range);
    let mut ids = Vec::new();
    let n_ids = write_tweet_ids(&inputs.corpus, &mut ids).map_err(|e| CliError::io(Path::new("tweet_ids.txt"), e))?;
    if n_ids == 0 {
        return Err(CliError::Data("corpus is empty".into()));
    }
    out.write("tweet_ids.txt", ids)?;

    #[derive(Serialize)]
    struct Body<'a> {
        validation: &'a ballotwire::ingest::ValidationReport,
        dropped_rows: &'a [(String, usize)],
        tweets: usize,
        posts: usize,
        polls: usize,
    }
    out.write_json(
        "validation.json",
        &Body {
            validation: &validation,
            dropped_rows: &inputs.dropped,
            tweets: inputs.corpus.tweets.len(),
            posts: inputs.corpus.posts.len(),
            polls: inputs.corpus.polls.len(),
        },
    )?;
    if !validation.is_clean() {
        let msg = format!("{} coverage finding(s) over {} to {}", validation.findings.len(), range.start, range.end);
        if config.strict {
            return Err(CliError::Data(msg));
        }
        log::warn!("{msg}");
    }
    Ok(format!(
        "{} tweets, {} posts, {} poll days; {} tweet ids exported; {} finding(s)\n",
        inputs.corpus.tweets.len(),
        inputs.corpus.posts.len(),
        inputs.corpus.polls.len(),
        n_ids,
        validation.findings.len()
    ))
}

fn write_frames(frames: &[FeatureFrame], config: &PipelineConfig, out: &mut Output) -> Result<(), CliError> {
    let names = config.names();
    for f in frames {
        let mut buf = Vec::new();
        write_frame_csv(f, &names, &out.comment_lines(), &mut buf).map_err(|e| CliError::io(&out.dir, e))?;
        out.write(&format!("frames_{}.csv", suffix(f.candidate)), buf)?;
    }
    Ok(())
}

pub fn featurize(config: &PipelineConfig, out: &mut Output) -> Result<String, CliError> {
    let frames = frames(config)?;
    write_frames(&frames, config, out)?;
    Ok(format!("{} frame(s) of {} day(s)\n", frames.len(), frames.first().map_or(0, |f| f.len())))
}

fn write_stationarity(report: &StationarityReport, out: &mut Output) -> Result<(), CliError> {
    #[derive(Serialize)]
    struct Body<'a> {
        stationarity: &'a StationarityReport,
    }
    out.write_json("stationarity.json", &Body { stationarity: report })?;
    let text: String = out.comment_lines().iter().map(|c| format!("# {c}\n")).collect::<String>() + &report.render();
    out.write("stationarity.txt", text)
}

pub fn adf(config: &PipelineConfig, out: &mut Output) -> Result<String, CliError> {
    let frames = frames(config)?;
    let options = config.pipeline_options()?.adf;
    let report = frame_stationarity_report(&frames, &options)?;
    write_stationarity(&report, out)?;
    Ok(report.render())
}

fn write_training(run: &PipelineRun, config: &PipelineConfig, out: &mut Output) -> Result<(), CliError> {
    #[derive(Serialize)]
    struct Entry<'a> {
        candidate: Candidate,
        name: &'a str,
        selected_model: &'a str,
        validation_table: &'a [ballotwire::evaluate::SpecOutcome],
    }
    #[derive(Serialize)]
    struct Body<'a> {
        selection: Vec<Entry<'a>>,
    }
    let selection = run
        .report
        .candidates
        .iter()
        .map(|c| Entry { candidate: c.candidate, name: &c.name, selected_model: &c.selected_model, validation_table: &c.validation_table })
        .collect();
    out.write_json("selection.json", &Body { selection })?;
    let names = config.names();
    for (c, model) in Candidate::ALL.iter().zip(&run.models) {
        #[derive(Serialize)]
        struct ModelBody<'a> {
            candidate: &'a str,
            model: &'a ballotwire::FittedModel,
        }
        out.write_json(&format!("model_{}.json", suffix(*c)), &ModelBody { candidate: names.name(*c), model })?;
    }
    Ok(())
}

fn training_summary(run: &PipelineRun) -> String {
    run.report
        .candidates
        .iter()
        .map(|c| format!("{}: selected {} (validation MAE {:.4}), refit on {} rows\n", c.name, c.selected_model, c.validation_mae, c.training_rows))
        .collect()
}

pub fn train(config: &PipelineConfig, out: &mut Output) -> Result<String, CliError> {
    let run = run(config)?;
    write_training(&run, config, out)?;
    Ok(training_summary(&run))
}

fn write_forecast(run: &PipelineRun, out: &mut Output) -> Result<(), CliError> {
    #[derive(Serialize)]
    struct Entry<'a> {
        name: &'a str,
        dates: &'a [chrono::NaiveDate],
        predictions: &'a [f64],
        polling: &'a [f64],
    }
    #[derive(Serialize)]
    struct Body<'a> {
        forecast: Vec<Entry<'a>>,
    }
    let forecast = run
        .report
        .candidates
        .iter()
        .map(|c| Entry { name: &c.name, dates: &c.test_dates, predictions: &c.test_predictions, polling: &c.polling_reference })
        .collect();
    out.write_json("forecast.json", &Body { forecast })
}

pub fn forecast(config: &PipelineConfig, out: &mut Output) -> Result<String, CliError> {
    let run = run(config)?;
    write_forecast(&run, out)?;
    Ok(run
        .report
        .candidates
        .iter()
        .map(|c| {
            let days: Vec<String> = c.test_predictions.iter().map(|p| format!("{p:.3}")).collect();
            format!("{}: {}\n", c.name, days.join(" "))
        })
        .collect())
}

fn write_report(run: &PipelineRun, out: &mut Output) -> Result<(), CliError> {
    out.write("report.json", run.report_json())?;
    let text: String = out.comment_lines().iter().map(|c| format!("# {c}\n")).collect::<String>() + &run.report.render();
    out.write("report.txt", text)
}

pub fn evaluate(config: &PipelineConfig, out: &mut Output) -> Result<String, CliError> {
    let run = run(config)?;
    write_report(&run, out)?;
    Ok(run.report.render())
}

pub fn plot(config: &PipelineConfig, out: &mut Output) -> Result<String, CliError> {
    let run = run(config)?;
    out.write("report.svg", run.svg()?)?;
    Ok(format!("{} chart(s)\n", run.report.candidates.len()))
}

pub fn all(config: &PipelineConfig, out: &mut Output) -> Result<String, CliError> {
    let inputs = load(config)?;
    let range = match config.range()? {
        Some(r) => r,
        None => infer_range(&inputs.corpus)?,
    };
    let validation = validate_corpus(&inputs.corpus, &range);
    if !validation.is_clean() && config.strict {
        return Err(CliError::Data(format!("{} coverage finding(s)", validation.findings.len())));
    }
    let run = run_on(config, inputs)?;
    write_frames(&run.frames, config, out)?;
    write_stationarity(&run.stationarity, out)?;
    write_training(&run, config, out)?;
    write_forecast(&run, out)?;
    write_report(&run, out)?;
    out.write("report.svg", run.svg()?)?;
    Ok(run.stationarity.render() + "\n" + &run.report.render())
}

/// Writes a synthetic corpus as input CSVs plus a config that points at them.
pub fn synth(config: &PipelineConfig, out: &mut Output) -> Result<String, CliError> {
    let spec = config.synth_spec();
    let (corpus, outcome) = gen_corpus(&spec)?;
    let names = config.names();
    let io = |e| CliError::io(&config.out_dir, e);
    for c in Candidate::ALL {
        let tweets: Vec<_> = corpus.tweets_for(c).cloned().collect();
        let mut buf = Vec::new();
        write_tweets(&tweets, &TweetSchema::default(), &mut buf).map_err(io)?;
        out.write(&format!("tweets_{}.csv", suffix(c)), buf)?;
        let posts: Vec<_> = corpus.posts_for(c).cloned().collect();
        let mut buf = Vec::new();
        write_posts(&posts, &PostSchema::default(), &mut buf).map_err(io)?;
        out.write(&format!("posts_{}.csv", suffix(c)), buf)?;
    }
    let mut buf = Vec::new();
    write_polls(&corpus.polls, &names, &mut buf).map_err(io)?;
    out.write("polls.csv", buf)?;

    let range = spec.range();
    let generated = PipelineConfig {
        tweets_a: Some("tweets_a.csv".into()),
        tweets_b: Some("tweets_b.csv".into()),
        posts_a: Some("posts_a.csv".into()),
        posts_b: Some("posts_b.csv".into()),
        polls: Some("polls.csv".into()),
        start: Some(range.start),
        end: Some(range.end),
        actual_share_a: Some(outcome[0]),
        actual_share_b: Some(outcome[1]),
        ..config.clone()
    };
    let toml = toml::to_string(&generated).map_err(|e| CliError::Config(e.to_string()))?;
    out.write("corpus.toml", format!("# config sha256 {}\n{toml}", out.hash))?;
    Ok(format!(
        "{} tweets, {} posts, {} poll days from seed {}; realized shares {:.3} / {:.3}\n",
        corpus.tweets.len(),
        corpus.posts.len(),
        corpus.polls.len(),
        spec.seed,
        outcome[0],
        outcome[1]
    ))
}

/// Scores each text (or each stdin line when none are given) as JSON lines.
pub fn sentiment_score(config: &PipelineConfig, texts: &[String]) -> Result<String, CliError> {
    let analyzer = analyzer(config)?;
    let lines: Vec<String> = if texts.is_empty() {
        std::io::stdin().lock().lines().collect::<Result<_, _>>().map_err(|e| CliError::io(Path::new("<stdin>"), e))?
    } else {
        texts.to_vec()
    };
    let mut out = String::new();
    for text in &lines {
        #[derive(Serialize)]
        struct Line<'a> {
            text: &'a str,
            #[serde(flatten)]
            score: ballotwire::SentimentScore,
        }
        out.push_str(&serde_json::to_string(&Line { text, score: analyzer.score(text) }).expect("score serializes"));
        out.push('\n');
    }
    Ok(out)
}
