//! Browser bindings: sentiment scoring, a synthetic end-to-end run and an
//! ADF explorer. Every export returns a JSON string.

use std::sync::OnceLock;

use ballotwire::pipeline::run_synthetic;
use ballotwire::stationarity::{adf_test, AdfOptions};
use ballotwire::synth::{EngagementLaw, SynthRng, SynthSpec};
use ballotwire::{AdfResult, PipelineOptions, SentimentAnalyzer, SentimentScore};
use serde::Serialize;
use wasm_bindgen::prelude::*;

fn analyzer() -> &'static SentimentAnalyzer {
    static ANALYZER: OnceLock<SentimentAnalyzer> = OnceLock::new();
    ANALYZER.get_or_init(SentimentAnalyzer::bundled)
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("demo output serializes")
}

pub fn score(text: &str) -> SentimentScore {
    analyzer().score(text)
}

#[derive(Debug, Serialize)]
pub struct DemoRun {
    pub svg: String,
    pub summary: String,
    pub stationarity: String,
    pub winner: String,
    pub winner_correct: Option<bool>,
}

pub fn demo(seed: u64, law: &str, difference_all: bool) -> Result<DemoRun, String> {
    let law: EngagementLaw =
        serde_json::from_value(serde_json::Value::String(law.to_string())).map_err(|_| format!("unknown law `{law}`"))?;
    let spec = SynthSpec { seed, law, ..Default::default() };
    let options = PipelineOptions { difference_all, ..Default::default() };
    let (_, run) = run_synthetic(&spec, &options).map_err(|e| e.to_string())?;
    Ok(DemoRun {
        svg: run.svg().map_err(|e| e.to_string())?,
        summary: run.report.render(),
        stationarity: run.stationarity.render(),
        winner: run.report.winner_predicted_name.clone(),
        winner_correct: run.report.winner_correct,
    })
}

/// Numbers separated by commas or whitespace.
pub fn parse_series(text: &str) -> Result<Vec<f64>, String> {
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().map_err(|_| format!("not a number: `{t}`")))
        .collect()
}

/// `n` points of a Gaussian random walk (`walk`) or white noise (`noise`).
pub fn sample(kind: &str, n: usize, seed: u64) -> Result<Vec<f64>, String> {
    let mut rng = SynthRng::new(seed);
    let draws = (0..n).map(|_| rng.normal());
    match kind {
        "walk" => Ok(draws
            .scan(0.0, |level, e| {
                *level += e;
                Some(*level)
            })
            .collect()),
        "noise" => Ok(draws.collect()),
        other => Err(format!("unknown series kind `{other}`")),
    }
}

pub fn adf(series: &[f64], alpha: f64) -> Result<AdfResult, String> {
    adf_test(series, &AdfOptions { alpha, ..Default::default() }).map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn score_text(text: &str) -> String {
    to_json(&score(text))
}

#[wasm_bindgen]
pub fn run_demo(seed: u32, law: &str, difference_all: bool) -> Result<String, JsValue> {
    demo(seed as u64, law, difference_all).map(|r| to_json(&r)).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn sample_series(kind: &str, n: u32, seed: u32) -> Result<String, JsValue> {
    let values = sample(kind, n as usize, seed as u64).map_err(|e| JsValue::from_str(&e))?;
    Ok(values.iter().map(|v| format!("{v:.4}")).collect::<Vec<_>>().join(", "))
}

#[wasm_bindgen]
pub fn adf_text(values: &str, alpha: f64) -> Result<String, JsValue> {
    let series = parse_series(values).map_err(|e| JsValue::from_str(&e))?;
    adf(&series, alpha).map(|r| to_json(&r)).map_err(|e| JsValue::from_str(&e))
}
