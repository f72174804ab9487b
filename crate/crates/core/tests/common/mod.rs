//! Fixture loading shared by the integration tests.
#![allow(dead_code)]

use serde::Deserialize;

#[derive(Debug, Deserialize)]
pub struct SentimentCase {
    pub text: String,
    pub compound: f64,
    pub pos: f64,
    pub neu: f64,
    pub neg: f64,
}

#[derive(Debug, Deserialize)]
struct SentimentFixture {
    cases: Vec<SentimentCase>,
}

pub fn sentiment_cases() -> Vec<SentimentCase> {
    let raw = include_str!("../fixtures/sentiment_oracle.json");
    serde_json::from_str::<SentimentFixture>(raw).expect("sentiment fixture parses").cases
}

#[derive(Debug, Deserialize)]
pub struct AdfCase {
    pub kind: String,
    pub series: Vec<f64>,
    pub statistic: f64,
    pub p_value: f64,
    pub lag_used: usize,
    pub n_obs: usize,
}

#[derive(Debug, Deserialize)]
struct AdfFixture {
    cases: Vec<AdfCase>,
}

pub fn adf_cases() -> Vec<AdfCase> {
    let raw = include_str!("../fixtures/adf_oracle.json");
    serde_json::from_str::<AdfFixture>(raw).expect("adf fixture parses").cases
}

pub const REFERENCE_FRAME_CSV: &str = include_str!("../fixtures/reference_frame_biden.csv");

/// The reference frame: five features then the previous polling estimate.
pub const REFERENCE_FRAME_ROWS: [(&str, [f64; 6]); 5] = [
    ("2020-10-16", [6.075432, -0.883943, -416.643181, 0.000006, 0.000069, 51.7]),
    ("2020-10-17", [-11.997177, -1.605169, 6.600909, 0.000174, -0.000176, 51.2]),
    ("2020-10-18", [-0.532162, -0.191953, 781.941740, -0.000191, -0.000577, 51.3]),
    ("2020-10-19", [0.358707, 0.119817, 295.607700, 0.001870, 0.013707, 51.3]),
    ("2020-10-20", [0.687242, 0.297876, -1223.989339, -0.001564, -0.010134, 51.3]),
];
