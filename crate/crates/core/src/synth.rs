//! Seeded synthetic corpora and independent test oracles.
//!
//! Random numbers come from xoshiro256** seeded through SplitMix64
//! (`rand_xoshiro::Xoshiro256StarStar::seed_from_u64`). Uniforms take the top
//! 53 bits of each output, normals use the Box-Muller transform, one value
//! per pair of uniforms. Each concern draws from its own stream, obtained by
//! jumping the base generator 2^128 steps:
//!
//! | stream | jumps | draws                                          |
//! |--------|-------|------------------------------------------------|
//! | polls  | 0     | per day: ε_A, ε_B                              |
//! | tweets | 1     | per candidate, day, tweet: time, tone, text, counts |
//! | posts  | 2     | per candidate, day, post: time, counts         |
//! | walks  | 3     | per day: five random-walk steps per candidate  |

use chrono::{Duration, NaiveDate, TimeZone, Utc};
use nalgebra::{DMatrix, DVector};
use rand_core::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256StarStar;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::candidate::Candidate;
use crate::ingest::{CandidatePost, Corpus, DateRange, PollSnapshot, RawTweet};
use crate::models::{dual_objective, KernelSpec, LinearModel};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SynthError {
    #[error("invalid synthetic spec: {0}")]
    InvalidSpec(String),
    #[error("normal equations are singular")]
    SingularSystem,
    #[error("exhaustive QP oracle supports at most {max} rows, got {rows}")]
    TooLarge { rows: usize, max: usize },
    #[error("polling covers {have} days, need {need}")]
    PollingTooShort { have: usize, need: usize },
}

/// Deterministic random source with the documented draw conventions.
#[derive(Debug, Clone)]
pub struct SynthRng {
    inner: Xoshiro256StarStar,
}

impl SynthRng {
    pub fn new(seed: u64) -> Self {
        Self { inner: Xoshiro256StarStar::seed_from_u64(seed) }
    }

    /// Independent sub-stream `index` of `seed`.
    pub fn stream(seed: u64, index: usize) -> Self {
        let mut rng = Self::new(seed);
        for _ in 0..index {
            rng.inner.jump();
        }
        rng
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform in [0, 1).
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal by Box-Muller, using the cosine branch only.
    pub fn normal(&mut self) -> f64 {
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    pub fn below(&mut self, n: usize) -> usize {
        ((self.uniform() * n as f64) as usize).min(n - 1)
    }

    /// `⌊exp(N(μ, σ²))⌋`.
    pub fn lognormal_count(&mut self, mu: f64, sigma: f64) -> u64 {
        (mu + sigma * self.normal()).exp().floor() as u64
    }
}

/// How tweet sentiment and engagement evolve.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EngagementLaw {
    /// Tone tracks the day's polling change; counts are i.i.d. lognormal.
    #[default]
    PollingLinked,
    /// Fixed positive tone; every engagement level follows a geometric
    /// random walk with drift, so all five features carry a unit root.
    RandomWalk,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub seed: u64,
    /// First day of the modeled range; polling also covers the day before.
    pub start: NaiveDate,
    pub n_days: usize,
    pub tweets_per_day: usize,
    pub posts_per_day: usize,
    pub ar_phi: f64,
    pub noise_sigma: f64,
    /// Per-candidate drift `[A, B]`; the stationary mean is `drift / (1 − φ)`.
    pub drift: [f64; 2],
    /// Coupling of tweet tone to the day's polling change.
    pub sentiment_link: f64,
    pub law: EngagementLaw,
    pub followers: [u64; 2],
}

impl Default for SynthSpec {
    fn default() -> Self {
        let ar_phi = 0.8;
        Self {
            seed: 7,
            start: NaiveDate::from_ymd_opt(2020, 10, 15).expect("valid date"),
            n_days: 20,
            tweets_per_day: 40,
            posts_per_day: 3,
            ar_phi,
            noise_sigma: 0.3,
            drift: [52.0 * (1.0 - ar_phi), 47.0 * (1.0 - ar_phi)],
            sentiment_link: 1.0,
            law: EngagementLaw::PollingLinked,
            followers: [11_000_000, 88_000_000],
        }
    }
}

impl SynthSpec {
    pub fn validate(&self) -> Result<(), SynthError> {
        let bad = |m: &str| Err(SynthError::InvalidSpec(m.to_string()));
        if !(self.ar_phi.abs() < 1.0) {
            return bad("|ar_phi| must be < 1");
        }
        if !(self.noise_sigma >= 0.0) {
            return bad("noise_sigma must be ≥ 0");
        }
        if self.tweets_per_day == 0 || self.posts_per_day == 0 {
            return bad("tweets_per_day and posts_per_day must be ≥ 1");
        }
        if self.n_days == 0 {
            return bad("n_days must be ≥ 1");
        }
        if self.followers.contains(&0) {
            return bad("followers must be > 0");
        }
        Ok(())
    }

    pub fn range(&self) -> DateRange {
        DateRange::from_len(self.start, self.n_days)
    }

    pub fn stationary_mean(&self, candidate: Candidate) -> f64 {
        self.drift[candidate.index()] / (1.0 - self.ar_phi)
    }
}

/// Polling for the lag-anchor day and every modeled day, plus one further
/// step used as the realized outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthPolling {
    pub polls: Vec<PollSnapshot>,
    pub outcome: [f64; 2],
}

/// AR(1) polling per candidate, `p_t = drift + φ·p_{t−1} + ε_t`, started at the stationary mean.
pub fn gen_polling(spec: &SynthSpec) -> Result<SynthPolling, SynthError> {
    spec.validate()?;
    let mut rng = SynthRng::stream(spec.seed, 0);
    let mut level = [spec.stationary_mean(Candidate::A), spec.stationary_mean(Candidate::B)];
    let mut polls = Vec::with_capacity(spec.n_days + 1);
    let first = spec.start - Duration::days(1);
    polls.push(PollSnapshot { date: first, shares: level });
    for t in 1..=spec.n_days + 1 {
        for c in 0..2 {
            let eps = spec.noise_sigma * rng.normal();
            level[c] = spec.drift[c] + spec.ar_phi * level[c] + eps;
        }
        if t <= spec.n_days {
            polls.push(PollSnapshot { date: first + Duration::days(t as i64), shares: level });
        }
    }
    Ok(SynthPolling { polls, outcome: level })
}

/// Sentence templates; `{}` takes one tone word.
pub const TEMPLATES: [&str; 3] = ["the debate was {}", "what a {} rally today", "{} news for america"];

/// Positive/negative word pairs whose lexicon valences are equal in magnitude.
pub const TONE_PAIRS: [(&str, &str); 7] = [
    ("great", "worst"),
    ("hope", "weak"),
    ("proud", "sad"),
    ("honest", "liar"),
    ("happy", "hate"),
    ("amazing", "cruel"),
    ("peace", "bad"),
];

pub fn render_template(template: usize, word: &str) -> String {
    TEMPLATES[template].replace("{}", word)
}

fn timestamp(rng: &mut SynthRng, date: NaiveDate) -> chrono::DateTime<Utc> {
    let secs = rng.below(86_400) as i64;
    Utc.from_utc_datetime(&date.and_hms_opt(0, 0, 0).expect("midnight")) + Duration::seconds(secs)
}

const TWEET_ID_BASE: u64 = 1_316_000_000_000_000_000;
const POST_ID_BASE: u64 = 1_317_000_000_000_000_000;

/// Hashtag tweets and candidate posts for every modeled day.
pub fn gen_tweets(spec: &SynthSpec, polling: &SynthPolling) -> Result<Corpus, SynthError> {
    spec.validate()?;
    let need = spec.n_days + 1;
    if polling.polls.len() < need {
        return Err(SynthError::PollingTooShort { have: polling.polls.len(), need });
    }
    let mut tweet_rng = SynthRng::stream(spec.seed, 1);
    let mut post_rng = SynthRng::stream(spec.seed, 2);
    let walks = random_walk_levels(spec);
    let mut tweets = Vec::new();
    let mut posts = Vec::new();
    let mut tweet_id = TWEET_ID_BASE;
    let mut post_id = POST_ID_BASE;

    for candidate in Candidate::ALL {
        let ci = candidate.index();
        for (d, date) in spec.range().days().enumerate() {
            let change = polling.polls[d + 1].shares[ci] - polling.polls[d].shares[ci];
            let p_positive = 0.5 + 0.5 * (spec.sentiment_link * change).tanh();
            for _ in 0..spec.tweets_per_day {
                let created_at = timestamp(&mut tweet_rng, date);
                let (text, likes, retweets, followers) = match spec.law {
                    EngagementLaw::PollingLinked => {
                        let positive = tweet_rng.uniform() < p_positive;
                        let template = tweet_rng.below(TEMPLATES.len());
                        let (pos, neg) = TONE_PAIRS[tweet_rng.below(TONE_PAIRS.len())];
                        let text = render_template(template, if positive { pos } else { neg });
                        let likes = tweet_rng.lognormal_count(2.0, 1.5);
                        let retweets = tweet_rng.lognormal_count(1.0, 1.5);
                        let followers = tweet_rng.lognormal_count(6.5, 2.0);
                        (text, likes, retweets, followers)
                    }
                    EngagementLaw::RandomWalk => {
                        let w = &walks[ci][d];
                        (render_template(0, TONE_PAIRS[0].0), w[0].round() as u64, w[1].round() as u64, w[2].round() as u64)
                    }
                };
                tweets.push(RawTweet {
                    tweet_id,
                    created_at,
                    text,
                    like_count: likes,
                    retweet_count: retweets,
                    author_follower_count: followers,
                    candidate_tag: candidate,
                });
                tweet_id += 1;
            }
            let followers = spec.followers[ci];
            for _ in 0..spec.posts_per_day {
                let created_at = timestamp(&mut post_rng, date);
                let (likes, retweets) = match spec.law {
                    EngagementLaw::PollingLinked => (post_rng.lognormal_count(10.5, 0.6), post_rng.lognormal_count(9.0, 0.6)),
                    EngagementLaw::RandomWalk => {
                        let w = &walks[ci][d];
                        ((followers as f64 * w[3]).round() as u64, (followers as f64 * w[4]).round() as u64)
                    }
                };
                posts.push(CandidatePost {
                    tweet_id: post_id,
                    created_at,
                    like_count: likes,
                    retweet_count: retweets,
                    author_follower_count_at_capture: followers,
                    candidate,
                });
                post_id += 1;
            }
        }
    }
    Ok(Corpus {
        tweets,
        posts,
        polls: polling.polls.clone(),
        date_range: Some(spec.range()),
    })
}

/// Geometric random walks with upward drift per candidate and day: likes,
/// retweets and followers per tweet, then likes and retweets per follower
/// for posts.
fn random_walk_levels(spec: &SynthSpec) -> [Vec<[f64; 5]>; 2] {
    const BASE: [f64; 5] = [400.0, 120.0, 50_000.0, 2e-3, 4e-4];
    const DRIFT: f64 = 0.1;
    const STEP: f64 = 0.05;
    let mut rng = SynthRng::stream(spec.seed, 3);
    let mut log_level = [[0.0; 5]; 2];
    let mut out = [Vec::with_capacity(spec.n_days), Vec::with_capacity(spec.n_days)];
    for _ in 0..spec.n_days {
        for c in 0..2 {
            let mut day = [0.0; 5];
            for k in 0..5 {
                log_level[c][k] += DRIFT + STEP * rng.normal();
                day[k] = BASE[k] * log_level[c][k].exp();
            }
            out[c].push(day);
        }
    }
    out
}

/// Full synthetic corpus plus the realized outcome.
pub fn gen_corpus(spec: &SynthSpec) -> Result<(Corpus, [f64; 2]), SynthError> {
    let polling = gen_polling(spec)?;
    let corpus = gen_tweets(spec, &polling)?;
    Ok((corpus, polling.outcome))
}

/// Ordinary least squares with intercept via the normal equations.
pub fn ols_oracle(x: &DMatrix<f64>, y: &DVector<f64>) -> Result<LinearModel, SynthError> {
    let (n, p) = x.shape();
    let a = DMatrix::from_fn(n, p + 1, |r, c| if c == 0 { 1.0 } else { x[(r, c - 1)] });
    let ata = a.transpose() * &a;
    let s = ata.singular_values();
    if s.min() <= s.max() * (p + 1) as f64 * 1e-13 {
        return Err(SynthError::SingularSystem);
    }
    let sol = ata.lu().solve(&(a.transpose() * y)).ok_or(SynthError::SingularSystem)?;
    Ok(LinearModel { weights: sol.iter().skip(1).copied().collect(), intercept: sol[0] })
}

/// Exact solution of the SVR dual found by exhaustive search.
#[derive(Debug, Clone, PartialEq)]
pub struct QpSolution {
    pub objective: f64,
    pub beta: Vec<f64>,
}

pub const QP_ORACLE_MAX_ROWS: usize = 6;

/// Minimizes `½βᵀKβ + ε‖β‖₁ − yᵀβ` subject to `Σβ = 0`, `|βᵢ| ≤ C`.
///
/// Every variable is assigned one of five states (0, +C, −C, free positive,
/// free negative). For each assignment the equality-constrained stationarity
/// system on the free variables is solved; feasible solutions are scored and
/// the smallest objective returned. Some optimum always lies on a face whose
/// system is nonsingular, so skipping singular faces loses nothing.
pub fn qp_oracle(x: &DMatrix<f64>, y: &[f64], c: f64, epsilon: f64, kernel: KernelSpec) -> Result<QpSolution, SynthError> {
    let n = x.nrows();
    if n > QP_ORACLE_MAX_ROWS {
        return Err(SynthError::TooLarge { rows: n, max: QP_ORACLE_MAX_ROWS });
    }
    let rows: Vec<Vec<f64>> = (0..n).map(|r| x.row(r).iter().copied().collect()).collect();
    let k = DMatrix::from_fn(n, n, |i, j| kernel.eval(&rows[i], &rows[j]));
    let tol = 1e-10 * c.max(1.0);
    let mut best: Option<QpSolution> = None;
    let mut state = vec![0u8; n];
    loop {
        if let Some(beta) = solve_face(&k, y, c, epsilon, &state, tol) {
            let objective = dual_objective(&k, y, epsilon, &beta);
            if best.as_ref().is_none_or(|b| objective < b.objective) {
                best = Some(QpSolution { objective, beta });
            }
        }
        // Odometer over 5^n states.
        let mut i = 0;
        while i < n && state[i] == 4 {
            state[i] = 0;
            i += 1;
        }
        if i == n {
            break;
        }
        state[i] += 1;
    }
    Ok(best.expect("the all-zero assignment is always feasible"))
}

fn solve_face(k: &DMatrix<f64>, y: &[f64], c: f64, epsilon: f64, state: &[u8], tol: f64) -> Option<Vec<f64>> {
    let n = y.len();
    let mut beta = vec![0.0; n];
    let mut free = Vec::new();
    for (i, &s) in state.iter().enumerate() {
        match s {
            0 => {}
            1 => beta[i] = c,
            2 => beta[i] = -c,
            _ => free.push(i),
        }
    }
    let fixed_sum: f64 = beta.iter().sum();
    if free.is_empty() {
        return (fixed_sum.abs() <= tol).then_some(beta);
    }
    let m = free.len();
    let mut a = DMatrix::zeros(m + 1, m + 1);
    let mut rhs = DVector::zeros(m + 1);
    for (r, &i) in free.iter().enumerate() {
        let sign = if state[i] == 3 { 1.0 } else { -1.0 };
        for (cc, &j) in free.iter().enumerate() {
            a[(r, cc)] = k[(i, j)];
        }
        a[(r, m)] = 1.0;
        a[(m, r)] = 1.0;
        let fixed: f64 = (0..n).map(|j| k[(i, j)] * beta[j]).sum();
        rhs[r] = y[i] - epsilon * sign - fixed;
    }
    rhs[m] = -fixed_sum;
    let s = a.singular_values();
    if s.min() <= s.max() * 1e-12 {
        return None;
    }
    let sol = a.lu().solve(&rhs)?;
    for (r, &i) in free.iter().enumerate() {
        let v = sol[r];
        let ok = if state[i] == 3 { v >= -tol && v <= c + tol } else { v <= tol && v >= -c - tol };
        if !ok {
            return None;
        }
        beta[i] = v.clamp(-c, c);
    }
    Some(beta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::validate_corpus;

    #[test]
    fn uniform_stream_is_reproducible() {
        let mut a = SynthRng::new(42);
        let mut b = SynthRng::new(42);
        for _ in 0..100 {
            let u = a.uniform();
            assert_eq!(u, b.uniform());
            assert!((0.0..1.0).contains(&u));
        }
        assert_ne!(SynthRng::stream(42, 1).next_u64(), SynthRng::stream(42, 0).next_u64());
    }

    #[test]
    fn splitmix_seeding_matches_reference_vector() {
        // SplitMix64(0) first output, the first state word of seed_from_u64(0).
        let mut rng = SynthRng::new(0);
        let s1: u64 = 0x6e789e6aa1b965f4;
        let expected = s1.wrapping_mul(5).rotate_left(7).wrapping_mul(9);
        assert_eq!(rng.next_u64(), expected);
    }

    #[test]
    fn constant_polling_without_noise() {
        let spec = SynthSpec { ar_phi: 0.0, noise_sigma: 0.0, drift: [51.0, 46.0], ..Default::default() };
        let p = gen_polling(&spec).unwrap();
        assert!(p.polls.iter().all(|s| s.shares == [51.0, 46.0]));
        assert_eq!(p.outcome, [51.0, 46.0]);
    }

    #[test]
    fn polling_sample_mean_near_stationary_mean() {
        let spec = SynthSpec { n_days: 2000, ..Default::default() };
        let p = gen_polling(&spec).unwrap();
        for c in Candidate::ALL {
            let values: Vec<f64> = p.polls.iter().map(|s| s.share(c)).collect();
            let mean = crate::numeric::mean(&values);
            // Long-run sd of the AR(1) sample mean: σ/(1−φ)/√n.
            let bound = 3.0 * spec.noise_sigma / (1.0 - spec.ar_phi) / (values.len() as f64).sqrt();
            assert!((mean - spec.stationary_mean(c)).abs() < bound);
        }
    }

    #[test]
    fn corpus_is_valid_and_deterministic() {
        let spec = SynthSpec::default();
        let (a, _) = gen_corpus(&spec).unwrap();
        let (b, _) = gen_corpus(&spec).unwrap();
        assert_eq!(a.tweets, b.tweets);
        assert_eq!(a.posts, b.posts);
        assert_eq!(a.tweets.len(), 2 * 20 * 40);
        let report = validate_corpus(&a, &spec.range());
        assert!(report.is_clean(), "{:?}", report.findings);
        let rw = SynthSpec { law: EngagementLaw::RandomWalk, ..spec };
        let (c, _) = gen_corpus(&rw).unwrap();
        assert!(validate_corpus(&c, &rw.range()).is_clean());
    }

    #[test]
    fn ols_oracle_examples() {
        let x = DMatrix::from_row_slice(4, 1, &[1.0, 2.0, 3.0, 4.0]);
        let y = DVector::from_vec(vec![3.0, 6.0, 9.0, 12.0]);
        let m = ols_oracle(&x, &y).unwrap();
        assert!((m.weights[0] - 3.0).abs() < 1e-12 && m.intercept.abs() < 1e-12);
        let x = DMatrix::from_row_slice(3, 2, &[1.0, 2.0, 2.0, 4.0, 3.0, 6.0]);
        assert_eq!(ols_oracle(&x, &y.rows(0, 3).into_owned()), Err(SynthError::SingularSystem));
    }

    #[test]
    fn ols_oracle_residual_is_orthogonal() {
        let mut rng = SynthRng::new(11);
        let x = DMatrix::from_fn(10, 3, |_, _| rng.normal());
        let y = DVector::from_fn(10, |_, _| rng.normal());
        let m = ols_oracle(&x, &y).unwrap();
        let w = DVector::from_column_slice(&m.weights);
        let r = &y - &x * &w - DVector::from_element(10, m.intercept);
        assert!(r.sum().abs() < 1e-9);
        for j in 0..3 {
            assert!(x.column(j).dot(&r).abs() < 1e-9);
        }
    }

    #[test]
    fn qp_oracle_two_point_problem() {
        // K = I, y = (1, −1), β = (b, −b): b² + 2εb − 2b, minimized at b = 1 − ε.
        let x = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 1.0]);
        let sol = qp_oracle(&x, &[1.0, -1.0], 10.0, 0.25, KernelSpec::Linear).unwrap();
        assert!((sol.beta[0] - 0.75).abs() < 1e-12);
        assert!((sol.beta[1] + 0.75).abs() < 1e-12);
        assert!((sol.objective - (0.75 * 0.75 + 2.0 * 0.25 * 0.75 - 1.5)).abs() < 1e-12);
        // Box-bound case: C = 0.5 clips b.
        let sol = qp_oracle(&x, &[1.0, -1.0], 0.5, 0.25, KernelSpec::Linear).unwrap();
        assert!((sol.beta[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn qp_oracle_constant_target() {
        let x = DMatrix::from_row_slice(3, 1, &[0.0, 1.0, 2.0]);
        let sol = qp_oracle(&x, &[4.0, 4.0, 4.0], 1.0, 0.1, KernelSpec::Rbf { gamma: 1.0 }).unwrap();
        assert!(sol.objective.abs() < 1e-12);
        assert!(sol.beta.iter().all(|&b| b.abs() < 1e-9));
    }
}
