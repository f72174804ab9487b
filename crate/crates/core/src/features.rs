//! Daily per-candidate feature frames.
//!
//! Hashtag tweets contribute three sentiment-weighted engagement sums per
//! day; the candidate's own posts contribute two mean engagement ratios. The
//! frame joins both with the previous day's polling share.

use std::collections::BTreeMap;
use std::io::{self, BufRead, Write};

use chrono::{Duration, NaiveDate};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::candidate::{Candidate, CandidateNames};
use crate::ingest::{CandidatePost, DateRange, PollSnapshot, RawTweet};
use crate::numeric::ExactSum;

/// Machine names of the five feature columns, in frame order.
pub const FEATURE_COLUMNS: [&str; 5] = [
    "sum_sent_likes",
    "sum_sent_retweets",
    "sum_sent_followers",
    "mean_likes_per_follower",
    "mean_retweets_per_follower",
];

pub const PREV_POLL_COLUMN: &str = "prev_poll";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FeatureError {
    #[error("no features for {candidate} on {date}")]
    MissingFeatureDay { candidate: Candidate, date: NaiveDate },
    #[error("no polling value on {date}, needed as the lag input for the following day")]
    MissingLagAnchor { date: NaiveDate },
    #[error("frame csv line {line}: {reason}")]
    MalformedFrame { line: usize, reason: String },
}

/// Exact partial sums of one day's hashtag tweets.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DaySums {
    pub n_tweets: usize,
    pub likes: ExactSum,
    pub retweets: ExactSum,
    pub followers: ExactSum,
}

impl DaySums {
    pub fn add(&mut self, compound: f64, likes: u64, retweets: u64, followers: u64) {
        self.n_tweets += 1;
        self.likes.add(compound * likes as f64);
        self.retweets.add(compound * retweets as f64);
        self.followers.add(compound * followers as f64);
    }

    pub fn merge(&mut self, other: &DaySums) {
        self.n_tweets += other.n_tweets;
        self.likes.merge(&other.likes);
        self.retweets.merge(&other.retweets);
        self.followers.merge(&other.followers);
    }

    pub fn values(&self) -> [f64; 3] {
        [self.likes.value(), self.retweets.value(), self.followers.value()]
    }
}

/// Mean engagement ratios of one day's candidate posts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DayMeans {
    pub n_posts: usize,
    pub likes_per_follower: f64,
    pub retweets_per_follower: f64,
}

/// Sums `compound·likes`, `compound·retweets` and `compound·followers` per UTC day.
pub fn aggregate_hashtag_tweets<'a, I, F>(tweets: I, mut scorer: F) -> BTreeMap<NaiveDate, DaySums>
where
    I: IntoIterator<Item = &'a RawTweet>,
    F: FnMut(&str) -> f64,
{
    let mut days: BTreeMap<NaiveDate, DaySums> = BTreeMap::new();
    for t in tweets {
        let compound = scorer(&t.text);
        days.entry(t.created_at.date_naive()).or_default().add(
            compound,
            t.like_count,
            t.retweet_count,
            t.author_follower_count,
        );
    }
    days
}

/// Averages likes/followers and retweets/followers per UTC day.
pub fn aggregate_candidate_engagement<'a, I>(posts: I) -> BTreeMap<NaiveDate, DayMeans>
where
    I: IntoIterator<Item = &'a CandidatePost>,
{
    let mut acc: BTreeMap<NaiveDate, (usize, ExactSum, ExactSum)> = BTreeMap::new();
    for p in posts {
        let followers = p.author_follower_count_at_capture as f64;
        let entry = acc.entry(p.created_at.date_naive()).or_default();
        entry.0 += 1;
        entry.1.add(p.like_count as f64 / followers);
        entry.2.add(p.retweet_count as f64 / followers);
    }
    acc.into_iter()
        .map(|(date, (n, likes, retweets))| {
            (
                date,
                DayMeans {
                    n_posts: n,
                    likes_per_follower: likes.value() / n as f64,
                    retweets_per_follower: retweets.value() / n as f64,
                },
            )
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DailyFeatureRow {
    pub date: NaiveDate,
    pub sum_sent_likes: f64,
    pub sum_sent_retweets: f64,
    pub sum_sent_followers: f64,
    pub mean_likes_per_follower: f64,
    pub mean_retweets_per_follower: f64,
}

impl DailyFeatureRow {
    pub fn from_features(date: NaiveDate, f: [f64; 5]) -> Self {
        Self {
            date,
            sum_sent_likes: f[0],
            sum_sent_retweets: f[1],
            sum_sent_followers: f[2],
            mean_likes_per_follower: f[3],
            mean_retweets_per_follower: f[4],
        }
    }

    pub fn features(&self) -> [f64; 5] {
        [
            self.sum_sent_likes,
            self.sum_sent_retweets,
            self.sum_sent_followers,
            self.mean_likes_per_follower,
            self.mean_retweets_per_follower,
        ]
    }
}

/// One candidate's daily features plus the previous day's polling share.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureFrame {
    pub candidate: Candidate,
    pub rows: Vec<DailyFeatureRow>,
    /// Polling share on the day before each row, in percentage points.
    pub prev_poll: Vec<f64>,
}

impl FeatureFrame {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn dates(&self) -> Vec<NaiveDate> {
        self.rows.iter().map(|r| r.date).collect()
    }

    /// Values of feature column `j` (0..5) in date order.
    pub fn column(&self, j: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r.features()[j]).collect()
    }

    /// Rows `range` as a new frame.
    pub fn slice(&self, range: std::ops::Range<usize>) -> FeatureFrame {
        FeatureFrame {
            candidate: self.candidate,
            rows: self.rows[range.clone()].to_vec(),
            prev_poll: self.prev_poll[range].to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssembleOptions {
    /// Carry the prior day's engagement means over days without candidate posts.
    pub fill_engagement: bool,
}

/// Joins sums, means and lagged polls over every day of `range`.
pub fn assemble_frame(
    sums: &BTreeMap<NaiveDate, DaySums>,
    means: &BTreeMap<NaiveDate, DayMeans>,
    polls: &[PollSnapshot],
    candidate: Candidate,
    range: &DateRange,
    options: AssembleOptions,
) -> Result<FeatureFrame, FeatureError> {
    let poll_by_date: BTreeMap<NaiveDate, f64> = polls.iter().map(|p| (p.date, p.share(candidate))).collect();
    let mut rows = Vec::with_capacity(range.len());
    let mut prev_poll = Vec::with_capacity(range.len());
    let mut carried: Option<DayMeans> = None;
    for date in range.days() {
        let missing = FeatureError::MissingFeatureDay { candidate, date };
        let day_sums = sums.get(&date).ok_or(missing.clone())?;
        let day_means = match means.get(&date) {
            Some(m) => *m,
            None if options.fill_engagement => carried.ok_or(missing)?,
            None => return Err(missing),
        };
        carried = Some(day_means);
        let anchor = date - Duration::days(1);
        let lag = *poll_by_date.get(&anchor).ok_or(FeatureError::MissingLagAnchor { date: anchor })?;
        let [l, r, f] = day_sums.values();
        rows.push(DailyFeatureRow::from_features(
            date,
            [l, r, f, day_means.likes_per_follower, day_means.retweets_per_follower],
        ));
        prev_poll.push(lag);
    }
    Ok(FeatureFrame { candidate, rows, prev_poll })
}

/// Column headers of the frame CSV, matching the published table layout.
pub fn frame_headers(name: &str) -> [String; 7] {
    [
        "Date".to_string(),
        "Sum of Sentiment*Likes".to_string(),
        "Sum of Sentiment*Retweets".to_string(),
        "Sum of Sentiment*Followers".to_string(),
        format!("Mean of {name} Likes/Followers"),
        format!("Mean of {name} Retweets/Followers"),
        "Previous Polling Estimate".to_string(),
    ]
}

/// Writes a frame as CSV. `comments` become leading `# ` lines.
pub fn write_frame_csv<W: Write>(
    frame: &FeatureFrame,
    names: &CandidateNames,
    comments: &[String],
    mut out: W,
) -> io::Result<()> {
    for c in comments {
        writeln!(out, "# {c}")?;
    }
    writeln!(out, "{}", frame_headers(names.name(frame.candidate)).join(","))?;
    for (row, lag) in frame.rows.iter().zip(&frame.prev_poll) {
        let f = row.features();
        writeln!(out, "{},{},{},{},{},{},{}", row.date, f[0], f[1], f[2], f[3], f[4], lag)?;
    }
    Ok(())
}

/// Reads a frame CSV; `#` lines are skipped and the candidate is taken from
/// the `Mean of <name> ...` headers.
pub fn read_frame_csv<R: BufRead>(input: R, names: &CandidateNames) -> Result<FeatureFrame, FeatureError> {
    let mut header: Option<Vec<String>> = None;
    let mut candidate = None;
    let mut rows = Vec::new();
    let mut prev_poll = Vec::new();
    for (idx, line) in input.lines().enumerate() {
        let line_no = idx + 1;
        let malformed = |reason: String| FeatureError::MalformedFrame { line: line_no, reason };
        let line = line.map_err(|e| malformed(e.to_string()))?;
        let line = line.trim_end_matches('\r');
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if header.is_none() {
            let found = Candidate::ALL
                .into_iter()
                .find(|&c| frame_headers(names.name(c)).iter().zip(&cells).all(|(h, c)| h == c) && cells.len() == 7);
            candidate = Some(found.ok_or_else(|| malformed(format!("unexpected header `{line}`")))?);
            header = Some(cells.iter().map(|s| s.to_string()).collect());
            continue;
        }
        if cells.len() != 7 {
            return Err(malformed(format!("expected 7 cells, found {}", cells.len())));
        }
        let date = NaiveDate::parse_from_str(cells[0], "%Y-%m-%d")
            .map_err(|_| malformed(format!("bad date `{}`", cells[0])))?;
        let mut values = [0.0f64; 6];
        for (v, cell) in values.iter_mut().zip(&cells[1..]) {
            *v = cell.parse().map_err(|_| malformed(format!("bad number `{cell}`")))?;
            if !v.is_finite() {
                return Err(malformed(format!("non-finite value `{cell}`")));
            }
        }
        rows.push(DailyFeatureRow::from_features(
            date,
            [values[0], values[1], values[2], values[3], values[4]],
        ));
        prev_poll.push(values[5]);
    }
    let candidate = candidate.ok_or(FeatureError::MalformedFrame { line: 0, reason: "missing header".into() })?;
    for pair in rows.windows(2) {
        if pair[1].date != pair[0].date + Duration::days(1) {
            return Err(FeatureError::MalformedFrame {
                line: 0,
                reason: format!("dates not contiguous at {}", pair[1].date),
            });
        }
    }
    Ok(FeatureFrame { candidate, rows, prev_poll })
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::{TimeZone, Utc};

    fn d(day: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(2020, 10, day).unwrap()
    }

    fn tweet(day: u32, hour: u32, text: &str, likes: u64, retweets: u64, followers: u64) -> RawTweet {
        RawTweet {
            tweet_id: (day * 100 + hour) as u64,
            created_at: Utc.with_ymd_and_hms(2020, 10, day, hour, 0, 0).unwrap(),
            text: text.to_string(),
            like_count: likes,
            retweet_count: retweets,
            author_follower_count: followers,
            candidate_tag: Candidate::A,
        }
    }

    fn post(day: u32, hour: u32, likes: u64, retweets: u64, followers: u64) -> CandidatePost {
        CandidatePost {
            tweet_id: (day * 100 + hour) as u64,
            created_at: Utc.with_ymd_and_hms(2020, 10, day, hour, 0, 0).unwrap(),
            like_count: likes,
            retweet_count: retweets,
            author_follower_count_at_capture: followers,
            candidate: Candidate::A,
        }
    }

    fn fixed_scores(text: &str) -> f64 {
        match text {
            "pos" => 0.5,
            "neg" => -0.5,
            "strong" => 0.8,
            _ => 0.0,
        }
    }

    #[test]
    fn two_same_day_tweets() {
        let tweets = [tweet(16, 1, "pos", 10, 0, 0), tweet(16, 2, "neg", 4, 0, 0)];
        let sums = aggregate_hashtag_tweets(&tweets, fixed_scores);
        assert_eq!(sums[&d(16)].values()[0], 3.0);
    }

    #[test]
    fn neutral_day_sums_to_zero() {
        let tweets = [tweet(16, 1, "meh", 10, 3, 100), tweet(16, 2, "meh", 4, 1, 7)];
        let sums = aggregate_hashtag_tweets(&tweets, fixed_scores);
        assert_eq!(sums[&d(16)].values(), [0.0, 0.0, 0.0]);
    }

    #[test]
    fn six_tweet_two_day_fixture() {
        let tweets = [
            tweet(16, 1, "pos", 10, 2, 1000),
            tweet(16, 9, "neg", 4, 1, 250),
            tweet(16, 23, "strong", 5, 5, 40),
            tweet(17, 0, "neg", 12, 6, 300),
            tweet(17, 5, "meh", 100, 50, 9000),
            tweet(17, 7, "strong", 1, 0, 10),
        ];
        let sums = aggregate_hashtag_tweets(&tweets, fixed_scores);
        // Hand-computed: day 16 likes 5 − 2 + 4, retweets 1 − 0.5 + 4, followers 500 − 125 + 32.
        assert_eq!(sums[&d(16)].values(), [7.0, 4.5, 407.0]);
        // Day 17 likes −6 + 0 + 0.8, retweets −3, followers −150 + 8.
        assert_eq!(sums[&d(17)].values(), [-5.2, -3.0, -142.0]);
        assert_eq!(sums[&d(17)].n_tweets, 3);
    }

    #[test]
    fn engagement_means() {
        let means = aggregate_candidate_engagement(&[post(16, 3, 2000, 0, 1_000_000)]);
        assert_eq!(means[&d(16)].likes_per_follower, 0.002);
        let means = aggregate_candidate_engagement(&[post(16, 3, 1, 0, 1000), post(16, 4, 3, 0, 1000)]);
        assert_eq!(means[&d(16)].likes_per_follower, 0.002);
    }

    #[test]
    fn five_post_fixture() {
        let posts = [
            post(16, 1, 500, 100, 1000),
            post(16, 2, 300, 30, 1000),
            post(16, 3, 0, 0, 1000),
            post(17, 1, 80, 40, 400),
            post(17, 2, 20, 2, 100),
        ];
        let means = aggregate_candidate_engagement(&posts);
        // (0.5 + 0.3 + 0)/3 and (0.1 + 0.03 + 0)/3; (0.2 + 0.2)/2 and (0.1 + 0.02)/2.
        assert!((means[&d(16)].likes_per_follower - 0.8 / 3.0).abs() < 1e-15);
        assert!((means[&d(16)].retweets_per_follower - 0.13 / 3.0).abs() < 1e-15);
        assert_eq!(means[&d(17)].likes_per_follower, 0.2);
        assert!((means[&d(17)].retweets_per_follower - 0.06).abs() < 1e-15);
    }

    fn poll(day: u32, a: f64) -> PollSnapshot {
        PollSnapshot { date: d(day), shares: [a, 100.0 - a] }
    }

    #[test]
    fn one_day_frame() {
        let sums = aggregate_hashtag_tweets(&[tweet(16, 1, "pos", 10, 2, 1000)], fixed_scores);
        let means = aggregate_candidate_engagement(&[post(16, 1, 1, 1, 10)]);
        let frame = assemble_frame(
            &sums,
            &means,
            &[poll(15, 51.7), poll(16, 51.2)],
            Candidate::A,
            &DateRange::new(d(16), d(16)),
            AssembleOptions::default(),
        )
        .unwrap();
        assert_eq!(frame.len(), 1);
        assert_eq!(frame.prev_poll, vec![51.7]);
        assert_eq!(frame.rows[0].features(), [5.0, 1.0, 500.0, 0.1, 0.1]);
    }

    #[test]
    fn missing_day_and_fill() {
        let tweets = [tweet(16, 1, "pos", 10, 2, 1000), tweet(17, 1, "pos", 10, 2, 1000)];
        let sums = aggregate_hashtag_tweets(&tweets, fixed_scores);
        let means = aggregate_candidate_engagement(&[post(16, 1, 1, 1, 10)]);
        let polls = [poll(15, 50.0), poll(16, 50.5), poll(17, 51.0)];
        let range = DateRange::new(d(16), d(17));
        let err = assemble_frame(&sums, &means, &polls, Candidate::A, &range, AssembleOptions::default());
        assert_eq!(err, Err(FeatureError::MissingFeatureDay { candidate: Candidate::A, date: d(17) }));
        let frame = assemble_frame(&sums, &means, &polls, Candidate::A, &range, AssembleOptions { fill_engagement: true })
            .unwrap();
        assert_eq!(frame.rows[1].mean_likes_per_follower, 0.1);

        let err = assemble_frame(&sums, &means, &polls[1..], Candidate::A, &range, AssembleOptions { fill_engagement: true });
        assert_eq!(err, Err(FeatureError::MissingLagAnchor { date: d(15) }));
    }

    #[test]
    fn csv_round_trip() {
        let frame = FeatureFrame {
            candidate: Candidate::B,
            rows: vec![
                DailyFeatureRow::from_features(d(16), [0.1, -2.5, 1e8 / 3.0, 1e-6, 0.0]),
                DailyFeatureRow::from_features(d(17), [1.0, 2.0, 3.0, 4.0, 5.0]),
            ],
            prev_poll: vec![47.25, 46.0],
        };
        let names = CandidateNames::default();
        let mut buf = Vec::new();
        write_frame_csv(&frame, &names, &["config sha256 abc".into()], &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# config sha256 abc\nDate,Sum of Sentiment*Likes"));
        assert!(text.contains("Mean of Trump Likes/Followers"));
        let back = read_frame_csv(&buf[..], &names).unwrap();
        assert_eq!(back, frame);
    }
}
