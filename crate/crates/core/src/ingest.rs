//! Input datasets: hashtag tweets, candidate timelines and aggregate polling.
//!
//! Tweet and timeline files drop malformed rows and count them; polling files
//! are small and curated, so any defect there is an error. All timestamps are
//! UTC and the day boundary is UTC midnight.

use std::collections::{BTreeMap, HashSet};
use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::Path;

use chrono::{DateTime, Days, NaiveDate, NaiveDateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::{Candidate, CandidateNames};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{source_name}: missing column `{column}`")]
    MissingColumn { source_name: String, column: String },
    #[error("{source_name}: file is empty")]
    EmptyFile { source_name: String },
    #[error("{source_name}: line {line}: invalid UTF-8")]
    Encoding { source_name: String, line: u64 },
    #[error("{source_name}: line {line}: author follower count is zero")]
    ZeroFollowers { source_name: String, line: u64 },
    #[error("duplicate poll date {0}")]
    DuplicateDate(NaiveDate),
    #[error("poll share {value} for {candidate} on {date} is outside [0, 100]")]
    ShareOutOfRange {
        date: NaiveDate,
        candidate: String,
        value: f64,
    },
    #[error("{source_name}: no polling column for candidate `{name}`")]
    MissingCandidateColumn { source_name: String, name: String },
    #[error("{source_name}: line {line}: cannot parse {column} value `{value}`")]
    MalformedValue {
        source_name: String,
        line: u64,
        column: String,
        value: String,
    },
    #[error("{source_name}: {count} malformed rows rejected in strict mode (first at line {first_line}: {first_reason})")]
    StrictDrop {
        source_name: String,
        count: usize,
        first_line: u64,
        first_reason: DropReason,
    },
    #[error("no polls available on or before {0} to carry forward")]
    NothingToFill(NaiveDate),
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("{source_name}: {source}")]
    Io {
        source_name: String,
        #[source]
        source: io::Error,
    },
    #[error("{source_name}: {source}")]
    Csv {
        source_name: String,
        #[source]
        source: csv::Error,
    },
}

pub type Result<T> = std::result::Result<T, IngestError>;

/// One tweet from a hashtag collection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawTweet {
    pub tweet_id: u64,
    pub created_at: DateTime<Utc>,
    pub text: String,
    pub like_count: u64,
    pub retweet_count: u64,
    pub author_follower_count: u64,
    pub candidate_tag: Candidate,
}

/// One tweet from a candidate's own account.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidatePost {
    pub tweet_id: u64,
    pub created_at: DateTime<Utc>,
    pub like_count: u64,
    pub retweet_count: u64,
    pub author_follower_count_at_capture: u64,
    pub candidate: Candidate,
}

/// Aggregate polling for one day, percentage points indexed by [`Candidate::index`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PollSnapshot {
    pub date: NaiveDate,
    pub shares: [f64; 2],
}

impl PollSnapshot {
    pub fn share(&self, candidate: Candidate) -> f64 {
        self.shares[candidate.index()]
    }
}

/// Inclusive calendar-day range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DateRange {
    pub start: NaiveDate,
    pub end: NaiveDate,
}

impl DateRange {
    pub fn new(start: NaiveDate, end: NaiveDate) -> Self {
        assert!(start <= end, "date range start {start} is after end {end}");
        Self { start, end }
    }

    /// `n_days` consecutive days starting at `start`.
    pub fn from_len(start: NaiveDate, n_days: usize) -> Self {
        assert!(n_days >= 1);
        Self::new(start, start + Days::new(n_days as u64 - 1))
    }

    pub fn len(&self) -> usize {
        (self.end - self.start).num_days() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, date: NaiveDate) -> bool {
        self.start <= date && date <= self.end
    }

    pub fn days(&self) -> impl Iterator<Item = NaiveDate> {
        let start = self.start;
        (0..self.len() as u64).map(move |i| start + Days::new(i))
    }

    /// The day whose poll supplies the lag feature of `start`.
    pub fn lag_anchor(&self) -> NaiveDate {
        self.start.pred_opt().expect("date range starts at the minimum date")
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Corpus {
    pub tweets: Vec<RawTweet>,
    pub posts: Vec<CandidatePost>,
    pub polls: Vec<PollSnapshot>,
    pub date_range: Option<DateRange>,
}

impl Corpus {
    pub fn tweets_for(&self, candidate: Candidate) -> impl Iterator<Item = &RawTweet> {
        self.tweets.iter().filter(move |t| t.candidate_tag == candidate)
    }

    pub fn posts_for(&self, candidate: Candidate) -> impl Iterator<Item = &CandidatePost> {
        self.posts.iter().filter(move |p| p.candidate == candidate)
    }

    pub fn poll_table(&self) -> BTreeMap<NaiveDate, [f64; 2]> {
        self.polls.iter().map(|p| (p.date, p.shares)).collect()
    }
}

/// Column names for a hashtag tweet file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct TweetSchema {
    pub created_at: String,
    pub text: String,
    pub likes: String,
    pub retweets: String,
    pub followers: String,
    pub tweet_id: String,
}

impl Default for TweetSchema {
    fn default() -> Self {
        Self {
            created_at: "created_at".into(),
            text: "tweet".into(),
            likes: "likes".into(),
            retweets: "retweet_count".into(),
            followers: "user_followers_count".into(),
            tweet_id: "tweet_id".into(),
        }
    }
}

/// Column names for a candidate timeline file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct PostSchema {
    pub created_at: String,
    pub likes: String,
    pub retweets: String,
    pub followers: String,
    pub tweet_id: String,
}

impl Default for PostSchema {
    fn default() -> Self {
        let t = TweetSchema::default();
        Self {
            created_at: t.created_at,
            likes: t.likes,
            retweets: t.retweets,
            followers: t.followers,
            tweet_id: t.tweet_id,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DropReason {
    BadTimestamp,
    BadCount,
    BadId,
    EmptyText,
    DuplicateId,
    MissingField,
}

impl std::fmt::Display for DropReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            DropReason::BadTimestamp => "unparseable timestamp",
            DropReason::BadCount => "unparseable count",
            DropReason::BadId => "unparseable tweet id",
            DropReason::EmptyText => "empty text",
            DropReason::DuplicateId => "duplicate tweet id",
            DropReason::MissingField => "missing field",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DroppedRow {
    pub line: u64,
    pub reason: DropReason,
}

/// Parsed records plus the rows that were skipped.
#[derive(Debug, Clone, PartialEq)]
pub struct Parsed<T> {
    pub records: Vec<T>,
    pub dropped: Vec<DroppedRow>,
}

impl<T> Parsed<T> {
    pub fn dropped_count(&self) -> usize {
        self.dropped.len()
    }

    /// Turns any dropped row into an error.
    pub fn strict(self, source_name: &str) -> Result<Vec<T>> {
        match self.dropped.first() {
            None => Ok(self.records),
            Some(first) => Err(IngestError::StrictDrop {
                source_name: source_name.to_string(),
                count: self.dropped.len(),
                first_line: first.line,
                first_reason: first.reason,
            }),
        }
    }
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|source| IngestError::Io {
        source_name: path.display().to_string(),
        source,
    })
}

fn csv_error(source_name: &str, err: csv::Error) -> IngestError {
    if let csv::ErrorKind::Utf8 { pos, .. } = err.kind() {
        let line = pos.as_ref().map(|p| p.line()).unwrap_or(0);
        return IngestError::Encoding {
            source_name: source_name.to_string(),
            line,
        };
    }
    IngestError::Csv {
        source_name: source_name.to_string(),
        source: err,
    }
}

struct HeaderIndex {
    columns: Vec<String>,
}

impl HeaderIndex {
    fn read<R: Read>(rdr: &mut csv::Reader<R>, source_name: &str) -> Result<Self> {
        let headers = rdr.headers().map_err(|e| csv_error(source_name, e))?;
        if headers.is_empty() || (headers.len() == 1 && headers[0].trim().is_empty()) {
            return Err(IngestError::EmptyFile {
                source_name: source_name.to_string(),
            });
        }
        Ok(Self {
            columns: headers.iter().map(|h| h.trim().to_string()).collect(),
        })
    }

    fn find(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.eq_ignore_ascii_case(name))
    }

    fn require(&self, name: &str, source_name: &str) -> Result<usize> {
        self.find(name).ok_or_else(|| IngestError::MissingColumn {
            source_name: source_name.to_string(),
            column: name.to_string(),
        })
    }
}

fn reader<R: Read>(input: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(input)
}

/// Accepts RFC 3339 or `YYYY-MM-DD[ T]HH:MM:SS[.fff]` (taken as UTC).
pub fn parse_timestamp(raw: &str) -> Option<DateTime<Utc>> {
    let raw = raw.trim();
    if let Ok(ts) = DateTime::parse_from_rfc3339(raw) {
        return Some(ts.with_timezone(&Utc));
    }
    for fmt in ["%Y-%m-%d %H:%M:%S%.f", "%Y-%m-%dT%H:%M:%S%.f"] {
        if let Ok(naive) = NaiveDateTime::parse_from_str(raw, fmt) {
            return Some(naive.and_utc());
        }
    }
    None
}

pub fn format_timestamp(ts: &DateTime<Utc>) -> String {
    ts.format("%Y-%m-%dT%H:%M:%SZ").to_string()
}

/// Non-negative integer count; integral decimals such as `10.0` are accepted.
fn parse_count(raw: &str) -> Option<u64> {
    let raw = raw.trim();
    if let Ok(v) = raw.parse::<u64>() {
        return Some(v);
    }
    let v: f64 = raw.parse().ok()?;
    if v.is_finite() && v >= 0.0 && v.fract() == 0.0 && v < 9.007_199_254_740_992e15 {
        Some(v as u64)
    } else {
        None
    }
}

fn parse_date(raw: &str) -> Option<NaiveDate> {
    let raw = raw.trim();
    NaiveDate::parse_from_str(raw, "%Y-%m-%d")
        .or_else(|_| NaiveDate::parse_from_str(raw, "%m/%d/%Y"))
        .ok()
}

struct Row<'a> {
    record: &'a csv::StringRecord,
}

impl Row<'_> {
    fn get(&self, idx: usize) -> std::result::Result<&str, DropReason> {
        self.record.get(idx).ok_or(DropReason::MissingField)
    }
    fn timestamp(&self, idx: usize) -> std::result::Result<DateTime<Utc>, DropReason> {
        parse_timestamp(self.get(idx)?).ok_or(DropReason::BadTimestamp)
    }
    fn count(&self, idx: usize) -> std::result::Result<u64, DropReason> {
        parse_count(self.get(idx)?).ok_or(DropReason::BadCount)
    }
    fn id(&self, idx: usize) -> std::result::Result<u64, DropReason> {
        self.get(idx)?.trim().parse().map_err(|_| DropReason::BadId)
    }
}

/// Reads a hashtag tweet CSV from any reader. `source_name` labels errors.
pub fn read_tweets<R: Read>(
    input: R,
    source_name: &str,
    candidate_tag: Candidate,
    schema: &TweetSchema,
) -> Result<Parsed<RawTweet>> {
    let mut rdr = reader(input);
    let header = HeaderIndex::read(&mut rdr, source_name)?;
    let c_ts = header.require(&schema.created_at, source_name)?;
    let c_text = header.require(&schema.text, source_name)?;
    let c_likes = header.require(&schema.likes, source_name)?;
    let c_rts = header.require(&schema.retweets, source_name)?;
    let c_fol = header.require(&schema.followers, source_name)?;
    let c_id = header.require(&schema.tweet_id, source_name)?;

    let mut records = Vec::new();
    let mut dropped = Vec::new();
    let mut seen = HashSet::new();
    for result in rdr.records() {
        let record = result.map_err(|e| csv_error(source_name, e))?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let row = Row { record: &record };
        let parsed = (|| {
            let created_at = row.timestamp(c_ts)?;
            let text = row.get(c_text)?;
            if text.trim().is_empty() {
                return Err(DropReason::EmptyText);
            }
            let tweet = RawTweet {
                tweet_id: row.id(c_id)?,
                created_at,
                text: text.to_string(),
                like_count: row.count(c_likes)?,
                retweet_count: row.count(c_rts)?,
                author_follower_count: row.count(c_fol)?,
                candidate_tag,
            };
            if !seen.insert(tweet.tweet_id) {
                return Err(DropReason::DuplicateId);
            }
            Ok(tweet)
        })();
        match parsed {
            Ok(t) => records.push(t),
            Err(reason) => dropped.push(DroppedRow { line, reason }),
        }
    }
    Ok(Parsed { records, dropped })
}

pub fn parse_tweet_csv(
    path: impl AsRef<Path>,
    candidate_tag: Candidate,
    schema: &TweetSchema,
) -> Result<Parsed<RawTweet>> {
    let path = path.as_ref();
    read_tweets(open(path)?, &path.display().to_string(), candidate_tag, schema)
}

/// Reads a candidate timeline CSV. A zero follower count is fatal, since it
/// would be a ratio denominator downstream.
pub fn read_posts<R: Read>(
    input: R,
    source_name: &str,
    candidate: Candidate,
    schema: &PostSchema,
) -> Result<Parsed<CandidatePost>> {
    let mut rdr = reader(input);
    let header = HeaderIndex::read(&mut rdr, source_name)?;
    let c_ts = header.require(&schema.created_at, source_name)?;
    let c_likes = header.require(&schema.likes, source_name)?;
    let c_rts = header.require(&schema.retweets, source_name)?;
    let c_fol = header.require(&schema.followers, source_name)?;
    let c_id = header.require(&schema.tweet_id, source_name)?;

    let mut records = Vec::new();
    let mut dropped = Vec::new();
    let mut seen = HashSet::new();
    for result in rdr.records() {
        let record = result.map_err(|e| csv_error(source_name, e))?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let row = Row { record: &record };
        let parsed = (|| {
            let post = CandidatePost {
                tweet_id: row.id(c_id)?,
                created_at: row.timestamp(c_ts)?,
                like_count: row.count(c_likes)?,
                retweet_count: row.count(c_rts)?,
                author_follower_count_at_capture: row.count(c_fol)?,
                candidate,
            };
            if !seen.insert(post.tweet_id) {
                return Err(DropReason::DuplicateId);
            }
            Ok(post)
        })();
        match parsed {
            Ok(p) if p.author_follower_count_at_capture == 0 => {
                return Err(IngestError::ZeroFollowers {
                    source_name: source_name.to_string(),
                    line,
                })
            }
            Ok(p) => records.push(p),
            Err(reason) => dropped.push(DroppedRow { line, reason }),
        }
    }
    Ok(Parsed { records, dropped })
}

pub fn parse_candidate_csv(
    path: impl AsRef<Path>,
    candidate: Candidate,
    schema: &PostSchema,
) -> Result<Parsed<CandidatePost>> {
    let path = path.as_ref();
    read_posts(open(path)?, &path.display().to_string(), candidate, schema)
}

/// Reads a polling CSV with a `date` column and one column per candidate
/// name. Output is sorted by date.
pub fn read_polls<R: Read>(
    input: R,
    source_name: &str,
    names: &CandidateNames,
) -> Result<Vec<PollSnapshot>> {
    let mut rdr = reader(input);
    let header = HeaderIndex::read(&mut rdr, source_name)?;
    let c_date = header.require("date", source_name)?;
    let mut cols = [0usize; 2];
    for c in Candidate::ALL {
        let name = names.name(c);
        cols[c.index()] = header
            .find(name)
            .ok_or_else(|| IngestError::MissingCandidateColumn {
                source_name: source_name.to_string(),
                name: name.to_string(),
            })?;
    }

    let mut polls: Vec<PollSnapshot> = Vec::new();
    for result in rdr.records() {
        let record = result.map_err(|e| csv_error(source_name, e))?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let malformed = |column: &str, value: &str| IngestError::MalformedValue {
            source_name: source_name.to_string(),
            line,
            column: column.to_string(),
            value: value.to_string(),
        };
        let raw_date = record.get(c_date).unwrap_or("");
        let date = parse_date(raw_date).ok_or_else(|| malformed("date", raw_date))?;
        let mut shares = [0.0; 2];
        for c in Candidate::ALL {
            let raw = record.get(cols[c.index()]).unwrap_or("");
            let v: f64 = raw
                .trim()
                .parse()
                .map_err(|_| malformed(names.name(c), raw))?;
            if !(0.0..=100.0).contains(&v) {
                return Err(IngestError::ShareOutOfRange {
                    date,
                    candidate: names.name(c).to_string(),
                    value: v,
                });
            }
            shares[c.index()] = v;
        }
        polls.push(PollSnapshot { date, shares });
    }
    polls.sort_by_key(|p| p.date);
    if let Some(w) = polls.windows(2).find(|w| w[0].date == w[1].date) {
        return Err(IngestError::DuplicateDate(w[0].date));
    }
    Ok(polls)
}

pub fn parse_polling_csv(path: impl AsRef<Path>, names: &CandidateNames) -> Result<Vec<PollSnapshot>> {
    let path = path.as_ref();
    read_polls(open(path)?, &path.display().to_string(), names)
}

/// Carries the last known snapshot forward over missing days in
/// `[range.lag_anchor(), range.end]`. Returns the filled series and the dates
/// that were synthesized.
pub fn fill_polls(polls: &[PollSnapshot], range: &DateRange) -> Result<(Vec<PollSnapshot>, Vec<NaiveDate>)> {
    let table: BTreeMap<NaiveDate, [f64; 2]> = polls.iter().map(|p| (p.date, p.shares)).collect();
    let anchor = range.lag_anchor();
    let mut out: BTreeMap<NaiveDate, [f64; 2]> = table.clone();
    let mut filled = Vec::new();
    let mut day = anchor;
    while day <= range.end {
        if !table.contains_key(&day) {
            let (_, shares) = table
                .range(..day)
                .next_back()
                .ok_or(IngestError::NothingToFill(day))?;
            out.insert(day, *shares);
            filled.push(day);
        }
        day = day.succ_opt().expect("date overflow");
    }
    let series = out
        .into_iter()
        .map(|(date, shares)| PollSnapshot { date, shares })
        .collect();
    Ok((series, filled))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Finding {
    MissingTweetDay { candidate: Candidate, date: NaiveDate },
    MissingPostDay { candidate: Candidate, date: NaiveDate },
    MissingPollDay { date: NaiveDate },
    MissingLagAnchor { date: NaiveDate },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub range: Option<DateRange>,
    pub findings: Vec<Finding>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.findings.is_empty()
    }

    pub fn missing_poll_days(&self) -> impl Iterator<Item = NaiveDate> + '_ {
        self.findings.iter().filter_map(|f| match f {
            Finding::MissingPollDay { date } | Finding::MissingLagAnchor { date } => Some(*date),
            _ => None,
        })
    }
}

/// Coverage check over `required`: tweet days and post days per candidate,
/// poll days, and the poll on the day before `required.start`.
pub fn validate_corpus(corpus: &Corpus, required: &DateRange) -> ValidationReport {
    let mut tweet_days: [HashSet<NaiveDate>; 2] = Default::default();
    for t in &corpus.tweets {
        tweet_days[t.candidate_tag.index()].insert(t.created_at.date_naive());
    }
    let mut post_days: [HashSet<NaiveDate>; 2] = Default::default();
    for p in &corpus.posts {
        post_days[p.candidate.index()].insert(p.created_at.date_naive());
    }
    let poll_days: HashSet<NaiveDate> = corpus.polls.iter().map(|p| p.date).collect();

    let mut findings = Vec::new();
    if !poll_days.contains(&required.lag_anchor()) {
        findings.push(Finding::MissingLagAnchor {
            date: required.lag_anchor(),
        });
    }
    for date in required.days() {
        for c in Candidate::ALL {
            if !tweet_days[c.index()].contains(&date) {
                findings.push(Finding::MissingTweetDay { candidate: c, date });
            }
        }
        for c in Candidate::ALL {
            if !post_days[c.index()].contains(&date) {
                findings.push(Finding::MissingPostDay { candidate: c, date });
            }
        }
        if !poll_days.contains(&date) {
            findings.push(Finding::MissingPollDay { date });
        }
    }
    ValidationReport {
        range: Some(*required),
        findings,
    }
}

/// Writes one decimal tweet ID per line: hashtag tweets first, then
/// candidate posts, in corpus order, each ID once. No other field is written.
pub fn write_tweet_ids<W: Write>(corpus: &Corpus, mut out: W) -> io::Result<usize> {
    let mut seen = HashSet::new();
    let ids = corpus
        .tweets
        .iter()
        .map(|t| t.tweet_id)
        .chain(corpus.posts.iter().map(|p| p.tweet_id));
    let mut count = 0;
    for id in ids {
        if seen.insert(id) {
            writeln!(out, "{id}")?;
            count += 1;
        }
    }
    out.flush()?;
    Ok(count)
}

pub fn export_tweet_ids(corpus: &Corpus, path: impl AsRef<Path>) -> Result<usize> {
    if corpus.tweets.is_empty() && corpus.posts.is_empty() {
        return Err(IngestError::EmptyCorpus);
    }
    let path = path.as_ref();
    let io_err = |source| IngestError::Io {
        source_name: path.display().to_string(),
        source,
    };
    let file = File::create(path).map_err(io_err)?;
    write_tweet_ids(corpus, BufWriter::new(file)).map_err(io_err)
}

fn writer_error(source: csv::Error) -> io::Error {
    io::Error::other(source)
}

pub fn write_tweets<W: Write>(tweets: &[RawTweet], schema: &TweetSchema, out: W) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        &schema.created_at,
        &schema.text,
        &schema.likes,
        &schema.retweets,
        &schema.followers,
        &schema.tweet_id,
    ])
    .map_err(writer_error)?;
    for t in tweets {
        w.write_record([
            format_timestamp(&t.created_at),
            t.text.clone(),
            t.like_count.to_string(),
            t.retweet_count.to_string(),
            t.author_follower_count.to_string(),
            t.tweet_id.to_string(),
        ])
        .map_err(writer_error)?;
    }
    w.flush()
}

pub fn write_posts<W: Write>(posts: &[CandidatePost], schema: &PostSchema, out: W) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        &schema.created_at,
        &schema.likes,
        &schema.retweets,
        &schema.followers,
        &schema.tweet_id,
    ])
    .map_err(writer_error)?;
    for p in posts {
        w.write_record([
            format_timestamp(&p.created_at),
            p.like_count.to_string(),
            p.retweet_count.to_string(),
            p.author_follower_count_at_capture.to_string(),
            p.tweet_id.to_string(),
        ])
        .map_err(writer_error)?;
    }
    w.flush()
}

pub fn write_polls<W: Write>(polls: &[PollSnapshot], names: &CandidateNames, out: W) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["date", names.name(Candidate::A), names.name(Candidate::B)])
        .map_err(writer_error)?;
    for p in polls {
        w.write_record([
            p.date.format("%Y-%m-%d").to_string(),
            p.shares[0].to_string(),
            p.shares[1].to_string(),
        ])
        .map_err(writer_error)?;
    }
    w.flush()
}
