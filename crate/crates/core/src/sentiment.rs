//! Lexicon-and-rules sentiment scoring (VADER-compatible).
//!
//! The rule set and every constant follow the public reference
//! implementation (vaderSentiment 3.3.2) so compound scores agree with it to
//! floating-point precision. The lexicon is data loaded at run time; only the
//! rule vocabulary (negators, boosters, idioms) lives in code.

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Normalization constant: approximates the largest expected raw sum.
pub const ALPHA: f64 = 15.0;

const B_INCR: f64 = 0.293;
const B_DECR: f64 = -0.293;
const C_INCR: f64 = 0.733;
const N_SCALAR: f64 = -0.74;
const EXCLAMATION_INCR: f64 = 0.292;
const MAX_EXCLAMATIONS: usize = 4;
const QUESTION_INCR: f64 = 0.18;
const QUESTION_CAP: f64 = 0.96;
const BUT_BEFORE: f64 = 0.5;
const BUT_AFTER: f64 = 1.5;

const NEGATE: &[&str] = &[
    "aint", "arent", "cannot", "cant", "couldnt", "darent", "didnt", "doesnt", "ain't", "aren't",
    "can't", "couldn't", "daren't", "didn't", "doesn't", "dont", "hadnt", "hasnt", "havent",
    "isnt", "mightnt", "mustnt", "neither", "don't", "hadn't", "hasn't", "haven't", "isn't",
    "mightn't", "mustn't", "neednt", "needn't", "never", "none", "nope", "nor", "not", "nothing",
    "nowhere", "oughtnt", "shant", "shouldnt", "uhuh", "wasnt", "werent", "oughtn't", "shan't",
    "shouldn't", "uh-uh", "wasn't", "weren't", "without", "wont", "wouldnt", "won't", "wouldn't",
    "rarely", "seldom", "despite",
];

const BOOSTERS_UP: &[&str] = &[
    "absolutely", "amazingly", "awfully", "completely", "considerable", "considerably",
    "decidedly", "deeply", "effing", "enormous", "enormously", "entirely", "especially",
    "exceptional", "exceptionally", "extreme", "extremely", "fabulously", "flipping", "flippin",
    "frackin", "fracking", "fricking", "frickin", "frigging", "friggin", "fully", "fuckin",
    "fucking", "fuggin", "fugging", "greatly", "hella", "highly", "hugely", "incredible",
    "incredibly", "intensely", "major", "majorly", "more", "most", "particularly", "purely",
    "quite", "really", "remarkably", "so", "substantially", "thoroughly", "total", "totally",
    "tremendous", "tremendously", "uber", "unbelievably", "unusually", "utter", "utterly", "very",
];

const BOOSTERS_DOWN: &[&str] = &[
    "almost", "barely", "hardly", "just enough", "kind of", "kinda", "kindof", "kind-of", "less",
    "little", "marginal", "marginally", "occasional", "occasionally", "partly", "scarce",
    "scarcely", "slight", "slightly", "somewhat", "sort of", "sorta", "sortof", "sort-of",
];

const SPECIAL_CASES: &[(&str, f64)] = &[
    ("the shit", 3.0),
    ("the bomb", 3.0),
    ("bad ass", 1.5),
    ("badass", 1.5),
    ("bus stop", 0.0),
    ("yeah right", -2.0),
    ("kiss of death", -1.5),
    ("to die for", 3.0),
    ("beating heart", 3.5),
];

/// Bundled copies of the reference lexicon files (MIT, see `assets/`).
pub mod bundled {
    pub const LEXICON: &str = include_str!("../assets/vader_lexicon.txt");
    pub const EMOJI: &str = include_str!("../assets/emoji_utf8_lexicon.txt");
}

#[derive(Debug, Error)]
pub enum SentimentError {
    #[error("lexicon line {line}: {reason}")]
    MalformedLexiconRow { line: usize, reason: String },
    #[error("lexicon is empty")]
    EmptyLexicon,
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Token → mean valence in [−4, 4]. Duplicate tokens keep the last row.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Lexicon {
    entries: HashMap<String, f64>,
}

impl Lexicon {
    /// Parses tab-separated `token<TAB>valence[<TAB>ignored...]` rows.
    pub fn parse(content: &str) -> Result<Self, SentimentError> {
        let mut entries = HashMap::new();
        for (idx, raw) in content.trim_end_matches('\n').split('\n').enumerate() {
            if raw.is_empty() {
                continue;
            }
            let line = idx + 1;
            let mut fields = raw.trim().split('\t');
            let token = fields.next().unwrap_or("");
            let valence = fields.next().ok_or_else(|| SentimentError::MalformedLexiconRow {
                line,
                reason: "expected a tab-separated valence".into(),
            })?;
            let valence: f64 = valence.trim().parse().map_err(|_| SentimentError::MalformedLexiconRow {
                line,
                reason: format!("valence `{valence}` is not a number"),
            })?;
            if !(-4.0..=4.0).contains(&valence) {
                return Err(SentimentError::MalformedLexiconRow {
                    line,
                    reason: format!("valence {valence} outside [-4, 4]"),
                });
            }
            entries.insert(token.to_string(), valence);
        }
        if entries.is_empty() {
            return Err(SentimentError::EmptyLexicon);
        }
        Ok(Self { entries })
    }

    pub fn from_entries<I, S>(entries: I) -> Self
    where
        I: IntoIterator<Item = (S, f64)>,
        S: Into<String>,
    {
        Self {
            entries: entries.into_iter().map(|(k, v)| (k.into(), v)).collect(),
        }
    }

    pub fn bundled() -> Self {
        Self::parse(bundled::LEXICON).expect("bundled lexicon parses")
    }

    pub fn get(&self, token: &str) -> Option<f64> {
        self.entries.get(token).copied()
    }

    pub fn contains(&self, token: &str) -> bool {
        self.entries.contains_key(token)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Same tokens with every valence multiplied by −1.
    pub fn negated(&self) -> Self {
        Self {
            entries: self.entries.iter().map(|(k, v)| (k.clone(), -v)).collect(),
        }
    }
}

pub fn load_lexicon(path: impl AsRef<Path>) -> Result<Lexicon, SentimentError> {
    let path = path.as_ref();
    let content = std::fs::read_to_string(path).map_err(|source| SentimentError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Lexicon::parse(&content)
}

/// Single code-point emoji → textual description.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EmojiLexicon {
    entries: HashMap<char, String>,
}

impl EmojiLexicon {
    pub fn parse(content: &str) -> Result<Self, SentimentError> {
        let mut entries = HashMap::new();
        for (idx, raw) in content.trim_end_matches('\n').split('\n').enumerate() {
            let mut fields = raw.trim().split('\t');
            let emoji = fields.next().unwrap_or("");
            let description = fields.next().ok_or_else(|| SentimentError::MalformedLexiconRow {
                line: idx + 1,
                reason: "expected a tab-separated description".into(),
            })?;
            let mut chars = emoji.chars();
            // Multi-code-point sequences can never match a single character.
            if let (Some(c), None) = (chars.next(), chars.next()) {
                entries.insert(c, description.to_string());
            }
        }
        Ok(Self { entries })
    }

    pub fn bundled() -> Self {
        Self::parse(bundled::EMOJI).expect("bundled emoji lexicon parses")
    }

    /// Replaces each known emoji with its description, space-separated from
    /// preceding text.
    pub fn translate(&self, text: &str) -> String {
        let mut out = String::with_capacity(text.len());
        let mut prev_space = true;
        for ch in text.chars() {
            match self.entries.get(&ch) {
                Some(description) => {
                    if !prev_space {
                        out.push(' ');
                    }
                    out.push_str(description);
                    prev_space = false;
                }
                None => {
                    out.push(ch);
                    prev_space = ch == ' ';
                }
            }
        }
        out
    }
}

/// Compound valence in [−1, 1] plus the positive/neutral/negative proportions.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SentimentScore {
    pub compound: f64,
    pub pos: f64,
    pub neu: f64,
    pub neg: f64,
}

/// Per-token trace of a scored text.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredText {
    pub tokens: Vec<String>,
    /// Adjusted valence per token after all rules, including the "but" reweighting.
    pub valences: Vec<f64>,
    pub punctuation_amplifier: f64,
    pub raw_sum: f64,
    pub score: SentimentScore,
}

/// `s / √(s² + α)` clamped to [−1, 1].
pub fn normalize_with_alpha(sum: f64, alpha: f64) -> f64 {
    let norm = sum / (sum * sum + alpha).sqrt();
    norm.clamp(-1.0, 1.0)
}

pub fn normalize_score(sum: f64) -> f64 {
    normalize_with_alpha(sum, ALPHA)
}

/// Scores `text` against `lexicon` without emoji translation.
pub fn score_text(text: &str, lexicon: &Lexicon) -> SentimentScore {
    Engine { lexicon }.score(text).score
}

#[derive(Debug, Clone)]
pub struct SentimentAnalyzer {
    lexicon: Lexicon,
    emoji: Option<EmojiLexicon>,
}

impl SentimentAnalyzer {
    pub fn new(lexicon: Lexicon) -> Self {
        Self { lexicon, emoji: None }
    }

    pub fn with_emoji(mut self, emoji: EmojiLexicon) -> Self {
        self.emoji = Some(emoji);
        self
    }

    /// Bundled lexicon and emoji table.
    pub fn bundled() -> Self {
        Self::new(Lexicon::bundled()).with_emoji(EmojiLexicon::bundled())
    }

    pub fn lexicon(&self) -> &Lexicon {
        &self.lexicon
    }

    pub fn score(&self, text: &str) -> SentimentScore {
        self.explain(text).score
    }

    pub fn compound(&self, text: &str) -> f64 {
        self.score(text).compound
    }

    pub fn explain(&self, text: &str) -> ScoredText {
        let engine = Engine { lexicon: &self.lexicon };
        match &self.emoji {
            Some(emoji) => engine.score(&emoji.translate(text)),
            None => engine.score(text),
        }
    }
}

/// Whitespace as understood by Python's `str.split()`; adds the ASCII
/// information separators U+001C..U+001F to Unicode White_Space.
fn is_split_space(c: char) -> bool {
    c.is_whitespace() || ('\u{1c}'..='\u{1f}').contains(&c)
}

fn is_titlecase(c: char) -> bool {
    matches!(c as u32,
        0x01C5 | 0x01C8 | 0x01CB | 0x01F2 | 0x1F88..=0x1F8F | 0x1F98..=0x1F9F
        | 0x1FA8..=0x1FAF | 0x1FBC | 0x1FCC | 0x1FFC)
}

/// `str.isupper()`: at least one cased character and none lowercase or titlecase.
fn is_upper(word: &str) -> bool {
    let mut any_upper = false;
    for c in word.chars() {
        if c.is_lowercase() || is_titlecase(c) {
            return false;
        }
        if c.is_uppercase() {
            any_upper = true;
        }
    }
    any_upper
}

/// Drops leading/trailing ASCII punctuation unless that leaves two
/// characters or fewer (keeps emoticons such as `:)`).
fn strip_punctuation(token: &str) -> &str {
    let stripped = token.trim_matches(|c: char| c.is_ascii_punctuation());
    if stripped.chars().count() <= 2 {
        token
    } else {
        stripped
    }
}

fn booster(word_lower: &str) -> Option<f64> {
    if BOOSTERS_UP.contains(&word_lower) {
        Some(B_INCR)
    } else if BOOSTERS_DOWN.contains(&word_lower) {
        Some(B_DECR)
    } else {
        None
    }
}

fn special_case(phrase: &str) -> Option<f64> {
    SPECIAL_CASES.iter().find(|(k, _)| *k == phrase).map(|(_, v)| *v)
}

fn is_negated(word_lower: &str) -> bool {
    NEGATE.contains(&word_lower) || word_lower.contains("n't")
}

fn amplify_exclamation(text: &str) -> f64 {
    let count = text.matches('!').count().min(MAX_EXCLAMATIONS);
    count as f64 * EXCLAMATION_INCR
}

fn amplify_question(text: &str) -> f64 {
    match text.matches('?').count() {
        0 | 1 => 0.0,
        n @ 2..=3 => n as f64 * QUESTION_INCR,
        _ => QUESTION_CAP,
    }
}

struct Tokens {
    words: Vec<String>,
    lower: Vec<String>,
    cap_differential: bool,
}

impl Tokens {
    fn new(text: &str) -> Self {
        let words: Vec<String> = text
            .split(is_split_space)
            .filter(|w| !w.is_empty())
            .map(|w| strip_punctuation(w).to_string())
            .collect();
        let lower = words.iter().map(|w| w.to_lowercase()).collect();
        let upper_count = words.iter().filter(|w| is_upper(w)).count();
        let differential = words.len() - upper_count;
        Self {
            cap_differential: differential > 0 && differential < words.len(),
            words,
            lower,
        }
    }

    fn len(&self) -> usize {
        self.words.len()
    }
}

struct Engine<'a> {
    lexicon: &'a Lexicon,
}

impl Engine<'_> {
    fn score(&self, text: &str) -> ScoredText {
        let text = text.trim_matches(is_split_space);
        let tokens = Tokens::new(text);
        let mut valences = Vec::with_capacity(tokens.len());
        for i in 0..tokens.len() {
            let lower = tokens.lower[i].as_str();
            let is_modifier = booster(lower).is_some()
                || (lower == "kind" && i + 1 < tokens.len() && tokens.lower[i + 1] == "of");
            let v = if is_modifier { 0.0 } else { self.token_valence(&tokens, i) };
            valences.push(v);
        }
        but_reweight(&tokens, &mut valences);

        let punctuation = amplify_exclamation(text) + amplify_question(text);
        if valences.is_empty() {
            return ScoredText {
                tokens: tokens.words,
                valences,
                punctuation_amplifier: punctuation,
                raw_sum: 0.0,
                score: SentimentScore::default(),
            };
        }

        let mut sum = valences.iter().fold(0.0, |acc, v| acc + v);
        if sum > 0.0 {
            sum += punctuation;
        } else if sum < 0.0 {
            sum -= punctuation;
        }
        let compound = normalize_score(sum);

        let mut pos_sum = 0.0;
        let mut neg_sum = 0.0;
        let mut neu_count = 0usize;
        for &v in &valences {
            if v > 0.0 {
                pos_sum += v + 1.0;
            }
            if v < 0.0 {
                neg_sum += v - 1.0;
            }
            if v == 0.0 {
                neu_count += 1;
            }
        }
        if pos_sum > neg_sum.abs() {
            pos_sum += punctuation;
        } else if pos_sum < neg_sum.abs() {
            neg_sum -= punctuation;
        }
        let total = pos_sum + neg_sum.abs() + neu_count as f64;
        ScoredText {
            tokens: tokens.words,
            valences,
            punctuation_amplifier: punctuation,
            raw_sum: sum,
            score: SentimentScore {
                compound,
                pos: (pos_sum / total).abs(),
                neu: (neu_count as f64 / total).abs(),
                neg: (neg_sum / total).abs(),
            },
        }
    }

    fn token_valence(&self, t: &Tokens, i: usize) -> f64 {
        let item_lower = t.lower[i].as_str();
        let Some(base) = self.lexicon.get(item_lower) else {
            return 0.0;
        };
        let mut valence = base;

        // "no" directly before another lexicon word acts as a negator, not a word.
        if item_lower == "no" && i != t.len() - 1 && self.lexicon.contains(&t.lower[i + 1]) {
            valence = 0.0;
        }
        if (i > 0 && t.lower[i - 1] == "no")
            || (i > 1 && t.lower[i - 2] == "no")
            || (i > 2 && t.lower[i - 3] == "no" && matches!(t.lower[i - 1].as_str(), "or" | "nor"))
        {
            valence = base * N_SCALAR;
        }

        if is_upper(&t.words[i]) && t.cap_differential {
            if valence > 0.0 {
                valence += C_INCR;
            } else {
                valence -= C_INCR;
            }
        }

        for start in 0..3 {
            if i > start && !self.lexicon.contains(&t.lower[i - (start + 1)]) {
                let mut s = scalar_inc_dec(&t.words[i - (start + 1)], &t.lower[i - (start + 1)], valence, t.cap_differential);
                if start == 1 && s != 0.0 {
                    s *= 0.95;
                }
                if start == 2 && s != 0.0 {
                    s *= 0.9;
                }
                valence += s;
                valence = negation_check(valence, &t.lower, start, i);
                if start == 2 {
                    valence = special_idioms_check(valence, &t.lower, i);
                }
            }
        }
        self.least_check(valence, &t.lower, i)
    }

    fn least_check(&self, valence: f64, lower: &[String], i: usize) -> f64 {
        if i > 1 && !self.lexicon.contains(&lower[i - 1]) && lower[i - 1] == "least" {
            if lower[i - 2] != "at" && lower[i - 2] != "very" {
                return valence * N_SCALAR;
            }
        } else if i > 0 && !self.lexicon.contains(&lower[i - 1]) && lower[i - 1] == "least" {
            return valence * N_SCALAR;
        }
        valence
    }
}

fn scalar_inc_dec(word: &str, word_lower: &str, valence: f64, cap_differential: bool) -> f64 {
    let Some(mut scalar) = booster(word_lower) else {
        return 0.0;
    };
    if valence < 0.0 {
        scalar *= -1.0;
    }
    if is_upper(word) && cap_differential {
        if valence > 0.0 {
            scalar += C_INCR;
        } else {
            scalar -= C_INCR;
        }
    }
    scalar
}

fn negation_check(valence: f64, lower: &[String], start: usize, i: usize) -> f64 {
    let w = |back: usize| lower[i - back].as_str();
    match start {
        0 => {
            if is_negated(w(1)) {
                return valence * N_SCALAR;
            }
        }
        1 => {
            if w(2) == "never" && matches!(w(1), "so" | "this") {
                return valence * 1.25;
            } else if w(2) == "without" && w(1) == "doubt" {
                return valence;
            } else if is_negated(w(2)) {
                return valence * N_SCALAR;
            }
        }
        2 => {
            // The reference groups this as `(never ∧ (so ∨ this)) ∨ (so ∨ this)`.
            if (w(3) == "never" && matches!(w(2), "so" | "this")) || matches!(w(1), "so" | "this") {
                return valence * 1.25;
            } else if w(3) == "without" && (w(2) == "doubt" || w(1) == "doubt") {
                return valence;
            } else if is_negated(w(3)) {
                return valence * N_SCALAR;
            }
        }
        _ => {}
    }
    valence
}

fn special_idioms_check(mut valence: f64, lower: &[String], i: usize) -> f64 {
    let onezero = format!("{} {}", lower[i - 1], lower[i]);
    let twoonezero = format!("{} {} {}", lower[i - 2], lower[i - 1], lower[i]);
    let twoone = format!("{} {}", lower[i - 2], lower[i - 1]);
    let threetwoone = format!("{} {} {}", lower[i - 3], lower[i - 2], lower[i - 1]);
    let threetwo = format!("{} {}", lower[i - 3], lower[i - 2]);

    for seq in [&onezero, &twoonezero, &twoone, &threetwoone, &threetwo] {
        if let Some(v) = special_case(seq) {
            valence = v;
            break;
        }
    }
    if lower.len() - 1 > i {
        if let Some(v) = special_case(&format!("{} {}", lower[i], lower[i + 1])) {
            valence = v;
        }
    }
    if lower.len() - 1 > i + 1 {
        if let Some(v) = special_case(&format!("{} {} {}", lower[i], lower[i + 1], lower[i + 2])) {
            valence = v;
        }
    }
    for ngram in [&threetwoone, &threetwo, &twoone] {
        if let Some(b) = booster(ngram) {
            valence += b;
        }
    }
    valence
}

/// Halves valences before the first "but" and scales those after by 1.5.
///
/// Positions are resolved by value (first equal entry), exactly like the
/// reference; with repeated valences this can rescale an earlier entry twice.
fn but_reweight(tokens: &Tokens, valences: &mut [f64]) {
    let Some(bi) = tokens.lower.iter().position(|w| w == "but") else {
        return;
    };
    for p in 0..valences.len() {
        let v = valences[p];
        let si = valences.iter().position(|&x| x == v).expect("value present");
        if si < bi {
            valences[si] = v * BUT_BEFORE;
        } else if si > bi {
            valences[si] = v * BUT_AFTER;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn analyzer() -> &'static SentimentAnalyzer {
        static ANALYZER: std::sync::OnceLock<SentimentAnalyzer> = std::sync::OnceLock::new();
        ANALYZER.get_or_init(SentimentAnalyzer::bundled)
    }

    #[test]
    fn empty_text_scores_zero() {
        let s = analyzer().score("");
        assert_eq!(s, SentimentScore::default());
    }

    #[test]
    fn single_word_good() {
        let s = analyzer().score("good");
        assert!((s.compound - 0.4404).abs() < 1e-4);
        assert_eq!(s.pos, 1.0);
    }

    #[test]
    fn emphasis_outranks_plain() {
        let a = analyzer();
        assert!(a.compound("The movie was GOOD!!") > a.compound("The movie was good."));
    }

    #[test]
    fn normalize_fixed_points() {
        assert_eq!(normalize_score(0.0), 0.0);
        assert!((normalize_score(15f64.sqrt()) - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        for s in [0.1, 1.0, 3.3, 17.0, 250.0] {
            assert_eq!(normalize_score(-s), -normalize_score(s));
        }
    }

    #[test]
    fn no_hit_text_is_fully_neutral() {
        let s = analyzer().score("the candidate spoke on tuesday");
        assert_eq!(s.compound, 0.0);
        assert_eq!(s.neu, 1.0);
    }

    #[test]
    fn lexicon_rows() {
        let lex = Lexicon::parse("good\t1.9\t0.9434\t[2, 1]\n").unwrap();
        assert_eq!(lex.get("good"), Some(1.9));
        let lex = Lexicon::parse("good\t1.9\ngood\t-0.5\n").unwrap();
        assert_eq!(lex.get("good"), Some(-0.5));
        assert!(matches!(Lexicon::parse(""), Err(SentimentError::EmptyLexicon)));
        assert!(matches!(
            Lexicon::parse("good\t1.9\nbroken\n"),
            Err(SentimentError::MalformedLexiconRow { line: 2, .. })
        ));
        assert!(matches!(
            Lexicon::parse("good\t9.0\n"),
            Err(SentimentError::MalformedLexiconRow { line: 1, .. })
        ));
    }

    #[test]
    fn bundled_lexicon_reads_published_value() {
        assert_eq!(Lexicon::bundled().get("good"), Some(1.9));
    }

    #[test]
    fn negation_flips_and_dampens() {
        let a = analyzer();
        assert!(a.compound("not good") < 0.0);
        assert!(a.compound("isn't good") < 0.0);
    }

    #[test]
    fn but_shifts_weight_to_second_clause() {
        let a = analyzer();
        let trace = a.explain("good but bad");
        assert_eq!(trace.valences[0], 1.9 * 0.5);
        assert_eq!(trace.valences[2], -2.5 * 1.5);
    }

    #[test]
    fn emoji_are_translated_before_scoring() {
        let a = analyzer();
        let trace = a.explain("vote \u{1F600}");
        assert!(trace.tokens.len() > 2);
        assert!(a.compound("vote \u{1F600}") > 0.0);
    }

    #[test]
    fn punctuation_stripping_keeps_emoticons() {
        assert_eq!(strip_punctuation(":)"), ":)");
        assert_eq!(strip_punctuation("good!!"), "good");
        assert_eq!(strip_punctuation("#Biden"), "Biden");
    }

    #[test]
    fn python_isupper_semantics() {
        assert!(is_upper("GOOD"));
        assert!(is_upper("GOOD!"));
        assert!(!is_upper("Good"));
        assert!(!is_upper("123"));
        assert!(!is_upper(":)"));
    }

    fn fuzz_text() -> impl Strategy<Value = String> {
        prop_oneof![
            "\\PC{0,120}",
            proptest::collection::vec(prop_oneof![Just("😀"), Just("💔"), Just("🇺🇸"), Just(":)"), Just("!!"), Just("GOOD"), Just("not")], 0..40)
                .prop_map(|parts| parts.join(" ")),
            ("[a-zA-Z!?. ]{1,4}", 1usize..400).prop_map(|(unit, n)| unit.repeat(n)),
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]
        #[test]
        fn compound_is_bounded(text in fuzz_text()) {
            let s = analyzer().score(&text);
            prop_assert!((-1.0..=1.0).contains(&s.compound));
            prop_assert!(s.compound.is_finite());
        }
    }

    proptest! {
        #[test]
        fn negated_lexicon_negates_compound(words in proptest::collection::vec(prop_oneof![
            Just("good"), Just("GREAT"), Just("bad"), Just("awful"), Just("very"), Just("extremely"),
            Just("slightly"), Just("rally"), Just("debate"), Just("happy"), Just("sad"), Just("!"), Just("?"),
        ], 1..12)) {
            let text = words.join(" ");
            let plain = analyzer();
            let flipped = SentimentAnalyzer::new(plain.lexicon().negated());
            prop_assert!((plain.compound(&text) + flipped.compound(&text)).abs() <= 1e-9);
        }

        #[test]
        fn exclamations_never_lower_positive_scores(words in proptest::sample::subsequence(
            vec!["the", "debate", "was", "good", "great", "happy", "rally", "very", "bad"], 1..6)) {
            let a = analyzer();
            let base = words.join(" ");
            let mut prev = a.compound(&base);
            if prev > 0.0 {
                let mut text = base.clone();
                for _ in 0..3 {
                    text.push('!');
                    let next = a.compound(&text);
                    prop_assert!(next >= prev);
                    prev = next;
                }
            }
        }
    }
}
