"""Freeze reference compound/pos/neu/neg scores for the sentiment oracle corpus.

Requires `pip install vaderSentiment==3.3.2`. Scores are captured unrounded by
shadowing the module-level `round` the reference uses when building its result.
Output: crates/core/tests/fixtures/sentiment_oracle.json
"""
import json
import random
import sys
from pathlib import Path

import vaderSentiment.vaderSentiment as ref

ref.round = lambda x, n=None: x  # keep full precision

ROOT = Path(__file__).resolve().parents[2]
OUT = ROOT / "crates/core/tests/fixtures/sentiment_oracle.json"

HANDCRAFTED = [
    "",
    "   ",
    "good",
    "GOOD",
    "The movie was GOOD!!",
    "The movie was good.",
    "VADER is smart, handsome, and funny.",
    "VADER is smart, handsome, and funny!",
    "VADER is very smart, handsome, and funny.",
    "VADER is VERY SMART, handsome, and FUNNY.",
    "VADER is VERY SMART, handsome, and FUNNY!!!",
    "VADER is VERY SMART, uber handsome, and FRIGGIN FUNNY!!!",
    "VADER is not smart, handsome, nor funny.",
    "The book was good.",
    "At least it isn't a horrible book.",
    "The book was only kind of good.",
    "The plot was good, but the characters are uncompelling and the dialog is not great.",
    "Today SUX!",
    "Today only kinda sux! But I'll get by, lol",
    "Make sure you :) or :D today!",
    "Catch utf-8 emoji such as \U0001F498 and \U0001F48B and \U0001F601",
    "Not bad at all",
    "Sentiment analysis has never been good.",
    "Sentiment analysis has never been this good!",
    "Most automated sentiment analysis tools are shit.",
    "With VADER, sentiment analysis is the shit!",
    "Other sentiment analysis tools can be quite bad.",
    "On the other hand, VADER is quite bad ass",
    "VADER is such a badass!",
    "Without a doubt, excellent idea.",
    "Roger Dodger is one of the most compelling variations on this theme.",
    "Roger Dodger is at least compelling as a variation on the theme.",
    "Roger Dodger is one of the least compelling variations on this theme.",
    "Not such a badass after all.",
    "Without a doubt, an excellent idea.",
    "no good",
    "no problem at all",
    "there is no way this is good",
    "no, nor happy",
    "Is it good??",
    "Is it good???",
    "Is it good?????",
    "good!!!!!!",
    "bad!!!!",
    "This is the least bad option",
    "very least good",
    "I cant believe how good this is",
    "I didn't like it",
    "it was kind of bad but mostly great",
    "but",
    "good but",
    "but good",
    "bad bad but bad bad",
    "great great BUT great",
    "sort of nice, sorta nice, kind-of nice",
    "to die for",
    "that was the bomb",
    "kiss of death for the campaign",
    "yeah right, great job",
    "beating heart of the rally",
    "12345 67890",
    "!!! ??? ...",
    "#Biden #Trump #JoeBiden #DonaldTrump",
    "Vote! Vote! Vote!",
    "never so happy",
    "never this sad",
    "without doubt the best",
    "rarely good",
    "seldom bad",
    "despite the rain, a lovely day",
    "HATE hate Hate",
    "LOVE IT",
    "I LOVE it",
    "ok ok ok lol lmao",
    "café naïve résumé good",
    "投票 good 选举",
    "\U0001F600\U0001F600\U0001F600",
    "❤️ this debate",
    "He is an absolute disaster!!! #Trump",
    "Proud of @JoeBiden tonight",
    "The economy is strong, jobs are back, America wins!",
    "Corruption everywhere, a total disgrace.",
    "Can't stand this, fed up with the lies",
    "not bad, not good, just meh",
    "hardly a win",
    "barely good enough",
    "extremely good",
    "EXTREMELY good",
    "Extremely good",
    "so very extremely good",
]

TEMPLATES = [
    "the debate was {w}",
    "what a {w} rally today",
    "{w} news for america",
]
TEMPLATE_WORDS = ["great", "worst", "hope", "weak", "proud", "sad", "honest", "liar",
                  "happy", "hate", "amazing", "cruel", "peace", "bad"]


def random_texts(n, seed):
    rng = random.Random(seed)
    lex_lines = Path(ref.__file__).with_name("vader_lexicon.txt").read_text(encoding="utf-8")
    words = [l.split("\t")[0] for l in lex_lines.rstrip("\n").split("\n")]
    words = [w for w in words if w.isalpha()]
    boosters = sorted(k for k in ref.BOOSTER_DICT if " " not in k)
    negators = ["not", "never", "isn't", "don't", "without", "no", "nor", "cannot"]
    fillers = ["the", "candidate", "said", "and", "we", "vote", "on", "tuesday", "news",
               "at", "least", "kind", "of", "so", "this", "doubt", "but", "or"]
    emoticons = [":)", ":(", ":D", ";)", "<3", ":-/"]
    emojis = ["\U0001F600", "\U0001F621", "\U0001F44D", "\U0001F1FA\U0001F1F8"]
    out = []
    for _ in range(n):
        k = rng.randint(2, 12)
        toks = []
        for _ in range(k):
            r = rng.random()
            if r < 0.35:
                t = rng.choice(words)
            elif r < 0.5:
                t = rng.choice(boosters)
            elif r < 0.6:
                t = rng.choice(negators)
            elif r < 0.9:
                t = rng.choice(fillers)
            elif r < 0.95:
                t = rng.choice(emoticons)
            else:
                t = rng.choice(emojis)
            c = rng.random()
            if c < 0.1:
                t = t.upper()
            elif c < 0.2:
                t = t.capitalize()
            p = rng.random()
            if p < 0.08:
                t += "!"
            elif p < 0.12:
                t += "?"
            elif p < 0.2:
                t += ","
            elif p < 0.25:
                t += "."
            toks.append(t)
        out.append(" ".join(toks))
    return out


def main():
    texts = list(HANDCRAFTED)
    for tpl in TEMPLATES:
        for w in TEMPLATE_WORDS:
            texts.append(tpl.format(w=w))
    texts += random_texts(200 - len(texts), seed=20201103)
    assert len(texts) == 200, len(texts)
    analyzer = ref.SentimentIntensityAnalyzer()
    rows = []
    for t in texts:
        s = analyzer.polarity_scores(t)
        rows.append({"text": t, "compound": s["compound"], "pos": s["pos"],
                     "neu": s["neu"], "neg": s["neg"]})
    doc = {"reference": "vaderSentiment 3.3.2 (unrounded)", "cases": rows}
    OUT.write_text(json.dumps(doc, ensure_ascii=False, indent=1) + "\n", encoding="utf-8")
    print(f"wrote {len(rows)} cases to {OUT}", file=sys.stderr)


if __name__ == "__main__":
    main()
