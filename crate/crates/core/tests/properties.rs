use ballotwire::evaluate::pick_model;
use ballotwire::features::aggregate_hashtag_tweets;
use ballotwire::supervise::{recursive_forecast, split, SplitSpec, SupervisedSet};
use ballotwire::{Candidate, ModelSpec, RawTweet};
use chrono::{Duration, NaiveDate, TimeZone, Utc};
use proptest::prelude::*;

fn tweet(id: u64, day: i64, compound_seed: u8, likes: u64, retweets: u64, followers: u64) -> (RawTweet, f64) {
    let created_at = Utc.with_ymd_and_hms(2020, 10, 15, 12, 0, 0).unwrap() + Duration::days(day);
    let compound = (compound_seed as f64 / 127.5) - 1.0;
    let t = RawTweet {
        tweet_id: id,
        created_at,
        text: format!("t{id}"),
        like_count: likes,
        retweet_count: retweets,
        author_follower_count: followers,
        candidate_tag: Candidate::A,
    };
    (t, compound)
}

fn tweets() -> impl Strategy<Value = Vec<(RawTweet, f64)>> {
    proptest::collection::vec((0i64..3, any::<u8>(), 0u64..5000, 0u64..500, 1u64..2_000_000), 0..40).prop_map(|v| {
        v.into_iter().enumerate().map(|(i, (d, c, l, r, f))| tweet(i as u64, d, c, l, r, f)).collect()
    })
}

fn scored(ts: &[(RawTweet, f64)]) -> impl FnMut(&str) -> f64 + '_ {
    move |text| ts.iter().find(|(t, _)| t.text == text).map(|(_, c)| *c).unwrap()
}

fn set(n: usize, seed: u64) -> SupervisedSet {
    let d0 = NaiveDate::from_ymd_opt(2020, 10, 15).unwrap();
    let mut rng = ballotwire::synth::SynthRng::new(seed);
    let mut lag = 50.0;
    let mut out = SupervisedSet { dates: Vec::new(), x: Vec::new(), y: Vec::new() };
    for i in 0..n {
        let f: Vec<f64> = (0..5).map(|_| rng.normal()).collect();
        let y = 50.0 + 0.6 * (lag - 50.0) + 0.2 * f[0] + 0.3 * rng.normal();
        out.dates.push(d0 + Duration::days(i as i64));
        out.x.push([f[0], f[1], f[2], f[3], f[4], lag]);
        out.y.push(y);
        lag = y;
    }
    out
}

proptest! {
    #[test]
    fn daily_sums_ignore_tweet_order(ts in tweets(), seed in any::<u64>()) {
        let mut shuffled = ts.clone();
        let mut rng = ballotwire::synth::SynthRng::new(seed);
        for i in (1..shuffled.len()).rev() {
            let j = rng.below(i + 1);
            shuffled.swap(i, j);
        }
        let a = aggregate_hashtag_tweets(ts.iter().map(|(t, _)| t), scored(&ts));
        let b = aggregate_hashtag_tweets(shuffled.iter().map(|(t, _)| t), scored(&ts));
        prop_assert_eq!(a.len(), b.len());
        for ((da, sa), (db, sb)) in a.iter().zip(&b) {
            prop_assert_eq!(da, db);
            prop_assert_eq!(sa.values(), sb.values());
        }
    }

    #[test]
    fn daily_sums_are_additive_over_disjoint_batches(ts in tweets(), cut in 0usize..40) {
        let cut = cut.min(ts.len());
        let whole = aggregate_hashtag_tweets(ts.iter().map(|(t, _)| t), scored(&ts));
        let mut left = aggregate_hashtag_tweets(ts[..cut].iter().map(|(t, _)| t), scored(&ts));
        let right = aggregate_hashtag_tweets(ts[cut..].iter().map(|(t, _)| t), scored(&ts));
        for (d, s) in right {
            left.entry(d).or_default().merge(&s);
        }
        prop_assert_eq!(whole.len(), left.len());
        for (d, s) in &whole {
            prop_assert_eq!(s.values(), left[d].values());
            prop_assert_eq!(s.n_tweets, left[d].n_tweets);
        }
    }

    #[test]
    fn split_partitions_in_order(train in 1usize..15, val in 1usize..6, test in 1usize..6) {
        let s = set(train + val + test, 1);
        let parts = split(&s, SplitSpec { n_train: train, n_val: val, n_test: test }).unwrap();
        prop_assert_eq!(parts.train.len(), train);
        prop_assert_eq!(parts.val.len(), val);
        prop_assert_eq!(parts.test.len(), test);
        prop_assert_eq!(parts.train_val().concat(&parts.test), s);
        prop_assert!(parts.train.dates.last() < parts.val.dates.first());
        prop_assert!(parts.val.dates.last() < parts.test.dates.first());
    }

    #[test]
    fn recursive_forecast_feeds_back_predictions(anchor in 30.0f64..70.0, step in -2.0f64..2.0, h in 1usize..8) {
        let model = move |x: &[f64]| x[5] + step;
        let out = recursive_forecast(&model, &vec![[0.0; 5]; h], anchor).unwrap();
        for (i, v) in out.iter().enumerate() {
            prop_assert!((v - (anchor + step * (i + 1) as f64)).abs() < 1e-9);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]
    #[test]
    fn selection_is_the_table_minimum_in_any_spec_order(seed in any::<u64>(), rotate in 0usize..5) {
        let s = set(15, seed);
        let (train, val) = (s.slice(0..12), s.slice(12..15));
        let specs = ModelSpec::registry();
        let mut rotated = specs.to_vec();
        rotated.rotate_left(rotate);
        let a = pick_model(&specs, &train, &val, false).unwrap();
        let b = pick_model(&rotated, &train, &val, false).unwrap();
        let best = |sel: &ballotwire::Selection| sel.outcomes.iter().filter_map(|o| o.validation_mae).fold(f64::INFINITY, f64::min);
        prop_assert_eq!(a.selected_outcome().validation_mae, Some(best(&a)));
        prop_assert_eq!(best(&a), best(&b));
        prop_assert_eq!(b.selected_outcome().validation_mae, Some(best(&b)));
        prop_assert_eq!(a.outcomes.len(), 5);
    }
}
