//! Acceptance criteria 1 to 8, one PASS/FAIL line each.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use ballotwire::evaluate::{build_report, mae, r_squared, CandidateOutcome, ReportMetadata, SpecOutcome};
use ballotwire::features::read_frame_csv;
use ballotwire::models::{fit, fit_ridge, fit_svr, KernelSpec, LinearModel, ModelParams, ModelSpec, SvrOptions};
use ballotwire::pipeline::run_synthetic;
use ballotwire::stationarity::{adf_test, AdfOptions};
use ballotwire::supervise::{input_rows, split};
use ballotwire::synth::{ols_oracle, qp_oracle, SynthRng, SynthSpec};
use ballotwire::{Candidate, CandidateNames, PipelineOptions, Selection, SentimentAnalyzer, SplitSpec};
use chrono::NaiveDate;
use nalgebra::{DMatrix, DVector};
use serde::Deserialize;

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, || format!("took {elapsed:?}, limit {limit:?}"))
}

#[derive(Deserialize)]
struct SentimentFixture {
    cases: Vec<SentimentCase>,
}

#[derive(Deserialize)]
struct SentimentCase {
    text: String,
    compound: f64,
}

fn sentiment_oracle() -> Check {
    let fixture: SentimentFixture =
        serde_json::from_str(include_str!("../../core/tests/fixtures/sentiment_oracle.json")).map_err(|e| e.to_string())?;
    ensure(fixture.cases.len() == 200, || format!("{} texts", fixture.cases.len()))?;
    let t = Instant::now();
    let analyzer = SentimentAnalyzer::bundled();
    let worst = fixture
        .cases
        .iter()
        .map(|c| (analyzer.score(&c.text).compound - c.compound).abs())
        .fold(0.0, f64::max);
    let elapsed = t.elapsed();
    ensure(worst <= 1e-4, || format!("max |compound diff| {worst:e}"))?;
    within(elapsed, Duration::from_secs(1))?;
    Ok(format!("200 texts, max |diff| {worst:.1e}, {elapsed:.2?}"))
}

#[derive(Deserialize)]
struct AdfFixture {
    cases: Vec<AdfCase>,
}

#[derive(Deserialize)]
struct AdfCase {
    kind: String,
    series: Vec<f64>,
    statistic: f64,
    p_value: f64,
    lag_used: usize,
}

fn adf_oracle() -> Check {
    let fixture: AdfFixture = serde_json::from_str(include_str!("../../core/tests/fixtures/adf_oracle.json")).map_err(|e| e.to_string())?;
    ensure(fixture.cases.len() == 10, || format!("{} series", fixture.cases.len()))?;
    let t = Instant::now();
    let (mut stat_diff, mut p_diff) = (0.0f64, 0.0f64);
    let (mut walks_kept, mut noise_rejected) = (0, 0);
    for (i, case) in fixture.cases.iter().enumerate() {
        ensure(case.series.len() == 200, || format!("series {i} has {} points", case.series.len()))?;
        let r = adf_test(&case.series, &AdfOptions::default()).map_err(|e| e.to_string())?;
        ensure(r.lag_used == case.lag_used, || format!("series {i}: lag {} vs {}", r.lag_used, case.lag_used))?;
        stat_diff = stat_diff.max((r.statistic - case.statistic).abs());
        p_diff = p_diff.max((r.p_value - case.p_value).abs());
        match case.kind.as_str() {
            "random_walk" if !r.reject_unit_root => walks_kept += 1,
            "white_noise" if r.reject_unit_root => noise_rejected += 1,
            _ => {}
        }
    }
    let elapsed = t.elapsed();
    ensure(stat_diff <= 1e-6, || format!("statistic diff {stat_diff:e}"))?;
    ensure(p_diff <= 1e-3, || format!("p-value diff {p_diff:e}"))?;
    ensure(walks_kept == 5 && noise_rejected == 5, || format!("{walks_kept}/5 walks kept, {noise_rejected}/5 noise rejected"))?;
    within(elapsed, Duration::from_secs(1))?;
    Ok(format!("stat diff {stat_diff:.1e}, p diff {p_diff:.1e}, 5/5 walks kept, 5/5 noise rejected, {elapsed:.2?}"))
}

fn problem(rng: &mut SynthRng, n: usize, p: usize, noise: f64) -> (DMatrix<f64>, DVector<f64>) {
    let x = DMatrix::from_fn(n, p, |_, _| rng.normal() * 2.0);
    let w: Vec<f64> = (0..p).map(|_| rng.normal()).collect();
    let b = rng.normal() * 5.0;
    let y = DVector::from_fn(n, |i, _| b + (0..p).map(|j| x[(i, j)] * w[j]).sum::<f64>() + noise * rng.normal());
    (x, y)
}

/// Ridge by Gauss-Seidel sweeps on the centered normal equations.
fn ridge_iterative(x: &DMatrix<f64>, y: &DVector<f64>, lambda: f64) -> LinearModel {
    let (n, p) = x.shape();
    let means: Vec<f64> = (0..p).map(|j| x.column(j).sum() / n as f64).collect();
    let y_mean = y.sum() / n as f64;
    let xc = DMatrix::from_fn(n, p, |i, j| x[(i, j)] - means[j]);
    let yc = y.map(|v| v - y_mean);
    let mut a = xc.transpose() * &xc;
    for j in 0..p {
        a[(j, j)] += lambda;
    }
    let b = xc.transpose() * yc;
    let mut w = vec![0.0; p];
    for _ in 0..100_000 {
        let mut moved = 0.0f64;
        for j in 0..p {
            let off: f64 = (0..p).filter(|&k| k != j).map(|k| a[(j, k)] * w[k]).sum();
            let next = (b[j] - off) / a[(j, j)];
            moved = moved.max((next - w[j]).abs());
            w[j] = next;
        }
        if moved < 1e-13 {
            break;
        }
    }
    let intercept = y_mean - means.iter().zip(&w).map(|(m, v)| m * v).sum::<f64>();
    LinearModel { weights: w, intercept }
}

fn kkt_violation(x: &DMatrix<f64>, y: &DVector<f64>, m: &LinearModel, lambda: f64, mix: f64) -> f64 {
    let (n, p) = x.shape();
    let resid: Vec<f64> = (0..n)
        .map(|i| y[i] - m.intercept - (0..p).map(|j| x[(i, j)] * m.weights[j]).sum::<f64>())
        .collect();
    let mut worst = (resid.iter().sum::<f64>() / n as f64).abs();
    for j in 0..p {
        let g = -(0..n).map(|i| x[(i, j)] * resid[i]).sum::<f64>() / n as f64 + lambda * (1.0 - mix) * m.weights[j];
        let l1 = lambda * mix;
        let v = match m.weights[j] {
            w if w > 0.0 => (g + l1).abs(),
            w if w < 0.0 => (g - l1).abs(),
            _ => (g.abs() - l1).max(0.0),
        };
        worst = worst.max(v);
    }
    worst
}

fn solvers() -> Check {
    let t = Instant::now();
    let mut rng = SynthRng::new(2024);

    let mut ridge_diff = 0.0f64;
    for _ in 0..50 {
        let n = 15 + rng.below(30);
        let p = 1 + rng.below(6);
        let lambda = 10f64.powf(rng.uniform() * 4.0 - 2.0);
        let (x, y) = problem(&mut rng, n, p, 0.5);
        let (closed, _) = fit_ridge(&x, &y, lambda);
        let iter = ridge_iterative(&x, &y, lambda);
        for (a, b) in closed.weights.iter().chain([&closed.intercept]).zip(iter.weights.iter().chain([&iter.intercept])) {
            ridge_diff = ridge_diff.max((a - b).abs());
        }
    }
    ensure(ridge_diff <= 1e-6, || format!("ridge closed vs iterative {ridge_diff:e}"))?;

    let mut kkt = 0.0f64;
    for case in 0..30 {
        let (n, p) = (20 + rng.below(20), 1 + rng.below(6));
        let (x, y) = problem(&mut rng, n, p, 1.0);
        let lambda = 10f64.powf(rng.uniform() * 3.0 - 2.0);
        let (spec, mix) = match case % 3 {
            0 => (ModelSpec::Lasso { lambda, tol: 1e-6, max_iter: 100_000 }, 1.0),
            1 => (ModelSpec::ElasticNet { lambda, mix: 0.5, tol: 1e-6, max_iter: 100_000 }, 0.5),
            _ => (ModelSpec::ElasticNet { lambda, mix: 0.2, tol: 1e-6, max_iter: 100_000 }, 0.2),
        };
        let fitted = fit(&spec, &x, &y, false).map_err(|e| e.to_string())?;
        let ModelParams::Linear(m) = &fitted.params else { return Err("linear params expected".into()) };
        kkt = kkt.max(kkt_violation(&x, &y, m, lambda, mix));
    }
    ensure(kkt < 1e-4, || format!("lasso/elastic-net KKT residual {kkt:e}"))?;

    let (mut gap, mut obj_diff) = (0.0f64, 0.0f64);
    for case in 0..30 {
        let p = 1 + rng.below(3);
        let (x, y) = problem(&mut rng, 5, p, 1.0);
        let c = [0.1, 1.0, 10.0][case % 3];
        let epsilon = [0.0, 0.1, 0.5][(case / 3) % 3];
        let kernel = if case % 2 == 0 { KernelSpec::Linear } else { KernelSpec::Rbf { gamma: 0.3 } };
        let (_, info) = fit_svr(&x, &y, &SvrOptions::new(c, epsilon, kernel)).map_err(|e| e.to_string())?;
        let oracle = qp_oracle(&x, y.as_slice(), c, epsilon, kernel).map_err(|e| e.to_string())?;
        ensure(info.converged, || format!("SVR case {case} did not converge"))?;
        gap = gap.max(info.duality_gap.unwrap_or(f64::INFINITY));
        obj_diff = obj_diff.max((info.dual_objective.unwrap_or(f64::NAN) - oracle.objective).abs());
    }
    ensure(gap <= 1e-6, || format!("SVR duality gap {gap:e}"))?;
    ensure(obj_diff <= 1e-6, || format!("SVR objective vs oracle {obj_diff:e}"))?;

    let mut ols_diff = 0.0f64;
    for _ in 0..10 {
        let p = 1 + rng.below(4);
        let n = 12 + rng.below(10);
        let (x, y) = problem(&mut rng, n, p, 0.0);
        let (svr, _) = fit_svr(&x, &y, &SvrOptions::new(1e6, 1e-6, KernelSpec::Linear)).map_err(|e| e.to_string())?;
        let ols = ols_oracle(&x, &y).map_err(|e| e.to_string())?;
        for r in 0..n {
            let row: Vec<f64> = x.row(r).iter().copied().collect();
            let a = svr.predict_one(&row).map_err(|e| e.to_string())?;
            let b = ols.predict_one(&row).map_err(|e| e.to_string())?;
            ols_diff = ols_diff.max((a - b).abs());
        }
    }
    ensure(ols_diff <= 1e-3, || format!("hard-margin SVR vs OLS {ols_diff:e}"))?;

    let elapsed = t.elapsed();
    within(elapsed, Duration::from_secs(10))?;
    Ok(format!(
        "ridge {ridge_diff:.1e}, KKT {kkt:.1e}, SVR gap {gap:.1e}, objective {obj_diff:.1e}, vs OLS {ols_diff:.1e}, {elapsed:.2?}"
    ))
}

fn synthetic_pipeline() -> Check {
    let spec = SynthSpec::default();
    ensure(spec.seed == 7 && spec.n_days == 20 && spec.noise_sigma == 0.3, || "unexpected default synthetic spec".into())?;
    let t = Instant::now();
    let (_, run) = run_synthetic(&spec, &PipelineOptions::default()).map_err(|e| e.to_string())?;
    let elapsed = t.elapsed();
    let report = &run.report;
    let maes: Vec<f64> = report.candidates.iter().map(|c| c.test_mae_vs_polling).collect();
    let worst = maes.iter().copied().fold(0.0, f64::max);
    ensure(report.candidates.iter().all(|c| c.test_dates.len() == 4), || "test window is not 4 days".into())?;
    ensure(worst <= 1.0, || format!("test MAE {maes:?} exceeds 1.0 pp"))?;
    // Drifts put A's stationary mean at 52 and B's at 47.
    ensure(report.winner_predicted == Candidate::A, || format!("predicted winner {}", report.winner_predicted_name))?;
    ensure(report.winner_correct == Some(true), || "winner does not match the realized outcome".into())?;
    within(elapsed, Duration::from_secs(5))?;
    Ok(format!("test MAE {:.3} / {:.3} pp, winner {} correct, {elapsed:.2?}", maes[0], maes[1], report.winner_predicted_name))
}

const REFERENCE_FRAME: [(&str, [f64; 6]); 5] = [
    ("2020-10-16", [6.075432, -0.883943, -416.643181, 0.000006, 0.000069, 51.7]),
    ("2020-10-17", [-11.997177, -1.605169, 6.600909, 0.000174, -0.000176, 51.2]),
    ("2020-10-18", [-0.532162, -0.191953, 781.941740, -0.000191, -0.000577, 51.3]),
    ("2020-10-19", [0.358707, 0.119817, 295.607700, 0.001870, 0.013707, 51.3]),
    ("2020-10-20", [0.687242, 0.297876, -1223.989339, -0.001564, -0.010134, 51.3]),
];

fn reference_frame() -> Check {
    let names = CandidateNames::new("Biden", "Trump");
    let csv = include_str!("../../core/tests/fixtures/reference_frame_biden.csv");
    let frame = read_frame_csv(csv.as_bytes(), &names).map_err(|e| e.to_string())?;
    ensure(frame.len() == 5, || format!("{} rows", frame.len()))?;
    let x = input_rows(&frame);
    for ((row, input), (date, values)) in frame.rows.iter().zip(&x).zip(REFERENCE_FRAME.iter()) {
        ensure(row.date.to_string() == *date, || format!("date {} vs {date}", row.date))?;
        ensure(input == values, || format!("{date}: {input:?} vs {values:?}"))?;
    }
    let cols = x.first().map_or(0, |r| r.len());
    ensure(x.len() == 5 && cols == 6, || format!("matrix is {}x{cols}", x.len()))?;
    Ok("5 rows reproduced exactly, 5x6 inputs with prev_poll in column 6".into())
}

fn protocol_shape() -> Check {
    let (_, run) = run_synthetic(&SynthSpec::default(), &PipelineOptions::default()).map_err(|e| e.to_string())?;
    for (set, c) in run.supervised.iter().zip(&run.report.candidates) {
        ensure(set.len() == 19, || format!("{} supervised rows", set.len()))?;
        let s = split(set, SplitSpec::default()).map_err(|e| e.to_string())?;
        let shape = (s.train.len(), s.val.len(), s.test.len());
        ensure(shape == (12, 3, 4), || format!("split {shape:?}"))?;
        ensure(c.validation_table.len() == 5, || format!("{} specs evaluated", c.validation_table.len()))?;
        ensure(c.validation_table.iter().all(|o| o.validation_mae.is_some()), || "validation MAE table has gaps".into())?;
        ensure(c.training_rows == 15, || format!("refit on {} rows", c.training_rows))?;
    }
    ensure(run.models.len() == 2, || format!("{} refit models", run.models.len()))?;
    Ok("19 rows split 12/3/4, 5 specs scored, refit on 15 rows".into())
}

fn fixed_outcome(candidate: Candidate, predicted: f64, polling: f64) -> CandidateOutcome {
    let spec = ModelSpec::ridge();
    let selection = Selection {
        outcomes: vec![SpecOutcome {
            model: spec.name().to_string(),
            spec,
            validation_mae: Some(0.0),
            validation_predictions: vec![],
            error: None,
        }],
        selected: 0,
    };
    let day = NaiveDate::from_ymd_opt(2020, 11, 3).expect("valid date");
    CandidateOutcome {
        candidate,
        selection,
        training_rows: 15,
        test_dates: vec![day - chrono::Duration::days(1), day],
        test_predictions: vec![predicted - 0.5, predicted],
        polling_reference: vec![polling - 0.25, polling],
    }
}

fn metric_identities() -> Check {
    let e = |r: Result<f64, _>| r.map_err(|e: ballotwire::evaluate::EvalError| e.to_string());
    ensure(e(mae(&[1.0, 2.0], &[1.0, 2.0]))? == 0.0, || "mae of identical sequences".into())?;
    ensure(e(mae(&[1.0, 2.0], &[2.0, 4.0]))? == 1.5, || "mae([1,2],[2,4])".into())?;
    let reference = [50.0, 51.0, 50.5, 51.0];
    ensure(e(r_squared(&reference, &reference))? == 1.0, || "r² of a perfect fit".into())?;
    ensure(e(r_squared(&[50.625; 4], &reference))? == 0.0, || "r² of the mean".into())?;

    // Predictions miss the actual shares by 1.85 on average, polling by 1.5.
    let names = CandidateNames::default();
    let outcomes = vec![fixed_outcome(Candidate::A, 52.85, 52.5), fixed_outcome(Candidate::B, 45.15, 45.5)];
    let report = build_report(outcomes, &names, [Some(51.0), Some(47.0)], ReportMetadata::default()).map_err(|e| e.to_string())?;
    let (model, baseline, delta) = (report.mae_vs_actual, report.baseline_mae, report.delta_vs_baseline);
    let close = |v: Option<f64>, want: f64| v.is_some_and(|v| (v - want).abs() <= 1e-12);
    ensure(close(model, 1.85) && close(baseline, 1.5) && close(delta, 0.35), || {
        format!("mae {model:?}, baseline {baseline:?}, delta {delta:?}")
    })?;
    report.verify(&names).map_err(|e| e.to_string())?;
    Ok("mae and r² examples exact, delta 1.85 - 1.5 = 0.35".into())
}

fn determinism() -> Check {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    for dir in ["first", "second"] {
        let out = Command::new(env!("CARGO_BIN_EXE_ballotwire"))
            .current_dir(tmp.path())
            .args(["all", "--seed", "7", "--out-dir", dir])
            .output()
            .map_err(|e| e.to_string())?;
        ensure(out.status.success(), || String::from_utf8_lossy(&out.stderr).into_owned())?;
    }
    for name in ["report.json", "report.svg"] {
        let a = std::fs::read(tmp.path().join("first").join(name)).map_err(|e| e.to_string())?;
        let b = std::fs::read(tmp.path().join("second").join(name)).map_err(|e| e.to_string())?;
        ensure(a == b, || format!("{name} differs between runs"))?;
    }
    Ok("report.json and report.svg byte-identical across two runs".into())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check); 8] = [
        ("sentiment oracle", sentiment_oracle),
        ("ADF oracle", adf_oracle),
        ("solver correctness", solvers),
        ("synthetic end to end", synthetic_pipeline),
        ("reference frame fixture", reference_frame),
        ("protocol shape", protocol_shape),
        ("metric identities", metric_identities),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS criterion {} ({name}): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {} ({name}): {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
