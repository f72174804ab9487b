//! Hand-written SVG charts of forecasts against aggregate polling.
//!
//! Each chart is a 640×360 panel with a 60/20/40/50 px margin (left, right,
//! top, bottom). Point `i` of `n` sits at `x = 60 + i·560/(n − 1)`; a value
//! `v` maps to `y = 40 + (hi − v)/(hi − lo)·270`, where `[lo, hi]` is the
//! joint range of both series widened by 10% (or ±1 when flat). Coordinates
//! are printed with two decimals so output is byte-stable.

use std::fmt::Write as _;

use chrono::NaiveDate;
use thiserror::Error;

use crate::evaluate::ForecastReport;

pub const PANEL_WIDTH: f64 = 640.0;
pub const PANEL_HEIGHT: f64 = 360.0;
const LEFT: f64 = 60.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;
const PREDICTION_COLOR: &str = "#1f77b4";
const POLLING_COLOR: &str = "#d62728";

#[derive(Debug, Error, PartialEq)]
pub enum PlotError {
    #[error("each series needs at least 2 points and equal lengths (dates {dates}, predicted {predicted}, polling {polling})")]
    BadSeries { dates: usize, predicted: usize, polling: usize },
    #[error("non-finite value in series")]
    NonFinite,
}

/// One chart: predictions and polling over the same dates.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartData<'a> {
    pub title: String,
    pub dates: &'a [NaiveDate],
    pub predicted: &'a [f64],
    pub polling: &'a [f64],
}

struct Frame {
    lo: f64,
    hi: f64,
    n: usize,
}

impl Frame {
    fn x(&self, i: usize) -> f64 {
        LEFT + i as f64 * (PANEL_WIDTH - LEFT - RIGHT) / (self.n - 1) as f64
    }

    fn y(&self, v: f64) -> f64 {
        TOP + (self.hi - v) / (self.hi - self.lo) * (PANEL_HEIGHT - TOP - BOTTOM)
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn points(frame: &Frame, values: &[f64]) -> String {
    values
        .iter()
        .enumerate()
        .map(|(i, &v)| format!("{:.2},{:.2}", frame.x(i), frame.y(v)))
        .collect::<Vec<_>>()
        .join(" ")
}

fn panel(out: &mut String, chart: &ChartData<'_>, offset_y: f64) -> Result<(), PlotError> {
    let n = chart.dates.len();
    if n < 2 || chart.predicted.len() != n || chart.polling.len() != n {
        return Err(PlotError::BadSeries { dates: n, predicted: chart.predicted.len(), polling: chart.polling.len() });
    }
    let all = chart.predicted.iter().chain(chart.polling);
    if all.clone().any(|v| !v.is_finite()) {
        return Err(PlotError::NonFinite);
    }
    let (min, max) = all.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let pad = if max > min { 0.1 * (max - min) } else { 1.0 };
    let frame = Frame { lo: min - pad, hi: max + pad, n };
    let bottom = PANEL_HEIGHT - BOTTOM;

    let _ = writeln!(out, r#"<g transform="translate(0,{offset_y:.0})">"#);
    let _ = writeln!(out, r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="15">{}</text>"#, PANEL_WIDTH / 2.0, escape(&chart.title));
    let _ = writeln!(
        out,
        r#"<line x1="{LEFT:.2}" y1="{bottom:.2}" x2="{:.2}" y2="{bottom:.2}" stroke="black"/>"#,
        PANEL_WIDTH - RIGHT
    );
    let _ = writeln!(out, r#"<line x1="{LEFT:.2}" y1="{TOP:.2}" x2="{LEFT:.2}" y2="{bottom:.2}" stroke="black"/>"#);
    for (i, d) in chart.dates.iter().enumerate() {
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="10">{}</text>"#,
            frame.x(i),
            bottom + 14.0,
            d.format("%m-%d")
        );
    }
    for v in [frame.lo, (frame.lo + frame.hi) / 2.0, frame.hi] {
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end" font-size="10">{v:.2}</text>"#,
            LEFT - 6.0,
            frame.y(v) + 3.0
        );
    }
    let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="11">date</text>"#, (LEFT + PANEL_WIDTH - RIGHT) / 2.0, PANEL_HEIGHT - 12.0);
    let _ = writeln!(
        out,
        r#"<text x="14" y="{:.2}" text-anchor="middle" font-size="11" transform="rotate(-90 14 {:.2})">share (%)</text>"#,
        (TOP + bottom) / 2.0,
        (TOP + bottom) / 2.0
    );
    let _ = writeln!(
        out,
        r#"<polyline class="prediction" fill="none" stroke="{PREDICTION_COLOR}" stroke-width="2" points="{}"/>"#,
        points(&frame, chart.predicted)
    );
    let _ = writeln!(
        out,
        r#"<polyline class="polling" fill="none" stroke="{POLLING_COLOR}" stroke-width="2" stroke-dasharray="6 3" points="{}"/>"#,
        points(&frame, chart.polling)
    );
    let lx = PANEL_WIDTH - RIGHT - 150.0;
    let _ = writeln!(out, r#"<rect x="{lx:.2}" y="{TOP:.2}" width="12" height="3" fill="{PREDICTION_COLOR}"/>"#);
    let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}" font-size="11">prediction</text>"#, lx + 18.0, TOP + 5.0);
    let _ = writeln!(out, r#"<rect x="{lx:.2}" y="{:.2}" width="12" height="3" fill="{POLLING_COLOR}"/>"#, TOP + 16.0);
    let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}" font-size="11">aggregate polling</text>"#, lx + 18.0, TOP + 21.0);
    out.push_str("</g>\n");
    Ok(())
}

/// Stacks one panel per chart into a single SVG document. `comments` are
/// emitted as XML comments at the top.
pub fn render_svg(charts: &[ChartData<'_>], comments: &[String]) -> Result<String, PlotError> {
    let height = PANEL_HEIGHT * charts.len() as f64;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{PANEL_WIDTH:.0}" height="{height:.0}" viewBox="0 0 {PANEL_WIDTH:.0} {height:.0}" font-family="sans-serif">"#
    );
    for c in comments {
        let _ = writeln!(out, "<!-- {} -->", c.replace("--", "- -"));
    }
    out.push_str(r#"<rect width="100%" height="100%" fill="white"/>"#);
    out.push('\n');
    for (k, chart) in charts.iter().enumerate() {
        panel(&mut out, chart, k as f64 * PANEL_HEIGHT)?;
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// Prediction-versus-polling panels for every candidate in a report.
pub fn report_svg(report: &ForecastReport, comments: &[String]) -> Result<String, PlotError> {
    let charts: Vec<ChartData<'_>> = report
        .candidates
        .iter()
        .map(|c| ChartData {
            title: format!("Prediction of {} vote share vs aggregate polling", c.name),
            dates: &c.test_dates,
            predicted: &c.test_predictions,
            polling: &c.polling_reference,
        })
        .collect();
    render_svg(&charts, comments)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dates(n: usize) -> Vec<NaiveDate> {
        let d0 = NaiveDate::from_ymd_opt(2020, 10, 31).unwrap();
        (0..n).map(|i| d0 + chrono::Duration::days(i as i64)).collect()
    }

    fn polylines(svg: &str) -> Vec<&str> {
        svg.lines().filter(|l| l.starts_with("<polyline")).collect()
    }

    fn points_of(line: &str) -> &str {
        line.split("points=\"").nth(1).unwrap().trim_end_matches("\"/>")
    }

    #[test]
    fn two_polylines_per_chart() {
        let d = dates(4);
        let chart = ChartData { title: "A".into(), dates: &d, predicted: &[51.0, 51.2, 51.1, 51.5], polling: &[51.3, 51.0, 50.9, 51.2] };
        let svg = render_svg(std::slice::from_ref(&chart), &[]).unwrap();
        assert_eq!(polylines(&svg).len(), 2);
        let svg = render_svg(&[chart.clone(), chart], &[]).unwrap();
        assert_eq!(polylines(&svg).len(), 4);
    }

    #[test]
    fn identical_series_overlap() {
        let d = dates(4);
        let s = [47.0, 47.5, 46.8, 47.1];
        let svg = render_svg(&[ChartData { title: "B".into(), dates: &d, predicted: &s, polling: &s }], &[]).unwrap();
        let lines = polylines(&svg);
        assert_eq!(points_of(lines[0]), points_of(lines[1]));
    }

    #[test]
    fn coordinate_transform_endpoints() {
        let d = dates(2);
        let svg = render_svg(&[ChartData { title: "t".into(), dates: &d, predicted: &[0.0, 10.0], polling: &[0.0, 10.0] }], &[]).unwrap();
        // Range [−1, 11]: 0 → 40 + 11/12·270 = 287.5, 10 → 40 + 1/12·270 = 62.5.
        assert_eq!(points_of(polylines(&svg)[0]), "60.00,287.50 620.00,62.50");
    }

    #[test]
    fn rejects_short_series() {
        let d = dates(1);
        let err = render_svg(&[ChartData { title: "t".into(), dates: &d, predicted: &[1.0], polling: &[1.0] }], &[]);
        assert!(matches!(err, Err(PlotError::BadSeries { .. })));
    }

    #[test]
    fn golden_file() {
        let d = dates(4);
        let charts = [
            ChartData { title: "Biden".into(), dates: &d, predicted: &[51.9, 52.1, 52.0, 52.3], polling: &[51.6, 51.8, 51.9, 51.8] },
            ChartData { title: "Trump <&>".into(), dates: &d, predicted: &[44.1, 44.0, 43.8, 43.9], polling: &[43.6, 43.9, 44.0, 44.1] },
        ];
        let svg = render_svg(&charts, &["config sha256 0000".into()]).unwrap();
        let golden = include_str!("../tests/fixtures/plot_golden.svg");
        assert_eq!(svg, golden);
    }
}
