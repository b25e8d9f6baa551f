//! Serialization of traces and comparisons, and SVG line charts.
//!
//! Numbers are written in the shortest decimal form that parses back to the
//! same `f64` (never more than 17 significant digits), so CSV and JSON output
//! round-trips exactly and is byte-stable.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::efficiency::EfficiencyRecord;
use crate::loss::LinearModel;
use crate::runner::{IterationRecord, RunConfig, RunTrace};
use crate::{Error, Result};

pub const TRACE_CSV_HEADER: &str = "iteration,loss,learning_rate,p_k,delta_k,efficiency";

/// Shortest round-trip decimal rendering of `v`.
pub fn fmt_num(v: f64) -> String {
    format!("{v}")
}

// ---------------------------------------------------------------------------
// Trace CSV

pub fn trace_to_csv(trace: &RunTrace) -> String {
    records_to_csv(&trace.records)
}

pub fn records_to_csv(records: &[IterationRecord]) -> String {
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(TRACE_CSV_HEADER);
    out.push('\n');
    for r in records {
        let _ = write!(out, "{},{},{},", r.k, fmt_num(r.loss), fmt_num(r.learning_rate));
        if let Some(e) = &r.efficiency {
            let _ = write!(
                out,
                "{},{},{}",
                fmt_num(e.p_k),
                fmt_num(e.delta_k),
                fmt_num(e.e_k)
            );
        } else {
            out.push_str(",,");
        }
        out.push('\n');
    }
    out
}

/// Parses a trace CSV back into iteration records. Errors carry the 1-based
/// line number of the offending line.
pub fn parse_trace_csv(text: &str) -> Result<Vec<IterationRecord>> {
    let mut lines = text.split('\n').enumerate().map(|(i, l)| {
        (i as u64 + 1, l.strip_suffix('\r').unwrap_or(l))
    });
    let parse_err = |line: u64, message: String| Error::Parse { line, message };

    match lines.next() {
        Some((_, header)) if header == TRACE_CSV_HEADER => {}
        Some((line, header)) if !header.is_empty() => {
            return Err(parse_err(
                line,
                format!("expected header '{TRACE_CSV_HEADER}', found '{header}'"),
            ))
        }
        _ => return Err(Error::Empty("trace CSV is empty")),
    }

    let mut records: Vec<IterationRecord> = Vec::new();
    let mut blank_at = None;
    for (line, content) in lines {
        if content.is_empty() {
            blank_at.get_or_insert(line);
            continue;
        }
        if let Some(blank) = blank_at {
            return Err(parse_err(blank, "blank line inside trace".to_owned()));
        }
        let fields: Vec<&str> = content.split(',').collect();
        if fields.len() != 6 {
            return Err(parse_err(line, format!("expected 6 fields, found {}", fields.len())));
        }
        let k: usize = fields[0]
            .parse()
            .map_err(|_| parse_err(line, format!("invalid iteration '{}'", fields[0])))?;
        let expected_k = records.len() + 1;
        if k != expected_k {
            return Err(parse_err(line, format!("expected iteration {expected_k}, found {k}")));
        }
        let number = |idx: usize, name: &str| -> Result<f64> {
            fields[idx]
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| parse_err(line, format!("invalid {name} '{}'", fields[idx])))
        };
        let loss = number(1, "loss")?;
        let learning_rate = number(2, "learning_rate")?;
        let empties = fields[3..].iter().filter(|f| f.is_empty()).count();
        let efficiency = match (k, empties) {
            (1, 3) => None,
            (1, _) => {
                return Err(parse_err(line, "iteration 1 must not carry efficiency".to_owned()))
            }
            (_, 0) => Some(EfficiencyRecord {
                k,
                p_k: number(3, "p_k")?,
                delta_k: number(4, "delta_k")?,
                e_k: number(5, "efficiency")?,
            }),
            _ => {
                return Err(parse_err(
                    line,
                    format!("iteration {k} is missing efficiency fields"),
                ))
            }
        };
        records.push(IterationRecord {
            k,
            loss,
            learning_rate,
            efficiency,
        });
    }
    if records.is_empty() {
        return Err(Error::Empty("trace CSV has no iterations"));
    }
    Ok(records)
}

// ---------------------------------------------------------------------------
// Comparison report

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunStatus {
    Completed,
    Diverged,
    Failed,
}

/// Per-run headline numbers. Every field is derivable from the trace (or the
/// error, for runs that did not complete).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub status: RunStatus,
    pub loss_initial: Option<f64>,
    pub final_loss: Option<f64>,
    pub final_efficiency: Option<f64>,
    pub iterations_run: usize,
    pub stopped_at: Option<usize>,
    pub iterations_to_threshold: Option<usize>,
    pub final_theta: Vec<f64>,
    pub diverged_at: Option<usize>,
    pub error: Option<String>,
}

impl RunSummary {
    pub fn from_trace(trace: &RunTrace) -> Self {
        Self {
            status: RunStatus::Completed,
            loss_initial: Some(trace.loss_initial),
            final_loss: Some(trace.final_loss()),
            final_efficiency: trace.final_efficiency(),
            iterations_run: trace.records.len(),
            stopped_at: trace.stopped_at,
            iterations_to_threshold: trace.iterations_to_threshold(),
            final_theta: trace.final_model.theta.clone(),
            diverged_at: None,
            error: None,
        }
    }

    pub fn from_error(err: &Error) -> Self {
        let (status, diverged_at) = match err {
            Error::Diverged { iteration, .. } => (RunStatus::Diverged, Some(*iteration)),
            _ => (RunStatus::Failed, None),
        };
        Self {
            status,
            loss_initial: None,
            final_loss: None,
            final_efficiency: None,
            iterations_run: 0,
            stopped_at: None,
            iterations_to_threshold: None,
            final_theta: Vec::new(),
            diverged_at,
            error: Some(err.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonEntry {
    pub config: RunConfig,
    pub summary: RunSummary,
    /// Present exactly when the run completed.
    pub trace: Option<RunTrace>,
}

impl ComparisonEntry {
    pub fn completed(trace: RunTrace) -> Self {
        Self {
            config: trace.config.clone(),
            summary: RunSummary::from_trace(&trace),
            trace: Some(trace),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    entries: BTreeMap<String, ComparisonEntry>,
}

impl ComparisonReport {
    pub fn new(entries: BTreeMap<String, ComparisonEntry>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Empty("comparison has no entries"));
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &BTreeMap<String, ComparisonEntry> {
        &self.entries
    }

    pub fn get(&self, label: &str) -> Option<&ComparisonEntry> {
        self.entries.get(label)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `(label, trace)` for every completed run, in label order.
    pub fn completed(&self) -> impl Iterator<Item = (&str, &RunTrace)> {
        self.entries
            .iter()
            .filter_map(|(label, e)| e.trace.as_ref().map(|t| (label.as_str(), t)))
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonIteration {
    k: usize,
    loss: f64,
    learning_rate: f64,
    p_k: Option<f64>,
    delta_k: Option<f64>,
    efficiency: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonEntry {
    summary: RunSummary,
    config: RunConfig,
    iterations: Vec<JsonIteration>,
}

/// Pretty-printed JSON keyed by label (sorted):
/// `{label: {summary: {...}, config: {...}, iterations: [...]}}`.
pub fn comparison_to_json(report: &ComparisonReport) -> String {
    let doc: BTreeMap<&str, JsonEntry> = report
        .entries
        .iter()
        .map(|(label, entry)| {
            let iterations = entry
                .trace
                .as_ref()
                .map(|t| {
                    t.records
                        .iter()
                        .map(|r| JsonIteration {
                            k: r.k,
                            loss: r.loss,
                            learning_rate: r.learning_rate,
                            p_k: r.efficiency.map(|e| e.p_k),
                            delta_k: r.efficiency.map(|e| e.delta_k),
                            efficiency: r.efficiency.map(|e| e.e_k),
                        })
                        .collect()
                })
                .unwrap_or_default();
            (
                label.as_str(),
                JsonEntry {
                    summary: entry.summary.clone(),
                    config: entry.config.clone(),
                    iterations,
                },
            )
        })
        .collect();
    let mut text = serde_json::to_string_pretty(&doc).expect("report serialization is infallible");
    text.push('\n');
    text
}

/// Inverse of [`comparison_to_json`]; completed entries get their traces
/// rebuilt from the iteration arrays.
pub fn parse_comparison_json(text: &str) -> Result<ComparisonReport> {
    let doc: BTreeMap<String, JsonEntry> = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line() as u64,
        message: e.to_string(),
    })?;
    let mut entries = BTreeMap::new();
    for (label, entry) in doc {
        let invalid = |msg: &str| Error::Parse {
            line: 0,
            message: format!("entry '{label}': {msg}"),
        };
        let trace = match entry.summary.status {
            RunStatus::Completed => {
                let mut records = Vec::with_capacity(entry.iterations.len());
                for (i, it) in entry.iterations.iter().enumerate() {
                    if it.k != i + 1 {
                        return Err(invalid("iterations must be consecutive from 1"));
                    }
                    let efficiency = match (it.p_k, it.delta_k, it.efficiency) {
                        (Some(p_k), Some(delta_k), Some(e_k)) if it.k > 1 => {
                            Some(EfficiencyRecord { k: it.k, p_k, delta_k, e_k })
                        }
                        (None, None, None) if it.k == 1 => None,
                        _ => return Err(invalid("efficiency fields present iff k >= 2")),
                    };
                    records.push(IterationRecord {
                        k: it.k,
                        loss: it.loss,
                        learning_rate: it.learning_rate,
                        efficiency,
                    });
                }
                let loss_initial = records
                    .first()
                    .map(|r| r.loss)
                    .ok_or_else(|| invalid("completed run without iterations"))?;
                let final_model = LinearModel::new(entry.summary.final_theta.clone())
                    .map_err(|e| invalid(&e.to_string()))?;
                Some(RunTrace {
                    loss_initial,
                    records,
                    final_model,
                    stopped_at: entry.summary.stopped_at,
                    config: entry.config.clone(),
                })
            }
            _ => {
                if !entry.iterations.is_empty() {
                    return Err(invalid("failed run carries iterations"));
                }
                None
            }
        };
        entries.insert(
            label,
            ComparisonEntry {
                config: entry.config,
                summary: entry.summary,
                trace,
            },
        );
    }
    ComparisonReport::new(entries)
}

// ---------------------------------------------------------------------------
// SVG charts

const PANEL_WIDTH: f64 = 480.0;
const PANEL_HEIGHT: f64 = 360.0;
const MARGIN_LEFT: f64 = 72.0;
const MARGIN_RIGHT: f64 = 24.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 52.0;
const MAX_POINTS: usize = 2000;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum YScale {
    #[default]
    Linear,
    Log,
}

struct Series<'a> {
    label: &'a str,
    points: Vec<(f64, f64)>,
}

struct Panel<'a> {
    title: String,
    x_label: &'a str,
    y_label: &'a str,
    x_range: (f64, f64),
    y_range: (f64, f64),
    y_scale: YScale,
    series: Vec<Series<'a>>,
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c if (c as u32) < 0x20 && c != '\t' && c != '\n' => out.push(' '),
            c => out.push(c),
        }
    }
    out
}

fn tick_label(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 {
        "0".to_owned()
    } else if !(1e-3..1e5).contains(&a) {
        format!("{v:.1e}")
    } else {
        let s = format!("{v:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_owned()
    }
}

/// Keeps at most `MAX_POINTS` points with a fixed stride, always including
/// the last one.
fn decimate(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    if points.len() <= MAX_POINTS {
        return points.to_vec();
    }
    let stride = points.len().div_ceil(MAX_POINTS - 1);
    let mut out: Vec<_> = points.iter().step_by(stride).copied().collect();
    if out.last() != points.last() {
        out.push(*points.last().unwrap());
    }
    out
}

fn log_floor(v: f64) -> f64 {
    v.max(f64::MIN_POSITIVE).log10()
}

fn y_bounds(values: impl Iterator<Item = f64>, scale: YScale) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        let v = if scale == YScale::Log { log_floor(v) } else { v };
        (lo.min(v), hi.max(v))
    });
    if !lo.is_finite() || !hi.is_finite() {
        return (0.0, 1.0);
    }
    match scale {
        YScale::Log => (lo.floor(), if hi.ceil() > lo.floor() { hi.ceil() } else { lo.floor() + 1.0 }),
        YScale::Linear if hi > lo => (lo, hi),
        YScale::Linear => {
            let pad = if lo == 0.0 { 1.0 } else { lo.abs() * 0.5 };
            (lo - pad, hi + pad)
        }
    }
}

fn render_panel(out: &mut String, panel: &Panel<'_>, offset_x: f64) {
    let plot_w = PANEL_WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = PANEL_HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let (x0, x1) = panel.x_range;
    let (y0, y1) = panel.y_range;
    let sx = |x: f64| MARGIN_LEFT + (x - x0) / (x1 - x0) * plot_w;
    let sy = |y: f64| {
        let y = if panel.y_scale == YScale::Log { log_floor(y) } else { y };
        MARGIN_TOP + plot_h - (y - y0) / (y1 - y0) * plot_h
    };

    let _ = writeln!(out, r#"<g class="panel" transform="translate({offset_x:.2},0)">"#);
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
        PANEL_WIDTH / 2.0,
        escape(&panel.title)
    );
    let bottom = MARGIN_TOP + plot_h;
    let right = MARGIN_LEFT + plot_w;
    let _ = writeln!(
        out,
        r#"<line class="axis" x1="{MARGIN_LEFT:.2}" y1="{bottom:.2}" x2="{right:.2}" y2="{bottom:.2}" stroke="black"/>"#
    );
    let _ = writeln!(
        out,
        r#"<line class="axis" x1="{MARGIN_LEFT:.2}" y1="{MARGIN_TOP:.2}" x2="{MARGIN_LEFT:.2}" y2="{bottom:.2}" stroke="black"/>"#
    );

    for i in 0..=4 {
        let xv = x0 + (x1 - x0) * i as f64 / 4.0;
        let px = sx(xv);
        let _ = writeln!(
            out,
            r#"<line x1="{px:.2}" y1="{bottom:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/>"#,
            bottom + 5.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{px:.2}" y="{:.2}" text-anchor="middle" font-size="11">{}</text>"#,
            bottom + 18.0,
            tick_label(xv.round())
        );
    }
    let y_ticks: Vec<f64> = match panel.y_scale {
        YScale::Linear => (0..=4).map(|i| y0 + (y1 - y0) * i as f64 / 4.0).collect(),
        YScale::Log => {
            let step = ((y1 - y0) / 6.0).ceil().max(1.0);
            let mut ticks = Vec::new();
            let mut p = y0;
            while p <= y1 {
                ticks.push(p);
                p += step;
            }
            ticks
        }
    };
    for yv in y_ticks {
        let py = MARGIN_TOP + plot_h - (yv - y0) / (y1 - y0) * plot_h;
        let label = match panel.y_scale {
            YScale::Linear => tick_label(yv),
            YScale::Log => format!("1e{}", yv as i64),
        };
        let _ = writeln!(
            out,
            r#"<line x1="{:.2}" y1="{py:.2}" x2="{MARGIN_LEFT:.2}" y2="{py:.2}" stroke="black"/>"#,
            MARGIN_LEFT - 5.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end" font-size="11">{label}</text>"#,
            MARGIN_LEFT - 8.0,
            py + 4.0
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="13">{}</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        PANEL_HEIGHT - 12.0,
        escape(panel.x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="16" y="{:.2}" text-anchor="middle" font-size="13" transform="rotate(-90 16 {:.2})">{}</text>"#,
        MARGIN_TOP + plot_h / 2.0,
        MARGIN_TOP + plot_h / 2.0,
        escape(panel.y_label)
    );

    for (i, s) in panel.series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let mut points = String::new();
        for (j, (x, y)) in decimate(&s.points).into_iter().enumerate() {
            if j > 0 {
                points.push(' ');
            }
            let _ = write!(points, "{:.2},{:.2}", sx(x), sy(y));
        }
        let _ = writeln!(
            out,
            r#"<polyline class="series" data-label="{}" fill="none" stroke="{color}" stroke-width="1.5" points="{points}"/>"#,
            escape(s.label)
        );
    }
    if panel.series.len() > 1 {
        for (i, s) in panel.series.iter().enumerate() {
            let color = PALETTE[i % PALETTE.len()];
            let y = MARGIN_TOP + 12.0 + 16.0 * i as f64;
            let _ = writeln!(
                out,
                r#"<rect x="{:.2}" y="{:.2}" width="10" height="10" fill="{color}"/>"#,
                right - 150.0,
                y - 9.0
            );
            let _ = writeln!(
                out,
                r#"<text x="{:.2}" y="{y:.2}" font-size="11">{}</text>"#,
                right - 134.0,
                escape(s.label)
            );
        }
    }
    out.push_str("</g>\n");
}

fn render(panels: &[Panel<'_>]) -> String {
    let width = PANEL_WIDTH * panels.len() as f64;
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width:.0}" height="{PANEL_HEIGHT:.0}" viewBox="0 0 {width:.0} {PANEL_HEIGHT:.0}" font-family="sans-serif">"#
    );
    let _ = writeln!(out, r#"<rect width="{width:.0}" height="{PANEL_HEIGHT:.0}" fill="white"/>"#);
    for (i, panel) in panels.iter().enumerate() {
        render_panel(&mut out, panel, PANEL_WIDTH * i as f64);
    }
    out.push_str("</svg>\n");
    out
}

/// Loss against iteration, one side-by-side panel per iteration limit.
pub fn plot_loss_curve(
    records: &[IterationRecord],
    iteration_limits: &[usize],
    y_scale: YScale,
) -> Result<String> {
    if records.is_empty() {
        return Err(Error::Empty("trace has no iterations"));
    }
    if iteration_limits.is_empty() {
        return Err(Error::config("at least one iteration limit is required"));
    }
    let mut panels = Vec::with_capacity(iteration_limits.len());
    for &limit in iteration_limits {
        if limit == 0 || limit > records.len() {
            return Err(Error::config(format!(
                "iteration limit {limit} outside 1..={}",
                records.len()
            )));
        }
        let shown = &records[..limit];
        let points: Vec<(f64, f64)> = shown.iter().map(|r| (r.k as f64, r.loss)).collect();
        let x_range = if limit == 1 { (0.0, 2.0) } else { (1.0, limit as f64) };
        panels.push(Panel {
            title: format!("Loss over the first {limit} iterations"),
            x_label: "iteration",
            y_label: "loss (MSE)",
            x_range,
            y_range: y_bounds(shown.iter().map(|r| r.loss), y_scale),
            y_scale,
            series: vec![Series {
                label: "loss",
                points,
            }],
        });
    }
    Ok(render(&panels))
}

fn efficiency_points(records: &[IterationRecord]) -> Vec<(f64, f64)> {
    records
        .iter()
        .filter_map(|r| r.efficiency.map(|e| (r.k as f64, e.e_k)))
        .collect()
}

/// `E_k` against `k` (from 2) on a fixed `[0, 100]` axis.
pub fn plot_efficiency_curve(records: &[IterationRecord]) -> Result<String> {
    plot_efficiency_overlay(&[("efficiency", records)])
}

/// Several efficiency curves on one panel, one polyline per label.
pub fn plot_efficiency_overlay(series: &[(&str, &[IterationRecord])]) -> Result<String> {
    if series.is_empty() {
        return Err(Error::Empty("no series to plot"));
    }
    let mut max_k = 2.0f64;
    let mut out = Vec::with_capacity(series.len());
    for (label, records) in series {
        let points = efficiency_points(records);
        if points.is_empty() {
            return Err(Error::config(format!(
                "series '{label}' needs at least 2 iterations for an efficiency curve"
            )));
        }
        max_k = max_k.max(points.last().unwrap().0);
        out.push(Series { label, points });
    }
    let panel = Panel {
        title: "Efficiency per iteration".to_owned(),
        x_label: "iteration k",
        y_label: "efficiency E_k",
        x_range: (2.0, if max_k > 2.0 { max_k } else { 3.0 }),
        y_range: (0.0, 100.0),
        y_scale: YScale::Linear,
        series: out,
    };
    Ok(render(&[panel]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(k: usize, loss: f64, e: Option<(f64, f64, f64)>) -> IterationRecord {
        IterationRecord {
            k,
            loss,
            learning_rate: 0.05,
            efficiency: e.map(|(p_k, delta_k, e_k)| EfficiencyRecord { k, p_k, delta_k, e_k }),
        }
    }

    #[test]
    fn fmt_num_round_trips() {
        for v in [0.1, 1.0 / 3.0, 1e-300, 123456789.12345679, -0.0, 5e-324, f64::MAX] {
            assert_eq!(fmt_num(v).parse::<f64>().unwrap().to_bits(), v.to_bits());
        }
        assert_eq!(fmt_num(1.0), "1");
    }

    #[test]
    fn csv_two_rows() {
        let recs = vec![rec(1, 2.0, None), rec(2, 1.5, Some((0.25, 0.5, 80.0)))];
        let csv = records_to_csv(&recs);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], TRACE_CSV_HEADER);
        assert_eq!(lines[1], "1,2,0.05,,,");
        assert_eq!(lines[2], "2,1.5,0.05,0.25,0.5,80");
        assert_eq!(parse_trace_csv(&csv).unwrap(), recs);
    }

    #[test]
    fn trace_parse_errors_name_line() {
        let bad = format!("{TRACE_CSV_HEADER}\n1,2,0.05,,,\n2,oops,0.05,0.1,0.1,50\n");
        match parse_trace_csv(&bad) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        let cases = [
            ("iteration,loss\n1,2\n", 1),
            (&*format!("{TRACE_CSV_HEADER}\n2,2,0.05,,,\n"), 2),
            (&*format!("{TRACE_CSV_HEADER}\n1,2,0.05,1,1,1\n"), 2),
            (&*format!("{TRACE_CSV_HEADER}\n1,2,0.05,,,\n2,1,0.05,,,\n"), 3),
            (&*format!("{TRACE_CSV_HEADER}\n1,2,0.05,,\n"), 2),
            (&*format!("{TRACE_CSV_HEADER}\n1,2,0.05,,,\n\n2,1,0.05,1,1,1\n"), 3),
        ];
        for (text, line) in cases {
            match parse_trace_csv(text) {
                Err(Error::Parse { line: got, .. }) => assert_eq!(got, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
        assert!(matches!(parse_trace_csv(""), Err(Error::Empty(_))));
        assert!(matches!(parse_trace_csv(&format!("{TRACE_CSV_HEADER}\n")), Err(Error::Empty(_))));
    }

    #[test]
    fn svg_panels_and_errors() {
        let recs: Vec<_> = (1..=50)
            .map(|k| {
                let e = (k > 1).then_some((0.5, 0.1, 100.0 - k as f64));
                rec(k, 10.0 / k as f64, e)
            })
            .collect();
        let svg = plot_loss_curve(&recs, &[10, 50], YScale::Linear).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert_eq!(svg.matches(r#"class="panel""#).count(), 2);
        let log = plot_loss_curve(&recs, &[50], YScale::Log).unwrap();
        assert_eq!(log.matches("<polyline").count(), 1);
        assert!(plot_loss_curve(&recs, &[51], YScale::Linear).is_err());
        assert!(plot_loss_curve(&recs, &[0], YScale::Linear).is_err());
        assert!(plot_loss_curve(&recs, &[], YScale::Linear).is_err());
        assert!(plot_efficiency_curve(&recs[..1]).is_err());
        let eff = plot_efficiency_curve(&recs).unwrap();
        assert_eq!(eff.matches("<polyline").count(), 1);
    }

    #[test]
    fn decimation_keeps_endpoints() {
        let pts: Vec<(f64, f64)> = (0..10_001).map(|i| (i as f64, 0.0)).collect();
        let d = decimate(&pts);
        assert!(d.len() <= MAX_POINTS);
        assert_eq!(d.first(), pts.first());
        assert_eq!(d.last(), pts.last());
    }

    #[test]
    fn escape_markup() {
        assert_eq!(escape("a<b & \"c\""), "a&lt;b &amp; &quot;c&quot;");
    }
}
