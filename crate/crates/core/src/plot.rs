//! Deterministic SVG plots, written by hand.
//!
//! Three kinds, one per figure style: centerline overlays (top view of
//! truth against estimate), error scatter plots with a fitted line, and
//! per-sensor drift traces. Identical inputs give byte-identical output.

use std::fmt::Write as _;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 30.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlotKind {
    CenterlineOverlay,
    ErrorScatterWithFit,
    DriftTraces,
}

impl PlotKind {
    pub fn name(self) -> &'static str {
        match self {
            PlotKind::CenterlineOverlay => "centerline-overlay",
            PlotKind::ErrorScatterWithFit => "error-scatter-with-fit",
            PlotKind::DriftTraces => "drift-traces",
        }
    }
}

impl std::str::FromStr for PlotKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "centerline-overlay" => Ok(PlotKind::CenterlineOverlay),
            "error-scatter-with-fit" => Ok(PlotKind::ErrorScatterWithFit),
            "drift-traces" => Ok(PlotKind::DriftTraces),
            other => Err(Error::config("kind", format!("unknown plot kind `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotSpec {
    pub kind: PlotKind,
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub output: Option<PathBuf>,
}

impl PlotSpec {
    pub fn new(kind: PlotKind, title: &str, x_label: &str, y_label: &str) -> Self {
        Self {
            kind,
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            output: None,
        }
    }
}

/// A labelled polyline in plot coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

impl Series {
    pub fn new(label: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Self {
            label: label.into(),
            points,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PlotData {
    /// Polylines drawn with equal axis scales; each gets a legend entry.
    Centerlines(Vec<Series>),
    /// Points plus an optional `(slope, intercept)` line.
    Scatter {
        points: Vec<(f64, f64)>,
        fit: Option<(f64, f64)>,
    },
    /// One polyline per sensor.
    Traces(Vec<Series>),
}

impl PlotData {
    fn matches(&self, kind: PlotKind) -> bool {
        matches!(
            (self, kind),
            (PlotData::Centerlines(_), PlotKind::CenterlineOverlay)
                | (PlotData::Scatter { .. }, PlotKind::ErrorScatterWithFit)
                | (PlotData::Traces(_), PlotKind::DriftTraces)
        )
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// A "nice" tick step (1, 2 or 5 times a power of ten) giving about
/// `target` intervals over `span`.
fn tick_step(span: f64, target: f64) -> f64 {
    let raw = span / target;
    let mag = 10f64.powf(raw.log10().floor());
    let f = raw / mag;
    let nice = if f <= 1.0 {
        1.0
    } else if f <= 2.0 {
        2.0
    } else if f <= 5.0 {
        5.0
    } else {
        10.0
    };
    nice * mag
}

fn fmt_tick(v: f64, step: f64) -> String {
    let decimals = (-step.log10().floor()).max(0.0) as usize;
    let s = format!("{v:.decimals$}");
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

#[derive(Debug, Clone, Copy)]
struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn fit(points: impl Iterator<Item = (f64, f64)>) -> Frame {
        let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for (x, y) in points.filter(|(x, y)| x.is_finite() && y.is_finite()) {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        if !x0.is_finite() {
            return Frame {
                x0: 0.0,
                x1: 1.0,
                y0: 0.0,
                y1: 1.0,
            };
        }
        let pad = |lo: f64, hi: f64| {
            if hi - lo < 1e-12 {
                let h = lo.abs().max(1.0) * 0.5;
                (lo - h, hi + h)
            } else {
                let m = 0.05 * (hi - lo);
                (lo - m, hi + m)
            }
        };
        let (x0, x1) = pad(x0, x1);
        let (y0, y1) = pad(y0, y1);
        Frame { x0, x1, y0, y1 }
    }

    /// Widens one axis so both have the same scale in the plot area.
    fn equal_aspect(self) -> Frame {
        let (pw, ph) = (WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM);
        let (sx, sy) = ((self.x1 - self.x0) / pw, (self.y1 - self.y0) / ph);
        let s = sx.max(sy);
        let (cx, cy) = ((self.x0 + self.x1) / 2.0, (self.y0 + self.y1) / 2.0);
        Frame {
            x0: cx - s * pw / 2.0,
            x1: cx + s * pw / 2.0,
            y0: cy - s * ph / 2.0,
            y1: cy + s * ph / 2.0,
        }
    }

    fn px(&self, x: f64) -> f64 {
        LEFT + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - BOTTOM - (y - self.y0) / (self.y1 - self.y0) * (HEIGHT - TOP - BOTTOM)
    }
}

fn axes(out: &mut String, f: &Frame, spec: &PlotSpec) {
    let (xl, xr, yb, yt) = (LEFT, WIDTH - RIGHT, HEIGHT - BOTTOM, TOP);
    let _ = writeln!(
        out,
        r##"<rect x="{xl}" y="{yt}" width="{:.0}" height="{:.0}" fill="none" stroke="#000" stroke-width="1"/>"##,
        xr - xl,
        yb - yt
    );
    let xs = tick_step(f.x1 - f.x0, 6.0);
    let mut t = (f.x0 / xs).ceil() * xs;
    while t <= f.x1 + 1e-9 * xs {
        let x = f.px(t);
        let _ = writeln!(
            out,
            r##"<line x1="{x:.2}" y1="{yb}" x2="{x:.2}" y2="{:.0}" stroke="#000"/><text x="{x:.2}" y="{:.0}" text-anchor="middle" font-size="12">{}</text>"##,
            yb + 5.0,
            yb + 20.0,
            fmt_tick(t, xs)
        );
        t += xs;
    }
    let ys = tick_step(f.y1 - f.y0, 6.0);
    let mut t = (f.y0 / ys).ceil() * ys;
    while t <= f.y1 + 1e-9 * ys {
        let y = f.py(t);
        let _ = writeln!(
            out,
            r##"<line x1="{:.0}" y1="{y:.2}" x2="{xl}" y2="{y:.2}" stroke="#000"/><text x="{:.0}" y="{:.2}" text-anchor="end" font-size="12">{}</text>"##,
            xl - 5.0,
            xl - 8.0,
            y + 4.0,
            fmt_tick(t, ys)
        );
        t += ys;
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.0}" y="{:.0}" text-anchor="middle" font-size="14">{}</text>"#,
        (xl + xr) / 2.0,
        HEIGHT - 15.0,
        escape(&spec.x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="20" y="{:.0}" text-anchor="middle" font-size="14" transform="rotate(-90 20 {:.0})">{}</text>"#,
        (yb + yt) / 2.0,
        (yb + yt) / 2.0,
        escape(&spec.y_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.0}" y="25" text-anchor="middle" font-size="16">{}</text>"#,
        WIDTH / 2.0,
        escape(&spec.title)
    );
}

fn polyline(out: &mut String, f: &Frame, pts: &[(f64, f64)], color: &str, width: f64) {
    if pts.is_empty() {
        return;
    }
    let coords: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", f.px(x), f.py(y))).collect();
    let _ = writeln!(
        out,
        r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="{width}"/>"#,
        coords.join(" ")
    );
}

fn legend(out: &mut String, labels: &[(&str, &str)]) {
    if labels.is_empty() {
        return;
    }
    let _ = writeln!(out, r#"<g class="legend">"#);
    for (i, (label, color)) in labels.iter().enumerate() {
        let y = TOP + 15.0 + 18.0 * i as f64;
        let x = WIDTH - RIGHT - 150.0;
        let _ = writeln!(
            out,
            r#"<line x1="{x:.0}" y1="{y:.0}" x2="{:.0}" y2="{y:.0}" stroke="{color}" stroke-width="3"/><text x="{:.0}" y="{:.0}" font-size="12">{}</text>"#,
            x + 20.0,
            x + 26.0,
            y + 4.0,
            escape(label)
        );
    }
    let _ = writeln!(out, "</g>");
}

/// Renders `data` as an SVG document. Fails when the data does not fit
/// the plot kind.
pub fn render_svg(spec: &PlotSpec, data: &PlotData) -> Result<String> {
    if !data.matches(spec.kind) {
        return Err(Error::PlotData(spec.kind.name().to_string()));
    }
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(out, r##"<rect width="100%" height="100%" fill="#fff"/>"##);
    match data {
        PlotData::Centerlines(series) | PlotData::Traces(series) => {
            let f = Frame::fit(series.iter().flat_map(|s| s.points.iter().copied()));
            let f = if matches!(data, PlotData::Centerlines(_)) {
                f.equal_aspect()
            } else {
                f
            };
            axes(&mut out, &f, spec);
            for (i, s) in series.iter().enumerate() {
                polyline(&mut out, &f, &s.points, PALETTE[i % PALETTE.len()], 2.0);
            }
            if matches!(data, PlotData::Centerlines(_)) || series.len() <= PALETTE.len() {
                let labels: Vec<(&str, &str)> = series
                    .iter()
                    .enumerate()
                    .map(|(i, s)| (s.label.as_str(), PALETTE[i % PALETTE.len()]))
                    .collect();
                legend(&mut out, &labels);
            }
        }
        PlotData::Scatter { points, fit } => {
            let f = Frame::fit(points.iter().copied());
            axes(&mut out, &f, spec);
            for &(x, y) in points.iter().filter(|(x, y)| x.is_finite() && y.is_finite()) {
                let _ = writeln!(
                    out,
                    r#"<circle cx="{:.2}" cy="{:.2}" r="3.5" fill="{}"/>"#,
                    f.px(x),
                    f.py(y),
                    PALETTE[0]
                );
            }
            if let (Some((m, b)), false) = (fit, points.is_empty()) {
                polyline(&mut out, &f, &[(f.x0, m * f.x0 + b), (f.x1, m * f.x1 + b)], PALETTE[1], 1.5);
                legend(&mut out, &[("trials", PALETTE[0]), ("least-squares fit", PALETTE[1])]);
            }
        }
    }
    out.push_str("</svg>\n");
    Ok(out)
}
