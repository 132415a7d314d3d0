//! Standalone SVG 1.1 charts. Output depends only on the inputs, so repeated
//! renders are byte-identical.

use std::fmt::Write as _;

use chrono::{Datelike, NaiveDate};

use super::boxplot::BoxStats;
use crate::error::{Error, Result};
use crate::num::Scalar;
use crate::raster::SeriesTable;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 70.0;
const TOP: f64 = 45.0;
const BOTTOM: f64 = 60.0;
const MONTHS: [&str; 12] = [
    "Jan", "Feb", "Mar", "Apr", "May", "Jun", "Jul", "Aug", "Sep", "Oct", "Nov", "Dec",
];
const COLOR_A: &str = "#1f77b4";
const COLOR_B: &str = "#d62728";

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

/// Tick values with a 1/2/5·10^k step covering `[lo, hi]`.
fn nice_ticks(lo: f64, hi: f64, target: usize) -> (Vec<f64>, f64) {
    let (lo, hi) = if hi > lo {
        (lo, hi)
    } else {
        let pad = if lo == 0.0 { 1.0 } else { lo.abs() * 0.1 };
        (lo - pad, hi + pad)
    };
    let raw = (hi - lo) / target as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let first = (lo / step).floor() as i64;
    let last = (hi / step).ceil() as i64;
    ((first..=last).map(|i| i as f64 * step).collect(), step)
}

fn tick_label(v: f64, step: f64) -> String {
    let decimals = (-step.log10().floor()).max(0.0) as usize;
    let s = format!("{v:.decimals$}");
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

struct Axis {
    lo: f64,
    hi: f64,
    ticks: Vec<f64>,
    step: f64,
}

impl Axis {
    fn new(lo: f64, hi: f64) -> Self {
        let (ticks, step) = nice_ticks(lo, hi, 6);
        Axis {
            lo: ticks[0],
            hi: ticks[ticks.len() - 1],
            ticks,
            step,
        }
    }

    fn y(&self, v: f64) -> f64 {
        let plot_h = HEIGHT - TOP - BOTTOM;
        HEIGHT - BOTTOM - (v - self.lo) / (self.hi - self.lo) * plot_h
    }
}

fn header(out: &mut String, title: &str) {
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8" standalone="no"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, "<title>{}</title>", escape(title));
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="16">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
}

fn y_axis(out: &mut String, axis: &Axis, x: f64, left_side: bool, color: &str) {
    let _ = writeln!(
        out,
        r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="{color}"/>"#,
        TOP,
        HEIGHT - BOTTOM
    );
    let (dx, anchor) = if left_side { (-6.0, "end") } else { (6.0, "start") };
    for &t in &axis.ticks {
        let y = axis.y(t);
        let _ = writeln!(
            out,
            r#"<line x1="{x:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="{color}"/>"#,
            x + dx / 2.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="{anchor}" fill="{color}">{}</text>"#,
            x + dx,
            y + 4.0,
            tick_label(t, axis.step)
        );
    }
}

/// Monthly box-and-whisker chart; `stats[m]` is `None` for months without
/// data. Each box is one `<rect>`.
pub fn render_box_svg<T: Scalar>(stats: &[Option<BoxStats<T>>], title: &str) -> Result<String> {
    if stats.len() != 12 {
        return Err(Error::Shape(format!("expected 12 months, got {}", stats.len())));
    }
    let present: Vec<&BoxStats<T>> = stats.iter().flatten().collect();
    if present.is_empty() {
        return Err(Error::EmptyInput("no month has data".into()));
    }
    let lo = present.iter().map(|b| b.min.as_f64()).fold(f64::INFINITY, f64::min);
    let hi = present.iter().map(|b| b.max.as_f64()).fold(f64::NEG_INFINITY, f64::max);
    let axis = Axis::new(lo, hi);

    let mut out = String::new();
    header(&mut out, title);
    y_axis(&mut out, &axis, LEFT, true, "#000");
    let base = HEIGHT - BOTTOM;
    let _ = writeln!(
        out,
        r##"<line x1="{LEFT:.2}" y1="{base:.2}" x2="{:.2}" y2="{base:.2}" stroke="#000"/>"##,
        WIDTH - RIGHT
    );

    let slot = (WIDTH - LEFT - RIGHT) / 12.0;
    let half = slot * 0.3;
    for (m, s) in stats.iter().enumerate() {
        let cx = LEFT + slot * (m as f64 + 0.5);
        let _ = writeln!(
            out,
            r#"<text x="{cx:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            base + 18.0,
            MONTHS[m]
        );
        let n = s.as_ref().map_or(0, |b| b.n);
        let _ = writeln!(
            out,
            r##"<text x="{cx:.2}" y="{:.2}" text-anchor="middle" font-size="10" fill="#555">n={n}</text>"##,
            base + 32.0
        );
        let Some(b) = s else { continue };
        let (q1, q3) = (axis.y(b.q1.as_f64()), axis.y(b.q3.as_f64()));
        let (wl, wh) = (axis.y(b.whisker_lo.as_f64()), axis.y(b.whisker_hi.as_f64()));
        let med = axis.y(b.median.as_f64());
        let _ = writeln!(out, r#"<g class="box" data-month="{}">"#, m + 1);
        let _ = writeln!(
            out,
            r##"<line x1="{cx:.2}" y1="{wh:.2}" x2="{cx:.2}" y2="{q3:.2}" stroke="#000"/>"##
        );
        let _ = writeln!(
            out,
            r##"<line x1="{cx:.2}" y1="{q1:.2}" x2="{cx:.2}" y2="{wl:.2}" stroke="#000"/>"##
        );
        for w in [wl, wh] {
            let _ = writeln!(
                out,
                r##"<line x1="{:.2}" y1="{w:.2}" x2="{:.2}" y2="{w:.2}" stroke="#000"/>"##,
                cx - half / 2.0,
                cx + half / 2.0
            );
        }
        let _ = writeln!(
            out,
            r##"<rect x="{:.2}" y="{q3:.2}" width="{:.2}" height="{:.2}" fill="#9ecae1" stroke="#000"/>"##,
            cx - half,
            2.0 * half,
            (q1 - q3).max(0.0)
        );
        let _ = writeln!(
            out,
            r##"<line x1="{:.2}" y1="{med:.2}" x2="{:.2}" y2="{med:.2}" stroke="#000" stroke-width="2"/>"##,
            cx - half,
            cx + half
        );
        for o in &b.outliers {
            let _ = writeln!(
                out,
                r#"<circle cx="{cx:.2}" cy="{:.2}" r="3" fill="none" stroke="{COLOR_B}"/>"#,
                axis.y(o.as_f64())
            );
        }
        let _ = writeln!(out, "</g>");
    }
    out.push_str("</svg>\n");
    Ok(out)
}

fn days(d: NaiveDate) -> f64 {
    d.num_days_from_ce() as f64
}

/// Two time series on a shared date axis, `a` against the left axis and `b`
/// against the right one.
pub fn render_series_svg<T: Scalar>(
    a: &SeriesTable<T>,
    b: &SeriesTable<T>,
    title: &str,
) -> Result<String> {
    let series: Vec<(&SeriesTable<T>, &str, bool)> = [(a, COLOR_A, true), (b, COLOR_B, false)]
        .into_iter()
        .filter(|(s, _, _)| !s.is_empty())
        .collect();
    if series.is_empty() {
        return Err(Error::EmptyInput("both series are empty".into()));
    }
    let d0 = series.iter().map(|s| s.0.entries()[0].0).min().expect("nonempty");
    let d1 = series
        .iter()
        .map(|s| s.0.entries()[s.0.len() - 1].0)
        .max()
        .expect("nonempty");
    let span = (days(d1) - days(d0)).max(1.0);
    let plot_w = WIDTH - LEFT - RIGHT;
    let x_of = |d: NaiveDate| LEFT + (days(d) - days(d0)) / span * plot_w;

    let mut out = String::new();
    header(&mut out, title);
    let base = HEIGHT - BOTTOM;
    let _ = writeln!(
        out,
        r##"<line x1="{LEFT:.2}" y1="{base:.2}" x2="{:.2}" y2="{base:.2}" stroke="#000"/>"##,
        WIDTH - RIGHT
    );
    let mut year = d0.year() + i32::from(d0.ordinal() > 1);
    let mut labeled = 0;
    while let Some(jan) = NaiveDate::from_ymd_opt(year, 1, 1).filter(|d| *d <= d1) {
        let x = x_of(jan);
        let _ = writeln!(
            out,
            r##"<line x1="{x:.2}" y1="{base:.2}" x2="{x:.2}" y2="{:.2}" stroke="#000"/>"##,
            base + 5.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{year}</text>"#,
            base + 18.0
        );
        labeled += 1;
        year += 1;
    }
    if labeled == 0 {
        let _ = writeln!(
            out,
            r#"<text x="{LEFT:.2}" y="{:.2}" text-anchor="start">{}</text>"#,
            base + 18.0,
            d0.format("%Y-%m")
        );
    }

    for (i, (s, color, left)) in series.iter().enumerate() {
        let lo = s.values().map(Scalar::as_f64).fold(f64::INFINITY, f64::min);
        let hi = s.values().map(Scalar::as_f64).fold(f64::NEG_INFINITY, f64::max);
        let axis = Axis::new(lo, hi);
        y_axis(&mut out, &axis, if *left { LEFT } else { WIDTH - RIGHT }, *left, color);
        let points: Vec<String> = s
            .entries()
            .iter()
            .map(|&(d, v)| format!("{:.2},{:.2}", x_of(d), axis.y(v.as_f64())))
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
            points.join(" ")
        );
        let label = if s.units.is_empty() {
            escape(&s.label)
        } else {
            format!("{} ({})", escape(&s.label), escape(&s.units))
        };
        let lx = LEFT + 10.0 + 220.0 * i as f64;
        let _ = writeln!(
            out,
            r#"<line x1="{lx:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{color}" stroke-width="2"/>"#,
            base + 42.0,
            lx + 20.0,
            base + 42.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" fill="{color}">{label}</text>"#,
            lx + 26.0,
            base + 46.0
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}
