//! Minimal SVG rendering of result tables. CSVs remain the contract; plots
//! are for eyeballing.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::table::Table;
use crate::error::{Error, Result};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotStyle {
    Line,
    /// One series with vertical bars of ± the `std` column.
    ErrorBar,
}

#[derive(Debug, Clone)]
pub struct PlotSpec {
    pub title: String,
    pub x: String,
    pub series: Vec<String>,
    pub style: PlotStyle,
    pub std: Option<String>,
    pub x_label: String,
    pub y_label: String,
}

impl PlotSpec {
    pub fn line(title: &str, x: &str, series: &[&str], y_label: &str) -> Self {
        Self {
            title: title.into(),
            x: x.into(),
            series: series.iter().map(|s| s.to_string()).collect(),
            style: PlotStyle::Line,
            std: None,
            x_label: x.into(),
            y_label: y_label.into(),
        }
    }

    pub fn errorbar(title: &str, x: &str, mean: &str, std: &str, y_label: &str) -> Self {
        Self {
            title: title.into(),
            x: x.into(),
            series: vec![mean.into()],
            style: PlotStyle::ErrorBar,
            std: Some(std.into()),
            x_label: x.into(),
            y_label: y_label.into(),
        }
    }
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        LEFT + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - BOTTOM - (y - self.y0) / (self.y1 - self.y0) * (HEIGHT - TOP - BOTTOM)
    }
}

fn padded(lo: f64, hi: f64) -> (f64, f64) {
    if !(hi > lo) {
        let pad = if lo == 0.0 { 1.0 } else { lo.abs() * 0.05 };
        return (lo - pad, hi + pad);
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn render_svg(table: &Table, spec: &PlotSpec) -> Result<String> {
    let col = |name: &str| {
        table
            .column(name)
            .ok_or_else(|| Error::invalid(format!("plot column {name:?} not in table")))
    };
    if spec.series.is_empty() {
        return Err(Error::invalid("plot needs at least one series"));
    }
    let xs = col(&spec.x)?;
    let ys: Vec<Vec<f64>> = spec.series.iter().map(|s| col(s)).collect::<Result<_>>()?;
    let err = match spec.style {
        PlotStyle::Line => None,
        PlotStyle::ErrorBar => {
            let name = spec
                .std
                .as_deref()
                .ok_or_else(|| Error::invalid("errorbar plot requires a std column"))?;
            if spec.series.len() != 1 {
                return Err(Error::invalid("errorbar plot takes exactly one series"));
            }
            Some(col(name)?)
        }
    };

    let finite = |v: &f64| v.is_finite();
    let (xmin, xmax) = xs.iter().filter(|v| finite(v)).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let mut ymin = f64::INFINITY;
    let mut ymax = f64::NEG_INFINITY;
    for (k, y) in ys.iter().enumerate() {
        for (i, &v) in y.iter().enumerate() {
            if !v.is_finite() {
                continue;
            }
            let e = if k == 0 { err.as_ref().map_or(0.0, |e| e[i].abs()) } else { 0.0 };
            ymin = ymin.min(v - e);
            ymax = ymax.max(v + e);
        }
    }
    let (x0, x1) = if xmin.is_finite() { padded(xmin, xmax) } else { (0.0, 1.0) };
    let (y0, y1) = if ymin.is_finite() { padded(ymin, ymax) } else { (0.0, 1.0) };
    let fr = Frame { x0, x1, y0, y1 };

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#, WIDTH / 2.0, escape(&spec.title));
    let (bx0, by0, bx1, by1) = (LEFT, TOP, WIDTH - RIGHT, HEIGHT - BOTTOM);
    let _ = writeln!(s, r#"<rect x="{bx0}" y="{by0}" width="{}" height="{}" fill="none" stroke="black"/>"#, bx1 - bx0, by1 - by0);
    for k in 0..=4 {
        let f = k as f64 / 4.0;
        let xv = x0 + f * (x1 - x0);
        let yv = y0 + f * (y1 - y0);
        let (px, py) = (fr.px(xv), fr.py(yv));
        let _ = writeln!(s, r#"<line x1="{px:.2}" y1="{by1}" x2="{px:.2}" y2="{}" stroke="black"/>"#, by1 + 5.0);
        let _ = writeln!(s, r#"<text x="{px:.2}" y="{}" text-anchor="middle">{xv:.4}</text>"#, by1 + 18.0);
        let _ = writeln!(s, r#"<line x1="{}" y1="{py:.2}" x2="{bx0}" y2="{py:.2}" stroke="black"/>"#, bx0 - 5.0);
        let _ = writeln!(s, r#"<text x="{}" y="{:.2}" text-anchor="end">{yv:.4}</text>"#, bx0 - 8.0, py + 4.0);
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, (bx0 + bx1) / 2.0, HEIGHT - 16.0, escape(&spec.x_label));
    let _ = writeln!(
        s,
        r#"<text x="18" y="{0}" text-anchor="middle" transform="rotate(-90 18 {0})">{1}</text>"#,
        (by0 + by1) / 2.0,
        escape(&spec.y_label)
    );

    for (k, y) in ys.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let pts: Vec<String> = xs
            .iter()
            .zip(y)
            .filter(|(a, b)| a.is_finite() && b.is_finite())
            .map(|(&a, &b)| format!("{:.2},{:.2}", fr.px(a), fr.py(b)))
            .collect();
        let _ = writeln!(s, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, pts.join(" "));
        if let (0, Some(e)) = (k, err.as_ref()) {
            for ((&a, &b), &d) in xs.iter().zip(y).zip(e) {
                let (px, lo, hi) = (fr.px(a), fr.py(b - d.abs()), fr.py(b + d.abs()));
                let _ = writeln!(s, r#"<line x1="{px:.2}" y1="{lo:.2}" x2="{px:.2}" y2="{hi:.2}" stroke="{color}"/>"#);
                let _ = writeln!(s, r#"<circle cx="{px:.2}" cy="{:.2}" r="2.5" fill="{color}"/>"#, fr.py(b));
            }
        }
    }

    if ys.len() > 1 {
        let _ = writeln!(s, r#"<g class="legend">"#);
        for (k, name) in spec.series.iter().enumerate() {
            let color = PALETTE[k % PALETTE.len()];
            let ly = by0 + 16.0 + 16.0 * k as f64;
            let lx = bx1 - 150.0;
            let _ = writeln!(s, r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#, lx + 20.0);
            let _ = writeln!(s, r#"<text x="{}" y="{}">{}</text>"#, lx + 26.0, ly + 4.0, escape(name));
        }
        let _ = writeln!(s, "</g>");
    }
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn emit_plot(table: &Table, spec: &PlotSpec, path: &Path) -> Result<()> {
    let svg = render_svg(table, spec)?;
    fs::write(path, svg).map_err(|e| Error::io(path, e))
}
