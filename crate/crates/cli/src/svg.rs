//! Minimal SVG line and bar charts.

use std::fmt::Write as _;

pub const RED: &str = "#c0392b";
pub const BLUE: &str = "#2e6fb7";
pub const GREY: &str = "#555555";

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 55.0;

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub color: &'static str,
    pub dashed: bool,
    pub points: Vec<(f64, f64)>,
}

impl Series {
    pub fn new(label: impl Into<String>, color: &'static str, points: Vec<(f64, f64)>) -> Self {
        Series {
            label: label.into(),
            color,
            dashed: false,
            points,
        }
    }

    pub fn dashed(mut self) -> Self {
        self.dashed = true;
        self
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn tick(x: f64) -> String {
    let s = format!("{x:.3}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn fit(points: impl Iterator<Item = (f64, f64)>) -> Frame {
        let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, 0.0_f64, f64::NEG_INFINITY);
        for (x, y) in points.filter(|(x, y)| x.is_finite() && y.is_finite()) {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        if !x0.is_finite() {
            (x0, x1) = (0.0, 1.0);
        }
        if !y1.is_finite() {
            y1 = 1.0;
        }
        if x1 <= x0 {
            x1 = x0 + 1.0;
        }
        if y1 <= y0 {
            y1 = y0 + 1.0;
        }
        Frame { x0, x1, y0, y1: y1 + 0.05 * (y1 - y0) }
    }

    fn px(&self, x: f64) -> f64 {
        LEFT + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - BOTTOM - (y - self.y0) / (self.y1 - self.y0) * (HEIGHT - TOP - BOTTOM)
    }
}

fn open(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#, WIDTH / 2.0, escape(title));
}

fn axes(out: &mut String, f: &Frame, x_label: &str, y_label: &str, x_ticks: bool) {
    let (bx, by) = (LEFT, HEIGHT - BOTTOM);
    let _ = writeln!(out, r#"<line x1="{bx}" y1="{by}" x2="{}" y2="{by}" stroke="black"/>"#, WIDTH - RIGHT);
    let _ = writeln!(out, r#"<line x1="{bx}" y1="{by}" x2="{bx}" y2="{TOP}" stroke="black"/>"#);
    for k in 0..=4 {
        let t = k as f64 / 4.0;
        let y = f.y0 + t * (f.y1 - f.y0);
        let py = f.py(y);
        let _ = writeln!(out, r#"<line x1="{}" y1="{py:.2}" x2="{bx}" y2="{py:.2}" stroke="black"/>"#, bx - 4.0);
        let _ = writeln!(out, r#"<text x="{}" y="{:.2}" text-anchor="end">{}</text>"#, bx - 7.0, py + 4.0, tick(y));
        if x_ticks {
            let x = f.x0 + t * (f.x1 - f.x0);
            let px = f.px(x);
            let _ = writeln!(out, r#"<line x1="{px:.2}" y1="{by}" x2="{px:.2}" y2="{}" stroke="black"/>"#, by + 4.0);
            let _ = writeln!(out, r#"<text x="{px:.2}" y="{}" text-anchor="middle">{}</text>"#, by + 18.0, tick(x));
        }
    }
    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, (LEFT + WIDTH - RIGHT) / 2.0, HEIGHT - 12.0, escape(x_label));
    let _ = writeln!(
        out,
        r#"<text x="18" y="{0}" text-anchor="middle" transform="rotate(-90 18 {0})">{1}</text>"#,
        (TOP + HEIGHT - BOTTOM) / 2.0,
        escape(y_label)
    );
}

/// Line chart; non-finite points break the line.
pub fn line_plot(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    let frame = Frame::fit(series.iter().flat_map(|s| s.points.iter().copied()));
    let mut out = String::new();
    open(&mut out, title);
    axes(&mut out, &frame, x_label, y_label, true);
    for (i, s) in series.iter().enumerate() {
        let mut d = String::new();
        let mut pen_down = false;
        for &(x, y) in &s.points {
            if !(x.is_finite() && y.is_finite()) {
                pen_down = false;
                continue;
            }
            let _ = write!(d, "{}{:.2},{:.2} ", if pen_down { "L" } else { "M" }, frame.px(x), frame.py(y));
            pen_down = true;
        }
        let dash = if s.dashed { r#" stroke-dasharray="6,4""# } else { "" };
        let _ = writeln!(out, r#"<path d="{}" fill="none" stroke="{}" stroke-width="1.6"{dash}/>"#, d.trim_end(), s.color);
        let ly = TOP + 14.0 * i as f64;
        let lx = WIDTH - RIGHT - 150.0;
        let _ = writeln!(out, r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{}" stroke-width="2"{dash}/>"#, lx + 20.0, s.color);
        let _ = writeln!(out, r#"<text x="{}" y="{}">{}</text>"#, lx + 25.0, ly + 4.0, escape(&s.label));
    }
    out.push_str("</svg>\n");
    out
}

/// Bar chart with optional horizontal reference lines.
pub fn bar_plot(title: &str, y_label: &str, bars: &[(String, f64)], lines: &[(String, f64)]) -> String {
    let n = bars.len().max(1) as f64;
    let frame = Frame::fit(
        bars.iter()
            .map(|(_, v)| (0.0, *v))
            .chain(lines.iter().map(|(_, v)| (n, *v))),
    );
    let frame = Frame { x0: 0.0, x1: n, ..frame };
    let mut out = String::new();
    open(&mut out, title);
    axes(&mut out, &frame, "", y_label, false);
    for (i, (label, v)) in bars.iter().enumerate() {
        let (xa, xb) = (frame.px(i as f64 + 0.2), frame.px(i as f64 + 0.8));
        let (ya, yb) = (frame.py(v.min(frame.y1)), frame.py(0.0));
        let _ = writeln!(out, r#"<rect x="{xa:.2}" y="{ya:.2}" width="{:.2}" height="{:.2}" fill="{BLUE}"/>"#, xb - xa, yb - ya);
        let _ = writeln!(out, r#"<text x="{:.2}" y="{}" text-anchor="middle">{}</text>"#, (xa + xb) / 2.0, HEIGHT - BOTTOM + 18.0, escape(label));
    }
    for (label, v) in lines {
        let y = frame.py(*v);
        let _ = writeln!(out, r#"<line x1="{LEFT}" y1="{y:.2}" x2="{}" y2="{y:.2}" stroke="{RED}" stroke-dasharray="6,4"/>"#, WIDTH - RIGHT);
        let _ = writeln!(out, r#"<text x="{}" y="{:.2}" text-anchor="end" fill="{RED}">{}</text>"#, WIDTH - RIGHT, y - 4.0, escape(label));
    }
    out.push_str("</svg>\n");
    out
}
