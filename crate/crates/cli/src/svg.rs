//! Minimal SVG renderings with a fixed layout.
//!
//! Output depends only on the data, so identical inputs give identical
//! files.

use std::fmt::Write;

const W: f64 = 640.0;
const H: f64 = 400.0;
const MARGIN: f64 = 56.0;
const COLORS: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
];

pub struct Series<'a> {
    pub label: &'a str,
    pub x: &'a [f64],
    pub y: &'a [f64],
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn fit<'a>(
        xs: impl Iterator<Item = &'a f64> + Clone,
        ys: impl Iterator<Item = &'a f64> + Clone,
    ) -> Frame {
        let range = |it: &mut dyn Iterator<Item = &f64>| {
            it.filter(|v| v.is_finite())
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                    (lo.min(*v), hi.max(*v))
                })
        };
        let (mut x0, mut x1) = range(&mut xs.clone());
        let (mut y0, mut y1) = range(&mut ys.clone());
        if !x0.is_finite() {
            (x0, x1) = (0.0, 1.0);
        }
        if !y0.is_finite() {
            (y0, y1) = (0.0, 1.0);
        }
        if x1 - x0 <= 0.0 {
            x0 -= 0.5;
            x1 += 0.5;
        }
        if y1 - y0 <= 0.0 {
            y0 -= 0.5;
            y1 += 0.5;
        }
        let pad = 0.05 * (y1 - y0);
        Frame {
            x0,
            x1,
            y0: y0 - pad,
            y1: y1 + pad,
        }
    }

    fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.x0) / (self.x1 - self.x0) * (W - 2.0 * MARGIN)
    }

    fn py(&self, y: f64) -> f64 {
        H - MARGIN - (y - self.y0) / (self.y1 - self.y0) * (H - 2.0 * MARGIN)
    }
}

fn header(out: &mut String, title: &str, frame: &Frame, xlabel: &str, ylabel: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(out, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="20" text-anchor="middle" font-size="13">{}</text>"#,
        W / 2.0,
        escape(title)
    );
    let (l, r, t, b) = (MARGIN, W - MARGIN, MARGIN, H - MARGIN);
    let _ = writeln!(
        out,
        r#"<rect x="{l}" y="{t}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        r - l,
        b - t
    );
    for i in 0..=4 {
        let fx = frame.x0 + (frame.x1 - frame.x0) * i as f64 / 4.0;
        let fy = frame.y0 + (frame.y1 - frame.y0) * i as f64 / 4.0;
        let (px, py) = (frame.px(fx), frame.py(fy));
        let _ = writeln!(
            out,
            r#"<text x="{px:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            b + 14.0,
            tick(fx)
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{py:.1}" text-anchor="end">{}</text>"#,
            l - 4.0,
            tick(fy)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        W / 2.0,
        H - 12.0,
        escape(xlabel)
    );
    let _ = writeln!(
        out,
        r#"<text x="14" y="{}" text-anchor="middle" transform="rotate(-90 14 {})">{}</text>"#,
        H / 2.0,
        H / 2.0,
        escape(ylabel)
    );
}

fn tick(v: f64) -> String {
    if v != 0.0 && (v.abs() >= 1e4 || v.abs() < 1e-2) {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn legend(out: &mut String, labels: &[&str]) {
    for (i, l) in labels.iter().enumerate() {
        let y = MARGIN + 12.0 + 14.0 * i as f64;
        let x = W - MARGIN - 120.0;
        let _ = writeln!(
            out,
            r#"<line x1="{x}" y1="{}" x2="{}" y2="{}" stroke="{}" stroke-width="2"/><text x="{}" y="{y}">{}</text>"#,
            y - 4.0,
            x + 16.0,
            y - 4.0,
            COLORS[i % COLORS.len()],
            x + 20.0,
            escape(l)
        );
    }
}

/// Polyline per series on shared axes.
pub fn line_plot(title: &str, xlabel: &str, ylabel: &str, series: &[Series]) -> String {
    let frame = Frame::fit(
        series.iter().flat_map(|s| s.x.iter()),
        series.iter().flat_map(|s| s.y.iter()),
    );
    let mut out = String::new();
    header(&mut out, title, &frame, xlabel, ylabel);
    for (i, s) in series.iter().enumerate() {
        // thin long series to at most ~2000 vertices
        let stride = (s.x.len() / 2000).max(1);
        let pts: Vec<String> =
            s.x.iter()
                .zip(s.y)
                .step_by(stride)
                .filter(|(x, y)| x.is_finite() && y.is_finite())
                .map(|(x, y)| format!("{:.1},{:.1}", frame.px(*x), frame.py(*y)))
                .collect();
        let _ = writeln!(
            out,
            r#"<polyline fill="none" stroke="{}" stroke-width="1.5" points="{}"/>"#,
            COLORS[i % COLORS.len()],
            pts.join(" ")
        );
    }
    legend(
        &mut out,
        &series.iter().map(|s| s.label).collect::<Vec<_>>(),
    );
    out.push_str("</svg>\n");
    out
}

/// Vertical stems from zero, one group per series, offset slightly in x.
pub fn stem_plot(title: &str, xlabel: &str, ylabel: &str, series: &[Series]) -> String {
    let zero = [0.0];
    let frame = Frame::fit(
        series.iter().flat_map(|s| s.x.iter()),
        series.iter().flat_map(|s| s.y.iter()).chain(zero.iter()),
    );
    let mut out = String::new();
    header(&mut out, title, &frame, xlabel, ylabel);
    let y0 = frame.py(0.0);
    let _ = writeln!(
        out,
        r##"<line x1="{MARGIN}" y1="{y0:.1}" x2="{}" y2="{y0:.1}" stroke="#888"/>"##,
        W - MARGIN
    );
    for (i, s) in series.iter().enumerate() {
        let dx = 3.0 * i as f64;
        let c = COLORS[i % COLORS.len()];
        for (x, y) in s.x.iter().zip(s.y) {
            if !(x.is_finite() && y.is_finite()) {
                continue;
            }
            let (px, py) = (frame.px(*x) + dx, frame.py(*y));
            let _ = writeln!(
                out,
                r#"<line x1="{px:.1}" y1="{y0:.1}" x2="{px:.1}" y2="{py:.1}" stroke="{c}"/><circle cx="{px:.1}" cy="{py:.1}" r="2.5" fill="{c}"/>"#
            );
        }
    }
    legend(
        &mut out,
        &series.iter().map(|s| s.label).collect::<Vec<_>>(),
    );
    out.push_str("</svg>\n");
    out
}

/// Pole-zero map in the w-plane with the stability and hyper-damping rays.
pub fn pole_zero_plot(title: &str, poles: &[(f64, f64)], zeros: &[(f64, f64)], q: f64) -> String {
    let r = poles
        .iter()
        .chain(zeros)
        .map(|(re, im)| re.hypot(*im))
        .filter(|v| v.is_finite())
        .fold(0.0, f64::max)
        .max(1e-12)
        * 1.1;
    let frame = Frame {
        x0: -r,
        x1: r,
        y0: -r,
        y1: r,
    };
    let mut out = String::new();
    header(&mut out, title, &frame, "Re w", "Im w");
    let (cx, cy) = (frame.px(0.0), frame.py(0.0));
    for (deg, dash) in [(90.0 * q, "4 3"), (180.0 * q, "1 3")] {
        for sign in [1.0, -1.0] {
            let a = (sign * deg as f64).to_radians();
            let _ = writeln!(
                out,
                r##"<line x1="{cx:.1}" y1="{cy:.1}" x2="{:.1}" y2="{:.1}" stroke="#888" stroke-dasharray="{dash}"/>"##,
                frame.px(r * a.cos()),
                frame.py(r * a.sin())
            );
        }
    }
    for (re, im) in poles {
        let (x, y) = (frame.px(*re), frame.py(*im));
        let _ = writeln!(
            out,
            r##"<path d="M{:.1},{:.1}L{:.1},{:.1}M{:.1},{:.1}L{:.1},{:.1}" stroke="#d62728" stroke-width="1.5"/>"##,
            x - 4.0,
            y - 4.0,
            x + 4.0,
            y + 4.0,
            x - 4.0,
            y + 4.0,
            x + 4.0,
            y - 4.0
        );
    }
    for (re, im) in zeros {
        let _ = writeln!(
            out,
            r##"<circle cx="{:.1}" cy="{:.1}" r="4" fill="none" stroke="#1f77b4" stroke-width="1.5"/>"##,
            frame.px(*re),
            frame.py(*im)
        );
    }
    out.push_str("</svg>\n");
    out
}
