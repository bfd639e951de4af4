//! Dependency-free SVG line chart for fluctuation traces.

use std::fmt::Write as _;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 50.0;

pub struct Series<'a> {
    pub name: &'a str,
    pub values: &'a [f64],
    pub color: &'a str,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Plots every series against `k = 1..n` with dashed bands at `+-critical`.
pub fn render(title: &str, series: &[Series], critical: f64) -> String {
    let n = series.iter().map(|s| s.values.len()).max().unwrap_or(1).max(2);
    let peak = series
        .iter()
        .flat_map(|s| s.values.iter())
        .filter(|v| v.is_finite())
        .fold(critical, |m, v| m.max(v.abs()));
    let y_max = if peak > 0.0 { 1.1 * peak } else { 1.0 };
    let plot_w = WIDTH - 2.0 * MARGIN;
    let plot_h = HEIGHT - 2.0 * MARGIN;
    let x = |k: usize| MARGIN + (k as f64 - 1.0) / (n as f64 - 1.0) * plot_w;
    let y = |v: f64| MARGIN + (y_max - v) / (2.0 * y_max) * plot_h;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        MARGIN / 2.0,
        escape(title)
    );
    // frame, zero line and critical bands
    let _ = writeln!(
        out,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );
    let _ = writeln!(
        out,
        r##"<line x1="{MARGIN}" y1="{0:.2}" x2="{1}" y2="{0:.2}" stroke="#888"/>"##,
        y(0.0),
        MARGIN + plot_w
    );
    for c in [critical, -critical] {
        let _ = writeln!(
            out,
            r##"<line x1="{MARGIN}" y1="{0:.2}" x2="{1}" y2="{0:.2}" stroke="#c00" stroke-dasharray="6 4"/>"##,
            y(c),
            MARGIN + plot_w
        );
    }
    for v in [y_max, 0.0, -y_max] {
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{:.2}" text-anchor="end" dominant-baseline="middle">{v:.2}</text>"#,
            MARGIN - 6.0,
            y(v)
        );
    }
    for k in [1, n / 2, n] {
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{}" text-anchor="middle">{k}</text>"#,
            x(k),
            HEIGHT - MARGIN + 16.0
        );
    }
    for (i, s) in series.iter().enumerate() {
        let points: Vec<String> = s
            .values
            .iter()
            .enumerate()
            .filter(|(_, v)| v.is_finite())
            .map(|(idx, &v)| format!("{:.2},{:.2}", x(idx + 1), y(v)))
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline fill="none" stroke="{}" stroke-width="1.5" points="{}"/>"#,
            s.color,
            points.join(" ")
        );
        let ly = MARGIN + 14.0 + 16.0 * i as f64;
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{ly}" fill="{}">{}</text>"#,
            MARGIN + 8.0,
            s.color,
            escape(s.name)
        );
    }
    out.push_str("</svg>\n");
    out
}
