//! Minimal log-log line plots as standalone SVG.

use std::fmt::Write;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 360.0;
const MARGIN: (f64, f64, f64, f64) = (70.0, 20.0, 30.0, 45.0); // left, right, top, bottom
const COLORS: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

#[derive(Debug, Clone)]
pub struct Series {
    pub name: String,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct Panel {
    pub title: String,
    pub series: Vec<Series>,
}

/// Points with positive finite coordinates, in log10.
fn log_points(s: &Series) -> Vec<(f64, f64)> {
    s.x.iter()
        .zip(&s.y)
        .map(|(x, y)| (*x, y.abs()))
        .filter(|(x, y)| *x > 0.0 && *y > 0.0 && x.is_finite() && y.is_finite())
        .map(|(x, y)| (x.log10(), y.log10()))
        .collect()
}

fn range(vals: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
    let (lo, hi) = vals.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        return None;
    }
    let (lo, hi) = (lo.floor(), hi.ceil());
    Some(if hi > lo { (lo, hi) } else { (lo - 1.0, hi + 1.0) })
}

fn panel(out: &mut String, p: &Panel, y0: f64) {
    let pts: Vec<Vec<(f64, f64)>> = p.series.iter().map(log_points).collect();
    let xr = range(pts.iter().flatten().map(|q| q.0));
    let yr = range(pts.iter().flatten().map(|q| q.1));
    let (l, r, t, b) = MARGIN;
    let (pw, ph) = (WIDTH - l - r, HEIGHT - t - b);
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" font-size="14" text-anchor="middle">{}</text>"#,
        l + pw / 2.0,
        y0 + 18.0,
        p.title
    );
    let _ = writeln!(
        out,
        r#"<rect x="{l}" y="{:.1}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#,
        y0 + t
    );
    let (Some((x0, x1)), Some((ya, yb))) = (xr, yr) else {
        return;
    };
    let sx = |x: f64| l + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| y0 + t + ph - (y - ya) / (yb - ya) * ph;
    let step = |lo: f64, hi: f64| ((hi - lo) / 8.0).ceil().max(1.0);
    let mut d = x0;
    while d <= x1 {
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" font-size="10" text-anchor="middle">1e{}</text>"#,
            sx(d),
            y0 + t + ph + 15.0,
            d as i64
        );
        d += step(x0, x1);
    }
    let mut d = ya;
    while d <= yb {
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" font-size="10" text-anchor="end">1e{}</text>"#,
            l - 5.0,
            sy(d) + 3.0,
            d as i64
        );
        d += step(ya, yb);
    }
    for (i, (s, q)) in p.series.iter().zip(&pts).enumerate() {
        let color = COLORS[i % COLORS.len()];
        let path: Vec<String> = q.iter().map(|(x, y)| format!("{:.2},{:.2}", sx(*x), sy(*y))).collect();
        let _ = writeln!(
            out,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            path.join(" ")
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" font-size="10" fill="{color}">{}</text>"#,
            l + 8.0,
            y0 + t + 14.0 + 12.0 * i as f64,
            s.name
        );
    }
}

/// Panels stacked vertically; absolute values are plotted.
pub fn render(panels: &[Panel]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{}" font-family="sans-serif">"#,
        HEIGHT * panels.len() as f64
    );
    for (i, p) in panels.iter().enumerate() {
        panel(&mut out, p, HEIGHT * i as f64);
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_lines_and_skips_bad_points() {
        let s = Series {
            name: "H".into(),
            x: vec![1e-3, 1e-2, 1e-1, 0.0],
            y: vec![10.0, 3.0, -1.0, 5.0],
        };
        let svg = render(&[Panel {
            title: "heat".into(),
            series: vec![s],
        }]);
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        let line = svg.lines().find(|l| l.starts_with("<polyline")).unwrap();
        assert_eq!(line.matches(',').count(), 3);
    }

    #[test]
    fn empty_panel() {
        let svg = render(&[Panel {
            title: "none".into(),
            series: vec![],
        }]);
        assert!(!svg.contains("polyline"));
    }
}
