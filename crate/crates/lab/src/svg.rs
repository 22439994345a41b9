//! Self-contained SVG figures. Output depends only on the input data.

use std::fmt::Write;

use canetoads_core::contour::contour_lines;
use canetoads_core::front::PowerFit;
use canetoads_core::Field;

const W: f64 = 800.0;
const H: f64 = 500.0;
const PAD: f64 = 60.0;
const COLOURS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        PAD + (x - self.x0) / (self.x1 - self.x0) * (W - 2.0 * PAD)
    }

    fn py(&self, y: f64) -> f64 {
        H - PAD - (y - self.y0) / (self.y1 - self.y0) * (H - 2.0 * PAD)
    }

    fn axes(&self, s: &mut String, xlabel: &str, ylabel: &str) {
        let _ = writeln!(
            s,
            r##"<rect x="{PAD}" y="{PAD}" width="{}" height="{}" fill="none" stroke="#000"/>"##,
            W - 2.0 * PAD,
            H - 2.0 * PAD
        );
        let _ = writeln!(s, r#"<text x="{PAD}" y="{}" font-size="12">{:.3}</text>"#, H - PAD + 16.0, self.x0);
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-size="12" text-anchor="end">{:.3}</text>"#,
            W - PAD,
            H - PAD + 16.0,
            self.x1
        );
        let _ = writeln!(s, r#"<text x="{}" y="{}" font-size="12" text-anchor="end">{:.3}</text>"#, PAD - 4.0, H - PAD, self.y0);
        let _ = writeln!(s, r#"<text x="{}" y="{}" font-size="12" text-anchor="end">{:.3}</text>"#, PAD - 4.0, PAD + 10.0, self.y1);
        let _ = writeln!(s, r#"<text x="{}" y="{}" font-size="14" text-anchor="middle">{xlabel}</text>"#, W / 2.0, H - 20.0);
        let _ = writeln!(
            s,
            r#"<text x="20" y="{}" font-size="14" text-anchor="middle" transform="rotate(-90 20 {})">{ylabel}</text>"#,
            H / 2.0,
            H / 2.0
        );
    }
}

fn open(title: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#);
    let _ = writeln!(s, r##"<rect width="100%" height="100%" fill="#fff"/>"##);
    let _ = writeln!(s, r#"<text x="{}" y="30" font-size="16" text-anchor="middle">{}</text>"#, W / 2.0, escape(title));
    s
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn path(points: impl Iterator<Item = (f64, f64)>, closed: bool) -> String {
    let mut d = String::new();
    for (k, (x, y)) in points.enumerate() {
        let _ = write!(d, "{}{x:.2},{y:.2} ", if k == 0 { "M" } else { "L" });
    }
    if closed {
        d.push('Z');
    }
    d
}

/// Level curves of one or more fields, drawn in the `(x, θ)` plane.
///
/// Levels outside a field's range are left out and noted in the legend.
pub fn contour_svg(fields: &[(&str, &Field)], levels: &[f64], title: &str) -> String {
    let g = fields.first().map(|(_, f)| f.grid);
    let mut s = open(title);
    let Some(g) = g else {
        s.push_str("</svg>\n");
        return s;
    };
    let fr = Frame { x0: g.x_min, x1: g.x_max, y0: g.theta_min, y1: g.theta_max };
    fr.axes(&mut s, "x", "θ");
    let mut legend = Vec::new();
    let mut k = 0;
    for (name, f) in fields {
        let (lo, hi) = (f.min(), f.max());
        for &level in levels {
            let label = format!("{name} = {level}");
            if !(level > lo && level < hi) {
                let _ = writeln!(s, "<!-- {} outside field range, omitted -->", escape(&label));
                legend.push((format!("{label} (omitted: outside range)"), "#999"));
                continue;
            }
            let colour = COLOURS[k % COLOURS.len()];
            k += 1;
            for line in contour_lines(f, level) {
                let d = path(line.points.iter().map(|&(x, th)| (fr.px(x), fr.py(th))), line.closed);
                let _ = writeln!(s, r#"<path d="{d}" fill="none" stroke="{colour}" stroke-width="1.5"/>"#);
            }
            legend.push((label, colour));
        }
    }
    for (n, (label, colour)) in legend.iter().enumerate() {
        let y = PAD + 18.0 + 16.0 * n as f64;
        let _ = writeln!(s, r#"<text x="{}" y="{y}" font-size="12" fill="{colour}">{}</text>"#, PAD + 8.0, escape(label));
    }
    s.push_str("</svg>\n");
    s
}

/// Front position against time on log-log axes, with the fitted power law.
pub fn loglog_svg(times: &[f64], positions: &[f64], fit: Option<&PowerFit>, title: &str) -> String {
    let pts: Vec<(f64, f64)> =
        times.iter().zip(positions).filter(|(t, x)| **t > 0.0 && **x > 0.0).map(|(t, x)| (t.ln(), x.ln())).collect();
    let mut s = open(title);
    if pts.len() < 2 {
        s.push_str("<!-- fewer than two positive points -->\n</svg>\n");
        return s;
    }
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(a, b) in &pts {
        x0 = x0.min(a);
        x1 = x1.max(a);
        y0 = y0.min(b);
        y1 = y1.max(b);
    }
    if x1 == x0 {
        x1 = x0 + 1.0;
    }
    if y1 == y0 {
        y1 = y0 + 1.0;
    }
    let fr = Frame { x0, x1, y0, y1 };
    fr.axes(&mut s, "log t", "log x_front");
    for &(a, b) in &pts {
        let _ = writeln!(s, r##"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="#1f77b4"/>"##, fr.px(a), fr.py(b));
    }
    if let Some(f) = fit {
        let (l0, l1) = (f.window.0.ln(), f.window.1.ln());
        let y = |l: f64| f.coefficient.ln() + f.exponent * l;
        let d = path([(fr.px(l0), fr.py(y(l0))), (fr.px(l1), fr.py(y(l1)))].into_iter(), false);
        let _ = writeln!(s, r##"<path d="{d}" stroke="#d62728" stroke-width="2" fill="none"/>"##);
        let _ = writeln!(
            s,
            r##"<text x="{}" y="{}" font-size="12" fill="#d62728">x ≈ {:.4} t^{:.4} (r² = {:.5})</text>"##,
            PAD + 8.0,
            PAD + 18.0,
            f.coefficient,
            f.exponent,
            f.r_squared
        );
    }
    s.push_str("</svg>\n");
    s
}
