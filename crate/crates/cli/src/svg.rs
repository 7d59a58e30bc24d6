//! Static SVG plot of branch energies against `V2`.

use std::fmt::Write;

use ptspec::trace::{ExceptionalPoint, SpectralCurves};

use crate::format::fmt_sig;

pub const WIDTH: f64 = 900.0;
pub const HEIGHT: f64 = 700.0;
const LEFT: f64 = 90.0;
const RIGHT: f64 = 30.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 70.0;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2",
];

/// Tick positions covering `[lo, hi]` at a 1-2-5 spacing.
fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = hi - lo;
    let raw = span / 6.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| span / s <= 6.0)
        .unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

fn padded(lo: f64, hi: f64) -> (f64, f64) {
    if hi > lo {
        let pad = 0.04 * (hi - lo);
        (lo - pad, hi + pad)
    } else {
        (lo - 0.5, hi + 0.5)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Renders `curves` with `eps` marked; `metadata` is embedded verbatim
/// (escaped) in a `<metadata>` element.
pub fn render(curves: &SpectralCurves, eps: &[ExceptionalPoint], metadata: &str) -> String {
    let (x0, x1) = {
        let lo = curves.v2_grid.first().copied().unwrap_or(0.0);
        let hi = curves.v2_grid.last().copied().unwrap_or(lo);
        if hi > lo {
            (lo, hi)
        } else {
            (lo - 0.5, hi + 0.5)
        }
    };
    let energies = curves
        .branches
        .iter()
        .flat_map(|b| b.points.iter().map(|p| p.1))
        .chain(eps.iter().map(|e| e.e_c));
    let (emin, emax) = energies.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), e| (a.min(e), b.max(e)));
    let (y0, y1) = if emin.is_finite() {
        padded(emin, emax.min(0.0).max(emin))
    } else {
        (-1.0, 0.0)
    };
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| TOP + (y1 - y) / (y1 - y0) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(s, "<metadata>{}</metadata>", escape(metadata));
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let title = format!(
        "{} well, V1 = {}, {}",
        curves.spec.model,
        fmt_sig(curves.spec.v1),
        curves.method.token()
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="30" font-family="sans-serif" font-size="16" text-anchor="middle">{}</text>"#,
        LEFT + pw / 2.0,
        escape(&title)
    );

    let _ = writeln!(
        s,
        r#"<g stroke="black" stroke-width="1" fill="none"><rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}"/></g>"#
    );
    let _ = writeln!(s, r#"<g font-family="sans-serif" font-size="12" fill="black">"#);
    for t in ticks(x0, x1) {
        let x = sx(t);
        let _ = writeln!(
            s,
            r#"<line x1="{x:.2}" y1="{}" x2="{x:.2}" y2="{}" stroke="black"/><text x="{x:.2}" y="{}" text-anchor="middle">{}</text>"#,
            TOP + ph,
            TOP + ph + 6.0,
            TOP + ph + 22.0,
            fmt_sig(t)
        );
    }
    for t in ticks(y0, y1) {
        let y = sy(t);
        let _ = writeln!(
            s,
            r#"<line x1="{}" y1="{y:.2}" x2="{LEFT}" y2="{y:.2}" stroke="black"/><text x="{}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 6.0,
            LEFT - 10.0,
            y + 4.0,
            fmt_sig(t)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-size="14" text-anchor="middle">V2</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 20.0
    );
    let _ = writeln!(
        s,
        r#"<text x="25" y="{}" font-size="14" text-anchor="middle" transform="rotate(-90 25 {})">E</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0
    );
    let _ = writeln!(s, "</g>");

    for b in &curves.branches {
        let color = PALETTE[b.label % PALETTE.len()];
        let pts: Vec<String> = b.points.iter().map(|&(v, e)| format!("{:.2},{:.2}", sx(v), sy(e))).collect();
        if pts.len() == 1 {
            let _ = writeln!(
                s,
                r#"<circle cx="{:.2}" cy="{:.2}" r="2" fill="{color}"/>"#,
                sx(b.points[0].0),
                sy(b.points[0].1)
            );
        } else {
            let _ = writeln!(
                s,
                r#"<polyline data-branch="{}" fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                b.label,
                pts.join(" ")
            );
        }
    }
    for ep in eps {
        let _ = writeln!(
            s,
            r#"<circle class="ep" cx="{:.2}" cy="{:.2}" r="4.5" fill="black"><title>V2c = {}</title></circle>"#,
            sx(ep.v2c),
            sy(ep.e_c),
            fmt_sig(ep.v2c)
        );
    }
    s.push_str("</svg>\n");
    s
}
