//! SVG line charts of a sweep quantity against the coupling strength, one
//! polyline per (direction, alpha).

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{CliError, Result};
use crate::sweep::SweepResult;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"];

/// Direction, order and the finite `(epsilon, value)` points of one line.
type Series = (String, f64, Vec<(f64, f64)>);

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Tick positions at 1, 2 or 5 times a power of ten.
fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let raw = (hi - lo) / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0].iter().map(|m| m * mag).find(|s| *s >= raw).unwrap_or(10.0 * mag);
    let first = (lo / step - 1e-9).ceil() as i64;
    let last = (hi / step + 1e-9).floor() as i64;
    (first..=last).map(|i| i as f64 * step).collect()
}

fn padded_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| (l.min(v), h.max(v)));
    if !lo.is_finite() {
        return (-1.0, 1.0);
    }
    if hi - lo < 1e-12 {
        return (lo - 1.0, hi + 1.0);
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

/// Renders `quantity` as a self-contained SVG document.
pub fn plot_svg(result: &SweepResult, quantity: &str, unit: &str) -> Result<String> {
    let mut rows: Vec<_> = result.rows.iter().filter(|r| r.quantity == quantity).collect();
    if rows.is_empty() {
        return Err(CliError::Config(format!("quantity `{quantity}` not present in the result")));
    }
    rows.sort_by(|a, b| {
        a.direction.cmp(&b.direction).then(a.alpha.total_cmp(&b.alpha)).then(a.epsilon.total_cmp(&b.epsilon))
    });
    let ok = || rows.iter().filter(|r| r.value.is_finite());
    let (x0, x1) = {
        let (lo, hi) =
            rows.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), r| (l.min(r.epsilon), h.max(r.epsilon)));
        if hi > lo {
            (lo, hi)
        } else {
            (lo - 0.5, hi + 0.5)
        }
    };
    let (y0, y1) = padded_range(ok().map(|r| r.value));
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * plot_w;
    let sy = |y: f64| TOP + (y1 - y) / (y1 - y0) * plot_h;

    let mut svg = String::new();
    let w = &mut svg;
    writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    )
    .unwrap();
    writeln!(w, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#).unwrap();
    writeln!(w, r#"<g font-family="sans-serif" font-size="12">"#).unwrap();
    let directions = result.directions(quantity);
    writeln!(
        w,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
        LEFT + plot_w / 2.0,
        escape(&format!("{quantity} ({})", directions.join(", ")))
    )
    .unwrap();
    writeln!(w, r#"<rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#)
        .unwrap();
    for t in ticks(x0, x1) {
        let x = sx(t);
        writeln!(
            w,
            r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/>"#,
            TOP + plot_h,
            TOP + plot_h + 5.0
        )
        .unwrap();
        writeln!(w, r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, TOP + plot_h + 18.0, fmt_tick(t))
            .unwrap();
    }
    for t in ticks(y0, y1) {
        let y = sy(t);
        writeln!(w, r#"<line x1="{:.2}" y1="{y:.2}" x2="{LEFT}" y2="{y:.2}" stroke="black"/>"#, LEFT - 5.0).unwrap();
        writeln!(w, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#, LEFT - 8.0, y + 4.0, fmt_tick(t))
            .unwrap();
    }
    if y0 < 0.0 && y1 > 0.0 {
        writeln!(
            w,
            r##"<line x1="{LEFT}" y1="{0:.2}" x2="{1:.2}" y2="{0:.2}" stroke="#999" stroke-dasharray="4 3"/>"##,
            sy(0.0),
            LEFT + plot_w
        )
        .unwrap();
    }
    writeln!(
        w,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">coupling ε (dimensionless)</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 15.0
    )
    .unwrap();
    writeln!(
        w,
        r#"<text x="18" y="{0:.2}" text-anchor="middle" transform="rotate(-90 18 {0:.2})">{1}</text>"#,
        TOP + plot_h / 2.0,
        escape(&format!("{quantity} [{unit}]"))
    )
    .unwrap();

    let mut series: Vec<Series> = Vec::new();
    for r in ok() {
        match series.last_mut() {
            Some((d, a, pts)) if *d == r.direction && *a == r.alpha => pts.push((r.epsilon, r.value)),
            _ => series.push((r.direction.clone(), r.alpha, vec![(r.epsilon, r.value)])),
        }
    }
    for (i, (direction, alpha, pts)) in series.iter().enumerate() {
        let colour = PALETTE[i % PALETTE.len()];
        let dash = if i / PALETTE.len() % 2 == 1 { r#" stroke-dasharray="6 3""# } else { "" };
        let coords: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        writeln!(
            w,
            r#"<polyline fill="none" stroke="{colour}" stroke-width="1.5"{dash} points="{}"/>"#,
            coords.join(" ")
        )
        .unwrap();
        let ly = TOP + 10.0 + 18.0 * i as f64;
        let lx = LEFT + plot_w + 12.0;
        writeln!(
            w,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{colour}" stroke-width="1.5"{dash}/>"#,
            lx + 20.0
        )
        .unwrap();
        let label = if directions.len() > 1 { format!("{direction} α={alpha}") } else { format!("α={alpha}") };
        writeln!(w, r#"<text x="{:.2}" y="{:.2}">{}</text>"#, lx + 26.0, ly + 4.0, escape(&label)).unwrap();
    }
    writeln!(w, "</g>\n</svg>").unwrap();
    Ok(svg)
}

fn fmt_tick(v: f64) -> String {
    let s = format!("{:.6}", v);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

pub fn emit_plot(result: &SweepResult, quantity: &str, unit: &str, path: &Path) -> Result<()> {
    let svg = plot_svg(result, quantity, unit)?;
    std::fs::write(path, svg).map_err(|e| CliError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ticks_are_round_numbers() {
        let labels = |lo, hi| ticks(lo, hi).into_iter().map(fmt_tick).collect::<Vec<_>>();
        assert_eq!(labels(0.0, 0.3), ["0", "0.1", "0.2", "0.3"]);
        assert_eq!(labels(0.0, 0.2), ["0", "0.05", "0.1", "0.15", "0.2"]);
        assert_eq!(labels(-1.0, 1.0), ["-1", "-0.5", "0", "0.5", "1"]);
        assert_eq!(labels(-0.013, 0.021), ["-0.01", "0", "0.01", "0.02"]);
    }
}
