//! Static SVG rendering of one bootstrapped ALE curve against the ALER band.

use std::fmt::Write;

use crate::ale::AleX;
use crate::bootstrap::BootAleCurve;
use crate::stats::AlerBand;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const LEFT: f64 = 64.0;
const RIGHT: f64 = 24.0;
const TOP: f64 = 36.0;
const BOTTOM: f64 = 56.0;
const RUG: f64 = 8.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

struct Scale {
    d0: f64,
    d1: f64,
    r0: f64,
    r1: f64,
}

impl Scale {
    fn new(d0: f64, d1: f64, r0: f64, r1: f64) -> Self {
        let (d0, d1) = if d1 > d0 {
            (d0, d1)
        } else {
            (d0 - 0.5, d0 + 0.5)
        };
        Self { d0, d1, r0, r1 }
    }

    fn at(&self, v: f64) -> f64 {
        self.r0 + (v - self.d0) / (self.d1 - self.d0) * (self.r1 - self.r0)
    }
}

fn extent(values: impl Iterator<Item = f64>) -> (f64, f64) {
    values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    })
}

fn ticks(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..=count)
        .map(|i| lo + (hi - lo) * i as f64 / count as f64)
        .collect()
}

/// Renders the mean ALE line (points with intervals for categorical
/// variables), the confidence ribbon when bootstrapped, the grey ALER band
/// with dashed outer limits, and a rug of the raw x values.
pub fn plot_svg(curve: &BootAleCurve, band: &AlerBand, rug: Option<&[f64]>) -> String {
    let (y_lo, y_hi) = extent(
        curve
            .ale_y_lo
            .iter()
            .chain(&curve.ale_y_hi)
            .chain(&curve.ale_y_mean)
            .copied()
            .chain([band.outer_lower, band.outer_upper, band.center]),
    );
    let pad = if y_hi > y_lo {
        0.05 * (y_hi - y_lo)
    } else {
        0.5
    };
    let ys = Scale::new(y_lo - pad, y_hi + pad, HEIGHT - BOTTOM, TOP);
    let plot_left = LEFT;
    let plot_right = WIDTH - RIGHT;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="20" text-anchor="middle" font-size="13">{}</text>"#,
        WIDTH / 2.0,
        escape(&curve.variable)
    );

    // ALER band and its outer limits
    let _ = writeln!(
        s,
        r##"<rect class="aler-band" x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="#d9d9d9" fill-opacity="0.8"/>"##,
        plot_left,
        ys.at(band.upper),
        plot_right - plot_left,
        (ys.at(band.lower) - ys.at(band.upper)).max(0.0)
    );
    for (class, y) in [
        ("outer-band", band.outer_lower),
        ("outer-band", band.outer_upper),
    ] {
        let _ = writeln!(
            s,
            r##"<line class="{class}" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#7f7f7f" stroke-dasharray="4 3"/>"##,
            plot_left,
            ys.at(y),
            plot_right,
            ys.at(y)
        );
    }
    let _ = writeln!(
        s,
        r##"<line class="band-center" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#7f7f7f" stroke-width="0.5"/>"##,
        plot_left,
        ys.at(band.center),
        plot_right,
        ys.at(band.center)
    );

    match &curve.ale_x {
        AleX::Numeric(x) => {
            let (x0, x1) = extent(x.iter().copied().chain(rug.unwrap_or(&[]).iter().copied()));
            let xs = Scale::new(x0, x1, plot_left, plot_right);
            if curve.n_it > 0 {
                let mut points: Vec<String> = x
                    .iter()
                    .zip(&curve.ale_y_hi)
                    .map(|(&a, &b)| format!("{:.2},{:.2}", xs.at(a), ys.at(b)))
                    .collect();
                points.extend(
                    x.iter()
                        .zip(&curve.ale_y_lo)
                        .rev()
                        .map(|(&a, &b)| format!("{:.2},{:.2}", xs.at(a), ys.at(b))),
                );
                let _ = writeln!(
                    s,
                    r##"<polygon class="ci-ribbon" points="{}" fill="#6baed6" fill-opacity="0.35" stroke="none"/>"##,
                    points.join(" ")
                );
            }
            let line: Vec<String> = x
                .iter()
                .zip(&curve.ale_y_mean)
                .map(|(&a, &b)| format!("{:.2},{:.2}", xs.at(a), ys.at(b)))
                .collect();
            let _ = writeln!(
                s,
                r##"<polyline class="ale-mean" points="{}" fill="none" stroke="#08519c" stroke-width="1.5"/>"##,
                line.join(" ")
            );
            if let Some(values) = rug {
                let base = HEIGHT - BOTTOM;
                for &v in values {
                    let _ = writeln!(
                        s,
                        r##"<line class="rug" x1="{0:.2}" y1="{1:.2}" x2="{0:.2}" y2="{2:.2}" stroke="#000000" stroke-opacity="0.4"/>"##,
                        xs.at(v),
                        base,
                        base - RUG
                    );
                }
            }
            for t in ticks(xs.d0, xs.d1, 4) {
                let _ = writeln!(
                    s,
                    r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
                    xs.at(t),
                    HEIGHT - BOTTOM + 18.0,
                    format_tick(t)
                );
            }
        }
        AleX::Categorical(levels) => {
            let k = levels.len() as f64;
            let step = (plot_right - plot_left) / k;
            for (i, level) in levels.iter().enumerate() {
                let cx = plot_left + step * (i as f64 + 0.5);
                if curve.n_it > 0 {
                    let _ = writeln!(
                        s,
                        r##"<line class="ci" x1="{cx:.2}" y1="{:.2}" x2="{cx:.2}" y2="{:.2}" stroke="#6baed6" stroke-width="3"/>"##,
                        ys.at(curve.ale_y_lo[i]),
                        ys.at(curve.ale_y_hi[i])
                    );
                }
                let _ = writeln!(
                    s,
                    r##"<circle class="ale-mean" cx="{cx:.2}" cy="{:.2}" r="3.5" fill="#08519c"/>"##,
                    ys.at(curve.ale_y_mean[i])
                );
                let _ = writeln!(
                    s,
                    r#"<text x="{cx:.2}" y="{:.2}" text-anchor="middle">{} (n={})</text>"#,
                    HEIGHT - BOTTOM + 18.0,
                    escape(level),
                    curve.ale_n[i]
                );
            }
        }
    }

    // axes
    let _ = writeln!(
        s,
        r##"<line class="axis" x1="{plot_left:.2}" y1="{0:.2}" x2="{plot_right:.2}" y2="{0:.2}" stroke="#000000"/>"##,
        HEIGHT - BOTTOM
    );
    let _ = writeln!(
        s,
        r##"<line class="axis" x1="{plot_left:.2}" y1="{TOP:.2}" x2="{plot_left:.2}" y2="{:.2}" stroke="#000000"/>"##,
        HEIGHT - BOTTOM
    );
    for t in ticks(ys.d0, ys.d1, 4) {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            plot_left - 6.0,
            ys.at(t) + 4.0,
            format_tick(t)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn format_tick(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && !(1e-3..1e5).contains(&a) {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}
