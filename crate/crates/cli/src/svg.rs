//! Self-contained SVG line chart of a Z-channel sweep.

use ot_tension::SweepRow;
use std::fmt::Write as _;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 600.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 30.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 70.0;

/// A drawn series: label, colour, dash pattern, value accessor.
type Series = (
    &'static str,
    &'static str,
    &'static str,
    fn(&SweepRow) -> f64,
);

const SERIES: [Series; 3] = [
    ("new upper bound", "#1f77b4", "none", |r| r.new_upper),
    ("AC13 upper bound", "#d62728", "8 4", |r| r.ac13_upper),
    ("erasure lower bound", "#2ca02c", "2 4", |r| r.erasure_lower),
];

fn x_pos(t: f64) -> f64 {
    LEFT + t * (WIDTH - LEFT - RIGHT)
}

fn y_pos(v: f64, y_max: f64) -> f64 {
    HEIGHT - BOTTOM - v / y_max * (HEIGHT - TOP - BOTTOM)
}

/// Renders the three bounds against `t` on a fixed 800x600 canvas.
pub fn render_sweep(rows: &[SweepRow]) -> String {
    let top_value = rows
        .iter()
        .flat_map(|r| [r.new_upper, r.ac13_upper, r.erasure_lower])
        .fold(0.0_f64, f64::max);
    // round the vertical range up to a multiple of 0.1 bit
    let y_max = ((top_value * 10.0).ceil() / 10.0).max(0.1);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="800" height="600" viewBox="0 0 800 600" font-family="sans-serif" font-size="14">"#
    );
    let _ = writeln!(
        s,
        r#"<rect x="0" y="0" width="800" height="600" fill="white"/>"#
    );

    // axes and ticks
    let (x0, x1) = (x_pos(0.0), x_pos(1.0));
    let (y0, y1) = (y_pos(0.0, y_max), y_pos(y_max, y_max));
    let _ = writeln!(
        s,
        r#"<path d="M{x0:.2} {y1:.2} L{x0:.2} {y0:.2} L{x1:.2} {y0:.2}" fill="none" stroke="black" stroke-width="1"/>"#
    );
    for k in 0..=5 {
        let t = k as f64 / 5.0;
        let x = x_pos(t);
        let _ = writeln!(
            s,
            r#"<line x1="{x:.2}" y1="{y0:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{t:.1}</text>"#,
            y0 + 5.0,
            y0 + 22.0
        );
    }
    let y_ticks = (y_max * 10.0).round() as usize;
    let step = if y_ticks > 10 { 2 } else { 1 };
    for k in (0..=y_ticks).step_by(step) {
        let v = k as f64 / 10.0;
        let y = y_pos(v, y_max);
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{x0:.2}" y2="{y:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{v:.1}</text>"#,
            x0 - 5.0,
            x0 - 8.0,
            y + 5.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">crossover probability t</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 20.0
    );
    let _ = writeln!(
        s,
        r#"<text x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">bits per channel use</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0
    );
    let _ = writeln!(
        s,
        r#"<text x="400" y="24" text-anchor="middle" font-size="16">Bounds on the OT capacity of the Z-channel</text>"#
    );

    // curves
    for (label, colour, dash, value) in SERIES {
        let points: Vec<String> = rows
            .iter()
            .map(|r| format!("{:.2},{:.2}", x_pos(r.t), y_pos(value(r), y_max)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{colour}" stroke-width="2" stroke-dasharray="{dash}" points="{}"><title>{label}</title></polyline>"#,
            points.join(" ")
        );
    }

    // legend
    for (i, (label, colour, dash, _)) in SERIES.iter().enumerate() {
        let y = TOP + 10.0 + 22.0 * i as f64;
        let x = WIDTH - RIGHT - 220.0;
        let _ = writeln!(
            s,
            r#"<line x1="{x:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="{colour}" stroke-width="2" stroke-dasharray="{dash}"/><text x="{:.2}" y="{:.2}">{label}</text>"#,
            x + 30.0,
            x + 38.0,
            y + 5.0
        );
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chart_has_three_curves_and_labels() {
        let rows: Vec<SweepRow> = (0..5)
            .map(|k| {
                let t = k as f64 / 4.0;
                SweepRow {
                    t,
                    new_upper: 0.3 * t * (1.0 - t),
                    ac13_upper: 0.4 * t * (1.0 - t),
                    erasure_lower: t.min(1.0 - t) / 2.0,
                }
            })
            .collect();
        let svg = render_sweep(&rows);
        assert_eq!(svg.matches("<polyline").count(), 3);
        assert!(svg.contains(r#"viewBox="0 0 800 600""#));
        for label in [
            "new upper bound",
            "AC13 upper bound",
            "erasure lower bound",
            "bits per channel use",
        ] {
            assert!(svg.contains(label), "{label}");
        }
        assert!(!svg.contains("href"));
    }
}
