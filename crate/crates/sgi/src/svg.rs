//! Minimal SVG line plots for coherence traces. Hand-rolled on purpose: the
//! output is a diagnostic picture, not a publication figure.

use std::fmt::Write as _;

const WIDTH: f64 = 900.0;
const HEIGHT: f64 = 540.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 30.0;
const MARGIN_B: f64 = 50.0;

/// One curve: a label, a colour, and (x, y) points in data coordinates.
pub struct Series<'a> {
    pub label: &'a str,
    pub color: &'a str,
    pub points: &'a [(f64, f64)],
}

fn nice_ticks(lo: f64, hi: f64, target: usize) -> Vec<f64> {
    if !(hi > lo) {
        return vec![lo];
    }
    let raw_step = (hi - lo) / target as f64;
    let mag = 10f64.powf(raw_step.log10().floor());
    let norm = raw_step / mag;
    let step = mag
        * if norm < 1.5 {
            1.0
        } else if norm < 3.5 {
            2.0
        } else if norm < 7.5 {
            5.0
        } else {
            10.0
        };
    let first = (lo / step).ceil() * step;
    let mut ticks = Vec::new();
    let mut v = first;
    while v <= hi + 0.5 * step * 1e-9 {
        ticks.push(v);
        v += step;
    }
    ticks
}

fn fmt_tick(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else if v.abs() >= 1e-3 && v.abs() < 1e4 {
        let s = format!("{v:.4}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        format!("{v:.2e}")
    }
}

/// Render one or more series as an SVG document with axes and a legend.
/// Non-finite points are skipped (they break the polyline).
pub fn render_plot(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    let mut x_lo = f64::INFINITY;
    let mut x_hi = f64::NEG_INFINITY;
    let mut y_lo = f64::INFINITY;
    let mut y_hi = f64::NEG_INFINITY;
    for s in series {
        for &(x, y) in s.points {
            if x.is_finite() && y.is_finite() {
                x_lo = x_lo.min(x);
                x_hi = x_hi.max(x);
                y_lo = y_lo.min(y);
                y_hi = y_hi.max(y);
            }
        }
    }
    if !(x_lo.is_finite() && y_lo.is_finite()) {
        x_lo = 0.0;
        x_hi = 1.0;
        y_lo = 0.0;
        y_hi = 1.0;
    }
    if x_hi == x_lo {
        x_hi = x_lo + 1.0;
    }
    if y_hi == y_lo {
        y_hi = y_lo + 1.0;
    }
    // pad the y range a little so curves do not touch the frame
    let pad = 0.05 * (y_hi - y_lo);
    y_lo -= pad;
    y_hi += pad;

    let plot_w = WIDTH - MARGIN_L - MARGIN_R;
    let plot_h = HEIGHT - MARGIN_T - MARGIN_B;
    let to_px = |x: f64, y: f64| {
        (
            MARGIN_L + (x - x_lo) / (x_hi - x_lo) * plot_w,
            MARGIN_T + (y_hi - y) / (y_hi - y_lo) * plot_h,
        )
    };

    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
    );
    let _ = writeln!(out, "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>");
    let _ = writeln!(
        out,
        "<text x=\"{:.1}\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">{}</text>",
        MARGIN_L + plot_w / 2.0,
        title
    );

    // frame
    let _ = writeln!(
        out,
        "<rect x=\"{MARGIN_L}\" y=\"{MARGIN_T}\" width=\"{plot_w:.1}\" height=\"{plot_h:.1}\" fill=\"none\" stroke=\"black\"/>"
    );

    for tx in nice_ticks(x_lo, x_hi, 8) {
        let (px, _) = to_px(tx, y_lo);
        let y0 = MARGIN_T + plot_h;
        let _ = writeln!(out, "<line x1=\"{px:.1}\" y1=\"{y0:.1}\" x2=\"{px:.1}\" y2=\"{:.1}\" stroke=\"black\"/>", y0 + 5.0);
        let _ = writeln!(
            out,
            "<text x=\"{px:.1}\" y=\"{:.1}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">{}</text>",
            y0 + 18.0,
            fmt_tick(tx)
        );
    }
    for ty in nice_ticks(y_lo, y_hi, 6) {
        let (_, py) = to_px(x_lo, ty);
        let _ = writeln!(out, "<line x1=\"{:.1}\" y1=\"{py:.1}\" x2=\"{MARGIN_L}\" y2=\"{py:.1}\" stroke=\"black\"/>", MARGIN_L - 5.0);
        let _ = writeln!(
            out,
            "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">{}</text>",
            MARGIN_L - 8.0,
            py + 4.0,
            fmt_tick(ty)
        );
    }

    let _ = writeln!(
        out,
        "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">{}</text>",
        MARGIN_L + plot_w / 2.0,
        HEIGHT - 10.0,
        x_label
    );
    let _ = writeln!(
        out,
        "<text x=\"18\" y=\"{:.1}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 18 {:.1})\">{}</text>",
        MARGIN_T + plot_h / 2.0,
        MARGIN_T + plot_h / 2.0,
        y_label
    );

    for s in series {
        let mut path = String::new();
        for &(x, y) in s.points {
            if x.is_finite() && y.is_finite() {
                let (px, py) = to_px(x, y);
                let _ = write!(path, "{px:.2},{py:.2} ");
            }
        }
        let _ = writeln!(
            out,
            "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>",
            s.color,
            path.trim_end()
        );
    }

    // legend, top-right inside the frame
    for (i, s) in series.iter().enumerate() {
        let lx = MARGIN_L + plot_w - 150.0;
        let ly = MARGIN_T + 18.0 + 18.0 * i as f64;
        let _ = writeln!(
            out,
            "<line x1=\"{lx:.1}\" y1=\"{ly:.1}\" x2=\"{:.1}\" y2=\"{ly:.1}\" stroke=\"{}\" stroke-width=\"2\"/>",
            lx + 28.0,
            s.color
        );
        let _ = writeln!(
            out,
            "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"12\">{}</text>",
            lx + 34.0,
            ly + 4.0,
            s.label
        );
    }

    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plot_is_wellformed() {
        let pts_a: Vec<(f64, f64)> = (0..50).map(|k| (k as f64, (k as f64 * 0.1).sin())).collect();
        let pts_b: Vec<(f64, f64)> = (0..50).map(|k| (k as f64, (k as f64 * 0.1).cos())).collect();
        let svg = render_plot(
            "demo",
            "t [s]",
            "value",
            &[
                Series { label: "sin", color: "#1f77b4", points: &pts_a },
                Series { label: "cos", color: "#d62728", points: &pts_b },
            ],
        );
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("t [s]"));
        // every opened tag family appears balanced enough for viewers
        assert_eq!(svg.matches("<svg").count(), 1);
    }

    #[test]
    fn handles_degenerate_and_nonfinite_input() {
        let svg = render_plot(
            "flat",
            "x",
            "y",
            &[Series {
                label: "nan",
                color: "black",
                points: &[(0.0, f64::NAN), (1.0, 1.0), (2.0, 1.0)],
            }],
        );
        assert!(svg.contains("<polyline"));
        let empty = render_plot("empty", "x", "y", &[]);
        assert!(empty.starts_with("<svg"));
    }

    #[test]
    fn tick_selection_is_sane() {
        let t = nice_ticks(0.0, 1.0, 8);
        assert!(t.len() >= 5 && t.len() <= 12);
        assert!(t.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(fmt_tick(0.0), "0");
        assert_eq!(fmt_tick(0.25), "0.25");
    }
}
