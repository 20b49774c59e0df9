//! Minimal hand-rolled SVG scatter plots: axes, colored markers, colorbar.
//! Output is deterministic so plots can be golden-tested.

use std::fmt::Write as _;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 90.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 55.0;

/// Five-stop approximation of a perceptually ordered colormap.
const STOPS: [(f64, [u8; 3]); 5] = [
    (0.00, [68, 1, 84]),
    (0.25, [59, 82, 139]),
    (0.50, [33, 145, 140]),
    (0.75, [94, 201, 98]),
    (1.00, [253, 231, 37]),
];

fn color(t: f64) -> String {
    let t = t.clamp(0.0, 1.0);
    let mut lo = STOPS[0];
    let mut hi = STOPS[4];
    for w in STOPS.windows(2) {
        if t >= w[0].0 && t <= w[1].0 {
            lo = w[0];
            hi = w[1];
            break;
        }
    }
    let f = if hi.0 > lo.0 { (t - lo.0) / (hi.0 - lo.0) } else { 0.0 };
    let mix = |a: u8, b: u8| (a as f64 + f * (b as f64 - a as f64)).round() as u8;
    format!(
        "#{:02x}{:02x}{:02x}",
        mix(lo.1[0], hi.1[0]),
        mix(lo.1[1], hi.1[1]),
        mix(lo.1[2], hi.1[2])
    )
}

/// A scatter plot with points colored by a third value.
pub struct ScatterPlot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub color_label: String,
    /// (x, y, color value)
    pub points: Vec<(f64, f64, f64)>,
    /// Optional overlay polyline in data coordinates.
    pub boundary: Vec<(f64, f64)>,
}

impl ScatterPlot {
    pub fn new(title: &str, x_label: &str, y_label: &str, color_label: &str) -> Self {
        Self {
            title: title.to_string(),
            x_label: x_label.to_string(),
            y_label: y_label.to_string(),
            color_label: color_label.to_string(),
            points: Vec::new(),
            boundary: Vec::new(),
        }
    }

    pub fn render(&self) -> String {
        let (mut x_min, mut x_max) = (f64::MAX, f64::MIN);
        let (mut y_min, mut y_max) = (f64::MAX, f64::MIN);
        let (mut c_min, mut c_max) = (f64::MAX, f64::MIN);
        for &(x, y, c) in &self.points {
            x_min = x_min.min(x);
            x_max = x_max.max(x);
            y_min = y_min.min(y);
            y_max = y_max.max(y);
            c_min = c_min.min(c);
            c_max = c_max.max(c);
        }
        if self.points.is_empty() {
            x_min = 0.0;
            x_max = 1.0;
            y_min = 0.0;
            y_max = 1.0;
            c_min = 0.0;
            c_max = 1.0;
        }
        if x_max == x_min {
            x_max = x_min + 1.0;
        }
        if y_max == y_min {
            y_max = y_min + 1.0;
        }
        if c_max == c_min {
            c_max = c_min + 1.0;
        }
        let plot_w = WIDTH - MARGIN_L - MARGIN_R;
        let plot_h = HEIGHT - MARGIN_T - MARGIN_B;
        let sx = |x: f64| MARGIN_L + (x - x_min) / (x_max - x_min) * plot_w;
        let sy = |y: f64| HEIGHT - MARGIN_B - (y - y_min) / (y_max - y_min) * plot_h;

        let mut out = String::new();
        let _ = writeln!(
            out,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
        );
        let _ = writeln!(out, "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>");
        let _ = writeln!(
            out,
            "<text x=\"{:.1}\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">{}</text>",
            WIDTH / 2.0,
            xml_escape(&self.title)
        );
        // axes
        let _ = writeln!(
            out,
            "<rect x=\"{MARGIN_L}\" y=\"{MARGIN_T}\" width=\"{plot_w:.1}\" height=\"{plot_h:.1}\" fill=\"none\" stroke=\"black\"/>"
        );
        // tick labels at the four corners of the data range
        for (frac, value) in [(0.0, x_min), (0.5, 0.5 * (x_min + x_max)), (1.0, x_max)] {
            let x = MARGIN_L + frac * plot_w;
            let _ = writeln!(
                out,
                "<text x=\"{x:.1}\" y=\"{:.1}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">{}</text>",
                HEIGHT - MARGIN_B + 18.0,
                fmt_value(value)
            );
        }
        for (frac, value) in [(0.0, y_min), (0.5, 0.5 * (y_min + y_max)), (1.0, y_max)] {
            let y = HEIGHT - MARGIN_B - frac * plot_h;
            let _ = writeln!(
                out,
                "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">{}</text>",
                MARGIN_L - 6.0,
                y + 4.0,
                fmt_value(value)
            );
        }
        let _ = writeln!(
            out,
            "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">{}</text>",
            MARGIN_L + plot_w / 2.0,
            HEIGHT - 12.0,
            xml_escape(&self.x_label)
        );
        let _ = writeln!(
            out,
            "<text x=\"18\" y=\"{:.1}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 18 {:.1})\">{}</text>",
            MARGIN_T + plot_h / 2.0,
            MARGIN_T + plot_h / 2.0,
            xml_escape(&self.y_label)
        );
        // points
        for &(x, y, c) in &self.points {
            let t = (c - c_min) / (c_max - c_min);
            let _ = writeln!(
                out,
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"{}\"/>",
                sx(x),
                sy(y),
                color(t)
            );
        }
        // boundary overlay
        if self.boundary.len() > 1 {
            let pts: Vec<String> = self
                .boundary
                .iter()
                .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
                .collect();
            let _ = writeln!(
                out,
                "<polyline points=\"{}\" fill=\"none\" stroke=\"red\" stroke-width=\"1.5\" stroke-dasharray=\"6,3\"/>",
                pts.join(" ")
            );
        }
        // colorbar
        let bar_x = WIDTH - MARGIN_R + 20.0;
        let steps = 24;
        let step_h = plot_h / steps as f64;
        for i in 0..steps {
            let t = 1.0 - (i as f64 + 0.5) / steps as f64;
            let _ = writeln!(
                out,
                "<rect x=\"{bar_x:.1}\" y=\"{:.2}\" width=\"14\" height=\"{:.2}\" fill=\"{}\"/>",
                MARGIN_T + i as f64 * step_h,
                step_h + 0.5,
                color(t)
            );
        }
        let _ = writeln!(
            out,
            "<rect x=\"{bar_x:.1}\" y=\"{MARGIN_T}\" width=\"14\" height=\"{plot_h:.1}\" fill=\"none\" stroke=\"black\"/>"
        );
        let _ = writeln!(
            out,
            "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\">{}</text>",
            bar_x + 18.0,
            MARGIN_T + 10.0,
            fmt_value(c_max)
        );
        let _ = writeln!(
            out,
            "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\">{}</text>",
            bar_x + 18.0,
            MARGIN_T + plot_h,
            fmt_value(c_min)
        );
        let _ = writeln!(
            out,
            "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(90 {:.1} {:.1})\">{}</text>",
            bar_x + 50.0,
            MARGIN_T + plot_h / 2.0,
            bar_x + 50.0,
            MARGIN_T + plot_h / 2.0,
            xml_escape(&self.color_label)
        );
        out.push_str("</svg>\n");
        out
    }
}

fn fmt_value(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else if v.abs() >= 1e4 || v.abs() < 1e-2 {
        format!("{v:.3e}")
    } else {
        format!("{v:.3}")
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
