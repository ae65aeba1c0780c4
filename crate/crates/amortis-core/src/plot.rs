//! Minimal self-contained SVG line charts plus plain two-column data files.
//!
//! No plotting dependency: a chart is a framed axis box, one polyline, and
//! min/mid/max tick labels — enough to eyeball a series' shape and feed the
//! `.dat` companion into any real plotting tool. Output is a pure function of
//! the series, so charts are byte-identical across runs.

/// One named series over loan durations.
#[derive(Debug, Clone, Copy)]
pub struct Series<'a> {
    pub title: &'a str,
    pub x_label: &'a str,
    pub y_label: &'a str,
    /// (x, y) points in drawing order.
    pub points: &'a [(f64, f64)],
}

/// Tab-separated two-column data file: one `x<TAB>y` row per point.
pub fn data_file(points: &[(f64, f64)]) -> String {
    let mut out = String::with_capacity(16 * points.len());
    for (x, y) in points {
        out.push_str(&format!("{x}\t{y}\n"));
    }
    out
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN_LEFT: f64 = 78.0;
const MARGIN_RIGHT: f64 = 24.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 52.0;

/// Render a series as a standalone SVG line chart.
///
/// Empty series produce a frame with a "no data" note; single points draw a
/// dot. Axis ranges pad degenerate (constant) series by one unit so the
/// scaling never divides by zero.
pub fn svg_line_chart(series: &Series) -> String {
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;

    let mut out = String::with_capacity(2048);
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    out.push_str(&format!(
        "  <rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n"
    ));
    out.push_str(&format!(
        "  <text x=\"{:.1}\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\" \
         text-anchor=\"middle\">{}</text>\n",
        WIDTH / 2.0,
        xml_escape(series.title)
    ));
    out.push_str(&format!(
        "  <rect x=\"{MARGIN_LEFT}\" y=\"{MARGIN_TOP}\" width=\"{plot_w}\" height=\"{plot_h}\" \
         fill=\"none\" stroke=\"black\"/>\n"
    ));

    if series.points.is_empty() {
        out.push_str(&format!(
            "  <text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"13\" \
             text-anchor=\"middle\">no data</text>\n",
            WIDTH / 2.0,
            HEIGHT / 2.0
        ));
        out.push_str("</svg>\n");
        return out;
    }

    let (mut x_min, mut x_max) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y_min, mut y_max) = (f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in series.points {
        x_min = x_min.min(x);
        x_max = x_max.max(x);
        y_min = y_min.min(y);
        y_max = y_max.max(y);
    }
    if x_max == x_min {
        x_min -= 1.0;
        x_max += 1.0;
    }
    if y_max == y_min {
        y_min -= 1.0;
        y_max += 1.0;
    }

    let to_px = |x: f64, y: f64| -> (f64, f64) {
        (
            MARGIN_LEFT + (x - x_min) / (x_max - x_min) * plot_w,
            MARGIN_TOP + plot_h - (y - y_min) / (y_max - y_min) * plot_h,
        )
    };

    if series.points.len() == 1 {
        let (px, py) = to_px(series.points[0].0, series.points[0].1);
        out.push_str(&format!(
            "  <circle cx=\"{px:.2}\" cy=\"{py:.2}\" r=\"3\" fill=\"steelblue\"/>\n"
        ));
    } else {
        let coords: Vec<String> = series
            .points
            .iter()
            .map(|&(x, y)| {
                let (px, py) = to_px(x, y);
                format!("{px:.2},{py:.2}")
            })
            .collect();
        out.push_str(&format!(
            "  <polyline points=\"{}\" fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\"/>\n",
            coords.join(" ")
        ));
    }

    // Tick labels: x at both ends, y at bottom/middle/top of the range.
    let y_mid = 0.5 * (y_min + y_max);
    for (value, py) in [
        (y_min, MARGIN_TOP + plot_h),
        (y_mid, MARGIN_TOP + plot_h / 2.0),
        (y_max, MARGIN_TOP),
    ] {
        out.push_str(&format!(
            "  <text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\" \
             text-anchor=\"end\">{}</text>\n",
            MARGIN_LEFT - 6.0,
            py + 4.0,
            tick_label(value)
        ));
    }
    for (value, px) in [(x_min, MARGIN_LEFT), (x_max, MARGIN_LEFT + plot_w)] {
        out.push_str(&format!(
            "  <text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\" \
             text-anchor=\"middle\">{}</text>\n",
            px,
            MARGIN_TOP + plot_h + 16.0,
            tick_label(value)
        ));
    }

    out.push_str(&format!(
        "  <text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"12\" \
         text-anchor=\"middle\">{}</text>\n",
        MARGIN_LEFT + plot_w / 2.0,
        HEIGHT - 12.0,
        xml_escape(series.x_label)
    ));
    out.push_str(&format!(
        "  <text x=\"18\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"12\" \
         text-anchor=\"middle\" transform=\"rotate(-90 18 {:.1})\">{}</text>\n",
        MARGIN_TOP + plot_h / 2.0,
        MARGIN_TOP + plot_h / 2.0,
        xml_escape(series.y_label)
    ));
    out.push_str("</svg>\n");
    out
}

/// Compact tick formatting: plain integers stay plain, everything else gets
/// two decimals.
fn tick_label(value: f64) -> String {
    if value == value.trunc() && value.abs() < 1.0e15 {
        format!("{value:.0}")
    } else {
        format!("{value:.2}")
    }
}

fn xml_escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
