//! Distance-curve plots as plain SVG: textual, diffable in golden
//! tests, no rendering dependency.

use gaitpipe_core::detect::{DistanceSignal, ExtremumKind, StepDetectionResult};

const WIDTH: f64 = 860.0;
const HEIGHT: f64 = 360.0;
const MARGIN_LEFT: f64 = 55.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 30.0;
const MARGIN_BOTTOM: f64 = 42.0;

fn fmt(v: f64) -> String {
    format!("{v:.3}")
}

/// Renders raw and smoothed feet distance with the surviving extrema
/// marked: maxima (steps) as filled circles, minima as open ones.
pub fn render_distance_svg(
    title: &str,
    signal: &DistanceSignal,
    detection: Option<&StepDetectionResult>,
) -> String {
    let n = signal.raw.len();
    let max_y = signal
        .raw
        .iter()
        .chain(signal.smoothed.iter())
        .fold(0.0f64, |m, &v| m.max(v))
        .max(1e-9)
        * 1.05;
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let x_of = |i: usize| MARGIN_LEFT + plot_w * i as f64 / (n.max(2) - 1) as f64;
    let y_of = |v: f64| MARGIN_TOP + plot_h * (1.0 - v / max_y);

    let polyline = |values: &[f64]| -> String {
        values
            .iter()
            .enumerate()
            .map(|(i, &v)| format!("{},{}", fmt(x_of(i)), fmt(y_of(v))))
            .collect::<Vec<_>>()
            .join(" ")
    };

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\">{}</text>\n",
        fmt(MARGIN_LEFT),
        title
    ));
    // axes
    svg.push_str(&format!(
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#333\" stroke-width=\"1\"/>\n",
        fmt(MARGIN_LEFT),
        fmt(MARGIN_TOP),
        fmt(MARGIN_LEFT),
        fmt(HEIGHT - MARGIN_BOTTOM)
    ));
    svg.push_str(&format!(
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#333\" stroke-width=\"1\"/>\n",
        fmt(MARGIN_LEFT),
        fmt(HEIGHT - MARGIN_BOTTOM),
        fmt(WIDTH - MARGIN_RIGHT),
        fmt(HEIGHT - MARGIN_BOTTOM)
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\">frame</text>\n",
        fmt(WIDTH / 2.0),
        fmt(HEIGHT - 10.0)
    ));
    svg.push_str(&format!(
        "<text x=\"12\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" transform=\"rotate(-90 12 {})\">feet distance (m)</text>\n",
        fmt(HEIGHT / 2.0),
        fmt(HEIGHT / 2.0)
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"10\">{}</text>\n",
        fmt(MARGIN_LEFT - 45.0),
        fmt(MARGIN_TOP + 4.0),
        fmt(max_y)
    ));

    svg.push_str(&format!(
        "<polyline fill=\"none\" stroke=\"#9ecae1\" stroke-width=\"1\" points=\"{}\"/>\n",
        polyline(&signal.raw)
    ));
    svg.push_str(&format!(
        "<polyline fill=\"none\" stroke=\"#08519c\" stroke-width=\"1.5\" points=\"{}\"/>\n",
        polyline(&signal.smoothed)
    ));

    if let Some(det) = detection {
        for e in &det.extrema {
            let (fill, stroke, r) = match e.kind {
                ExtremumKind::Max => ("#d62728", "none", 3.5),
                ExtremumKind::Min => ("none", "#2ca02c", 3.0),
            };
            svg.push_str(&format!(
                "<circle cx=\"{}\" cy=\"{}\" r=\"{r}\" fill=\"{fill}\" stroke=\"{stroke}\" stroke-width=\"1.5\"/>\n",
                fmt(x_of(e.frame)),
                fmt(y_of(e.value)),
            ));
        }
    }
    svg.push_str("</svg>\n");
    svg
}
