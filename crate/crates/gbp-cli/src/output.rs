//! CSV and SVG emitters. CSV is the artifact of record and must be
//! byte-stable; SVG charts are self-contained static markup with no external
//! assets.

use crate::harness::{BoundsCell, ExperimentRecord};

/// Formats with 12 significant digits and then the shortest representation
/// of the rounded value, so identical runs produce identical bytes.
pub fn format_sig(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let rounded: f64 = format!("{v:.11e}").parse().expect("round-trip");
    format!("{rounded}")
}

/// Experiment CSV with the exact schema
/// `algorithm,beta,green,tau,trial,seed,cost,opt_lb,empirical_cr`.
pub fn experiment_csv(records: &[ExperimentRecord]) -> String {
    let mut out = String::from("algorithm,beta,green,tau,trial,seed,cost,opt_lb,empirical_cr\n");
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.algorithm,
            format_sig(r.beta),
            format_sig(r.green),
            format_sig(r.tau),
            r.trial,
            r.seed,
            format_sig(r.cost),
            format_sig(r.opt_lb),
            format_sig(r.empirical_cr),
        ));
    }
    out
}

/// Bound-sweep CSV: `beta,green,algorithm,lower,upper,tau_opt`.
pub fn bounds_csv(cells: &[BoundsCell]) -> String {
    let mut out = String::from("beta,green,algorithm,lower,upper,tau_opt\n");
    for c in cells {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            format_sig(c.beta),
            format_sig(c.green),
            c.algorithm,
            format_sig(c.lower),
            format_sig(c.upper),
            format_sig(c.tau_opt),
        ));
    }
    out
}

/// One polyline in a line chart.
#[derive(Debug, Clone)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

const PALETTE: [&str; 6] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
];

const WIDTH: f64 = 860.0;
const HEIGHT: f64 = 520.0;
const PLOT_X0: f64 = 70.0;
const PLOT_X1: f64 = 640.0;
const PLOT_Y0: f64 = 30.0;
const PLOT_Y1: f64 = 460.0;

fn tick_label(v: f64) -> String {
    let rounded = (v * 1e4).round() / 1e4;
    format!("{rounded}")
}

/// A static line chart: axes with ticks, one polyline per series, legend.
pub fn emit_svg_lines(series: &[Series], title: &str, x_label: &str, y_label: &str) -> String {
    let points: Vec<(f64, f64)> = series.iter().flat_map(|s| s.points.iter().copied()).collect();
    let (x_min, x_max) = span(points.iter().map(|p| p.0));
    let (y_min, y_max) = span(points.iter().map(|p| p.1));
    let sx = |x: f64| PLOT_X0 + (x - x_min) / (x_max - x_min).max(1e-12) * (PLOT_X1 - PLOT_X0);
    let sy = |y: f64| PLOT_Y1 - (y - y_min) / (y_max - y_min).max(1e-12) * (PLOT_Y1 - PLOT_Y0);

    let mut svg = svg_header(title);
    svg.push_str(&axes(x_min, x_max, y_min, y_max, &sx, &sy, x_label, y_label));
    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<String> = s
            .points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        svg.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
            pts.join(" ")
        ));
        let ly = 60.0 + 20.0 * i as f64;
        svg.push_str(&format!(
            "<line x1=\"660\" y1=\"{ly}\" x2=\"690\" y2=\"{ly}\" stroke=\"{color}\" stroke-width=\"2\"/>\n"
        ));
        svg.push_str(&format!(
            "<text x=\"696\" y=\"{}\" font-size=\"12\">{}</text>\n",
            ly + 4.0,
            s.name
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

/// A static heatmap: one rect per (x, y) cell colored by value, with the
/// value range noted under the title.
pub fn emit_svg_heatmap(
    xs: &[f64],
    ys: &[f64],
    values: &[f64], // row-major: values[yi * xs.len() + xi]
    title: &str,
) -> String {
    let (v_min, v_max) = span(values.iter().copied().filter(|v| v.is_finite()));
    let cw = (PLOT_X1 - PLOT_X0) / xs.len().max(1) as f64;
    let ch = (PLOT_Y1 - PLOT_Y0) / ys.len().max(1) as f64;
    let mut svg = svg_header(title);
    svg.push_str(&format!(
        "<text x=\"70\" y=\"{}\" font-size=\"11\">range [{}, {}]</text>\n",
        HEIGHT - 8.0,
        tick_label(v_min),
        tick_label(v_max)
    ));
    for (yi, _) in ys.iter().enumerate() {
        for (xi, _) in xs.iter().enumerate() {
            let v = values[yi * xs.len() + xi];
            let t = if v_max > v_min { ((v - v_min) / (v_max - v_min)).clamp(0.0, 1.0) } else { 0.5 };
            let r = (40.0 + 215.0 * t) as u8;
            let g = (60.0 + 40.0 * (1.0 - t)) as u8;
            let b = (215.0 - 175.0 * t) as u8;
            let x = PLOT_X0 + xi as f64 * cw;
            // y grows upward in the data, downward in SVG.
            let y = PLOT_Y1 - (yi + 1) as f64 * ch;
            svg.push_str(&format!(
                "<rect x=\"{x:.2}\" y=\"{y:.2}\" width=\"{cw:.2}\" height=\"{ch:.2}\" fill=\"rgb({r},{g},{b})\"/>\n"
            ));
        }
    }
    svg.push_str("</svg>\n");
    svg
}

fn svg_header(title: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n\
         <rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"20\" font-size=\"14\" text-anchor=\"middle\">{title}</text>\n",
        (PLOT_X0 + PLOT_X1) / 2.0
    )
}

#[allow(clippy::too_many_arguments)]
fn axes(
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
    sx: &dyn Fn(f64) -> f64,
    sy: &dyn Fn(f64) -> f64,
    x_label: &str,
    y_label: &str,
) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "<line x1=\"{PLOT_X0}\" y1=\"{PLOT_Y1}\" x2=\"{PLOT_X1}\" y2=\"{PLOT_Y1}\" stroke=\"black\"/>\n\
         <line x1=\"{PLOT_X0}\" y1=\"{PLOT_Y0}\" x2=\"{PLOT_X0}\" y2=\"{PLOT_Y1}\" stroke=\"black\"/>\n"
    ));
    for i in 0..=4 {
        let x = x_min + (x_max - x_min) * i as f64 / 4.0;
        let px = sx(x);
        out.push_str(&format!(
            "<line x1=\"{px:.2}\" y1=\"{PLOT_Y1}\" x2=\"{px:.2}\" y2=\"{}\" stroke=\"black\"/>\n\
             <text x=\"{px:.2}\" y=\"{}\" font-size=\"11\" text-anchor=\"middle\">{}</text>\n",
            PLOT_Y1 + 5.0,
            PLOT_Y1 + 18.0,
            tick_label(x)
        ));
        let y = y_min + (y_max - y_min) * i as f64 / 4.0;
        let py = sy(y);
        out.push_str(&format!(
            "<line x1=\"{}\" y1=\"{py:.2}\" x2=\"{PLOT_X0}\" y2=\"{py:.2}\" stroke=\"black\"/>\n\
             <text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"end\">{}</text>\n",
            PLOT_X0 - 5.0,
            PLOT_X0 - 8.0,
            py + 4.0,
            tick_label(y)
        ));
    }
    out.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\">{x_label}</text>\n",
        (PLOT_X0 + PLOT_X1) / 2.0,
        PLOT_Y1 + 36.0
    ));
    out.push_str(&format!(
        "<text x=\"16\" y=\"{}\" font-size=\"12\" transform=\"rotate(-90 16 {})\">{y_label}</text>\n",
        (PLOT_Y0 + PLOT_Y1) / 2.0,
        (PLOT_Y0 + PLOT_Y1) / 2.0
    ));
    out
}

fn span(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for v in values {
        min = min.min(v);
        max = max.max(v);
    }
    if min > max {
        (0.0, 1.0)
    } else if min == max {
        (min - 0.5, max + 0.5)
    } else {
        (min, max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig_formatting() {
        assert_eq!(format_sig(0.0), "0");
        assert_eq!(format_sig(0.1), "0.1");
        assert_eq!(format_sig(848.4), "848.4");
        assert_eq!(format_sig(2.0 / 3.0), "0.666666666667");
        assert_eq!(format_sig(f64::NAN), "nan");
        assert_eq!(format_sig(1e-7), "0.0000001");
    }

    #[test]
    fn empty_records_give_header_only_csv() {
        assert_eq!(
            experiment_csv(&[]),
            "algorithm,beta,green,tau,trial,seed,cost,opt_lb,empirical_cr\n"
        );
        assert_eq!(bounds_csv(&[]), "beta,green,algorithm,lower,upper,tau_opt\n");
    }

    #[test]
    fn line_chart_has_one_polyline_per_series() {
        let series = vec![Series {
            name: "nextfit".into(),
            points: vec![(1.0, 2.0), (2.0, 1.8), (3.0, 1.6)],
        }];
        let svg = emit_svg_lines(&series, "title", "beta", "ratio");
        assert!(svg.starts_with("<svg"));
        assert!(svg.ends_with("</svg>\n"));
        assert_eq!(svg.matches("<polyline").count(), 1);
        // Three vertices on the polyline.
        let pts = svg.split("points=\"").nth(1).unwrap().split('"').next().unwrap();
        assert_eq!(pts.split(' ').count(), 3);
    }

    #[test]
    fn heatmap_has_one_rect_per_cell() {
        let xs = vec![0.0, 1.0, 2.0, 3.0, 4.0];
        let ys = vec![0.0, 1.0, 2.0, 3.0, 4.0];
        let values: Vec<f64> = (0..25).map(|i| i as f64).collect();
        let svg = emit_svg_heatmap(&xs, &ys, &values, "grid");
        // One background rect plus 25 cells.
        assert_eq!(svg.matches("<rect").count(), 26);
    }
}
