//! Dependency-free SVG emission for tail-ratio curves. Output is a pure
//! function of the input data, so identical runs produce identical bytes.

use perptail_core::TailCurve;
use std::fmt::Write;

pub struct PlotStyle {
    pub width: u32,
    pub height: u32,
    pub title: String,
}

impl Default for PlotStyle {
    fn default() -> Self {
        PlotStyle { width: 760, height: 420, title: String::new() }
    }
}

struct Series<'a> {
    label: &'a str,
    color: &'a str,
    ys: Vec<f64>,
}

/// Plot the ratio columns of a curve (ratio to the leading-order formula)
/// against `log x`: one polyline per column plus a legend. A single-point
/// curve renders markers without polylines.
pub fn emit_plot(curve: &TailCurve, style: &PlotStyle) -> Result<String, String> {
    if curve.is_empty() {
        return Err("empty curve".into());
    }
    let mut series = vec![Series {
        label: "normal_approx / leading",
        color: "#1f6fb2",
        ys: curve.ratio_normal(),
    }];
    if let Some(rt) = curve.ratio_tilted() {
        series.push(Series { label: "tilted_exact / leading", color: "#c23b22", ys: rt });
    }
    Ok(render_panels(
        &[Panel { title: style.title.clone(), x: curve.log_x.clone(), series }],
        style.width,
        style.height,
    ))
}

/// Two stacked panels: the normal-approximation ratio on top, the exact
/// series ratio below, sharing the `log x` axis.
pub fn emit_two_panel(curve: &TailCurve, style: &PlotStyle) -> Result<String, String> {
    if curve.is_empty() {
        return Err("empty curve".into());
    }
    let Some(rt) = curve.ratio_tilted() else {
        return Err("curve has no exact-series column".into());
    };
    let panels = vec![
        Panel {
            title: "normal approximation ratio".into(),
            x: curve.log_x.clone(),
            series: vec![Series {
                label: "normal_approx / leading",
                color: "#1f6fb2",
                ys: curve.ratio_normal(),
            }],
        },
        Panel {
            title: "exact series ratio".into(),
            x: curve.log_x.clone(),
            series: vec![Series { label: "tilted_exact / leading", color: "#c23b22", ys: rt }],
        },
    ];
    Ok(render_panels(&panels, style.width, style.height * 2))
}

struct Panel<'a> {
    title: String,
    x: Vec<f64>,
    series: Vec<Series<'a>>,
}

fn fmt_num(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    if (1e-3..1e4).contains(&a) {
        format!("{v:.4}")
    } else {
        format!("{v:.3e}")
    }
}

fn render_panels(panels: &[Panel], width: u32, total_height: u32) -> String {
    let mut svg = String::new();
    let _ = write!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {width} {total_height}\" \
         font-family=\"monospace\" font-size=\"12\">\n<rect width=\"{width}\" \
         height=\"{total_height}\" fill=\"white\"/>\n"
    );
    let panel_h = total_height / panels.len() as u32;
    for (pi, p) in panels.iter().enumerate() {
        let top = pi as u32 * panel_h;
        let (ml, mr, mt, mb) = (70.0, 20.0, 30.0, 40.0);
        let (w, h) = (width as f64, panel_h as f64);
        let plot_w = w - ml - mr;
        let plot_h = h - mt - mb;

        let xmin = p.x.first().copied().unwrap();
        let xmax = p.x.last().copied().unwrap();
        let mut ymin = f64::INFINITY;
        let mut ymax = f64::NEG_INFINITY;
        for s in &p.series {
            for &y in &s.ys {
                if y.is_finite() {
                    ymin = ymin.min(y);
                    ymax = ymax.max(y);
                }
            }
        }
        // keep the reference level y = 1 in frame
        ymin = ymin.min(1.0);
        ymax = ymax.max(1.0);
        if (ymax - ymin).abs() < 1e-12 {
            ymin -= 0.5;
            ymax += 0.5;
        }
        let pad = 0.05 * (ymax - ymin);
        ymin -= pad;
        ymax += pad;

        let to_x = |v: f64| {
            if xmax > xmin {
                ml + (v - xmin) / (xmax - xmin) * plot_w
            } else {
                ml + 0.5 * plot_w
            }
        };
        let to_y = |v: f64| top as f64 + mt + (ymax - v) / (ymax - ymin) * plot_h;

        // frame + title
        let _ = write!(
            svg,
            "<g>\n<rect x=\"{ml}\" y=\"{:.2}\" width=\"{plot_w:.2}\" height=\"{plot_h:.2}\" \
             fill=\"none\" stroke=\"black\"/>\n<text x=\"{:.2}\" y=\"{:.2}\" \
             text-anchor=\"middle\">{}</text>\n",
            top as f64 + mt,
            ml + plot_w / 2.0,
            top as f64 + mt - 10.0,
            p.title
        );
        // y = 1 guide
        if ymin < 1.0 && 1.0 < ymax {
            let _ = write!(
                svg,
                "<line x1=\"{ml}\" y1=\"{0:.2}\" x2=\"{1:.2}\" y2=\"{0:.2}\" stroke=\"#999\" \
                 stroke-dasharray=\"4 3\"/>\n",
                to_y(1.0),
                ml + plot_w
            );
        }
        // ticks: ends and midpoints
        for t in [xmin, 0.5 * (xmin + xmax), xmax] {
            let _ = write!(
                svg,
                "<line x1=\"{0:.2}\" y1=\"{1:.2}\" x2=\"{0:.2}\" y2=\"{2:.2}\" stroke=\"black\"/>\n\
                 <text x=\"{0:.2}\" y=\"{3:.2}\" text-anchor=\"middle\">{4}</text>\n",
                to_x(t),
                top as f64 + mt + plot_h,
                top as f64 + mt + plot_h + 5.0,
                top as f64 + mt + plot_h + 18.0,
                fmt_num(t)
            );
        }
        for t in [ymin + pad, 0.5 * (ymin + ymax), ymax - pad] {
            let _ = write!(
                svg,
                "<line x1=\"{0:.2}\" y1=\"{1:.2}\" x2=\"{2:.2}\" y2=\"{1:.2}\" stroke=\"black\"/>\n\
                 <text x=\"{3:.2}\" y=\"{4:.2}\" text-anchor=\"end\">{5}</text>\n",
                ml - 5.0,
                to_y(t),
                ml,
                ml - 8.0,
                to_y(t) + 4.0,
                fmt_num(t)
            );
        }
        // axis labels
        let _ = write!(
            svg,
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">log x</text>\n\
             <text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\" \
             transform=\"rotate(-90 {2:.2} {3:.2})\">ratio</text>\n",
            ml + plot_w / 2.0,
            top as f64 + h - 6.0,
            16.0,
            top as f64 + mt + plot_h / 2.0,
        );
        // data
        for s in &p.series {
            if p.x.len() == 1 {
                let _ = write!(
                    svg,
                    "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"4\" fill=\"{}\"/>\n",
                    to_x(p.x[0]),
                    to_y(s.ys[0]),
                    s.color
                );
            } else {
                let mut pts = String::new();
                for (x, y) in p.x.iter().zip(&s.ys) {
                    if y.is_finite() {
                        let _ = write!(pts, "{:.2},{:.2} ", to_x(*x), to_y(*y));
                    }
                }
                let _ = write!(
                    svg,
                    "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"/>\n",
                    pts.trim_end(),
                    s.color
                );
            }
        }
        // legend
        for (si, s) in p.series.iter().enumerate() {
            let ly = top as f64 + mt + 16.0 + 16.0 * si as f64;
            let _ = write!(
                svg,
                "<line x1=\"{0:.2}\" y1=\"{ly:.2}\" x2=\"{1:.2}\" y2=\"{ly:.2}\" stroke=\"{2}\" \
                 stroke-width=\"2\"/>\n<text x=\"{3:.2}\" y=\"{4:.2}\">{5}</text>\n",
                ml + 8.0,
                ml + 30.0,
                s.color,
                ml + 36.0,
                ly + 4.0,
                s.label
            );
        }
        svg.push_str("</g>\n");
    }
    svg.push_str("</svg>\n");
    svg
}
