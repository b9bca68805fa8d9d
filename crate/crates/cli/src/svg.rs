//! Minimal static SVG 1.1 emitter: log-log polyline plots of rigidity
//! magnitudes and their predictions against the detuning.

use crate::sweep::SweepRecord;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 30.0;
const MARGIN_B: f64 = 50.0;

struct LogAxis {
    lo: f64, // log10 of the lower bound
    hi: f64,
}

impl LogAxis {
    fn from_values(values: impl Iterator<Item = f64>) -> Option<LogAxis> {
        let logs: Vec<f64> =
            values.filter(|v| v.is_finite() && *v > 0.0).map(f64::log10).collect();
        if logs.is_empty() {
            return None;
        }
        let lo = logs.iter().cloned().fold(f64::INFINITY, f64::min).floor();
        let hi = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max).ceil();
        Some(LogAxis { lo, hi: if hi > lo { hi } else { lo + 1.0 } })
    }

    fn frac(&self, v: f64) -> f64 {
        (v.log10() - self.lo) / (self.hi - self.lo)
    }
}

struct Series {
    label: &'static str,
    color: &'static str,
    points: Vec<(f64, f64)>,
}

/// Plots |r| (both routes where present) and the two predictions for the
/// tracked cluster, one line per quantity, aggregated over cluster states
/// by geometric mean.
pub fn sweep_plot(records: &[SweepRecord]) -> String {
    let mut eps_values: Vec<f64> = records.iter().map(|r| r.eps).collect();
    eps_values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    eps_values.dedup();

    let geomean = |xs: &[f64]| -> Option<f64> {
        if xs.is_empty() {
            None
        } else {
            Some((xs.iter().map(|x| x.ln()).sum::<f64>() / xs.len() as f64).exp())
        }
    };
    let collect = |f: &dyn Fn(&SweepRecord) -> Option<f64>| -> Vec<(f64, f64)> {
        eps_values
            .iter()
            .filter_map(|&eps| {
                let xs: Vec<f64> = records
                    .iter()
                    .filter(|r| r.eps == eps && r.pred_general.is_some())
                    .filter_map(f)
                    .filter(|v| v.is_finite() && *v > 0.0)
                    .collect();
                geomean(&xs).map(|g| (eps, g))
            })
            .collect()
    };

    let series = [
        Series { label: "|r| direct", color: "#1f77b4", points: collect(&|r| Some(r.r_abs_direct)) },
        Series { label: "|r| exact", color: "#2ca02c", points: collect(&|r| r.r_abs_exact) },
        Series { label: "truncated pred.", color: "#d62728", points: collect(&|r| r.pred_truncated) },
        Series { label: "general pred.", color: "#9467bd", points: collect(&|r| r.pred_general) },
    ];

    let x_axis = LogAxis::from_values(eps_values.iter().cloned());
    let y_axis = LogAxis::from_values(
        series.iter().flat_map(|s| s.points.iter().map(|&(_, y)| y)),
    );
    let (Some(x_axis), Some(y_axis)) = (x_axis, y_axis) else {
        return empty_plot();
    };

    let px = |f: f64| MARGIN_L + f * (WIDTH - MARGIN_L - MARGIN_R);
    let py = |f: f64| HEIGHT - MARGIN_B - f * (HEIGHT - MARGIN_T - MARGIN_B);

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" \
         width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");

    // frame
    svg.push_str(&format!(
        "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n",
        MARGIN_L,
        MARGIN_T,
        WIDTH - MARGIN_L - MARGIN_R,
        HEIGHT - MARGIN_T - MARGIN_B
    ));

    // decade ticks
    let mut d = x_axis.lo;
    while d <= x_axis.hi + 1e-9 {
        let x = px((d - x_axis.lo) / (x_axis.hi - x_axis.lo));
        svg.push_str(&format!(
            "<line x1=\"{x}\" y1=\"{}\" x2=\"{x}\" y2=\"{}\" stroke=\"#cccccc\"/>\n",
            MARGIN_T,
            HEIGHT - MARGIN_B
        ));
        svg.push_str(&format!(
            "<text x=\"{x}\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\">1e{}</text>\n",
            HEIGHT - MARGIN_B + 18.0,
            d as i64
        ));
        d += 1.0;
    }
    let mut d = y_axis.lo;
    while d <= y_axis.hi + 1e-9 {
        let y = py((d - y_axis.lo) / (y_axis.hi - y_axis.lo));
        svg.push_str(&format!(
            "<line x1=\"{}\" y1=\"{y}\" x2=\"{}\" y2=\"{y}\" stroke=\"#cccccc\"/>\n",
            MARGIN_L,
            WIDTH - MARGIN_R
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"end\">1e{}</text>\n",
            MARGIN_L - 6.0,
            y + 4.0,
            d as i64
        ));
        d += 1.0;
    }
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-size=\"13\" text-anchor=\"middle\">detuning</text>\n",
        (MARGIN_L + WIDTH - MARGIN_R) / 2.0,
        HEIGHT - 10.0
    ));

    for (i, s) in series.iter().enumerate() {
        if s.points.is_empty() {
            continue;
        }
        let pts: Vec<String> = s
            .points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", px(x_axis.frac(x)), py(y_axis.frac(y))))
            .collect();
        svg.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
            s.color,
            pts.join(" ")
        ));
        let ly = MARGIN_T + 16.0 * (i as f64 + 1.0);
        svg.push_str(&format!(
            "<line x1=\"{}\" y1=\"{ly}\" x2=\"{}\" y2=\"{ly}\" stroke=\"{}\" stroke-width=\"2\"/>\n",
            MARGIN_L + 8.0,
            MARGIN_L + 32.0,
            s.color
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"12\">{}</text>\n",
            MARGIN_L + 38.0,
            ly + 4.0,
            s.label
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

fn empty_plot() -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" \
         width=\"{WIDTH}\" height=\"{HEIGHT}\"><text x=\"20\" y=\"40\">no data</text></svg>\n"
    )
}
