//! File emitters: the fixed-header check table, the difference-profile
//! table, and hand-rolled SVG plots. All output is a pure function of the
//! run record, so reruns reproduce files byte for byte.

use std::path::Path;

use crate::record::{fmt_f64, CheckRow, DivergenceRow, LevelRow, RunRecord};
use crate::CliError;

pub const CSV_HEADER: &str = "scenario,check,x0,measured,bound,slack,pass";

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn checks_csv(scenario: &str, rows: &[CheckRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for row in rows {
        let x0 = row.x0.map(fmt_f64).unwrap_or_default();
        out.push_str(&format!(
            "{scenario},{},{},{},{},{},{}\n",
            row.name,
            x0,
            fmt_f64(row.measured),
            fmt_f64(row.bound),
            fmt_f64(row.slack),
            row.pass
        ));
    }
    out
}

pub fn divergence_csv(rows: &[DivergenceRow]) -> String {
    let mut out = String::from("length,x,difference,difference_over_log\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            fmt_f64(row.length),
            fmt_f64(row.x),
            fmt_f64(row.difference),
            fmt_f64(row.ratio)
        ));
    }
    out
}

/// A single-panel line plot with axes, ticks, and a legend.
pub struct LinePlot {
    title: String,
    x_label: String,
    y_label: String,
    curves: Vec<Curve>,
}

struct Curve {
    label: String,
    points: Vec<(f64, f64)>,
    color: &'static str,
    dashed: bool,
}

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 150.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 50.0;

impl LinePlot {
    pub fn new(title: &str, x_label: &str, y_label: &str) -> LinePlot {
        LinePlot {
            title: title.to_string(),
            x_label: x_label.to_string(),
            y_label: y_label.to_string(),
            curves: Vec::new(),
        }
    }

    pub fn add_curve(&mut self, label: &str, points: Vec<(f64, f64)>, dashed: bool) {
        let color = PALETTE[self.curves.len() % PALETTE.len()];
        self.curves.push(Curve {
            label: label.to_string(),
            points,
            color,
            dashed,
        });
    }

    fn data_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for v in values {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if !lo.is_finite() || !hi.is_finite() {
            return (0.0, 1.0);
        }
        if hi - lo < 1.0e-12 {
            return (lo - 1.0, hi + 1.0);
        }
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    }

    pub fn render(&self) -> String {
        let (x_lo, x_hi) = Self::data_range(
            self.curves
                .iter()
                .flat_map(|c| c.points.iter().map(|p| p.0)),
        );
        let (y_lo, y_hi) = Self::data_range(
            self.curves
                .iter()
                .flat_map(|c| c.points.iter().map(|p| p.1)),
        );
        let px = |x: f64| MARGIN_L + (x - x_lo) / (x_hi - x_lo) * (WIDTH - MARGIN_L - MARGIN_R);
        let py = |y: f64| HEIGHT - MARGIN_B - (y - y_lo) / (y_hi - y_lo) * (HEIGHT - MARGIN_T - MARGIN_B);

        let mut s = String::new();
        s.push_str(&format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
             viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
        ));
        s.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
        s.push_str(&format!(
            "<text x=\"{:.1}\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\" \
             text-anchor=\"middle\">{}</text>\n",
            MARGIN_L + 0.5 * (WIDTH - MARGIN_L - MARGIN_R),
            xml_escape(&self.title)
        ));

        // Frame.
        s.push_str(&format!(
            "<rect x=\"{MARGIN_L:.1}\" y=\"{MARGIN_T:.1}\" width=\"{:.1}\" height=\"{:.1}\" \
             fill=\"none\" stroke=\"black\"/>\n",
            WIDTH - MARGIN_L - MARGIN_R,
            HEIGHT - MARGIN_T - MARGIN_B
        ));

        // Ticks: 5 per axis.
        for k in 0..=4 {
            let t = k as f64 / 4.0;
            let xv = x_lo + t * (x_hi - x_lo);
            let yv = y_lo + t * (y_hi - y_lo);
            s.push_str(&format!(
                "<line x1=\"{0:.1}\" y1=\"{1:.1}\" x2=\"{0:.1}\" y2=\"{2:.1}\" stroke=\"black\"/>\n",
                px(xv),
                HEIGHT - MARGIN_B,
                HEIGHT - MARGIN_B + 5.0
            ));
            s.push_str(&format!(
                "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\" \
                 text-anchor=\"middle\">{:.3}</text>\n",
                px(xv),
                HEIGHT - MARGIN_B + 18.0,
                xv
            ));
            s.push_str(&format!(
                "<line x1=\"{0:.1}\" y1=\"{1:.1}\" x2=\"{2:.1}\" y2=\"{1:.1}\" stroke=\"black\"/>\n",
                MARGIN_L - 5.0,
                py(yv),
                MARGIN_L
            ));
            s.push_str(&format!(
                "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\" \
                 text-anchor=\"end\">{:.3}</text>\n",
                MARGIN_L - 8.0,
                py(yv) + 4.0,
                yv
            ));
        }
        s.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"13\" \
             text-anchor=\"middle\">{}</text>\n",
            MARGIN_L + 0.5 * (WIDTH - MARGIN_L - MARGIN_R),
            HEIGHT - 10.0,
            xml_escape(&self.x_label)
        ));
        s.push_str(&format!(
            "<text x=\"18\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"13\" \
             text-anchor=\"middle\" transform=\"rotate(-90 18 {0:.1})\">{1}</text>\n",
            MARGIN_T + 0.5 * (HEIGHT - MARGIN_T - MARGIN_B),
            xml_escape(&self.y_label)
        ));

        for (k, curve) in self.curves.iter().enumerate() {
            if curve.points.is_empty() {
                continue;
            }
            let pts: Vec<String> = curve
                .points
                .iter()
                .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
                .collect();
            let dash = if curve.dashed {
                " stroke-dasharray=\"6 4\""
            } else {
                ""
            };
            s.push_str(&format!(
                "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"{} points=\"{}\"/>\n",
                curve.color,
                dash,
                pts.join(" ")
            ));
            let ly = MARGIN_T + 16.0 + 18.0 * k as f64;
            s.push_str(&format!(
                "<line x1=\"{0:.1}\" y1=\"{ly:.1}\" x2=\"{1:.1}\" y2=\"{ly:.1}\" \
                 stroke=\"{2}\" stroke-width=\"1.5\"{3}/>\n",
                WIDTH - MARGIN_R + 10.0,
                WIDTH - MARGIN_R + 34.0,
                curve.color,
                dash
            ));
            s.push_str(&format!(
                "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"12\">{}</text>\n",
                WIDTH - MARGIN_R + 40.0,
                ly + 4.0,
                xml_escape(&curve.label)
            ));
        }
        s.push_str("</svg>\n");
        s
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn divergence_plot(rows: &[DivergenceRow], lengths: &[f64]) -> String {
    let mut plot = LinePlot::new(
        "Difference profile across truncation lengths",
        "x",
        "max |u1 - u2| on the transversal",
    );
    for &len in lengths {
        let pts: Vec<(f64, f64)> = rows
            .iter()
            .filter(|r| r.length == len)
            .map(|r| (r.x, r.difference))
            .collect();
        plot.add_curve(&format!("L = {len}"), pts, false);
        let ratio: Vec<(f64, f64)> = rows
            .iter()
            .filter(|r| r.length == len)
            .map(|r| (r.x, r.ratio))
            .collect();
        plot.add_curve(&format!("L = {len}, / ln(2+x)"), ratio, true);
    }
    plot.render()
}

pub fn convergence_plot(levels: &[LevelRow]) -> String {
    let mut plot = LinePlot::new(
        "Refinement against the analytic reference",
        "log2 h_max",
        "log2 max error",
    );
    let pts: Vec<(f64, f64)> = levels
        .iter()
        .map(|l| (l.h_max.log2(), l.error.log2()))
        .collect();
    plot.add_curve("nodal error", pts, false);
    plot.render()
}

/// Write every artifact listed in the record's manifest.
pub fn emit_outputs(out_dir: &Path, record: &RunRecord, svg: Option<String>) -> Result<(), CliError> {
    std::fs::create_dir_all(out_dir).map_err(|source| CliError::Io {
        path: out_dir.display().to_string(),
        source,
    })?;
    for file in &record.manifest {
        let path = out_dir.join(file);
        match file.as_str() {
            "checks.csv" => write_file(&path, &checks_csv(&record.scenario, &record.checks))?,
            "divergence.csv" => write_file(&path, &divergence_csv(&record.divergence))?,
            "report.json" => write_file(&path, &record.to_json())?,
            "plots.svg" => {
                let body = svg.as_deref().unwrap_or("");
                write_file(&path, body)?;
            }
            other => {
                return Err(CliError::Config(format!(
                    "unknown manifest entry \"{other}\""
                )));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_rows_follow_the_fixed_header() {
        let rows = vec![
            CheckRow {
                name: "classical_max".into(),
                x0: None,
                measured: 0.25,
                bound: 0.5,
                slack: 0.125,
                pass: true,
                witnesses: vec![],
            },
            CheckRow {
                name: "theorem3".into(),
                x0: Some(2.0),
                measured: 0.5,
                bound: 5.0,
                slack: 0.125,
                pass: true,
                witnesses: vec![],
            },
        ];
        let csv = checks_csv("verify", &rows);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), CSV_HEADER);
        let first = lines.next().unwrap();
        assert!(first.starts_with("verify,classical_max,,2.5"));
        let second = lines.next().unwrap();
        assert!(second.contains(",2.0000000000000000e0,"));
        assert!(second.ends_with(",true"));
    }

    #[test]
    fn svg_contains_every_legend_entry() {
        let mut plot = LinePlot::new("demo", "x", "y");
        plot.add_curve("alpha", vec![(0.0, 0.0), (1.0, 2.0)], false);
        plot.add_curve("beta", vec![(0.0, 1.0), (1.0, 0.0)], true);
        let svg = plot.render();
        assert!(svg.contains("alpha") && svg.contains("beta"));
        assert!(svg.contains("stroke-dasharray"));
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn degenerate_ranges_still_render() {
        let mut plot = LinePlot::new("flat", "x", "y");
        plot.add_curve("zero", vec![(0.0, 0.0), (1.0, 0.0)], false);
        let svg = plot.render();
        assert!(svg.contains("polyline"));
    }
}
