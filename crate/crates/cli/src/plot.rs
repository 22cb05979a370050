//! Static SVG line plots drawn straight from CSV columns.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{CliError, CliResult};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 72.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 36.0;
const BOTTOM: f64 = 52.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

#[derive(Clone, Debug, Default, PartialEq)]
pub struct PlotOptions {
    pub log_x: bool,
    pub log_y: bool,
    /// Column whose distinct values split the rows into separate lines.
    pub series: Option<String>,
    pub title: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_x: bool,
    pub log_y: bool,
    pub series: Vec<Series>,
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    /// Rows skipped because a value was blank, non-finite, or not positive
    /// on a log axis.
    pub dropped: usize,
}

fn column(headers: &csv::StringRecord, name: &str, path: &Path) -> CliResult<usize> {
    headers
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| CliError::usage(format!("{}: no column named `{name}`", path.display())))
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    });
    if !lo.is_finite() {
        (0.0, 1.0)
    } else {
        (lo, hi)
    }
}

/// Reads `x` and `y` columns from a CSV file into plottable series.
pub fn load_plot(csv_path: &Path, x: &str, y: &str, options: &PlotOptions) -> CliResult<Plot> {
    let mut reader = csv::Reader::from_path(csv_path)?;
    let headers = reader.headers()?.clone();
    let xi = column(&headers, x, csv_path)?;
    let yi = column(&headers, y, csv_path)?;
    let si = options
        .series
        .as_deref()
        .map(|s| column(&headers, s, csv_path))
        .transpose()?;

    let mut series: Vec<Series> = Vec::new();
    let mut dropped = 0;
    for record in reader.records() {
        let record = record?;
        let parse = |i: usize| record.get(i).and_then(|s| s.trim().parse::<f64>().ok());
        let key = match si {
            Some(i) => format!(
                "{} = {}",
                headers.get(i).unwrap_or(""),
                record.get(i).unwrap_or("")
            ),
            None => y.to_owned(),
        };
        let idx = match series.iter().position(|s| s.name == key) {
            Some(i) => i,
            None => {
                series.push(Series {
                    name: key,
                    points: Vec::new(),
                });
                series.len() - 1
            }
        };
        match (parse(xi), parse(yi)) {
            (Some(px), Some(py))
                if px.is_finite()
                    && py.is_finite()
                    && (!options.log_x || px > 0.0)
                    && (!options.log_y || py > 0.0) =>
            {
                series[idx].points.push((px, py));
            }
            _ => dropped += 1,
        }
    }
    let all = || series.iter().flat_map(|s| s.points.iter());
    let x_range = range(all().map(|p| p.0));
    let y_range = range(all().map(|p| p.1));
    Ok(Plot {
        title: options.title.clone(),
        x_label: x.to_owned(),
        y_label: y.to_owned(),
        log_x: options.log_x,
        log_y: options.log_y,
        series,
        x_range,
        y_range,
        dropped,
    })
}

struct Axis {
    lo: f64,
    hi: f64,
    log: bool,
}

impl Axis {
    fn new((lo, hi): (f64, f64), log: bool) -> Self {
        let (mut lo, mut hi) = if log {
            (lo.log10(), hi.log10())
        } else {
            (lo, hi)
        };
        if hi - lo <= 0.0 {
            lo -= 0.5;
            hi += 0.5;
        }
        Self { lo, hi, log }
    }

    fn frac(&self, v: f64) -> f64 {
        let t = if self.log { v.log10() } else { v };
        (t - self.lo) / (self.hi - self.lo)
    }

    /// Tick positions (in data units) with their labels.
    fn ticks(&self) -> Vec<(f64, String)> {
        if self.log {
            let first = self.lo.ceil() as i64;
            let last = self.hi.floor() as i64;
            let stride = ((last - first) / 6 + 1).max(1);
            let mut out: Vec<(f64, String)> = (first..=last)
                .step_by(stride as usize)
                .map(|k| (10f64.powi(k as i32), format!("1e{k}")))
                .collect();
            if out.len() < 2 {
                out = [self.lo, self.hi]
                    .iter()
                    .map(|&t| (10f64.powf(t), format!("{:.3e}", 10f64.powf(t))))
                    .collect();
            }
            return out;
        }
        let raw = (self.hi - self.lo) / 5.0;
        let mag = 10f64.powf(raw.log10().floor());
        let step = [1.0, 2.0, 5.0, 10.0]
            .iter()
            .map(|m| m * mag)
            .find(|s| *s >= raw)
            .unwrap_or(10.0 * mag);
        let decimals = (-step.log10().floor()).max(0.0) as usize;
        let first = (self.lo / step).ceil() as i64;
        let last = (self.hi / step).floor() as i64;
        (first..=last)
            .map(|k| {
                let v = k as f64 * step;
                let label = format!("{v:.decimals$}");
                let label = if label
                    .trim_start_matches('-')
                    .chars()
                    .all(|c| c == '0' || c == '.')
                {
                    "0".to_owned()
                } else {
                    label
                };
                (v, label)
            })
            .collect()
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Renders a plot as a self-contained SVG document.
pub fn render_svg(plot: &Plot) -> String {
    let xa = Axis::new(plot.x_range, plot.log_x);
    let ya = Axis::new(plot.y_range, plot.log_y);
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let px = |v: f64| LEFT + xa.frac(v) * pw;
    let py = |v: f64| TOP + (1.0 - ya.frac(v)) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(
        s,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    if !plot.title.is_empty() {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="20" text-anchor="middle" font-size="13">{}</text>"#,
            LEFT + pw / 2.0,
            escape(&plot.title)
        );
    }
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    for (v, label) in xa.ticks() {
        let x = px(v);
        let _ = writeln!(
            s,
            r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            TOP + ph,
            TOP + ph + 5.0,
            TOP + ph + 18.0,
            escape(&label)
        );
    }
    for (v, label) in ya.ticks() {
        let y = py(v);
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{LEFT}" y2="{y:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 5.0,
            LEFT - 8.0,
            y + 4.0,
            escape(&label)
        );
    }
    let axis_note = |log: bool| if log { " (log)" } else { "" };
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}{}</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 12.0,
        escape(&plot.x_label),
        axis_note(plot.log_x)
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">{}{}</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0,
        escape(&plot.y_label),
        axis_note(plot.log_y)
    );
    for (i, series) in plot.series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let points: Vec<String> = series
            .points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
            .collect();
        if !points.is_empty() {
            let _ = writeln!(
                s,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                points.join(" ")
            );
        }
        let ly = TOP + 12.0 + 16.0 * i as f64;
        let lx = WIDTH - RIGHT + 12.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/><text x="{:.2}" y="{:.2}">{}</text>"#,
            lx + 18.0,
            lx + 24.0,
            ly + 4.0,
            escape(&series.name)
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Plots `y` against `x` from `csv_path` into `svg_path`; returns the number
/// of dropped rows.
pub fn emit_plot(
    csv_path: &Path,
    x: &str,
    y: &str,
    options: &PlotOptions,
    svg_path: &Path,
) -> CliResult<usize> {
    let plot = load_plot(csv_path, x, y, options)?;
    std::fs::write(svg_path, render_svg(&plot))?;
    Ok(plot.dropped)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn csv_file(dir: &tempfile::TempDir, text: &str) -> std::path::PathBuf {
        let p = dir.path().join("d.csv");
        std::fs::write(&p, text).unwrap();
        p
    }

    #[test]
    fn two_points_make_one_polyline() {
        let dir = tempfile::tempdir().unwrap();
        let p = csv_file(&dir, "x,y\n1,1\n2,2\n");
        let plot = load_plot(&p, "x", "y", &PlotOptions::default()).unwrap();
        assert_eq!(plot.series.len(), 1);
        assert_eq!(plot.series[0].points, vec![(1.0, 1.0), (2.0, 2.0)]);
        assert_eq!((plot.x_range, plot.y_range), ((1.0, 2.0), (1.0, 2.0)));
        let svg = render_svg(&plot);
        assert_eq!(svg.matches("<polyline").count(), 1);
        let points = svg
            .split("points=\"")
            .nth(1)
            .unwrap()
            .split('"')
            .next()
            .unwrap();
        assert_eq!(points.split(' ').count(), 2);
    }

    #[test]
    fn log_axis_drops_non_positive_values() {
        let dir = tempfile::tempdir().unwrap();
        let p = csv_file(&dir, "x,y\n1,1e-3\n2,0\n3,-1\n4,\n5,1e-1\n");
        let opts = PlotOptions {
            log_y: true,
            ..Default::default()
        };
        let plot = load_plot(&p, "x", "y", &opts).unwrap();
        assert_eq!(plot.dropped, 3);
        assert_eq!(plot.series[0].points.len(), 2);
        assert!(render_svg(&plot).contains(">1e-2<"));
    }

    #[test]
    fn series_key_splits_lines_and_fills_legend() {
        let dir = tempfile::tempdir().unwrap();
        let p = csv_file(&dir, "n,L,v\n4,10,1\n4,20,2\n6,10,3\n6,20,4\n");
        let opts = PlotOptions {
            series: Some("n".into()),
            ..Default::default()
        };
        let plot = load_plot(&p, "L", "v", &opts).unwrap();
        let names: Vec<_> = plot.series.iter().map(|s| s.name.as_str()).collect();
        assert_eq!(names, ["n = 4", "n = 6"]);
        let svg = render_svg(&plot);
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains(">n = 6<"));
    }

    #[test]
    fn missing_column_is_usage_error() {
        let dir = tempfile::tempdir().unwrap();
        let p = csv_file(&dir, "x,y\n1,1\n");
        let err = load_plot(&p, "x", "z", &PlotOptions::default()).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn output_is_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        let p = csv_file(&dir, "x,y\n0.1,3\n0.25,-2\n0.7,9.5\n");
        let a = dir.path().join("a.svg");
        let b = dir.path().join("b.svg");
        let opts = PlotOptions {
            title: "t < u".into(),
            ..Default::default()
        };
        emit_plot(&p, "x", "y", &opts, &a).unwrap();
        emit_plot(&p, "x", "y", &opts, &b).unwrap();
        assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
    }
}
