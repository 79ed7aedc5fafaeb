//! SVG line charts of Gini coefficient against iteration.

use std::fmt::Write as _;
use std::io::Read;
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum PlotError {
    #[error("{name}: {message}")]
    Malformed { name: String, message: String },
    #[error("{name}: no data rows")]
    Empty { name: String },
    #[error("nothing to plot")]
    NoSeries,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

impl Series {
    /// Reads the `iteration` and `gini` columns of a series CSV.
    pub fn from_csv<R: Read>(name: &str, input: R) -> Result<Series, PlotError> {
        let malformed = |message: String| PlotError::Malformed {
            name: name.to_string(),
            message,
        };
        let mut reader = csv::Reader::from_reader(input);
        let headers = reader.headers().map_err(|e| malformed(e.to_string()))?.clone();
        let column = |wanted: &str| {
            headers
                .iter()
                .position(|h| h == wanted)
                .ok_or_else(|| malformed(format!("missing `{wanted}` column")))
        };
        let (xi, yi) = (column("iteration")?, column("gini")?);

        let mut points = Vec::new();
        for (idx, record) in reader.records().enumerate() {
            let record = record.map_err(|e| malformed(e.to_string()))?;
            let field = |i: usize| -> Result<f64, PlotError> {
                let raw = record.get(i).unwrap_or("");
                raw.trim()
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| malformed(format!("row {}: bad number `{raw}`", idx + 2)))
            };
            points.push((field(xi)?, field(yi)?));
        }
        if points.is_empty() {
            return Err(PlotError::Empty {
                name: name.to_string(),
            });
        }
        Ok(Series {
            name: name.to_string(),
            points,
        })
    }
}

/// Legend name for a series file: its stem, or its parent directory's name
/// when the stem is the generic `gini_series`.
pub fn series_name(path: &Path) -> String {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("series");
    if stem == "gini_series" {
        if let Some(dir) = path.parent().and_then(|p| p.file_name()).and_then(|s| s.to_str()) {
            return dir.to_string();
        }
    }
    stem.to_string()
}

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 180.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 60.0;
const COLORS: [&str; 8] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Renders all series onto one chart. Output bytes depend only on the input.
///
/// The y axis spans `0` up to the largest value rounded up to a tenth (at
/// least `0.1`); the x axis spans the smallest to the largest iteration.
pub fn render_svg(series: &[Series]) -> Result<String, PlotError> {
    if series.is_empty() {
        return Err(PlotError::NoSeries);
    }
    let all = || series.iter().flat_map(|s| s.points.iter());
    let x_min = all().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let mut x_max = all().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    if x_max <= x_min {
        x_max = x_min + 1.0;
    }
    let y_peak = all().map(|p| p.1).fold(0.0, f64::max);
    let y_max = ((y_peak * 10.0).ceil() / 10.0).max(0.1);

    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x_min) / (x_max - x_min) * plot_w;
    let sy = |y: f64| TOP + plot_h - (y / y_max) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);

    // Axes and ticks.
    let (x0, y0) = (LEFT, TOP + plot_h);
    let _ = writeln!(
        svg,
        r#"<path d="M{x0:.2} {TOP:.2} L{x0:.2} {y0:.2} L{:.2} {y0:.2}" fill="none" stroke="black"/>"#,
        LEFT + plot_w
    );
    for i in 0..=5 {
        let frac = i as f64 / 5.0;
        let xv = x_min + frac * (x_max - x_min);
        let px = sx(xv);
        let _ = writeln!(
            svg,
            r#"<line x1="{px:.2}" y1="{y0:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/><text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            y0 + 5.0,
            y0 + 20.0,
            xv.round()
        );
        let yv = frac * y_max;
        let py = sy(yv);
        let _ = writeln!(
            svg,
            r#"<line x1="{:.2}" y1="{py:.2}" x2="{x0:.2}" y2="{py:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{yv:.2}</text>"#,
            x0 - 5.0,
            x0 - 8.0,
            py + 4.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">iteration</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 15.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">Gini Coefficient</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0
    );

    for (idx, s) in series.iter().enumerate() {
        let color = COLORS[idx % COLORS.len()];
        let mut points = String::new();
        for (i, &(x, y)) in s.points.iter().enumerate() {
            if i > 0 {
                points.push(' ');
            }
            let _ = write!(points, "{:.2},{:.2}", sx(x), sy(y));
        }
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{points}"/>"#
        );
        let ly = TOP + 10.0 + idx as f64 * 18.0;
        let lx = LEFT + plot_w + 15.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="3"/><text x="{:.2}" y="{:.2}">{}</text>"#,
            lx + 20.0,
            lx + 25.0,
            ly + 4.0,
            escape(&s.name)
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(name: &str, ys: &[f64]) -> Series {
        Series {
            name: name.into(),
            points: ys.iter().enumerate().map(|(i, &y)| ((i + 1) as f64, y)).collect(),
        }
    }

    #[test]
    fn reads_series_csv() {
        let text = "iteration,gini,bank_balance_or_inf\n1,0.000000,inf\n2,0.125000,inf\n";
        let s = Series::from_csv("a", text.as_bytes()).unwrap();
        assert_eq!(s.points, vec![(1.0, 0.0), (2.0, 0.125)]);
    }

    #[test]
    fn rejects_bad_csv() {
        assert!(matches!(Series::from_csv("e", "".as_bytes()), Err(PlotError::Malformed { .. } | PlotError::Empty { .. })));
        assert!(matches!(Series::from_csv("e", "iteration,gini\n".as_bytes()), Err(PlotError::Empty { .. })));
        assert!(matches!(Series::from_csv("e", "iter,g\n1,2\n".as_bytes()), Err(PlotError::Malformed { .. })));
        assert!(matches!(Series::from_csv("e", "iteration,gini\n1,x\n".as_bytes()), Err(PlotError::Malformed { .. })));
    }

    #[test]
    fn one_polyline_per_series() {
        let all: Vec<Series> = (0..3)
            .map(|k| series(&format!("s{k}"), &(0..1000).map(|i| (i as f64 * 0.001 * (k + 1) as f64).min(0.9)).collect::<Vec<_>>()))
            .collect();
        let svg = render_svg(&all).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 3);
        assert!(svg.contains(">iteration</text>"));
        assert!(svg.contains(">Gini Coefficient</text>"));
        for k in 0..3 {
            assert!(svg.contains(&format!(">s{k}</text>")));
        }
        assert_eq!(svg, render_svg(&all).unwrap());
    }

    #[test]
    fn constant_zero_is_flat_on_the_x_axis() {
        let svg = render_svg(&[series("zero", &[0.0; 10])]).unwrap();
        let points = svg.split("points=\"").nth(1).unwrap().split('"').next().unwrap();
        let baseline = format!("{:.2}", HEIGHT - BOTTOM);
        assert!(points.split(' ').all(|p| p.split(',').nth(1) == Some(baseline.as_str())));
    }

    #[test]
    fn legend_names() {
        assert_eq!(series_name(Path::new("out/fb_inf/gini_series.csv")), "fb_inf");
        assert_eq!(series_name(Path::new("runs/facebook__2-2-2-2__0__r0.csv")), "facebook__2-2-2-2__0__r0");
        assert_eq!(escape("a<b"), "a&lt;b");
        assert!(render_svg(&[]).is_err());
    }
}
