//! Standalone SVG reward curves.
//!
//! For every input metrics CSV the plot shows the per-episode cumulative
//! reward as a light polyline and its `window`-episode trailing moving
//! average as a bold polyline, over labeled axes with a dashed zero-reward
//! reference line. `<polyline>` elements are used for data series only
//! (axes and gridlines are `<line>`), so a well-formed output contains
//! exactly two polylines per input series.

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::harness::metrics::read_metrics_csv;

/// Which quantity the y-axis shows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotView {
    /// One value per episode (the episode's cumulative reward).
    PerEpisode,
    /// Running sum of episode rewards across the whole run.
    CumulativeSum,
}

const WIDTH: f64 = 900.0;
const HEIGHT: f64 = 540.0;
const MARGIN_LEFT: f64 = 72.0;
const MARGIN_RIGHT: f64 = 24.0;
const MARGIN_TOP: f64 = 28.0;
const MARGIN_BOTTOM: f64 = 56.0;
const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

struct Series {
    label: String,
    episodes: Vec<f64>,
    values: Vec<f64>,
    averaged: Vec<f64>, // trailing window means, len = n - window + 1
}

/// Trailing moving average: output i is the mean of `values[i..i+window]`.
fn moving_average(values: &[f64], window: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len() + 1 - window);
    let mut sum: f64 = values[..window].iter().sum();
    out.push(sum / window as f64);
    for i in window..values.len() {
        sum += values[i] - values[i - window];
        out.push(sum / window as f64);
    }
    out
}

/// Render reward curves from metrics CSVs into an SVG file.
pub fn plot_rewards(
    metrics_paths: &[PathBuf],
    out_path: impl AsRef<Path>,
    window: usize,
    view: PlotView,
) -> Result<()> {
    if metrics_paths.is_empty() {
        return Err(Error::config("plot needs at least one metrics file"));
    }
    if window < 1 {
        return Err(Error::config("plot window must be >= 1"));
    }
    let mut series = Vec::with_capacity(metrics_paths.len());
    for path in metrics_paths {
        let records = read_metrics_csv(path)?;
        if records.len() < window {
            return Err(Error::config(format!(
                "window {window} exceeds the {} data rows in {}",
                records.len(),
                path.display()
            )));
        }
        let episodes: Vec<f64> = records.iter().map(|r| r.episode as f64).collect();
        let values: Vec<f64> = match view {
            PlotView::PerEpisode => records.iter().map(|r| r.cumulative_reward).collect(),
            PlotView::CumulativeSum => records
                .iter()
                .scan(0.0, |acc, r| {
                    *acc += r.cumulative_reward;
                    Some(*acc)
                })
                .collect(),
        };
        let averaged = moving_average(&values, window);
        let label = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        series.push(Series { label, episodes, values, averaged });
    }
    let svg = render_svg(&series, window, view);
    std::fs::write(out_path, svg)?;
    Ok(())
}

fn render_svg(series: &[Series], window: usize, view: PlotView) -> String {
    // data envelope, always including y = 0 for the reference line
    let mut x_min = f64::INFINITY;
    let mut x_max = f64::NEG_INFINITY;
    let mut y_min: f64 = 0.0;
    let mut y_max: f64 = 0.0;
    for s in series {
        x_min = x_min.min(s.episodes[0]);
        x_max = x_max.max(*s.episodes.last().unwrap());
        for &v in s.values.iter().chain(&s.averaged) {
            y_min = y_min.min(v);
            y_max = y_max.max(v);
        }
    }
    if x_max == x_min {
        x_max = x_min + 1.0;
    }
    if y_max == y_min {
        y_max += 1.0;
        y_min -= 1.0;
    }
    let y_pad = 0.05 * (y_max - y_min);
    y_min -= y_pad;
    y_max += y_pad;

    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let to_x = |e: f64| MARGIN_LEFT + (e - x_min) / (x_max - x_min) * plot_w;
    let to_y = |v: f64| MARGIN_TOP + (y_max - v) / (y_max - y_min) * plot_h;

    let mut svg = String::with_capacity(64 * 1024);
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" \
         font-family=\"sans-serif\" font-size=\"13\">\n"
    ));
    svg.push_str(&format!(
        "  <rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n"
    ));

    // axes
    let x_axis_y = MARGIN_TOP + plot_h;
    svg.push_str(&format!(
        "  <line x1=\"{MARGIN_LEFT}\" y1=\"{x_axis_y}\" x2=\"{:.1}\" y2=\"{x_axis_y}\" \
         stroke=\"black\" stroke-width=\"1\"/>\n",
        MARGIN_LEFT + plot_w
    ));
    svg.push_str(&format!(
        "  <line x1=\"{MARGIN_LEFT}\" y1=\"{MARGIN_TOP}\" x2=\"{MARGIN_LEFT}\" y2=\"{x_axis_y}\" \
         stroke=\"black\" stroke-width=\"1\"/>\n"
    ));

    // ticks and labels
    for i in 0..=5 {
        let frac = i as f64 / 5.0;
        let e = x_min + frac * (x_max - x_min);
        let x = to_x(e);
        svg.push_str(&format!(
            "  <line x1=\"{x:.1}\" y1=\"{x_axis_y}\" x2=\"{x:.1}\" y2=\"{:.1}\" stroke=\"black\"/>\n",
            x_axis_y + 5.0
        ));
        svg.push_str(&format!(
            "  <text x=\"{x:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{:.0}</text>\n",
            x_axis_y + 20.0,
            e
        ));
        let v = y_min + frac * (y_max - y_min);
        let y = to_y(v);
        svg.push_str(&format!(
            "  <line x1=\"{:.1}\" y1=\"{y:.1}\" x2=\"{MARGIN_LEFT}\" y2=\"{y:.1}\" stroke=\"black\"/>\n",
            MARGIN_LEFT - 5.0
        ));
        svg.push_str(&format!(
            "  <text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\">{:.4}</text>\n",
            MARGIN_LEFT - 9.0,
            y + 4.0,
            v
        ));
    }
    svg.push_str(&format!(
        "  <text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\">episode</text>\n",
        MARGIN_LEFT + plot_w / 2.0,
        HEIGHT - 14.0
    ));
    let y_label = match view {
        PlotView::PerEpisode => "episode reward",
        PlotView::CumulativeSum => "cumulative reward",
    };
    svg.push_str(&format!(
        "  <text x=\"16\" y=\"{:.1}\" transform=\"rotate(-90 16 {:.1})\" \
         text-anchor=\"middle\">{y_label}</text>\n",
        MARGIN_TOP + plot_h / 2.0,
        MARGIN_TOP + plot_h / 2.0
    ));

    // zero-reward reference line
    if y_min <= 0.0 && 0.0 <= y_max {
        let y0 = to_y(0.0);
        svg.push_str(&format!(
            "  <line x1=\"{MARGIN_LEFT}\" y1=\"{y0:.1}\" x2=\"{:.1}\" y2=\"{y0:.1}\" \
             stroke=\"#888888\" stroke-width=\"1\" stroke-dasharray=\"6 4\"/>\n",
            MARGIN_LEFT + plot_w
        ));
    }

    // data series: light raw polyline + bold moving average
    for (idx, s) in series.iter().enumerate() {
        let color = PALETTE[idx % PALETTE.len()];
        let raw_points: Vec<String> = s
            .episodes
            .iter()
            .zip(&s.values)
            .map(|(&e, &v)| format!("{:.1},{:.1}", to_x(e), to_y(v)))
            .collect();
        svg.push_str(&format!(
            "  <polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1\" \
             stroke-opacity=\"0.35\" points=\"{}\"/>\n",
            raw_points.join(" ")
        ));
        let avg_points: Vec<String> = s
            .averaged
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                let e = s.episodes[i + window - 1];
                format!("{:.1},{:.1}", to_x(e), to_y(v))
            })
            .collect();
        svg.push_str(&format!(
            "  <polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"2.5\" \
             points=\"{}\"/>\n",
            avg_points.join(" ")
        ));
        // legend entry
        let ly = MARGIN_TOP + 8.0 + idx as f64 * 18.0;
        svg.push_str(&format!(
            "  <rect x=\"{:.1}\" y=\"{:.1}\" width=\"12\" height=\"12\" fill=\"{color}\"/>\n",
            MARGIN_LEFT + 12.0,
            ly - 10.0
        ));
        svg.push_str(&format!(
            "  <text x=\"{:.1}\" y=\"{ly:.1}\">{}</text>\n",
            MARGIN_LEFT + 30.0,
            escape(&s.label)
        ));
    }

    svg.push_str("</svg>\n");
    svg
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::Outcome;
    use crate::harness::metrics::{EpisodeRecord, MetricsWriter};

    fn write_metrics(path: &Path, rewards: &[f64]) {
        let mut w = MetricsWriter::create(path).unwrap();
        for (i, &r) in rewards.iter().enumerate() {
            w.append(&EpisodeRecord {
                episode: i + 1,
                steps: 10,
                cumulative_reward: r,
                outcome: Outcome::TimedOut,
                wall_ms: 1000,
            })
            .unwrap();
        }
        w.finish().unwrap();
    }

    fn polyline_point_counts(svg: &str) -> Vec<usize> {
        svg.lines()
            .filter(|l| l.contains("<polyline"))
            .map(|l| {
                let points = l.split("points=\"").nth(1).unwrap();
                let points = points.split('"').next().unwrap();
                points.split_whitespace().count()
            })
            .collect()
    }

    #[test]
    fn moving_average_lengths_and_values() {
        assert_eq!(moving_average(&[1.0, 2.0, 3.0, 4.0], 2), vec![1.5, 2.5, 3.5]);
        assert_eq!(moving_average(&[5.0, 5.0], 2), vec![5.0]);
        let n400: Vec<f64> = (0..400).map(|i| i as f64).collect();
        assert_eq!(moving_average(&n400, 20).len(), 381);
    }

    #[test]
    fn four_hundred_rows_window_twenty() {
        let dir = tempfile::tempdir().unwrap();
        let csv = dir.path().join("metrics.csv");
        let rewards: Vec<f64> = (0..400).map(|i| (i as f64 * 0.7).sin() * 30.0).collect();
        write_metrics(&csv, &rewards);
        let out = dir.path().join("curve.svg");
        plot_rewards(&[csv], &out, 20, PlotView::PerEpisode).unwrap();
        let svg = std::fs::read_to_string(&out).unwrap();
        assert_eq!(polyline_point_counts(&svg), vec![400, 381]);
        assert!(svg.contains("stroke-dasharray")); // zero line present
        assert!(svg.contains("episode reward"));
    }

    #[test]
    fn header_only_file_is_a_parse_error() {
        let dir = tempfile::tempdir().unwrap();
        let csv = dir.path().join("empty.csv");
        std::fs::write(&csv, format!("{}\n", crate::harness::metrics::METRICS_HEADER)).unwrap();
        let out = dir.path().join("curve.svg");
        let err = plot_rewards(&[csv], &out, 5, PlotView::PerEpisode).unwrap_err();
        assert!(err.to_string().contains("no data rows"), "{err}");
    }

    #[test]
    fn constant_series_is_flat_at_its_value() {
        let dir = tempfile::tempdir().unwrap();
        let csv = dir.path().join("metrics.csv");
        write_metrics(&csv, &vec![5.0; 50]);
        let out = dir.path().join("curve.svg");
        plot_rewards(&[csv], &out, 10, PlotView::PerEpisode).unwrap();
        let svg = std::fs::read_to_string(&out).unwrap();
        let mut y_values: Vec<Vec<&str>> = Vec::new();
        for line in svg.lines().filter(|l| l.contains("<polyline")) {
            let points = line.split("points=\"").nth(1).unwrap().split('"').next().unwrap();
            y_values.push(points.split_whitespace().map(|p| p.split(',').nth(1).unwrap()).collect());
        }
        for series in &y_values {
            assert!(series.windows(2).all(|w| w[0] == w[1]), "polyline not horizontal");
        }
        // raw and averaged sit at the same height
        assert_eq!(y_values[0][0], y_values[1][0]);
    }

    #[test]
    fn two_files_give_four_polylines() {
        let dir = tempfile::tempdir().unwrap();
        let a = dir.path().join("a.csv");
        let b = dir.path().join("b.csv");
        write_metrics(&a, &[1.0, 2.0, 3.0, 4.0, 5.0]);
        write_metrics(&b, &[-1.0, -2.0, -3.0, -4.0, -5.0]);
        let out = dir.path().join("curve.svg");
        plot_rewards(&[a, b], &out, 2, PlotView::PerEpisode).unwrap();
        let svg = std::fs::read_to_string(&out).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 4);
    }

    #[test]
    fn oversized_window_is_config_error() {
        let dir = tempfile::tempdir().unwrap();
        let csv = dir.path().join("metrics.csv");
        write_metrics(&csv, &[1.0, 2.0]);
        let out = dir.path().join("curve.svg");
        assert!(matches!(
            plot_rewards(&[csv], &out, 10, PlotView::PerEpisode),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn cumulative_view_sums_rewards() {
        let dir = tempfile::tempdir().unwrap();
        let csv = dir.path().join("metrics.csv");
        write_metrics(&csv, &[1.0, 1.0, 1.0, 1.0]);
        let out = dir.path().join("curve.svg");
        plot_rewards(&[csv], &out, 1, PlotView::CumulativeSum).unwrap();
        let svg = std::fs::read_to_string(&out).unwrap();
        assert!(svg.contains("cumulative reward"));
        // strictly increasing cumsum → strictly decreasing svg y
        let line = svg.lines().find(|l| l.contains("<polyline")).unwrap();
        let points = line.split("points=\"").nth(1).unwrap().split('"').next().unwrap();
        let ys: Vec<f64> = points
            .split_whitespace()
            .map(|p| p.split(',').nth(1).unwrap().parse().unwrap())
            .collect();
        assert!(ys.windows(2).all(|w| w[1] < w[0]));
    }
}
