//! Dependency-free SVG line charts of metrics and batch-loss CSVs.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::selfplay::{LOSS_HEADER, METRICS_HEADER};

/// Series longer than this are averaged into this many bins.
pub const MAX_POINTS: usize = 400;

const PALETTE: [&str; 10] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
];

#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeriesKind {
    AfterStateValue,
    /// Batch loss after the step; the projection error for dual-network runs.
    BatchLoss { projection: bool },
}

/// A series label from its path: the run directory for `metrics.csv`-style
/// names, else the file stem.
fn label_for(path: &Path) -> String {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    match (stem.as_str(), path.parent().and_then(Path::file_name)) {
        ("metrics" | "projection" | "batch_loss", Some(dir)) => dir.to_string_lossy().into_owned(),
        _ => stem,
    }
}

/// Reads a metrics or batch-loss CSV.
pub fn read_series(path: &Path) -> Result<(SeriesKind, Series)> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines.next().unwrap_or("");
    let (kind, ycol) = if header == METRICS_HEADER {
        (SeriesKind::AfterStateValue, 2)
    } else if header == LOSS_HEADER {
        let projection = path.file_stem().is_some_and(|s| s == "projection");
        (SeriesKind::BatchLoss { projection }, 2)
    } else {
        return Err(Error::format(format!("{}: unrecognised CSV header {header:?}", path.display())));
    };
    let mut points = Vec::new();
    let mut algorithm = None;
    for (n, line) in lines.enumerate() {
        let f: Vec<&str> = line.split(',').collect();
        let bad = || Error::format(format!("{}: bad row {}", path.display(), n + 2));
        let x: f64 = f.first().and_then(|v| v.parse().ok()).ok_or_else(bad)?;
        let y: f64 = f.get(ycol).and_then(|v| v.parse().ok()).ok_or_else(bad)?;
        if kind == SeriesKind::AfterStateValue {
            algorithm = f.get(7).map(|s| s.to_string());
        }
        points.push((x, y));
    }
    let mut label = label_for(path);
    if let Some(a) = algorithm {
        if !label.contains(&a) {
            label = format!("{label} ({a})");
        }
    }
    Ok((kind, Series { label, points: downsample(&points) }))
}

fn downsample(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    if points.len() <= MAX_POINTS {
        return points.to_vec();
    }
    (0..MAX_POINTS)
        .map(|b| {
            let lo = b * points.len() / MAX_POINTS;
            let hi = (b + 1) * points.len() / MAX_POINTS;
            let bin = &points[lo..hi];
            let n = bin.len() as f64;
            (bin.iter().map(|p| p.0).sum::<f64>() / n, bin.iter().map(|p| p.1).sum::<f64>() / n)
        })
        .collect()
}

fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    (0..=4).map(|i| lo + (hi - lo) * i as f64 / 4.0).collect()
}

fn fmt_tick(v: f64) -> String {
    if v != 0.0 && (v.abs() >= 1e5 || v.abs() < 1e-3) {
        format!("{v:.1e}")
    } else if v.fract() == 0.0 {
        format!("{v:.0}")
    } else {
        format!("{v:.3}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// One line chart; identical input gives identical bytes.
pub fn render_svg(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    let (w, h) = (900.0, 540.0);
    let (left, right, top, bottom) = (80.0, 250.0, 50.0, 60.0);
    let pw = w - left - right;
    let ph = h - top - bottom;
    let all = series.iter().flat_map(|s| s.points.iter());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in all.filter(|p| p.0.is_finite() && p.1.is_finite()) {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x1 <= x0 {
        x1 = x0 + 1.0;
    }
    if y1 <= y0 {
        y0 -= 0.5;
        y1 += 0.5;
    }
    let sx = |x: f64| left + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| top + (1.0 - (y - y0) / (y1 - y0)) * ph;

    let mut out = String::new();
    writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#).unwrap();
    writeln!(out, r#"<rect width="{w}" height="{h}" fill="white"/>"#).unwrap();
    writeln!(out, r#"<text x="{}" y="28" text-anchor="middle" font-size="16">{}</text>"#, left + pw / 2.0, escape(title)).unwrap();
    writeln!(out, r#"<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#).unwrap();
    for t in ticks(x0, x1) {
        let x = sx(t);
        writeln!(out, r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/>"#, top + ph, top + ph + 5.0).unwrap();
        writeln!(out, r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, top + ph + 20.0, fmt_tick(t)).unwrap();
    }
    for t in ticks(y0, y1) {
        let y = sy(t);
        writeln!(out, r#"<line x1="{:.2}" y1="{y:.2}" x2="{left}" y2="{y:.2}" stroke="black"/>"#, left - 5.0).unwrap();
        writeln!(out, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#, left - 8.0, y + 4.0, fmt_tick(t)).unwrap();
    }
    writeln!(out, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, left + pw / 2.0, h - 15.0, escape(x_label)).unwrap();
    writeln!(
        out,
        r#"<text x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">{}</text>"#,
        top + ph / 2.0,
        top + ph / 2.0,
        escape(y_label)
    )
    .unwrap();
    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<String> = s
            .points
            .iter()
            .filter(|p| p.0.is_finite() && p.1.is_finite())
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        writeln!(
            out,
            r#"<polyline data-label="{}" fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            escape(&s.label),
            pts.join(" ")
        )
        .unwrap();
        let ly = top + 10.0 + 18.0 * i as f64;
        let lx = left + pw + 15.0;
        writeln!(out, r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="3"/>"#, lx + 20.0).unwrap();
        writeln!(out, r#"<text x="{}" y="{:.2}">{}</text>"#, lx + 26.0, ly + 4.0, escape(&s.label)).unwrap();
    }
    out.push_str("</svg>\n");
    out
}

fn with_suffix(out: &Path, suffix: &str) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "plot".into());
    out.with_file_name(format!("{stem}{suffix}.svg"))
}

/// Renders the after-state value chart of all metrics files to `out`, and the
/// batch-loss chart (titled projection error when every loss file comes from a
/// dual-network run) to `<out>_loss.svg`, or to `out` when no metrics files are
/// given. Returns the written paths.
pub fn plot(files: &[PathBuf], out: &Path) -> Result<Vec<PathBuf>> {
    if files.is_empty() {
        return Err(Error::usage("plot needs at least one input file"));
    }
    let mut values = Vec::new();
    let mut losses = Vec::new();
    let mut all_projection = true;
    for f in files {
        match read_series(f)? {
            (SeriesKind::AfterStateValue, s) => values.push(s),
            (SeriesKind::BatchLoss { projection }, s) => {
                all_projection &= projection;
                losses.push(s);
            }
        }
    }
    let mut written = Vec::new();
    if !values.is_empty() {
        fs::write(out, render_svg("After-state values", "iteration", "mean after-state value", &values))?;
        written.push(out.to_path_buf());
    }
    if !losses.is_empty() {
        let path = if values.is_empty() { out.to_path_buf() } else { with_suffix(out, "_loss") };
        let (title, y) = if all_projection {
            ("Projection error", "projection error")
        } else {
            ("Batch training error", "batch loss after step")
        };
        fs::write(&path, render_svg(title, "iteration", y, &losses))?;
        written.push(path);
    }
    Ok(written)
}
