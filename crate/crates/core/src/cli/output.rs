//! CSV and SVG serialization of time-series bundles.
//!
//! CSV layout: `#` comment lines, then a header `t,<label>,...`, then one
//! row per sample. Floats use Rust's shortest round-trip formatting, lines
//! end in `\n`.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::experiments::TimeSeries;

fn check_bundle(series: &[TimeSeries]) -> Result<()> {
    let first = series.first().ok_or_else(|| Error::invalid("no series to write"))?;
    if first.is_empty() {
        return Err(Error::invalid("series has no samples"));
    }
    if let Some(bad) = series.iter().find(|s| s.times != first.times) {
        return Err(Error::invalid(format!(
            "series '{}' is sampled on a different grid",
            bad.label
        )));
    }
    Ok(())
}

/// Renders the CSV document; `comments` become `# ` lines.
pub fn render_csv(comments: &[String], series: &[TimeSeries]) -> Result<String> {
    check_bundle(series)?;
    let mut out = String::new();
    for c in comments {
        writeln!(out, "# {c}").expect("writing to a String");
    }
    out.push('t');
    for s in series {
        if s.label.contains(',') || s.label.contains('\n') {
            return Err(Error::invalid(format!("label '{}' contains a separator", s.label)));
        }
        out.push(',');
        out.push_str(&s.label);
    }
    out.push('\n');
    for (k, t) in series[0].times.iter().enumerate() {
        write!(out, "{t:?}").expect("writing to a String");
        for s in series {
            write!(out, ",{:?}", s.values[k]).expect("writing to a String");
        }
        out.push('\n');
    }
    Ok(out)
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::File::create(path)
        .and_then(|mut f| f.write_all(contents.as_bytes()))
        .map_err(|e| Error::io(path, e))
}

pub fn emit_csv(path: &Path, comments: &[String], series: &[TimeSeries]) -> Result<()> {
    write_file(path, &render_csv(comments, series)?)
}

/// Parses a CSV written by [`render_csv`] back into series (linear values
/// only).
pub fn parse_csv(text: &str, path: &Path) -> Result<Vec<TimeSeries>> {
    let perr = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.starts_with('#') && !l.trim().is_empty());
    let (hline, header) = lines.next().ok_or_else(|| perr(0, "no header line".into()))?;
    let cols: Vec<&str> = header.split(',').collect();
    if cols.len() < 2 || cols[0].trim() != "t" {
        return Err(perr(hline, "header must be `t,<label>,...`".into()));
    }
    let labels: Vec<String> = cols[1..].iter().map(|s| s.trim().to_string()).collect();
    let mut times = Vec::new();
    let mut values: Vec<Vec<f64>> = vec![Vec::new(); labels.len()];
    for (no, line) in lines {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != cols.len() {
            return Err(perr(no, format!("expected {} fields, found {}", cols.len(), fields.len())));
        }
        let parse = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| perr(no, format!("'{s}' is not a number")))
        };
        times.push(parse(fields[0])?);
        for (col, f) in values.iter_mut().zip(&fields[1..]) {
            col.push(parse(f)?);
        }
    }
    if times.is_empty() {
        return Err(perr(hline, "no data rows".into()));
    }
    labels
        .into_iter()
        .zip(values)
        .map(|(label, v)| TimeSeries::new(label, times.clone(), v))
        .collect()
}

pub fn read_csv(path: &Path) -> Result<Vec<TimeSeries>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_csv(&text, path)
}

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 160.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];
/// Lower clip of the log axis, in decades.
const LOG_FLOOR: f64 = -300.0;

fn plotted(s: &TimeSeries, log_y: bool) -> Vec<f64> {
    if !log_y {
        return s.values.clone();
    }
    let log10 = |ln: f64| (ln / std::f64::consts::LN_10).max(LOG_FLOOR);
    match &s.log_values {
        Some(l) => l.iter().map(|&x| log10(x)).collect(),
        None => s
            .values
            .iter()
            .map(|&v| if v > 0.0 { log10(v.ln()) } else { LOG_FLOOR })
            .collect(),
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Single-file line plot, one polyline per series. With `log_y` the value
/// axis shows `log10(value)`, taken from the log companion when present.
pub fn render_svg(title: &str, series: &[TimeSeries], log_y: bool) -> Result<String> {
    check_bundle(series)?;
    let times = &series[0].times;
    let ys: Vec<Vec<f64>> = series.iter().map(|s| plotted(s, log_y)).collect();
    let (t_lo, t_hi) = (times[0], *times.last().expect("nonempty"));
    let finite = ys.iter().flatten().copied().filter(|v| v.is_finite());
    let (mut y_lo, mut y_hi) = finite.fold((f64::MAX, f64::MIN), |(l, h), v| (l.min(v), h.max(v)));
    if y_lo > y_hi {
        (y_lo, y_hi) = (0.0, 1.0);
    }
    if !log_y {
        y_lo = y_lo.min(0.0);
    }
    if y_hi - y_lo < 1e-300 {
        y_hi = y_lo + 1.0;
    }
    let t_span = if t_hi > t_lo { t_hi - t_lo } else { 1.0 };
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let x = |t: f64| LEFT + (t - t_lo) / t_span * pw;
    let y = |v: f64| TOP + (y_hi - v) / (y_hi - y_lo) * ph;

    let mut svg = String::new();
    let w = &mut svg;
    let _ = writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(w, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        w,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
        LEFT + pw / 2.0,
        escape(title)
    );
    let _ = writeln!(
        w,
        r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    for i in 0..=4 {
        let f = i as f64 / 4.0;
        let t = t_lo + f * t_span;
        let v = y_lo + f * (y_hi - y_lo);
        let _ = writeln!(
            w,
            r#"<line x1="{0:.2}" y1="{1}" x2="{0:.2}" y2="{2}" stroke="black"/><text x="{0:.2}" y="{3}" text-anchor="middle">{4:.3e}</text>"#,
            x(t),
            TOP + ph,
            TOP + ph + 5.0,
            TOP + ph + 20.0,
            t
        );
        let _ = writeln!(
            w,
            r#"<line x1="{0}" y1="{1:.2}" x2="{2}" y2="{1:.2}" stroke="black"/><text x="{3}" y="{4:.2}" text-anchor="end">{5:.3}</text>"#,
            LEFT - 5.0,
            y(v),
            LEFT,
            LEFT - 8.0,
            y(v) + 4.0,
            v
        );
    }
    let _ = writeln!(
        w,
        r#"<text x="{}" y="{}" text-anchor="middle">t (s)</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 15.0
    );
    let y_label = if log_y { "log10(value)" } else { "value" };
    let _ = writeln!(
        w,
        r#"<text x="20" y="{0}" text-anchor="middle" transform="rotate(-90 20 {0})">{1}</text>"#,
        TOP + ph / 2.0,
        y_label
    );
    for (i, (s, vals)) in series.iter().zip(&ys).enumerate() {
        let color = COLORS[i % COLORS.len()];
        let points: Vec<String> = times
            .iter()
            .zip(vals)
            .filter(|(_, v)| v.is_finite())
            .map(|(&t, &v)| format!("{:.2},{:.2}", x(t), y(v)))
            .collect();
        let _ = writeln!(
            w,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            points.join(" ")
        );
        let ly = TOP + 20.0 + 18.0 * i as f64;
        let _ = writeln!(
            w,
            r#"<line x1="{0}" y1="{1}" x2="{2}" y2="{1}" stroke="{color}" stroke-width="2"/><text x="{3}" y="{4}">{5}</text>"#,
            WIDTH - RIGHT + 10.0,
            ly,
            WIDTH - RIGHT + 35.0,
            WIDTH - RIGHT + 40.0,
            ly + 4.0,
            escape(&s.label)
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

pub fn emit_svg(path: &Path, title: &str, series: &[TimeSeries], log_y: bool) -> Result<()> {
    write_file(path, &render_svg(title, series, log_y)?)
}
