//! Deterministic SVG rendering of result tables: line plots with one series
//! per value column, and heatmaps over (x, y, value) triplets.  No external
//! renderer; the output is a plain text file written from the table alone.

use crate::error::{QifError, Result};
use crate::table::ResultTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    Line,
    Heatmap,
}

const W: f64 = 720.0;
const H: f64 = 480.0;
const MARGIN: f64 = 60.0;
const SERIES_COLORS: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

pub fn render(table: &ResultTable, kind: PlotKind) -> Result<String> {
    if table.is_empty() {
        return Err(QifError::config("plot: table has no rows"));
    }
    match kind {
        PlotKind::Line => render_line(table),
        PlotKind::Heatmap => render_heatmap(table),
    }
}

fn fmt(v: f64) -> String {
    format!("{v:.3}")
}

fn svg_header(title: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" \
         viewBox=\"0 0 {W} {H}\">\n\
         <rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\" \
         text-anchor=\"middle\">{title}</text>\n",
        W / 2.0
    )
}

fn axes_box() -> String {
    format!(
        "<rect x=\"{MARGIN}\" y=\"{MARGIN}\" width=\"{}\" height=\"{}\" \
         fill=\"none\" stroke=\"black\"/>\n",
        W - 2.0 * MARGIN,
        H - 2.0 * MARGIN
    )
}

fn scale(v: f64, lo: f64, hi: f64, out_lo: f64, out_hi: f64) -> f64 {
    if hi == lo {
        return 0.5 * (out_lo + out_hi);
    }
    out_lo + (v - lo) / (hi - lo) * (out_hi - out_lo)
}

/// Line plot: first column is x, every later column is one series.
fn render_line(table: &ResultTable) -> Result<String> {
    if table.columns.len() < 2 {
        return Err(QifError::config("plot: line plot needs >= 2 columns"));
    }
    let xs: Vec<f64> = table.rows.iter().map(|r| r[0]).collect();
    let (x_lo, x_hi) = bounds(&xs);
    let mut y_lo = f64::INFINITY;
    let mut y_hi = f64::NEG_INFINITY;
    for r in &table.rows {
        for v in &r[1..] {
            y_lo = y_lo.min(*v);
            y_hi = y_hi.max(*v);
        }
    }
    if y_lo == y_hi {
        y_lo -= 0.5;
        y_hi += 0.5;
    }
    let title = table
        .metadata
        .get("experiment")
        .cloned()
        .unwrap_or_else(|| "line".into());
    let mut out = svg_header(&title);
    out.push_str(&axes_box());
    for (si, name) in table.columns[1..].iter().enumerate() {
        let color = SERIES_COLORS[si % SERIES_COLORS.len()];
        let mut points = Vec::with_capacity(xs.len());
        for r in &table.rows {
            let px = scale(r[0], x_lo, x_hi, MARGIN, W - MARGIN);
            let py = scale(r[si + 1], y_lo, y_hi, H - MARGIN, MARGIN);
            points.push(format!("{},{}", fmt(px), fmt(py)));
        }
        out.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
            points.join(" ")
        ));
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" \
             fill=\"{color}\">{name}</text>\n",
            W - MARGIN + 4.0,
            MARGIN + 14.0 * si as f64
        ));
    }
    out.push_str(&tick_labels(x_lo, x_hi, y_lo, y_hi, &table.columns[0]));
    out.push_str("</svg>\n");
    Ok(out)
}

/// Heatmap over the first three columns (x, y, value) of a rectangular grid.
fn render_heatmap(table: &ResultTable) -> Result<String> {
    if table.columns.len() < 3 {
        return Err(QifError::config("plot: heatmap needs >= 3 columns"));
    }
    let mut xs: Vec<f64> = table.rows.iter().map(|r| r[0]).collect();
    let mut ys: Vec<f64> = table.rows.iter().map(|r| r[1]).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    ys.sort_by(f64::total_cmp);
    ys.dedup();
    if xs.len() * ys.len() != table.rows.len() {
        return Err(QifError::config(
            "plot: heatmap needs a full rectangular (x, y) grid",
        ));
    }
    let vals: Vec<f64> = table.rows.iter().map(|r| r[2]).collect();
    let (v_lo, v_hi) = bounds(&vals);
    let (x_lo, x_hi) = bounds(&xs);
    let (y_lo, y_hi) = bounds(&ys);
    let cell_w = (W - 2.0 * MARGIN) / xs.len() as f64;
    let cell_h = (H - 2.0 * MARGIN) / ys.len() as f64;
    let title = table
        .metadata
        .get("experiment")
        .cloned()
        .unwrap_or_else(|| "heatmap".into());
    let mut out = svg_header(&title);
    for r in &table.rows {
        let xi = xs.iter().position(|&x| x == r[0]).unwrap();
        let yi = ys.iter().position(|&y| y == r[1]).unwrap();
        let px = MARGIN + xi as f64 * cell_w;
        let py = H - MARGIN - (yi + 1) as f64 * cell_h;
        let t = if v_hi == v_lo {
            0.0
        } else {
            (r[2] - v_lo) / (v_hi - v_lo)
        };
        out.push_str(&format!(
            "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\"/>\n",
            fmt(px),
            fmt(py),
            fmt(cell_w + 0.5),
            fmt(cell_h + 0.5),
            viridis_like(t)
        ));
    }
    out.push_str(&axes_box());
    out.push_str(&tick_labels(x_lo, x_hi, y_lo, y_hi, &table.columns[0]));
    out.push_str("</svg>\n");
    Ok(out)
}

fn bounds(v: &[f64]) -> (f64, f64) {
    let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    (lo, hi)
}

fn tick_labels(x_lo: f64, x_hi: f64, y_lo: f64, y_hi: f64, x_name: &str) -> String {
    format!(
        "<text x=\"{MARGIN}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\">{}</text>\n\
         <text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" \
         text-anchor=\"end\">{}</text>\n\
         <text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" \
         text-anchor=\"middle\">{x_name}</text>\n\
         <text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\">{}</text>\n\
         <text x=\"{}\" y=\"{MARGIN}\" font-family=\"sans-serif\" font-size=\"11\">{}</text>\n",
        H - MARGIN + 16.0,
        fmt(x_lo),
        W - MARGIN,
        H - MARGIN + 16.0,
        fmt(x_hi),
        W / 2.0,
        H - MARGIN + 32.0,
        10.0,
        H - MARGIN,
        fmt(y_lo),
        10.0,
        fmt(y_hi),
    )
}

fn viridis_like(t: f64) -> String {
    // compact three-anchor gradient; enough for inspection plots
    let t = t.clamp(0.0, 1.0);
    let anchors = [(68u16, 1u16, 84u16), (33, 145, 140), (253, 231, 37)];
    let (lo, hi, u) = if t < 0.5 {
        (anchors[0], anchors[1], t * 2.0)
    } else {
        (anchors[1], anchors[2], (t - 0.5) * 2.0)
    };
    let mix = |a: u16, b: u16| -> u16 { (a as f64 + (b as f64 - a as f64) * u).round() as u16 };
    format!("#{:02x}{:02x}{:02x}", mix(lo.0, hi.0), mix(lo.1, hi.1), mix(lo.2, hi.2))
}
