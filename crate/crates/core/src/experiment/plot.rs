//! Minimal deterministic SVG scatter plots of run outputs on a log2 axis.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlotKind {
    /// Family-averaged variance against layers, from a variance-scan CSV.
    Variance,
    /// Non-vanishing fractions against n, from an exact-minima CSV.
    Vanish,
}

impl FromStr for PlotKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "variance" => Ok(PlotKind::Variance),
            "vanish" => Ok(PlotKind::Vanish),
            _ => Err(Error::Parse(format!("unknown plot kind {s:?}"))),
        }
    }
}

const W: f64 = 640.0;
const H: f64 = 420.0;
const PAD_L: f64 = 60.0;
const PAD_R: f64 = 110.0;
const PAD_T: f64 = 20.0;
const PAD_B: f64 = 45.0;
const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"];

#[derive(Clone, Copy)]
enum Marker {
    Circle,
    Square,
    Triangle,
}

struct Point {
    n: usize,
    x: f64,
    y: f64,
    marker: Marker,
}

fn table(csv_text: &str) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    if csv_text.trim().is_empty() {
        return Ok((Vec::new(), Vec::new()));
    }
    let mut r = csv::Reader::from_reader(csv_text.as_bytes());
    let header = r.headers().map_err(|e| Error::Parse(e.to_string()))?.iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.map(|r| r.iter().map(String::from).collect()).map_err(|e| Error::Parse(e.to_string())))
        .collect::<Result<_>>()?;
    Ok((header, rows))
}

fn col(header: &[String], name: &str) -> Result<usize> {
    header
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| Error::Parse(format!("schema mismatch: missing column {name:?}")))
}

fn points(kind: PlotKind, csv_text: &str) -> Result<Vec<Point>> {
    let (header, rows) = table(csv_text)?;
    if header.is_empty() {
        return Ok(Vec::new());
    }
    let num = |s: &str| s.parse::<f64>().ok();
    let mut out = Vec::new();
    match kind {
        PlotKind::Variance => {
            let (cn, cl, co, cm, cv) =
                (col(&header, "n")?, col(&header, "layers")?, col(&header, "observable")?, col(&header, "mode")?, col(&header, "variance")?);
            for r in rows.iter().filter(|r| r[co] == super::scan::FAMILY_AVERAGE) {
                let (Some(n), Some(x), Some(v)) = (num(&r[cn]), num(&r[cl]), num(&r[cv])) else { continue };
                let marker = match r[cm].as_str() {
                    "uniform" => Marker::Circle,
                    "clifford" => Marker::Square,
                    _ => Marker::Triangle,
                };
                if v > 0.0 {
                    out.push(Point { n: n as usize, x, y: v.log2(), marker });
                }
            }
        }
        PlotKind::Vanish => {
            let (cn, ct, cv, cg) =
                (col(&header, "n")?, col(&header, "trial")?, col(&header, "value_vanish")?, col(&header, "gradient_vanish")?);
            for r in &rows {
                let Some(n) = num(&r[cn]) else { continue };
                let mean_row = r[ct] == "mean";
                for (c, marker) in [(cv, if mean_row { Marker::Square } else { Marker::Circle }), (cg, Marker::Triangle)] {
                    if c == cg && !mean_row {
                        continue;
                    }
                    if let Some(p) = num(&r[c]) {
                        if p < 1.0 {
                            out.push(Point { n: n as usize, x: n, y: (1.0 - p).log2(), marker });
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Renders `csv_text` as an SVG document. An empty input gives empty axes.
pub fn emit_plot(csv_text: &str, kind: PlotKind) -> Result<String> {
    let pts = points(kind, csv_text)?;
    let ns: BTreeSet<usize> = pts.iter().map(|p| p.n).collect();
    let (mut x0, mut x1) = pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.x), b.max(p.x)));
    if !x0.is_finite() {
        (x0, x1) = (0.0, 1.0);
    }
    if x1 - x0 < 1.0 {
        x1 = x0 + 1.0;
    }
    let span = x1 - x0;
    let (x0, x1) = (x0 - 0.05 * span, x1 + 0.05 * span);
    let guide_min = ns.iter().map(|&n| -(n as f64)).fold(0.0, f64::min);
    let ymin = pts.iter().map(|p| p.y).fold(guide_min, f64::min).floor() - 1.0;
    let ymax = pts.iter().map(|p| p.y).fold(0.0, f64::max).ceil();
    let sx = |x: f64| PAD_L + (x - x0) / (x1 - x0) * (W - PAD_L - PAD_R);
    let sy = |y: f64| PAD_T + (ymax - y) / (ymax - ymin) * (H - PAD_T - PAD_B);
    let color = |n: usize| PALETTE[ns.iter().position(|&m| m == n).unwrap_or(0) % PALETTE.len()];

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#);
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let (left, right, top, bottom) = (PAD_L, W - PAD_R, PAD_T, H - PAD_B);
    let _ = writeln!(s, r#"<rect x="{left}" y="{top}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#, right - left, bottom - top);
    let mut y = ymin.ceil() as i64;
    while y as f64 <= ymax {
        let py = sy(y as f64);
        let _ = writeln!(s, r#"<line x1="{:.2}" y1="{py:.2}" x2="{left}" y2="{py:.2}" stroke="black"/>"#, left - 4.0);
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="end">{y}</text>"#, left - 6.0, py + 4.0);
        y += 1;
    }
    let xs: BTreeSet<i64> = pts.iter().map(|p| p.x.round() as i64).collect();
    for x in &xs {
        let px = sx(*x as f64);
        let _ = writeln!(s, r#"<line x1="{px:.2}" y1="{bottom}" x2="{px:.2}" y2="{:.2}" stroke="black"/>"#, bottom + 4.0);
        let _ = writeln!(s, r#"<text x="{px:.2}" y="{:.2}" font-size="11" text-anchor="middle">{x}</text>"#, bottom + 16.0);
    }
    let (xlabel, ylabel) = match kind {
        PlotKind::Variance => ("layers", "log2 variance"),
        PlotKind::Vanish => ("qubits", "log2 non-vanishing fraction"),
    };
    let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="middle">{xlabel}</text>"#, (left + right) / 2.0, H - 8.0);
    let _ = writeln!(
        s,
        r#"<text x="14" y="{:.2}" font-size="12" text-anchor="middle" transform="rotate(-90 14 {:.2})">{ylabel}</text>"#,
        (top + bottom) / 2.0,
        (top + bottom) / 2.0
    );
    for &n in &ns {
        let py = sy(-(n as f64));
        let _ = writeln!(s, r#"<line x1="{left}" y1="{py:.2}" x2="{right}" y2="{py:.2}" stroke="{}" stroke-dasharray="4 3"/>"#, color(n));
    }
    for p in &pts {
        let (px, py, c) = (sx(p.x), sy(p.y), color(p.n));
        let _ = match p.marker {
            Marker::Circle => writeln!(s, r#"<circle cx="{px:.2}" cy="{py:.2}" r="4" fill="none" stroke="{c}"/>"#),
            Marker::Square => writeln!(s, r#"<rect x="{:.2}" y="{:.2}" width="8" height="8" fill="none" stroke="{c}"/>"#, px - 4.0, py - 4.0),
            Marker::Triangle => writeln!(
                s,
                r#"<polygon points="{px:.2},{:.2} {:.2},{:.2} {:.2},{:.2}" fill="none" stroke="{c}"/>"#,
                py - 5.0,
                px - 4.5,
                py + 3.5,
                px + 4.5,
                py + 3.5
            ),
        };
    }
    for (i, &n) in ns.iter().enumerate() {
        let ly = top + 14.0 + 16.0 * i as f64;
        let _ = writeln!(s, r#"<text x="{:.2}" y="{ly:.2}" font-size="11" fill="{}">n = {n}</text>"#, right + 10.0, color(n));
    }
    s.push_str("</svg>\n");
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_input_gives_axes() {
        let svg = emit_plot("", PlotKind::Variance).unwrap();
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
        let header_only = emit_plot("schema_version,n,layers,observable,mode,variance\n", PlotKind::Variance).unwrap();
        assert!(!header_only.contains("<circle"));
    }

    #[test]
    fn schema_mismatch_is_an_error() {
        assert!(emit_plot("a,b\n1,2\n", PlotKind::Variance).is_err());
        assert!("bogus".parse::<PlotKind>().is_err());
    }

    #[test]
    fn family_average_rows_are_plotted_with_guides() {
        let csv = "schema_version,n,layers,observable,mode,variance\n1,4,30,family_average,uniform,0.0625\n1,4,30,+XX,uniform,0.5\n";
        let svg = emit_plot(csv, PlotKind::Variance).unwrap();
        assert_eq!(svg.matches("<circle").count(), 1);
        assert!(svg.contains("stroke-dasharray"));
        assert_eq!(svg, emit_plot(csv, PlotKind::Variance).unwrap());
    }
}
