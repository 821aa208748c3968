//! Static SVG charts. Output depends only on the input values: fixed
//! viewBox, fixed number formatting, no timestamps.

use std::fmt::Write as _;

use crate::error::{Error, Result};

const W: f64 = 640.0;
const H: f64 = 400.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;
const COLORS: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"];

pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn header(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {W} {H}" width="{W}" height="{H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#, W / 2.0, escape(title));
}

fn range(values: impl Iterator<Item = f64>) -> Result<(f64, f64)> {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidArgument("nothing finite to plot".into()));
    }
    Ok(if hi > lo { (lo, hi) } else { (lo - 0.5, hi + 0.5) })
}

fn axes(out: &mut String, x: (f64, f64), y: (f64, f64), x_label: &str, y_label: &str, log_y: bool) {
    let (x1, y1) = (W - RIGHT, H - BOTTOM);
    let _ = writeln!(out, r#"<path d="M{LEFT} {TOP}V{y1}H{x1}" fill="none" stroke="black"/>"#);
    for i in 0..=4 {
        let f = i as f64 / 4.0;
        let px = LEFT + f * (x1 - LEFT);
        let py = y1 - f * (y1 - TOP);
        let xv = x.0 + f * (x.1 - x.0);
        let yv = y.0 + f * (y.1 - y.0);
        let ytext = if log_y { format!("1e{yv:.1}") } else { format!("{yv:.3e}") };
        let _ = writeln!(out, r#"<text x="{px:.2}" y="{:.2}" text-anchor="middle">{xv:.3e}</text>"#, y1 + 16.0);
        let _ = writeln!(out, r#"<text x="{:.2}" y="{py:.2}" text-anchor="end">{ytext}</text>"#, LEFT - 4.0);
    }
    let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, (LEFT + x1) / 2.0, H - 12.0, escape(x_label));
    let _ = writeln!(
        out,
        r#"<text x="14" y="{:.2}" text-anchor="middle" transform="rotate(-90 14 {:.2})">{}</text>"#,
        (TOP + y1) / 2.0,
        (TOP + y1) / 2.0,
        escape(y_label)
    );
}

fn legend(out: &mut String, labels: &[&str]) {
    for (i, l) in labels.iter().enumerate() {
        let y = TOP + 16.0 * i as f64;
        let c = COLORS[i % COLORS.len()];
        let x = W - RIGHT + 10.0;
        let _ = writeln!(out, r#"<rect x="{x}" y="{:.2}" width="12" height="3" fill="{c}"/>"#, y - 4.0);
        let _ = writeln!(out, r#"<text x="{}" y="{y:.2}">{}</text>"#, x + 16.0, escape(l));
    }
}

/// Polylines of every series; `log_y` plots `log10 y` and drops `y <= 0`.
pub fn line_chart(title: &str, x_label: &str, y_label: &str, series: &[Series], log_y: bool) -> Result<String> {
    let tf = |y: f64| if log_y { y.log10() } else { y };
    let keep = |p: &&(f64, f64)| p.0.is_finite() && p.1.is_finite() && (!log_y || p.1 > 0.0);
    let x = range(series.iter().flat_map(|s| s.points.iter().filter(keep).map(|p| p.0)))?;
    let y = range(series.iter().flat_map(|s| s.points.iter().filter(keep).map(|p| tf(p.1))))?;
    let mut out = String::new();
    header(&mut out, title);
    axes(&mut out, x, y, x_label, y_label, log_y);
    let sx = |v: f64| LEFT + (v - x.0) / (x.1 - x.0) * (W - RIGHT - LEFT);
    let sy = |v: f64| H - BOTTOM - (tf(v) - y.0) / (y.1 - y.0) * (H - BOTTOM - TOP);
    for (i, s) in series.iter().enumerate() {
        let pts: Vec<String> = s.points.iter().filter(keep).map(|p| format!("{:.2},{:.2}", sx(p.0), sy(p.1))).collect();
        let c = COLORS[i % COLORS.len()];
        let _ = writeln!(out, r#"<polyline points="{}" fill="none" stroke="{c}" stroke-width="1.5"/>"#, pts.join(" "));
    }
    legend(&mut out, &series.iter().map(|s| s.label.as_str()).collect::<Vec<_>>());
    out.push_str("</svg>\n");
    Ok(out)
}

/// One bar per `(label, value)`, baseline at zero.
pub fn bar_chart(title: &str, x_label: &str, y_label: &str, bars: &[(String, f64)]) -> Result<String> {
    if bars.is_empty() {
        return Err(Error::InvalidArgument("nothing to plot".into()));
    }
    let y = range(bars.iter().map(|b| b.1).chain([0.0]))?;
    let mut out = String::new();
    header(&mut out, title);
    axes(&mut out, (0.0, bars.len() as f64), y, x_label, y_label, false);
    let slot = (W - RIGHT - LEFT) / bars.len() as f64;
    let sy = |v: f64| H - BOTTOM - (v - y.0) / (y.1 - y.0) * (H - BOTTOM - TOP);
    for (i, (label, v)) in bars.iter().enumerate() {
        let x = LEFT + slot * (i as f64 + 0.2);
        let (top, bottom) = (sy(v.max(0.0)), sy(v.min(0.0)));
        let c = COLORS[i % COLORS.len()];
        let _ = writeln!(
            out,
            r#"<rect x="{x:.2}" y="{top:.2}" width="{:.2}" height="{:.2}" fill="{c}"/>"#,
            slot * 0.6,
            bottom - top
        );
        let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, x + slot * 0.3, top - 4.0, escape(label));
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// Header and rows of a CSV file; empty cells become `None`.
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
}

impl Table {
    pub fn parse(text: &str) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
        let header = rdr
            .headers()
            .map_err(|e| Error::Format(e.to_string()))?
            .iter()
            .map(String::from)
            .collect();
        let mut rows = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(|e| Error::Format(e.to_string()))?;
            let row = rec
                .iter()
                .map(|c| {
                    if c.is_empty() {
                        Ok(None)
                    } else {
                        c.parse::<f64>().map(Some).map_err(|_| Error::Format(format!("not a number: {c}")))
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        Ok(Self { header, rows })
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    /// `(x, y)` over rows where both cells are present.
    pub fn pairs(&self, x: usize, y: usize) -> Vec<(f64, f64)> {
        self.rows.iter().filter_map(|r| Some((r[x]?, r[y]?))).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn charts_are_deterministic() {
        let s = vec![Series { label: "a<b".into(), points: vec![(0.0, 1.0), (1.0, 2.0), (2.0, 0.0)] }];
        let a = line_chart("t", "x", "y", &s, false).unwrap();
        assert_eq!(a, line_chart("t", "x", "y", &s, false).unwrap());
        assert!(a.contains("viewBox=\"0 0 640 400\"") && a.contains("a&lt;b"));
        let l = line_chart("t", "x", "y", &s, true).unwrap();
        assert!(l.contains("<polyline"));
        let b = bar_chart("D", "k", "D", &[("3".into(), 1.0), ("4".into(), 2.0)]).unwrap();
        assert_eq!(b.matches("<rect").count(), 3);
        assert!(bar_chart("D", "k", "D", &[]).is_err());
    }

    #[test]
    fn table_parses_blank_cells() {
        let t = Table::parse("t,a,b\n0,1,\n0.5,,2\n").unwrap();
        assert_eq!(t.column("b"), Some(2));
        assert_eq!(t.pairs(0, 1), vec![(0.0, 1.0)]);
        assert!(Table::parse("t\nx\n").is_err());
    }
}
