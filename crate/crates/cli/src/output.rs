//! Report envelope, atomic file output, CSV and SVG rendering.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::commands::CliError;

pub const SCHEMA_VERSION: u32 = 1;

/// What a report is about: a family, or a pair of matrices.
#[derive(Debug, Clone, Serialize)]
pub struct Subject {
    pub name: Option<String>,
    pub kind: String,
    pub dim: usize,
    /// SHA-256 of the canonical serialization of the input(s).
    pub digest: String,
}

#[derive(Debug, Serialize)]
pub struct Report<'a> {
    pub schema_version: u32,
    pub command: &'a str,
    pub config: &'a BTreeMap<&'static str, Value>,
    pub family: &'a Subject,
    pub status: &'a str,
    pub result: &'a Value,
    pub timings: Timings,
}

#[derive(Debug, Serialize)]
pub struct Timings {
    pub total_ms: f64,
}

pub fn digest(parts: &[&[u8]]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update(p);
    }
    format!("{:x}", h.finalize())
}

/// Write via a temporary file in the target directory and rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let err = |e: std::io::Error| CliError::Output(format!("{}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(err)?;
    tmp.write_all(bytes).map_err(err)?;
    tmp.flush().map_err(err)?;
    tmp.persist(path).map_err(|e| err(e.error))?;
    Ok(())
}

pub fn emit(report: &Report<'_>, out: Option<&Path>) -> Result<(), CliError> {
    let mut text = serde_json::to_vec_pretty(report).map_err(|e| CliError::Output(e.to_string()))?;
    text.push(b'\n');
    match out {
        Some(p) => write_atomic(p, &text),
        None => std::io::stdout().write_all(&text).map_err(|e| CliError::Output(e.to_string())),
    }
}

/// `lambda,mu1,…,mud` with 17 significant digits.
pub fn curves_csv(rows: &[(f64, Vec<f64>)]) -> String {
    let d = rows.first().map(|r| r.1.len()).unwrap_or(0);
    let mut s = String::from("lambda");
    for j in 1..=d {
        write!(s, ",mu{j}").unwrap();
    }
    s.push('\n');
    for (l, vals) in rows {
        write!(s, "{l:.16e}").unwrap();
        for v in vals {
            write!(s, ",{v:.16e}").unwrap();
        }
        s.push('\n');
    }
    s
}

const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"];

/// One polyline per sorted eigenvalue curve, a frame and the zero axis.
pub fn curves_svg(rows: &[(f64, Vec<f64>)]) -> String {
    let (w, h, pad) = (800.0, 500.0, 40.0);
    let d = rows.first().map(|r| r.1.len()).unwrap_or(0);
    let (x0, x1) = (rows.first().map(|r| r.0).unwrap_or(0.0), rows.last().map(|r| r.0).unwrap_or(1.0));
    let (mut y0, mut y1) = rows
        .iter()
        .flat_map(|r| r.1.iter().copied())
        .fold((0.0f64, 0.0f64), |(a, b), v| (a.min(v), b.max(v)));
    if y1 - y0 <= 0.0 {
        y0 -= 1.0;
        y1 += 1.0;
    }
    let sx = |x: f64| pad + (x - x0) / (x1 - x0).max(f64::MIN_POSITIVE) * (w - 2.0 * pad);
    let sy = |y: f64| h - pad - (y - y0) / (y1 - y0) * (h - 2.0 * pad);

    let mut s = String::new();
    writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#).unwrap();
    writeln!(
        s,
        r#"<rect x="{pad}" y="{pad}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        w - 2.0 * pad,
        h - 2.0 * pad
    )
    .unwrap();
    let zy = sy(0.0);
    writeln!(s, r##"<line x1="{pad}" y1="{zy:.3}" x2="{}" y2="{zy:.3}" stroke="#888" stroke-dasharray="4 3"/>"##, w - pad).unwrap();
    for j in 0..d {
        let pts: Vec<String> = rows.iter().map(|(l, v)| format!("{:.3},{:.3}", sx(*l), sy(v[j]))).collect();
        writeln!(
            s,
            r#"<polyline fill="none" stroke="{}" stroke-width="1.5" points="{}"/>"#,
            PALETTE[j % PALETTE.len()],
            pts.join(" ")
        )
        .unwrap();
    }
    writeln!(s, r#"<text x="{pad}" y="{}" font-size="12">{x0}</text>"#, h - pad / 3.0).unwrap();
    writeln!(s, r#"<text x="{}" y="{}" font-size="12" text-anchor="end">{x1}</text>"#, w - pad, h - pad / 3.0).unwrap();
    s.push_str("</svg>\n");
    s
}

/// Zeros of each sorted curve by linear interpolation between nodes.
pub fn zero_crossings(rows: &[(f64, Vec<f64>)]) -> Vec<Vec<f64>> {
    let d = rows.first().map(|r| r.1.len()).unwrap_or(0);
    (0..d)
        .map(|j| {
            rows.windows(2)
                .filter_map(|p| {
                    let (la, va) = (p[0].0, p[0].1[j]);
                    let (lb, vb) = (p[1].0, p[1].1[j]);
                    let crosses = (va > 0.0 && vb <= 0.0) || (va < 0.0 && vb >= 0.0);
                    crosses.then(|| if vb == 0.0 { lb } else { la + va / (va - vb) * (lb - la) })
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let rows = vec![(0.0, vec![1.0, -0.5]), (0.1, vec![0.9, 1.0 / 3.0])];
        let csv = curves_csv(&rows);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "lambda,mu1,mu2");
        assert_eq!(lines[1], "0.0000000000000000e0,1.0000000000000000e0,-5.0000000000000000e-1");
        let third: f64 = lines[2].split(',').nth(2).unwrap().parse().unwrap();
        assert_eq!(third, 1.0 / 3.0);
    }

    #[test]
    fn crossings_interpolate() {
        let rows = vec![(0.0, vec![1.0]), (1.0, vec![-1.0]), (2.0, vec![-2.0])];
        assert_eq!(zero_crossings(&rows), vec![vec![0.5]]);
    }

    #[test]
    fn svg_has_one_polyline_per_curve() {
        let rows = vec![(0.0, vec![1.0, 2.0, 3.0]), (1.0, vec![-1.0, 0.0, 1.0])];
        let svg = curves_svg(&rows);
        assert_eq!(svg.matches("<polyline").count(), 3);
        assert!(svg.contains("stroke-dasharray"));
    }

    #[test]
    fn digest_is_sha256() {
        assert_eq!(digest(&[b"abc"]), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }
}
