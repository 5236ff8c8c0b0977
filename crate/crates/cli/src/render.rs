use std::fmt::Write as _;

use beltrami_core::charts::MetricAt;
use beltrami_core::{Chart, ResidualReport};
use serde::Serialize;

use crate::Format;

#[derive(Serialize)]
pub struct MetricOutput {
    pub chart: String,
    pub coords: Vec<String>,
    pub point: Vec<f64>,
    pub g: Vec<Vec<f64>>,
    pub g_inv: Vec<Vec<f64>>,
}

impl MetricOutput {
    pub fn new(chart: &Chart, point: &[f64], metric: &MetricAt) -> Self {
        let rows = |m: &beltrami_core::DMatrix<f64>| -> Vec<Vec<f64>> {
            m.row_iter().map(|r| r.iter().copied().collect()).collect()
        };
        Self {
            chart: chart.name().to_string(),
            coords: chart.coords().to_vec(),
            point: point.to_vec(),
            g: rows(&metric.g),
            g_inv: rows(&metric.g_inv),
        }
    }
}

#[derive(Serialize)]
pub struct ChristoffelEntry {
    pub i: String,
    pub k: String,
    pub l: String,
    pub value: f64,
}

#[derive(Serialize)]
pub struct ChristoffelOutput {
    pub chart: String,
    pub point: Vec<f64>,
    pub entries: Vec<ChristoffelEntry>,
}

#[derive(Serialize)]
pub struct DeltaOutput {
    pub re: f64,
    pub im: f64,
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

fn csv_text(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}

fn matrix_block(out: &mut String, title: &str, coords: &[String], m: &[Vec<f64>]) {
    let _ = writeln!(out, "{title}");
    let _ = write!(out, "{:>10}", "");
    for c in coords {
        let _ = write!(out, " {c:>16}");
    }
    out.push('\n');
    for (c, row) in coords.iter().zip(m) {
        let _ = write!(out, "{c:>10}");
        for v in row {
            let _ = write!(out, " {v:>16.10}");
        }
        out.push('\n');
    }
}

pub fn metric(m: &MetricOutput, format: Format) -> String {
    match format {
        Format::Json => json(m),
        Format::Csv => {
            let mut rows = Vec::new();
            for (name, matrix) in [("g", &m.g), ("g_inv", &m.g_inv)] {
                for (i, row) in matrix.iter().enumerate() {
                    for (k, v) in row.iter().enumerate() {
                        rows.push(vec![name.to_string(), m.coords[i].clone(), m.coords[k].clone(), v.to_string()]);
                    }
                }
            }
            csv_text(&["tensor", "i", "k", "value"], rows)
        }
        Format::Pretty => {
            let mut out = format!("chart {} at {:?}\n", m.chart, m.point);
            matrix_block(&mut out, "g_ij", &m.coords, &m.g);
            matrix_block(&mut out, "g^ij", &m.coords, &m.g_inv);
            out
        }
    }
}

pub fn christoffel(c: &ChristoffelOutput, format: Format) -> String {
    match format {
        Format::Json => json(c),
        Format::Csv => csv_text(
            &["i", "k", "l", "value"],
            c.entries
                .iter()
                .map(|e| vec![e.i.clone(), e.k.clone(), e.l.clone(), e.value.to_string()]),
        ),
        Format::Pretty => {
            let mut out = format!("chart {} at {:?}\n", c.chart, c.point);
            if c.entries.is_empty() {
                out.push_str("all Christoffel symbols vanish\n");
            }
            for e in &c.entries {
                let _ = writeln!(out, "Γ^{:<8} {:>8} {:>8}  {:>20.12}", e.i, e.k, e.l, e.value);
            }
            out
        }
    }
}

pub fn delta(d: &DeltaOutput, format: Format) -> String {
    match format {
        Format::Json => json(d),
        Format::Csv => csv_text(&["re", "im"], [vec![d.re.to_string(), d.im.to_string()]]),
        Format::Pretty => {
            let sign = if d.im.is_sign_negative() { '-' } else { '+' };
            format!("{} {sign} {}i\n", d.re, d.im.abs())
        }
    }
}

pub fn reports(reports: &[ResidualReport], expected: &[bool], format: Format) -> String {
    match format {
        Format::Json => json(&reports),
        Format::Csv => csv_text(
            &[
                "identity",
                "chart",
                "dim",
                "seed",
                "samples",
                "max_abs_residual",
                "tolerance",
                "pass",
                "expected_pass",
                "psi_variant",
                "argmax_point",
            ],
            reports.iter().zip(expected).map(|(r, e)| {
                vec![
                    r.identity.to_string(),
                    r.chart.clone(),
                    r.dim.to_string(),
                    r.seed.to_string(),
                    r.samples.to_string(),
                    format!("{:e}", r.max_abs_residual),
                    format!("{:e}", r.tolerance),
                    r.pass.to_string(),
                    e.to_string(),
                    r.psi_variant.map(|p| p.to_string()).unwrap_or_default(),
                    r.argmax_point.iter().map(f64::to_string).collect::<Vec<_>>().join(";"),
                ]
            }),
        ),
        Format::Pretty => {
            let mut out = format!(
                "{:<8} {:<16} {:>4} {:>12} {:>6} {:>9}  {}\n",
                "identity", "chart", "dim", "residual", "pass", "expected", "psi"
            );
            for (r, &e) in reports.iter().zip(expected) {
                let verdict = if r.pass { "yes" } else { "no" };
                let matches = if r.pass == e { "ok" } else { "MISMATCH" };
                let psi = r.psi_variant.map_or("", |p| p.label());
                let _ = writeln!(
                    out,
                    "{:<8} {:<16} {:>4} {:>12.3e} {:>6} {:>9}  {}",
                    r.identity.name(),
                    r.chart,
                    r.dim,
                    r.max_abs_residual,
                    verdict,
                    matches,
                    psi
                );
            }
            if let Some(first) = reports.first() {
                let _ = writeln!(
                    out,
                    "seed {}, {} samples, tolerance {:e}",
                    first.seed, first.samples, first.tolerance
                );
            }
            out
        }
    }
}
