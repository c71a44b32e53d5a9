//! File formats: polygons and sampled curves (JSON and CSV), energy
//! reports, convergence tables and descent traces.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::curves::SampledCurve;
use crate::discrete_energy::EnergyReport;
use crate::error::{Error, Result};
use crate::experiments::{ConvergenceTable, MinimizeTrace};
use crate::vecgeom::VecN;
use crate::Polygon;

/// `{"dim": 3, "thetas": [...], "vertices": [[...], ...]}`; `thetas` may be
/// omitted for an equipartition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolygonFile {
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thetas: Option<Vec<f64>>,
    pub vertices: Vec<Vec<f64>>,
}

impl PolygonFile {
    pub fn from_polygon(p: &Polygon) -> Self {
        Self {
            dim: p.dim(),
            thetas: Some(p.thetas().to_vec()),
            vertices: p.vertices().iter().map(|v| v.to_f64_vec()).collect(),
        }
    }

    pub fn into_polygon(self) -> Result<Polygon> {
        let vertices = vertices_with_dim(&self.vertices, self.dim)?;
        match self.thetas {
            Some(thetas) => Polygon::new(thetas, vertices),
            None => Polygon::from_vertices(vertices),
        }
    }
}

fn vertices_with_dim(rows: &[Vec<f64>], dim: usize) -> Result<Vec<VecN<f64>>> {
    rows.iter()
        .map(|row| {
            if row.len() != dim {
                return Err(Error::DimensionMismatch { left: dim, right: row.len() });
            }
            VecN::from_slice(row)
        })
        .collect()
}

fn parse_err(e: impl std::fmt::Display) -> Error {
    Error::Parse(e.to_string())
}

pub fn polygon_from_json(text: &str) -> Result<Polygon> {
    serde_json::from_str::<PolygonFile>(text).map_err(parse_err)?.into_polygon()
}

pub fn polygon_to_json(p: &Polygon) -> String {
    serde_json::to_string_pretty(&PolygonFile::from_polygon(p)).expect("polygon serializes")
}

/// Numeric rows of a headerless or headed CSV; lines starting with `#` are
/// comments, and a first row that does not parse as numbers is a header.
fn numeric_rows(text: &str) -> Result<Vec<Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for (k, record) in reader.records().enumerate() {
        let record = record.map_err(parse_err)?;
        let parsed: std::result::Result<Vec<f64>, _> = record.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(row) => rows.push(row),
            Err(_) if k == 0 => continue,
            Err(e) => return Err(Error::Parse(format!("row {}: {e}", k + 1))),
        }
    }
    if rows.is_empty() {
        return Err(Error::Parse("no numeric rows".into()));
    }
    Ok(rows)
}

/// One vertex per row; parameters default to equipartition.
pub fn polygon_from_csv(text: &str) -> Result<Polygon> {
    let rows = numeric_rows(text)?;
    Polygon::from_vertices(vertices_with_dim(&rows, rows[0].len())?)
}

/// One vertex per row with a header `x0,x1,...`.
pub fn polygon_to_csv(p: &Polygon) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record((0..p.dim()).map(|k| format!("x{k}"))).expect("in-memory write");
    for v in p.vertices() {
        w.write_record(v.coords().iter().map(f64::to_string)).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

/// Reads a polygon, choosing CSV for `.csv` files and JSON otherwise.
pub fn read_polygon(path: &Path) -> Result<Polygon> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
        polygon_from_csv(&text)
    } else {
        polygon_from_json(&text)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampledCurveFile {
    pub dim: usize,
    pub samples: Vec<Vec<f64>>,
}

pub fn sampled_curve_from_json(text: &str) -> Result<SampledCurve<f64>> {
    let file: SampledCurveFile = serde_json::from_str(text).map_err(parse_err)?;
    SampledCurve::new(vertices_with_dim(&file.samples, file.dim)?)
}

pub fn sampled_curve_from_csv(text: &str) -> Result<SampledCurve<f64>> {
    let rows = numeric_rows(text)?;
    SampledCurve::new(vertices_with_dim(&rows, rows[0].len())?)
}

pub fn sampled_curve_to_json(s: &SampledCurve<f64>) -> String {
    let file = SampledCurveFile {
        dim: s.dim(),
        samples: s.samples().iter().map(|v| v.to_f64_vec()).collect(),
    };
    serde_json::to_string_pretty(&file).expect("samples serialize")
}

fn rows_to_csv<R: Serialize>(rows: &[R]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

/// One row per retained term (`i,j,cross_ratio,cos_alpha,cos_alpha_tilde,contribution`);
/// header only if the report kept no terms.
pub fn report_terms_csv(report: &EnergyReport<f64>) -> String {
    match report.terms.as_deref() {
        Some(terms) if !terms.is_empty() => rows_to_csv(terms),
        _ => "i,j,cross_ratio,cos_alpha,cos_alpha_tilde,contribution\n".into(),
    }
}

/// `m,fineness,value,reference,abs_error,rel_error`
pub fn table_csv(table: &ConvergenceTable) -> String {
    if table.rows.is_empty() {
        return "m,fineness,value,reference,abs_error,rel_error\n".into();
    }
    rows_to_csv(&table.rows)
}

/// `iteration,energy,grad_norm,step,max_displacement`, starting with an
/// iteration-0 row for the initial polygon.
pub fn trace_csv(trace: &MinimizeTrace) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["iteration", "energy", "grad_norm", "step", "max_displacement"])
        .expect("in-memory write");
    w.write_record(["0".to_string(), trace.initial_energy.to_string(), String::new(), "0".into(), "0".into()])
        .expect("in-memory write");
    for r in &trace.records {
        w.write_record([
            r.iteration.to_string(),
            r.energy.to_string(),
            r.grad_norm.to_string(),
            r.step.to_string(),
            r.max_displacement.to_string(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discrete_energy::e_cos_m;
    use crate::fixtures::random_star_polygon;

    #[test]
    fn polygon_json_round_trip() {
        let p = random_star_polygon::<f64>(7, 1).unwrap();
        let back = polygon_from_json(&polygon_to_json(&p)).unwrap();
        assert_eq!(p, back);
        let bare = polygon_from_json(r#"{"dim":2,"vertices":[[0,0],[1,0],[1,1],[0,1]]}"#).unwrap();
        assert_eq!(bare.thetas(), &[0.0, 0.25, 0.5, 0.75]);
    }

    #[test]
    fn polygon_json_errors() {
        assert!(matches!(polygon_from_json("{"), Err(Error::Parse(_))));
        assert!(matches!(
            polygon_from_json(r#"{"dim":3,"vertices":[[0,0],[1,0],[1,1]]}"#),
            Err(Error::DimensionMismatch { left: 3, right: 2 })
        ));
        assert!(polygon_from_json(r#"{"dim":2,"vertices":[[0,0],[1,0],[1,1]],"extra":1}"#).is_err());
    }

    #[test]
    fn polygon_csv_round_trip() {
        let p = random_star_polygon::<f64>(6, 3).unwrap();
        let csv = polygon_to_csv(&p);
        assert!(csv.starts_with("x0,x1,x2\n"));
        let back = polygon_from_csv(&csv).unwrap();
        assert_eq!(p.vertices(), back.vertices());
        let plain = polygon_from_csv("# square\n0,0\n1,0\n1,1\n0,1\n").unwrap();
        assert_eq!(plain.len(), 4);
        assert!(polygon_from_csv("0,0\n1,0\n1,x\n").is_err());
    }

    #[test]
    fn sampled_curve_formats() {
        let s = crate::curves::CurveFamily::Circle { radius: 1.0 }.build::<f64>(2).unwrap().sample(16).unwrap();
        let back = sampled_curve_from_json(&sampled_curve_to_json(&s)).unwrap();
        assert_eq!(s, back);
        let csv: String = s.samples().iter().map(|v| format!("{},{}\n", v[0], v[1])).collect();
        assert_eq!(sampled_curve_from_csv(&csv).unwrap(), s);
    }

    #[test]
    fn term_csv_has_one_row_per_term() {
        let p = random_star_polygon::<f64>(6, 2).unwrap();
        let r = e_cos_m(&p, true).unwrap();
        let csv = report_terms_csv(&r);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "i,j,cross_ratio,cos_alpha,cos_alpha_tilde,contribution");
        assert_eq!(lines.count(), r.term_count);
    }
}
