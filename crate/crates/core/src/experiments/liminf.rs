use rayon::prelude::*;
use serde::Serialize;

use crate::discrete_energy::e_cos_m;
use crate::error::{Error, Result};
use crate::polygon::{ClosedPolygon, Partition};
use crate::{Curve, Polygon};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LiminfRow {
    pub m: usize,
    pub fineness: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LiminfReport {
    pub fixture: String,
    pub stale_fraction: f64,
    pub rows: Vec<LiminfRow>,
    /// `E^m_cos` of the equipartition polygon with the largest `m`.
    pub equipartition_value: f64,
    pub reference: Option<f64>,
    pub equipartition_error: Option<f64>,
    pub stale_error: Option<f64>,
    /// Stale error above five times the equipartition error.
    pub convergence_not_observed: Option<bool>,
}

/// `m` parameters `i (1 - s) / (m - 1)`: the arc `[1 - s, 1)` is one edge.
pub fn stale_thetas(m: usize, stale_fraction: f64) -> Result<Vec<f64>> {
    if !(stale_fraction > 0.0 && stale_fraction < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "stale fraction must lie in (0, 1), got {stale_fraction}"
        )));
    }
    if m < 3 {
        return Err(Error::InvalidParameter(format!("need at least 3 vertices, got {m}")));
    }
    let span = 1.0 - stale_fraction;
    Ok((0..m).map(|i| i as f64 * span / (m - 1) as f64).collect())
}

/// Inscribed polygons that refine only `[0, 1 - stale_fraction]`, on the
/// ladder `m/8, m/4, m/2, m` (counts below 8 dropped), so the fineness never
/// drops below the stale gap.
pub fn liminf_probe(f: &Curve, m: usize, stale_fraction: f64, reference: Option<f64>) -> Result<LiminfReport> {
    let mut ladder: Vec<usize> = [m / 8, m / 4, m / 2, m].into_iter().filter(|&k| k >= 8).collect();
    ladder.dedup();
    if ladder.is_empty() {
        return Err(Error::InvalidParameter(format!("m must be at least 8, got {m}")));
    }
    let rows = ladder
        .par_iter()
        .map(|&k| {
            let thetas = stale_thetas(k, stale_fraction)?;
            let vertices = thetas.iter().map(|&t| f.eval(t)).collect();
            let p = Polygon::new(thetas, vertices)?;
            Ok(LiminfRow {
                m: k,
                fineness: p.fineness(),
                value: e_cos_m(&p, false)?.value,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let equi = ClosedPolygon::inscribe(f, m, Partition::ParameterUniform)?;
    let equipartition_value = e_cos_m(&equi, false)?.value;
    let last = rows.last().expect("ladder is non-empty").value;
    let equipartition_error = reference.map(|r| (equipartition_value - r).abs());
    let stale_error = reference.map(|r| (last - r).abs());
    Ok(LiminfReport {
        fixture: f.family().to_string(),
        stale_fraction,
        rows,
        equipartition_value,
        reference,
        equipartition_error,
        stale_error,
        convergence_not_observed: equipartition_error.zip(stale_error).map(|(e, s)| s > 5.0 * e),
    })
}
