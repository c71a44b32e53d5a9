use rayon::prelude::*;
use serde::Serialize;

use crate::discrete_energy::DiscreteEnergy;
use crate::error::{Error, Result};
use crate::polygon::{ClosedPolygon, Partition};
use crate::Curve;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub m: usize,
    pub fineness: f64,
    pub value: f64,
    pub reference: f64,
    pub abs_error: f64,
    /// `abs_error / |reference|`, or `abs_error` when the reference is 0.
    pub rel_error: f64,
}

/// Least-squares slope of `log(error)` against `log(1/m)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateFit {
    pub rate: f64,
    /// Root mean square of the fit residuals in `log(error)`.
    pub residual: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceTable {
    pub fixture: String,
    pub energy: DiscreteEnergy,
    pub partition: Partition,
    pub rows: Vec<ConvergenceRow>,
    /// `None` when fewer than two rows remain in the fit window or their
    /// errors sit at the rounding floor.
    pub rate: Option<RateFit>,
}

impl ConvergenceTable {
    pub fn errors_strictly_decreasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].abs_error < w[0].abs_error)
    }
}

/// Errors at or below this multiple of `max(1, |reference|)` count as
/// rounding noise and are not fitted.
const ERROR_FLOOR: f64 = 1e-10;

/// Fits over the last half of the rows (at least two).
pub fn fit_rate(ms: &[usize], errors: &[f64], floor: f64) -> Option<RateFit> {
    let n = ms.len().min(errors.len());
    if n < 2 {
        return None;
    }
    let start = (n / 2).min(n - 2);
    let pts: Vec<(f64, f64)> = (start..n).map(|k| ((1.0 / ms[k] as f64).ln(), errors[k])).collect();
    if pts.iter().any(|&(_, e)| !(e > floor) || !e.is_finite()) {
        return None;
    }
    let pts: Vec<(f64, f64)> = pts.into_iter().map(|(x, e)| (x, e.ln())).collect();
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let rate = sxy / sxx;
    let residual = (pts.iter().map(|p| (p.1 - my - rate * (p.0 - mx)).powi(2)).sum::<f64>() / k).sqrt();
    Some(RateFit {
        rate,
        residual,
        points: pts.len(),
    })
}

/// Discrete energies of polygons inscribed in `f` with `m` vertices for each
/// `m` in `ms`, against `reference`.
pub fn gamma_limsup_sweep(
    f: &Curve,
    ms: &[usize],
    partition: Partition,
    energy: DiscreteEnergy,
    reference: f64,
) -> Result<ConvergenceTable> {
    if ms.is_empty() || ms[0] < 8 || ms.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter(format!(
            "vertex counts must be increasing and at least 8, got {ms:?}"
        )));
    }
    let rows = ms
        .par_iter()
        .map(|&m| {
            let p = ClosedPolygon::inscribe(f, m, partition)?;
            let value = energy.evaluate(&p)?;
            let abs_error = (value - reference).abs();
            Ok(ConvergenceRow {
                m,
                fineness: p.fineness(),
                value,
                reference,
                abs_error,
                rel_error: if reference != 0.0 { abs_error / reference.abs() } else { abs_error },
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let errors: Vec<f64> = rows.iter().map(|r| r.abs_error).collect();
    let rate = fit_rate(ms, &errors, ERROR_FLOOR * reference.abs().max(1.0));
    Ok(ConvergenceTable {
        fixture: f.family().to_string(),
        energy,
        partition,
        rows,
        rate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::CurveFamily;

    #[test]
    fn rate_fit_recovers_power_laws() {
        let ms = [8, 16, 32, 64, 128];
        let errs: Vec<f64> = ms.iter().map(|&m| 3.0 * (m as f64).powf(-2.0)).collect();
        let fit = fit_rate(&ms, &errs, 0.0).unwrap();
        assert!((fit.rate - 2.0).abs() < 1e-12);
        assert!(fit.residual < 1e-12);
        assert_eq!(fit.points, 3);
        assert!(fit_rate(&ms, &[0.0; 5], 1e-10).is_none());
        assert!(fit_rate(&ms[..1], &errs[..1], 0.0).is_none());
    }

    #[test]
    fn circle_sweep_sits_at_zero() {
        let f = CurveFamily::Circle { radius: 1.0 }.build(3).unwrap();
        let t = gamma_limsup_sweep(&f, &[8, 16, 32, 64], Partition::ParameterUniform, DiscreteEnergy::ECos, 0.0)
            .unwrap();
        assert!(t.rows.iter().all(|r| r.value.abs() <= 1e-10));
        assert!(t.rate.is_none());
        assert_eq!(t.rows[2].fineness, 1.0 / 32.0);
    }

    #[test]
    fn rejects_bad_ladders() {
        let f = CurveFamily::Circle { radius: 1.0 }.build(2).unwrap();
        for ms in [&[][..], &[4, 8][..], &[16, 16][..]] {
            assert!(gamma_limsup_sweep(&f, ms, Partition::ParameterUniform, DiscreteEnergy::ECos, 0.0).is_err());
        }
    }
}
