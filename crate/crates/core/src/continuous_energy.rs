//! O'Hara's Moebius energy `E` and the Doyle-Schramm cosine energy `E_cos`
//! of smooth closed curves, by tensor midpoint quadrature.
//!
//! Both integrands are bounded but cancellative near the diagonal. Cells
//! within the diagonal band are skipped and, by default, refilled with a
//! quadratic extrapolation of the integrand along each row.

use serde::{Deserialize, Serialize};

use crate::curves::{reduce, ParametricCurve};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::sum::compensated_sum;
use crate::vecgeom::{ensure_distinct, VecN};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiagonalHandling {
    /// Skip band cells and extrapolate their values from offsets just
    /// outside the band.
    #[default]
    LimitFill,
    /// Skip band cells; they contribute nothing.
    BandSkip,
}

impl std::str::FromStr for DiagonalHandling {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "limit-fill" => Ok(DiagonalHandling::LimitFill),
            "band-skip" => Ok(DiagonalHandling::BandSkip),
            other => Err(Error::Parse(format!("unknown diagonal handling '{other}'"))),
        }
    }
}

/// Midpoint grid of `panels x panels` cells centred at `(k + 1/2) / panels`.
///
/// A cell is in the diagonal band when its cyclic offset from the diagonal,
/// in parameter units, is below `band`. The offset-0 cells are always treated
/// as band cells.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec<T> {
    pub panels: usize,
    pub band: T,
    pub diagonal: DiagonalHandling,
    /// Largest acceptable change under panel doubling; see [`check_refinement`].
    pub tolerance: T,
}

impl<T: Scalar> QuadratureSpec<T> {
    /// `panels` cells per axis, band `2 / panels`, limit-fill, tolerance `1e-6`.
    pub fn new(panels: usize) -> Result<Self> {
        let spec = Self {
            panels,
            band: T::lit(2.0) / T::lit(panels as f64),
            diagonal: DiagonalHandling::LimitFill,
            tolerance: T::lit(1e-6),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.panels < 16 {
            return Err(Error::InvalidParameter(format!("need at least 16 panels, got {}", self.panels)));
        }
        if !(self.band >= T::zero() && self.band < T::lit(0.25)) {
            return Err(Error::InvalidParameter(format!("band must lie in [0, 1/4), got {}", self.band)));
        }
        if !(self.tolerance > T::zero()) {
            return Err(Error::InvalidParameter("tolerance must be positive".into()));
        }
        Ok(())
    }

    /// Number of skipped offsets on each side of the diagonal, offset 0
    /// included: the first retained offset.
    fn first_kept_offset(&self) -> usize {
        let scaled = (self.band * T::lit(self.panels as f64)).to_f64_lossy();
        // offsets o with o < band * panels are skipped, allowing for rounding in band
        let k = (scaled - 1e-9).ceil().max(1.0) as usize;
        k.max(1)
    }
}

impl<T: Scalar> Default for QuadratureSpec<T> {
    fn default() -> Self {
        Self::new(512).expect("512 panels is a valid spec")
    }
}

/// Values of both energies on one quadrature spec.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContinuousReport<T> {
    #[serde(rename = "E")]
    pub e: T,
    #[serde(rename = "E_cos")]
    pub e_cos: T,
    /// `E - E_cos`, which equals 4 for closed curves.
    pub difference: T,
    pub panels: usize,
    pub band: T,
}

fn ensure_off_diagonal<T: Scalar>(x: T, y: T) -> Result<()> {
    let d = reduce(x - y);
    if d == T::zero() || d == T::one() {
        return Err(Error::CoincidentPoints(format!("parameters {x} and {y} coincide mod 1")));
    }
    Ok(())
}

/// `(1/|f(x) - f(y)|^2 - 1/d_f(x,y)^2) |f'(x)| |f'(y)|`
pub fn ohara_integrand<T: Scalar>(f: &ParametricCurve<T>, x: T, y: T) -> Result<T> {
    ensure_off_diagonal(x, y)?;
    let (p, q) = (f.eval(x), f.eval(y));
    ensure_distinct(&p, &q, "curve points")?;
    let arc = f.arc_distance(x, y);
    Ok(e_kernel(p.distance(&q).powi(2), arc) * f.speed(x) * f.speed(y))
}

fn e_kernel<T: Scalar>(chord_sq: T, arc: T) -> T {
    // clamp the rounding-level negative values when chord and arc agree
    (T::one() / chord_sq - T::one() / (arc * arc)).max(T::zero())
}

/// Unit tangent at `q` of the circle through `p` and `q` tangent to `u` at `p`,
/// oriented along the traversal `p -> q`: the reflection `2 (u.w) w - u` of
/// `u` across the chord direction `w`. When `u` is parallel to the chord the
/// circle is a line and the result is `u`.
pub fn circle_tangent_at_far_point<T: Scalar>(u: &VecN<T>, p: &VecN<T>, q: &VecN<T>) -> Result<VecN<T>> {
    u.check_dim(p)?;
    p.check_dim(q)?;
    ensure_distinct(p, q, "chord endpoints")?;
    Ok(reflect_across_chord(u, p, q))
}

fn reflect_across_chord<T: Scalar>(u: &VecN<T>, p: &VecN<T>, q: &VecN<T>) -> VecN<T> {
    let w = (q - p).normalized();
    w.scale(T::lit(2.0) * u.dot(&w)) - u.clone()
}

/// Cosine of the angle at `f(y)` between the circle tangent to `f` at `f(x)`
/// through `f(y)` and the circle tangent to `f` at `f(y)` through `f(x)`.
pub fn cos_alpha_continuous<T: Scalar>(f: &ParametricCurve<T>, x: T, y: T) -> Result<T> {
    ensure_off_diagonal(x, y)?;
    let (p, q) = (f.eval(x), f.eval(y));
    ensure_distinct(&p, &q, "curve points")?;
    Ok(cos_from_samples(&f.unit_tangent(x), &p, &q, &f.unit_tangent(y)))
}

fn cos_from_samples<T: Scalar>(ux: &VecN<T>, p: &VecN<T>, q: &VecN<T>, uy: &VecN<T>) -> T {
    reflect_across_chord(ux, p, q).dot(uy).max(-T::one()).min(T::one())
}

/// `(1 - cos alpha_f(x, y)) / |f(x) - f(y)|^2 |f'(x)| |f'(y)|`
pub fn e_cos_integrand<T: Scalar>(f: &ParametricCurve<T>, x: T, y: T) -> Result<T> {
    let c = cos_alpha_continuous(f, x, y)?;
    let chord_sq = f.eval(x).distance(&f.eval(y)).powi(2);
    Ok((T::one() - c) / chord_sq * f.speed(x) * f.speed(y))
}

/// Curve data at the grid midpoints.
struct Grid<T> {
    pos: Vec<VecN<T>>,
    unit: Vec<VecN<T>>,
    speed: Vec<T>,
    arc: Vec<T>,
    length: T,
}

impl<T: Scalar> Grid<T> {
    fn new(f: &ParametricCurve<T>, n: usize) -> Self {
        let xs: Vec<T> = (0..n).map(|k| (T::lit(k as f64) + T::lit(0.5)) / T::lit(n as f64)).collect();
        let derivs: Vec<VecN<T>> = xs.iter().map(|&x| f.derivative(x)).collect();
        Self {
            pos: xs.iter().map(|&x| f.eval(x)).collect(),
            speed: derivs.iter().map(|d| d.norm()).collect(),
            unit: derivs.iter().map(|d| d.normalized()).collect(),
            arc: xs.iter().map(|&x| f.arclength_at(x)).collect(),
            length: f.length(),
        }
    }

    /// `(E integrand, E_cos integrand)` at cell `(k, l)`, `k != l`.
    fn values(&self, k: usize, l: usize) -> (T, T) {
        let chord_sq = self.pos[k].distance(&self.pos[l]).powi(2);
        let s = (self.arc[l] - self.arc[k]).abs();
        let arc = s.min(self.length - s);
        let weight = self.speed[k] * self.speed[l];
        let c = cos_from_samples(&self.unit[k], &self.pos[k], &self.pos[l], &self.unit[l]);
        (e_kernel(chord_sq, arc) * weight, (T::one() - c) / chord_sq * weight)
    }
}

/// Quadratic through `(k, g[0]), (k+1, g[1]), (k+2, g[2])`, evaluated at `o`.
fn extrapolate<T: Scalar>(g: [T; 3], k: usize, o: usize) -> T {
    let nodes = [k as f64, (k + 1) as f64, (k + 2) as f64];
    let o = o as f64;
    let mut acc = T::zero();
    for a in 0..3 {
        let mut coef = 1.0;
        for b in 0..3 {
            if a != b {
                coef *= (o - nodes[b]) / (nodes[a] - nodes[b]);
            }
        }
        acc += T::lit(coef) * g[a];
    }
    acc
}

/// Both row sums for row `k`, diagonal band filled per `spec`.
fn row_sums<T: Scalar>(grid: &Grid<T>, spec: &QuadratureSpec<T>, k: usize) -> (T, T) {
    let n = spec.panels;
    let kept = spec.first_kept_offset();
    let mut e_row = Vec::with_capacity(n);
    let mut c_row = Vec::with_capacity(n);
    for o in kept..=(n - kept) {
        let (e, c) = grid.values(k, (k + o) % n);
        e_row.push(e);
        c_row.push(c);
    }
    if spec.diagonal == DiagonalHandling::LimitFill {
        // side values at offsets kept, kept+1, kept+2 in each direction
        let side = |row: &[T], forward: bool| -> [T; 3] {
            if forward {
                [row[0], row[1], row[2]]
            } else {
                let last = row.len() - 1;
                [row[last], row[last - 1], row[last - 2]]
            }
        };
        for row in [&mut e_row, &mut c_row] {
            let (fwd, bwd) = (side(row, true), side(row, false));
            let mut fill = Vec::with_capacity(2 * kept - 1);
            fill.push(T::lit(0.5) * (extrapolate(fwd, kept, 0) + extrapolate(bwd, kept, 0)));
            for o in 1..kept {
                fill.push(extrapolate(fwd, kept, o));
                fill.push(extrapolate(bwd, kept, o));
            }
            row.extend(fill);
        }
    }
    (compensated_sum(e_row), compensated_sum(c_row))
}

/// Both energies from one pass over the grid.
pub fn energies<T: Scalar>(f: &ParametricCurve<T>, spec: &QuadratureSpec<T>) -> Result<ContinuousReport<T>> {
    use rayon::prelude::*;
    spec.validate()?;
    let n = spec.panels;
    let grid = Grid::new(f, n);
    let rows: Vec<(T, T)> = (0..n).into_par_iter().map(|k| row_sums(&grid, spec, k)).collect();
    let cell = T::one() / T::lit((n * n) as f64);
    let e = compensated_sum(rows.iter().map(|r| r.0)) * cell;
    let e_cos = compensated_sum(rows.iter().map(|r| r.1)) * cell;
    if !e.is_finite() || !e_cos.is_finite() {
        return Err(Error::Quadrature(format!(
            "non-finite integrand on {n} panels; is the curve embedded?"
        )));
    }
    Ok(ContinuousReport {
        e,
        e_cos,
        difference: e - e_cos,
        panels: n,
        band: spec.band,
    })
}

/// O'Hara's energy `E(f)`.
pub fn energy_e<T: Scalar>(f: &ParametricCurve<T>, spec: &QuadratureSpec<T>) -> Result<T> {
    Ok(energies(f, spec)?.e)
}

/// The cosine energy `E_cos(f)`.
pub fn energy_e_cos<T: Scalar>(f: &ParametricCurve<T>, spec: &QuadratureSpec<T>) -> Result<T> {
    Ok(energies(f, spec)?.e_cos)
}

/// Evaluates on `spec` and on twice as many panels (band scaled to keep the
/// same number of skipped offsets). Fails with [`Error::Quadrature`] if either
/// energy moves by more than `spec.tolerance`; otherwise returns the finer
/// report.
pub fn check_refinement<T: Scalar>(f: &ParametricCurve<T>, spec: &QuadratureSpec<T>) -> Result<ContinuousReport<T>> {
    let coarse = energies(f, spec)?;
    let fine_spec = QuadratureSpec {
        panels: 2 * spec.panels,
        band: spec.band * T::lit(0.5),
        ..*spec
    };
    let fine = energies(f, &fine_spec)?;
    let change = (fine.e - coarse.e).abs().max((fine.e_cos - coarse.e_cos).abs());
    if change > spec.tolerance {
        return Err(Error::Quadrature(format!(
            "doubling {} panels changed the energy by {change}, above {}",
            spec.panels, spec.tolerance
        )));
    }
    Ok(fine)
}
