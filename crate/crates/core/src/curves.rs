//! Closed parametric curves `R/Z -> R^n`: analytic families, mollified
//! sampled curves, the arc-length metric and the `D_f(r)` modulus.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::sum::{compensated_sum, CompensatedSum};
use crate::vecgeom::{coincide, VecN};

pub type CurveFn<T> = Arc<dyn Fn(T) -> VecN<T> + Send + Sync>;

/// Panels of the cumulative arc-length table.
pub const ARC_TABLE_PANELS: usize = 4096;

/// Describes where a curve came from. Analytic families can be parsed from
/// compact strings such as `circle:R=1`, `ellipse:a=2,b=1` or
/// `torus:p=2,q=3,R=2,r=0.5`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum CurveFamily {
    Circle { radius: f64 },
    Ellipse { a: f64, b: f64 },
    TorusKnot { p: u32, q: u32, major: f64, minor: f64 },
    Mollified { samples: usize, bandwidth: f64 },
    Transformed { base: Box<CurveFamily> },
    Custom { name: String },
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl CurveFamily {
    /// Names and grammar of the analytic families.
    pub fn catalogue() -> &'static [(&'static str, &'static str)] {
        &[
            ("circle", "circle:R=<radius>"),
            ("ellipse", "ellipse:a=<semi-axis x>,b=<semi-axis y>"),
            ("torus", "torus:p=<windings about axis>,q=<windings about tube>,R=<major>,r=<minor>"),
        ]
    }

    /// Builds the analytic curve in `R^dim`. Planar families occupy the first
    /// two coordinates; torus knots need `dim >= 3`.
    pub fn build<T: Scalar>(&self, dim: usize) -> Result<ParametricCurve<T>> {
        if dim < 2 {
            return Err(Error::InvalidParameter(format!("dimension must be >= 2, got {dim}")));
        }
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")))
            }
        };
        let planar = move |x: T, y: T| {
            let mut c = vec![T::zero(); dim];
            c[0] = x;
            c[1] = y;
            VecN::new(c).unwrap_or_else(|_| VecN::zeros(dim).map(|_| T::nan()))
        };
        let tau = T::TAU();
        match *self {
            CurveFamily::Circle { radius } => {
                positive("radius", radius)?;
                let r = T::lit(radius);
                let pos = move |x: T| {
                    let (s, c) = (tau * x).sin_cos();
                    planar(r * c, r * s)
                };
                let der = move |x: T| {
                    let (s, c) = (tau * x).sin_cos();
                    planar(-tau * r * s, tau * r * c)
                };
                ParametricCurve::from_fns(Arc::new(pos), Arc::new(der), dim, self.clone())
            }
            CurveFamily::Ellipse { a, b } => {
                positive("a", a)?;
                positive("b", b)?;
                let (a, b) = (T::lit(a), T::lit(b));
                let pos = move |x: T| {
                    let (s, c) = (tau * x).sin_cos();
                    planar(a * c, b * s)
                };
                let der = move |x: T| {
                    let (s, c) = (tau * x).sin_cos();
                    planar(-tau * a * s, tau * b * c)
                };
                ParametricCurve::from_fns(Arc::new(pos), Arc::new(der), dim, self.clone())
            }
            CurveFamily::TorusKnot { p, q, major, minor } => {
                if dim < 3 {
                    return Err(Error::InvalidParameter("torus knots need dimension >= 3".into()));
                }
                if p == 0 || q == 0 || gcd(p, q) != 1 {
                    return Err(Error::InvalidParameter(format!(
                        "torus knot needs coprime positive p, q; got p={p}, q={q}"
                    )));
                }
                positive("minor radius", minor)?;
                if !(minor < major) {
                    return Err(Error::InvalidParameter(format!(
                        "torus knot needs r < R, got r={minor}, R={major}"
                    )));
                }
                let (pf, qf, big, small) = (T::lit(p as f64), T::lit(q as f64), T::lit(major), T::lit(minor));
                let spatial = move |x: T, y: T, z: T| {
                    let mut c = vec![T::zero(); dim];
                    c[0] = x;
                    c[1] = y;
                    c[2] = z;
                    VecN::new(c).unwrap_or_else(|_| VecN::zeros(dim).map(|_| T::nan()))
                };
                let pos = move |x: T| {
                    let phi = tau * x;
                    let (sp, cp) = (pf * phi).sin_cos();
                    let (sq, cq) = (qf * phi).sin_cos();
                    let rho = big + small * cq;
                    spatial(rho * cp, rho * sp, small * sq)
                };
                let der = move |x: T| {
                    let phi = tau * x;
                    let (sp, cp) = (pf * phi).sin_cos();
                    let (sq, cq) = (qf * phi).sin_cos();
                    let rho = big + small * cq;
                    let drho = -small * qf * sq;
                    spatial(
                        tau * (drho * cp - rho * pf * sp),
                        tau * (drho * sp + rho * pf * cp),
                        tau * small * qf * cq,
                    )
                };
                ParametricCurve::from_fns(Arc::new(pos), Arc::new(der), dim, self.clone())
            }
            _ => Err(Error::InvalidParameter(format!(
                "family {self} is not an analytic family"
            ))),
        }
    }
}

impl fmt::Display for CurveFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurveFamily::Circle { radius } => write!(f, "circle:R={radius}"),
            CurveFamily::Ellipse { a, b } => write!(f, "ellipse:a={a},b={b}"),
            CurveFamily::TorusKnot { p, q, major, minor } => {
                write!(f, "torus:p={p},q={q},R={major},r={minor}")
            }
            CurveFamily::Mollified { samples, bandwidth } => {
                write!(f, "mollified:N={samples},eps={bandwidth}")
            }
            CurveFamily::Transformed { base } => write!(f, "moebius({base})"),
            CurveFamily::Custom { name } => write!(f, "custom:{name}"),
        }
    }
}

impl FromStr for CurveFamily {
    type Err = Error;

    fn from_str(spec: &str) -> Result<Self> {
        let (family, args) = spec.split_once(':').unwrap_or((spec, ""));
        let mut kv = Vec::new();
        for part in args.split(',').filter(|s| !s.trim().is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, got '{part}'")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad number '{v}' for key '{k}'")))?;
            kv.push((k.trim().to_string(), v));
        }
        let get = |key: &str, default: Option<f64>| -> Result<f64> {
            kv.iter()
                .find(|(k, _)| k == key)
                .map(|(_, v)| *v)
                .or(default)
                .ok_or_else(|| Error::Parse(format!("missing key '{key}' in '{spec}'")))
        };
        let allowed: &[&str] = match family.trim() {
            "circle" => &["R"],
            "ellipse" => &["a", "b"],
            "torus" => &["p", "q", "R", "r"],
            other => return Err(Error::Parse(format!("unknown curve family '{other}'"))),
        };
        if let Some((k, _)) = kv.iter().find(|(k, _)| !allowed.contains(&k.as_str())) {
            return Err(Error::Parse(format!("unknown key '{k}' for family '{family}'")));
        }
        let integer = |key: &str, v: f64| -> Result<u32> {
            if v >= 1.0 && v.fract() == 0.0 && v <= u32::MAX as f64 {
                Ok(v as u32)
            } else {
                Err(Error::Parse(format!("key '{key}' must be a positive integer, got {v}")))
            }
        };
        Ok(match family.trim() {
            "circle" => CurveFamily::Circle { radius: get("R", Some(1.0))? },
            "ellipse" => CurveFamily::Ellipse {
                a: get("a", None)?,
                b: get("b", None)?,
            },
            _ => CurveFamily::TorusKnot {
                p: integer("p", get("p", Some(2.0))?)?,
                q: integer("q", get("q", Some(3.0))?)?,
                major: get("R", Some(2.0))?,
                minor: get("r", Some(0.5))?,
            },
        })
    }
}

/// Cumulative arc length `S(x) = int_0^x |f'|` on a uniform panel grid.
///
/// Panel integrals use the Richardson-extrapolated midpoint rule. Between
/// nodes the table is interpolated with cubic Hermite polynomials using the
/// exact speeds at the nodes, which keeps short arcs accurate to far below
/// the panel width.
#[derive(Clone, Debug)]
struct ArcTable<T> {
    cumulative: Vec<T>,
    speeds: Vec<T>,
}

impl<T: Scalar> ArcTable<T> {
    fn build(derivative: &CurveFn<T>, panels: usize) -> Result<Self> {
        let h = T::one() / T::lit(panels as f64);
        let speed = |x: T| derivative(x).norm();
        let speeds: Vec<T> = (0..=panels).map(|k| speed(T::lit(k as f64) * h)).collect();
        if speeds.iter().any(|s| !s.is_finite() || *s <= T::zero()) {
            return Err(Error::InvalidParameter("curve is not regular: |f'| vanishes or is not finite".into()));
        }
        let quarter = T::lit(0.25);
        let mut cumulative = Vec::with_capacity(panels + 1);
        let mut acc = CompensatedSum::new();
        cumulative.push(T::zero());
        for k in 0..panels {
            let x0 = T::lit(k as f64) * h;
            let coarse = h * speed(x0 + h * T::lit(0.5));
            let fine = h * T::lit(0.5) * (speed(x0 + h * quarter) + speed(x0 + h * T::lit(0.75)));
            acc.add((T::lit(4.0) * fine - coarse) / T::lit(3.0));
            cumulative.push(acc.value());
        }
        Ok(Self { cumulative, speeds })
    }

    fn panels(&self) -> usize {
        self.speeds.len() - 1
    }

    fn total(&self) -> T {
        self.cumulative[self.panels()]
    }

    /// `S(x)` for `x` in `[0, 1]`.
    fn at(&self, x: T) -> T {
        let panels = self.panels();
        let scaled = x * T::lit(panels as f64);
        let k = scaled.floor().to_usize().unwrap_or(0).min(panels - 1);
        let t = scaled - T::lit(k as f64);
        let h = T::one() / T::lit(panels as f64);
        let (t2, t3) = (t * t, t * t * t);
        let two = T::lit(2.0);
        let three = T::lit(3.0);
        let h00 = two * t3 - three * t2 + T::one();
        let h10 = t3 - two * t2 + t;
        let h01 = -two * t3 + three * t2;
        let h11 = t3 - t2;
        h00 * self.cumulative[k]
            + h10 * h * self.speeds[k]
            + h01 * self.cumulative[k + 1]
            + h11 * h * self.speeds[k + 1]
    }
}

/// A regular closed curve with position and derivative evaluators.
#[derive(Clone)]
pub struct ParametricCurve<T> {
    position: CurveFn<T>,
    derivative: CurveFn<T>,
    dim: usize,
    family: CurveFamily,
    arc: ArcTable<T>,
}

impl<T: Scalar> fmt::Debug for ParametricCurve<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ParametricCurve")
            .field("family", &self.family)
            .field("dim", &self.dim)
            .field("length", &self.length())
            .finish()
    }
}

impl<T: Scalar> ParametricCurve<T> {
    /// Wraps evaluators into a curve and builds its arc-length table.
    ///
    /// Regularity and period-1 closure are checked at the table nodes.
    pub fn from_fns(position: CurveFn<T>, derivative: CurveFn<T>, dim: usize, family: CurveFamily) -> Result<Self> {
        let p0 = position(T::zero());
        let p1 = position(T::one());
        if p0.dim() != dim || derivative(T::zero()).dim() != dim {
            return Err(Error::DimensionMismatch { left: dim, right: p0.dim() });
        }
        if !p0.is_finite() || !p1.is_finite() {
            return Err(Error::NonFinite);
        }
        let scale = T::one().max(p0.norm());
        if p0.distance(&p1) > T::lit(1e-9) * scale {
            return Err(Error::InvalidParameter("curve is not closed with period 1".into()));
        }
        let arc = ArcTable::build(&derivative, ARC_TABLE_PANELS)?;
        Ok(Self {
            position,
            derivative,
            dim,
            family,
            arc,
        })
    }

    #[inline]
    pub fn eval(&self, x: T) -> VecN<T> {
        (self.position)(x)
    }

    #[inline]
    pub fn derivative(&self, x: T) -> VecN<T> {
        (self.derivative)(x)
    }

    pub fn speed(&self, x: T) -> T {
        self.derivative(x).norm()
    }

    pub fn unit_tangent(&self, x: T) -> VecN<T> {
        self.derivative(x).normalized()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn family(&self) -> &CurveFamily {
        &self.family
    }

    pub(crate) fn position_fn(&self) -> CurveFn<T> {
        self.position.clone()
    }

    pub(crate) fn derivative_fn(&self) -> CurveFn<T> {
        self.derivative.clone()
    }

    /// Total length.
    pub fn length(&self) -> T {
        self.arc.total()
    }

    /// Cumulative arc length from parameter 0 to `x` (reduced mod 1).
    pub fn arclength_at(&self, x: T) -> T {
        self.arc.at(reduce(x))
    }

    /// Length of the shorter arc between `f(x)` and `f(y)`.
    pub fn arc_distance(&self, x: T, y: T) -> T {
        let s = (self.arclength_at(y) - self.arclength_at(x)).abs();
        s.min(self.length() - s)
    }

    /// Parameters `theta_0 = 0 < ... < theta_{m-1}` splitting the curve into
    /// `m` arcs of equal length, found by bisection to `1e-10` in parameter.
    pub fn arclength_partition(&self, m: usize) -> Result<Vec<T>> {
        let total = self.length();
        let tol = T::lit(1e-10);
        let mut thetas = Vec::with_capacity(m);
        thetas.push(T::zero());
        for k in 1..m {
            let target = total * T::lit(k as f64) / T::lit(m as f64);
            let (mut lo, mut hi) = (*thetas.last().unwrap(), T::one());
            while hi - lo > tol {
                let mid = (lo + hi) * T::lit(0.5);
                if self.arc.at(mid) < target {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let theta = (lo + hi) * T::lit(0.5);
            if theta <= *thetas.last().unwrap() || theta >= T::one() {
                return Err(Error::InvalidParameter("arc-length partition degenerated".into()));
            }
            thetas.push(theta);
        }
        Ok(thetas)
    }

    /// Samples `f(k / n)`, `k = 0..n`.
    pub fn sample(&self, n: usize) -> Result<SampledCurve<T>> {
        SampledCurve::new((0..n).map(|k| self.eval(T::lit(k as f64) / T::lit(n as f64))).collect())
    }
}

/// Reduces a parameter into `[0, 1)`.
#[inline]
pub(crate) fn reduce<T: Scalar>(x: T) -> T {
    let r = x - x.floor();
    if r >= T::one() {
        T::zero()
    } else {
        r
    }
}

/// Signed periodic offset in `[-1/2, 1/2)`.
#[inline]
pub(crate) fn wrap_offset<T: Scalar>(u: T) -> T {
    let half = T::lit(0.5);
    reduce(u + half) - half
}

/// Uniform samples `f(k / N)` of a closed curve.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledCurve<T> {
    samples: Vec<VecN<T>>,
}

impl<T: Scalar> SampledCurve<T> {
    pub fn new(samples: Vec<VecN<T>>) -> Result<Self> {
        let n = samples.len();
        if n < 8 {
            return Err(Error::InvalidParameter(format!("need at least 8 samples, got {n}")));
        }
        let dim = samples[0].dim();
        for s in &samples {
            if s.dim() != dim {
                return Err(Error::DimensionMismatch { left: dim, right: s.dim() });
            }
        }
        for k in 0..n {
            if coincide(&samples[k], &samples[(k + 1) % n]) {
                return Err(Error::CoincidentPoints(format!(
                    "consecutive samples {k} and {}",
                    (k + 1) % n
                )));
            }
        }
        Ok(Self { samples })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.samples[0].dim()
    }

    pub fn samples(&self) -> &[VecN<T>] {
        &self.samples
    }

    pub fn spacing(&self) -> T {
        T::one() / T::lit(self.len() as f64)
    }
}

/// The smooth bump `exp(-1 / (1 - t^2))` on `(-1, 1)`, rescaled to
/// bandwidth `eps` and discretized on a sample grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MollifierKernel<T> {
    bandwidth: T,
}

impl<T: Scalar> MollifierKernel<T> {
    pub fn new(bandwidth: T) -> Result<Self> {
        if !(bandwidth > T::zero() && bandwidth < T::lit(0.5)) {
            return Err(Error::InvalidParameter(format!(
                "bandwidth must lie in (0, 1/2), got {bandwidth}"
            )));
        }
        Ok(Self { bandwidth })
    }

    pub fn bandwidth(&self) -> T {
        self.bandwidth
    }

    /// Unnormalized kernel value and derivative at periodic offset `u`.
    #[inline]
    pub fn value_and_slope(&self, u: T) -> (T, T) {
        let t = u / self.bandwidth;
        let one = T::one();
        if t.abs() >= one {
            return (T::zero(), T::zero());
        }
        let s = one - t * t;
        let v = (-one / s).exp();
        let slope = v * (-T::lit(2.0) * t / (s * s)) / self.bandwidth;
        (v, slope)
    }

    /// Grid weights at `x` for `n` samples, normalized to unit sum.
    pub fn discrete_weights(&self, x: T, n: usize) -> Vec<(usize, T)> {
        let raw = self.raw_weights(x, n);
        let total = compensated_sum(raw.iter().map(|(_, w, _)| *w));
        raw.into_iter().map(|(k, w, _)| (k, w / total)).collect()
    }

    /// `(index, weight, d weight / dx)` for the samples inside the support.
    fn raw_weights(&self, x: T, n: usize) -> Vec<(usize, T, T)> {
        let nf = T::lit(n as f64);
        let center = (reduce(x) * nf).floor().to_i64().unwrap_or(0);
        let reach = (self.bandwidth * nf).ceil().to_i64().unwrap_or(0) + 1;
        let mut out = Vec::with_capacity((2 * reach + 1) as usize);
        for off in -reach..=reach {
            let k = (center + off).rem_euclid(n as i64) as usize;
            let u = wrap_offset(x - T::lit(k as f64) / nf);
            let (w, dw) = self.value_and_slope(u);
            if w > T::zero() {
                out.push((k, w, dw));
            }
        }
        out
    }
}

/// Periodic convolution of samples with the normalized bump kernel.
///
/// The evaluator is `F(x) / Z(x)` with `F = sum_k eta(x - k/N) s_k` and
/// `Z = sum_k eta(x - k/N)`; the derivative is its exact quotient-rule
/// derivative built from the kernel slope, so constants are reproduced
/// exactly and the derivative evaluator is smooth.
pub fn mollify<T: Scalar>(samples: &SampledCurve<T>, bandwidth: T) -> Result<ParametricCurve<T>> {
    let n = samples.len();
    if !(bandwidth > samples.spacing() && bandwidth < T::lit(0.5)) {
        return Err(Error::InvalidParameter(format!(
            "bandwidth must lie in (1/N, 1/2) = ({}, 0.5), got {bandwidth}",
            samples.spacing()
        )));
    }
    let kernel = MollifierKernel::new(bandwidth)?;
    let data = Arc::new(samples.samples().to_vec());
    let dim = samples.dim();
    let pos_data = data.clone();
    let position = move |x: T| {
        let mut num = VecN::zeros(dim);
        let mut z = T::zero();
        for (k, w, _) in kernel.raw_weights(x, n) {
            num = num.axpy(w, &pos_data[k]);
            z += w;
        }
        num.scale(T::one() / z)
    };
    let derivative = move |x: T| {
        let mut num = VecN::zeros(dim);
        let mut dnum = VecN::zeros(dim);
        let (mut z, mut dz) = (T::zero(), T::zero());
        for (k, w, dw) in kernel.raw_weights(x, n) {
            num = num.axpy(w, &data[k]);
            dnum = dnum.axpy(dw, &data[k]);
            z += w;
            dz += dw;
        }
        dnum.scale(T::one() / z).axpy(-dz / (z * z), &num)
    };
    ParametricCurve::from_fns(
        Arc::new(position),
        Arc::new(derivative),
        dim,
        CurveFamily::Mollified {
            samples: n,
            bandwidth: bandwidth.to_f64_lossy(),
        },
    )
}

/// Grid approximation of
/// `D_f(r) = sup_z ( int int_{B_r(z)^2} |f'(x) - f'(y)|^2 / |x - y|^2 )^(1/2)`.
///
/// The parameter circle is split into `grid` cells; `z` runs over cell
/// boundaries and `B_r(z)` is the union of cells whose midpoints lie within
/// `r` of `z`. Off-diagonal cells use the midpoint rule; a diagonal cell uses
/// the difference quotient at offset half a cell. Diagnostic grade only.
pub fn modulus_d<T: Scalar>(curve: &ParametricCurve<T>, r: T, grid: usize) -> Result<T> {
    if !(r > T::zero() && r < T::lit(0.5)) {
        return Err(Error::InvalidParameter(format!("radius must lie in (0, 1/2), got {r}")));
    }
    if grid < 8 {
        return Err(Error::InvalidParameter(format!("grid must be >= 8, got {grid}")));
    }
    let h = T::one() / T::lit(grid as f64);
    let half = h * T::lit(0.5);
    let mids: Vec<VecN<T>> = (0..grid)
        .map(|c| curve.derivative((T::lit(c as f64) + T::lit(0.5)) * h))
        .collect();
    let diag: Vec<T> = (0..grid)
        .map(|c| {
            let shifted = curve.derivative((T::lit(c as f64) + T::one()) * h);
            (&mids[c] - &shifted).norm_sq() / (half * half)
        })
        .collect();
    // cells k-reach .. k+reach-1 around boundary k have midpoints within r
    let reach = ((r / h) + T::lit(0.5)).floor().to_usize().unwrap_or(0).min(grid / 2);
    if reach == 0 {
        return Ok(T::zero());
    }
    let window = |k: usize| -> T {
        let cells: Vec<usize> = (0..2 * reach).map(|o| (k + grid - reach + o) % grid).collect();
        let mut acc = CompensatedSum::new();
        for (a, &ca) in cells.iter().enumerate() {
            acc.add(diag[ca]);
            for (b, &cb) in cells.iter().enumerate().skip(a + 1) {
                let dist = h * T::lit((b - a) as f64);
                acc.add(T::lit(2.0) * (&mids[ca] - &mids[cb]).norm_sq() / (dist * dist));
            }
        }
        acc.value() * h * h
    };
    let values: Vec<T> = {
        use rayon::prelude::*;
        (0..grid).into_par_iter().map(window).collect()
    };
    let sup = values.into_iter().fold(T::zero(), T::max);
    Ok(sup.sqrt())
}
