//! Moebius transformations of `R^n u {inf}` as compositions of translations,
//! orthogonal maps, scalings and sphere inversions.
//!
//! A transform is stored as its list of primitives, applied left to right.
//! Points sent to infinity are reported as [`Error::PoleHit`] naming the
//! primitive and the offending point; infinity is never a value.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::curves::{CurveFamily, ParametricCurve, ARC_TABLE_PANELS};
use crate::error::{Error, Result};
use crate::polygon::{cyclic_index_distance, ClosedPolygon};
use crate::scalar::Scalar;
use crate::vecgeom::{coincide, VecN};

/// Attempts made by [`random_transform`] to place an inversion center.
pub const MAX_CENTER_ATTEMPTS: usize = 1000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
#[serde(bound(serialize = "T: Scalar + Serialize", deserialize = "T: Scalar + Deserialize<'de>"))]
pub enum Primitive<T> {
    /// `x + offset`
    Translation { offset: VecN<T> },
    /// `Q x`; rows of `Q`.
    Orthogonal { matrix: Vec<Vec<T>> },
    /// `factor * x`, `factor > 0`
    Scaling { factor: T },
    /// `center + radius^2 (x - center) / |x - center|^2`
    Inversion { center: VecN<T>, radius: T },
}

impl<T: Scalar> Primitive<T> {
    fn check(&self, dim: usize) -> Result<()> {
        match self {
            Primitive::Translation { offset } => expect_dim(offset.dim(), dim),
            Primitive::Orthogonal { matrix } => {
                expect_dim(matrix.len(), dim)?;
                for row in matrix {
                    expect_dim(row.len(), dim)?;
                }
                let tol = T::lit(1e-12).max(T::epsilon() * T::lit(64.0));
                for a in 0..dim {
                    for b in 0..dim {
                        // (Q^T Q)_{ab}
                        let g: T = (0..dim).map(|k| matrix[k][a] * matrix[k][b]).sum();
                        let target = if a == b { T::one() } else { T::zero() };
                        if (g - target).abs() > tol {
                            return Err(Error::InvalidParameter(
                                "orthogonal factor violates Q^T Q = I".into(),
                            ));
                        }
                    }
                }
                Ok(())
            }
            Primitive::Scaling { factor } => {
                if *factor > T::zero() && factor.is_finite() {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter(format!("scaling factor must be positive, got {factor}")))
                }
            }
            Primitive::Inversion { center, radius } => {
                expect_dim(center.dim(), dim)?;
                if *radius > T::zero() && radius.is_finite() {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter(format!("inversion radius must be positive, got {radius}")))
                }
            }
        }
    }

    /// Image of `x` and of a tangent vector `v` at `x`. `None` at a pole.
    fn push(&self, x: &VecN<T>, v: Option<&VecN<T>>) -> Option<(VecN<T>, Option<VecN<T>>)> {
        match self {
            Primitive::Translation { offset } => Some((x + offset, v.cloned())),
            Primitive::Orthogonal { matrix } => {
                let mul = |y: &VecN<T>| {
                    VecN::from_coords_unchecked(
                        matrix
                            .iter()
                            .map(|row| row.iter().zip(y.coords()).fold(T::zero(), |acc, (&q, &c)| acc + q * c))
                            .collect(),
                    )
                };
                Some((mul(x), v.map(mul)))
            }
            Primitive::Scaling { factor } => Some((x.scale(*factor), v.map(|v| v.scale(*factor)))),
            Primitive::Inversion { center, radius } => {
                if coincide(x, center) {
                    return None;
                }
                let d = x - center;
                let q = d.norm_sq();
                let r2 = *radius * *radius;
                let image = center.axpy(r2 / q, &d);
                // D(x) v = r^2 (v / q - 2 d (d.v) / q^2)
                let dv = v.map(|v| v.scale(r2 / q).axpy(-T::lit(2.0) * r2 * d.dot(v) / (q * q), &d));
                Some((image, dv))
            }
        }
    }
}

fn expect_dim(got: usize, want: usize) -> Result<()> {
    if got == want {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { left: want, right: got })
    }
}

/// A composition of primitives, applied in list order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
#[serde(bound(serialize = "T: Scalar + Serialize", deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct MoebiusTransform<T> {
    primitives: Vec<Primitive<T>>,
}

impl<T: Scalar> Default for MoebiusTransform<T> {
    fn default() -> Self {
        Self::identity()
    }
}

impl<T: Scalar> MoebiusTransform<T> {
    pub fn identity() -> Self {
        Self { primitives: Vec::new() }
    }

    pub fn from_primitives(primitives: Vec<Primitive<T>>) -> Self {
        Self { primitives }
    }

    /// Inversion in the unit sphere, `x / |x|^2`.
    pub fn unit_inversion(dim: usize) -> Self {
        Self::from_primitives(vec![Primitive::Inversion {
            center: VecN::zeros(dim),
            radius: T::one(),
        }])
    }

    /// Appends a primitive applied after the existing ones.
    pub fn then(mut self, primitive: Primitive<T>) -> Self {
        self.primitives.push(primitive);
        self
    }

    /// `other` after `self`.
    pub fn compose(mut self, other: &Self) -> Self {
        self.primitives.extend(other.primitives.iter().cloned());
        self
    }

    pub fn primitives(&self) -> &[Primitive<T>] {
        &self.primitives
    }

    /// Checks every primitive against dimension `dim` and its own invariants.
    pub fn validate(&self, dim: usize) -> Result<()> {
        self.primitives.iter().try_for_each(|p| p.check(dim))
    }

    pub fn apply(&self, x: &VecN<T>) -> Result<VecN<T>> {
        self.validate(x.dim())?;
        self.apply_unchecked(x, None).map(|(y, _)| y)
    }

    /// Image of a point together with the image of a tangent vector there.
    pub fn apply_with_differential(&self, x: &VecN<T>, v: &VecN<T>) -> Result<(VecN<T>, VecN<T>)> {
        self.validate(x.dim())?;
        x.check_dim(v)?;
        let (y, w) = self.apply_unchecked(x, Some(v))?;
        Ok((y, w.expect("tangent pushed forward")))
    }

    fn apply_unchecked(&self, x: &VecN<T>, v: Option<&VecN<T>>) -> Result<(VecN<T>, Option<VecN<T>>)> {
        let mut point = x.clone();
        let mut tangent = v.cloned();
        for (k, prim) in self.primitives.iter().enumerate() {
            match prim.push(&point, tangent.as_ref()) {
                Some((p, t)) => {
                    point = p;
                    tangent = t;
                }
                None => {
                    return Err(Error::PoleHit {
                        primitive: k,
                        point: x.to_f64_vec(),
                    })
                }
            }
        }
        if !point.is_finite() {
            return Err(Error::PoleHit {
                primitive: self.primitives.len().saturating_sub(1),
                point: x.to_f64_vec(),
            });
        }
        Ok((point, tangent))
    }
}

/// Both sides of `|I(x) - I(y)|^2 = |x - y|^2 / (|x|^2 |y|^2)` for the unit
/// sphere inversion `I`.
pub fn chord_identity_check<T: Scalar>(x: &VecN<T>, y: &VecN<T>) -> Result<(T, T)> {
    x.check_dim(y)?;
    let inv = MoebiusTransform::unit_inversion(x.dim());
    let (ix, iy) = (inv.apply(x)?, inv.apply(y)?);
    let lhs = (&ix - &iy).norm_sq();
    let rhs = (x - y).norm_sq() / (x.norm_sq() * y.norm_sq());
    Ok((lhs, rhs))
}

/// Cross ratio `|D_i p| |D_j p| / (|D_i^j p| |D_{i+1}^{j+1} p|)`.
pub fn cross_ratio<T: Scalar>(p: &ClosedPolygon<T>, i: usize, j: usize) -> Result<T> {
    let m = p.len();
    if cyclic_index_distance(m, i, j)? <= 1 {
        return Err(Error::AdjacentPair { i, j, m });
    }
    let pts = [p.vertex(i), p.vertex(i + 1), p.vertex(j), p.vertex(j + 1)];
    for a in 0..4 {
        for b in (a + 1)..4 {
            if coincide(pts[a], pts[b]) {
                return Err(Error::DegeneratePair {
                    i,
                    j,
                    reason: "the four points are not pairwise distinct".into(),
                });
            }
        }
    }
    Ok(p.edge_length(i) * p.edge_length(j) / (p.edge_diff(i, j).norm() * p.edge_diff(i + 1, j + 1).norm()))
}

/// Image polygon; parameters are kept.
pub fn apply_polygon<T: Scalar>(t: &MoebiusTransform<T>, p: &ClosedPolygon<T>) -> Result<ClosedPolygon<T>> {
    t.validate(p.dim())?;
    let vertices = p
        .vertices()
        .iter()
        .map(|v| t.apply_unchecked(v, None).map(|(y, _)| y))
        .collect::<Result<Vec<_>>>()?;
    p.with_vertices(vertices)
}

/// Image curve with the same parametrization.
///
/// Poles are checked on the arc-length table grid; a pole between grid
/// points shows up later as a non-finite evaluation.
pub fn apply_curve<T: Scalar>(t: &MoebiusTransform<T>, f: &ParametricCurve<T>) -> Result<ParametricCurve<T>> {
    t.validate(f.dim())?;
    for k in 0..ARC_TABLE_PANELS {
        let x = T::lit(k as f64) / T::lit(ARC_TABLE_PANELS as f64);
        t.apply_unchecked(&f.eval(x), None)?;
    }
    let dim = f.dim();
    let nan = move || VecN::zeros(dim).map(|_| T::nan());
    let (pos_t, der_t) = (Arc::new(t.clone()), Arc::new(t.clone()));
    let (pos_f, der_f, der_pos) = (f.position_fn(), f.derivative_fn(), f.position_fn());
    let position = move |x: T| match pos_t.apply_unchecked(&pos_f(x), None) {
        Ok((y, _)) => y,
        Err(_) => nan(),
    };
    let derivative = move |x: T| match der_t.apply_unchecked(&der_pos(x), Some(&der_f(x))) {
        Ok((_, Some(v))) => v,
        _ => nan(),
    };
    ParametricCurve::from_fns(
        Arc::new(position),
        Arc::new(derivative),
        dim,
        CurveFamily::Transformed {
            base: Box::new(f.family().clone()),
        },
    )
}

/// Seeded random transform `translation . orthogonal . scaling . inversion`
/// (inversion applied first) whose inversion center keeps at least `margin`
/// from every point of `avoid`.
///
/// The inversion center is drawn from the box spanned by the data enlarged
/// by one data diameter, so the inversion genuinely distorts the data.
pub fn random_transform<T: Scalar>(seed: u64, dim: usize, avoid: &[VecN<T>], margin: T) -> Result<MoebiusTransform<T>> {
    if dim < 2 {
        return Err(Error::InvalidParameter(format!("dimension must be >= 2, got {dim}")));
    }
    for a in avoid {
        expect_dim(a.dim(), dim)?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lo = vec![0.0f64; dim];
    let mut hi = vec![0.0f64; dim];
    if let Some(first) = avoid.first() {
        lo = first.to_f64_vec();
        hi = lo.clone();
        for a in avoid {
            for (k, c) in a.to_f64_vec().into_iter().enumerate() {
                lo[k] = lo[k].min(c);
                hi[k] = hi[k].max(c);
            }
        }
    }
    let extent = lo.iter().zip(&hi).map(|(l, h)| (h - l).powi(2)).sum::<f64>().sqrt();
    let scale = if extent > 0.0 { extent } else { 1.0 };
    let mid: Vec<f64> = lo.iter().zip(&hi).map(|(l, h)| 0.5 * (l + h)).collect();
    let margin_f = margin.to_f64_lossy();

    let mut center = None;
    for _ in 0..MAX_CENTER_ATTEMPTS {
        let c: Vec<f64> = (0..dim)
            .map(|k| mid[k] + (0.5 * (hi[k] - lo[k]) + scale) * rng.gen_range(-1.0..1.0))
            .collect();
        let cv = VecN::new(c.iter().map(|&x| T::lit(x)))?;
        if avoid.iter().all(|a| a.distance(&cv).to_f64_lossy() >= margin_f) {
            center = Some(cv);
            break;
        }
    }
    let center = center.ok_or_else(|| {
        Error::InvalidParameter(format!(
            "could not place an inversion center with margin {margin_f} after {MAX_CENTER_ATTEMPTS} attempts"
        ))
    })?;
    let radius = T::lit(scale * rng.gen_range(0.5..2.0));
    let factor = T::lit(rng.gen_range(-1.0f64..1.0).exp());
    let matrix = random_orthogonal(&mut rng, dim);
    let offset = VecN::new((0..dim).map(|_| T::lit(scale * rng.gen_range(-1.0..1.0))))?;
    Ok(MoebiusTransform::from_primitives(vec![
        Primitive::Inversion { center, radius },
        Primitive::Scaling { factor },
        Primitive::Orthogonal { matrix },
        Primitive::Translation { offset },
    ]))
}

/// Orthonormalizes a random matrix by twice-iterated modified Gram-Schmidt.
/// Rows come out orthonormal, so the matrix is orthogonal; its determinant
/// may be either sign.
fn random_orthogonal<T: Scalar>(rng: &mut ChaCha8Rng, dim: usize) -> Vec<Vec<T>> {
    loop {
        let mut rows: Vec<Vec<f64>> = (0..dim)
            .map(|_| (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        let mut ok = true;
        for k in 0..dim {
            for _pass in 0..2 {
                for l in 0..k {
                    let d: f64 = rows[k].iter().zip(&rows[l]).map(|(a, b)| a * b).sum();
                    let prev = rows[l].clone();
                    for (x, p) in rows[k].iter_mut().zip(prev) {
                        *x -= d * p;
                    }
                }
            }
            let n = rows[k].iter().map(|x| x * x).sum::<f64>().sqrt();
            if n < 1e-6 {
                ok = false;
                break;
            }
            rows[k].iter_mut().for_each(|x| *x /= n);
        }
        if ok {
            return rows.into_iter().map(|r| r.into_iter().map(T::lit).collect()).collect();
        }
    }
}
