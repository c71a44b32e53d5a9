//! Dimension-generic vector geometry: wedge norms, circumcircles, Menger
//! curvature and the unit tangent of the circle through three points.
//!
//! Nothing here uses a cross product, so every routine works in any ambient
//! dimension `n >= 2`. Degeneracy is decided with two relative thresholds:
//!
//! * two points coincide when `|a - b| <= coincident_tol * max(1, |a|, |b|)`;
//!   this is always an error, never silently treated as collinear;
//! * a triple is collinear when
//!   `|(v2 - v1) ^ (v3 - v2)| <= collinear_tol * |v2 - v1| * |v3 - v2|`.

use std::fmt;
use std::ops::{Add, Index, Mul, Neg, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A point or vector in `R^n`. Coordinates are always finite.
#[derive(Clone, PartialEq)]
pub struct VecN<T> {
    coords: SmallVec<[T; 4]>,
}

impl<T: Scalar> VecN<T> {
    pub fn new(coords: impl IntoIterator<Item = T>) -> Result<Self> {
        let coords: SmallVec<[T; 4]> = coords.into_iter().collect();
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite);
        }
        if coords.len() < 2 {
            return Err(Error::InvalidParameter(format!(
                "dimension must be at least 2, got {}",
                coords.len()
            )));
        }
        Ok(Self { coords })
    }

    /// Builds a vector without the finiteness check. Used on arithmetic
    /// results whose inputs are already validated.
    #[inline]
    pub(crate) fn from_coords_unchecked(coords: SmallVec<[T; 4]>) -> Self {
        Self { coords }
    }

    pub fn from_slice(coords: &[T]) -> Result<Self> {
        Self::new(coords.iter().copied())
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            coords: SmallVec::from_elem(T::zero(), dim),
        }
    }

    /// Unit vector along axis `k`.
    pub fn axis(dim: usize, k: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.coords[k] = T::one();
        v
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    #[inline]
    pub fn coords(&self) -> &[T] {
        &self.coords
    }

    pub fn to_f64_vec(&self) -> Vec<f64> {
        self.coords.iter().map(|c| c.to_f64_lossy()).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.coords.iter().all(|c| c.is_finite())
    }

    pub fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim() == other.dim() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            })
        }
    }

    #[inline]
    pub fn dot(&self, other: &Self) -> T {
        debug_assert_eq!(self.dim(), other.dim());
        self.coords
            .iter()
            .zip(other.coords.iter())
            .fold(T::zero(), |acc, (&a, &b)| acc + a * b)
    }

    #[inline]
    pub fn norm_sq(&self) -> T {
        self.dot(self)
    }

    #[inline]
    pub fn norm(&self) -> T {
        self.norm_sq().sqrt()
    }

    #[inline]
    pub fn scale(&self, s: T) -> Self {
        Self::from_coords_unchecked(self.coords.iter().map(|&c| c * s).collect())
    }

    /// `self + s * other`
    #[inline]
    pub fn axpy(&self, s: T, other: &Self) -> Self {
        debug_assert_eq!(self.dim(), other.dim());
        Self::from_coords_unchecked(
            self.coords
                .iter()
                .zip(other.coords.iter())
                .map(|(&a, &b)| a + s * b)
                .collect(),
        )
    }

    pub fn normalized(&self) -> Self {
        self.scale(T::one() / self.norm())
    }

    pub fn distance(&self, other: &Self) -> T {
        (self - other).norm()
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self::from_coords_unchecked(self.coords.iter().map(|&c| f(c)).collect())
    }

    pub fn max_abs(&self) -> T {
        self.coords.iter().fold(T::zero(), |m, c| m.max(c.abs()))
    }
}

impl<T: fmt::Debug> fmt::Debug for VecN<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.coords.iter()).finish()
    }
}

impl<T: Scalar + Serialize> Serialize for VecN<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.coords.as_slice().serialize(serializer)
    }
}

impl<'de, T: Scalar + Deserialize<'de>> Deserialize<'de> for VecN<T> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let coords = Vec::<T>::deserialize(deserializer)?;
        VecN::new(coords).map_err(serde::de::Error::custom)
    }
}

impl<T> Index<usize> for VecN<T> {
    type Output = T;
    fn index(&self, k: usize) -> &T {
        &self.coords[k]
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl<'a, T: Scalar> $trait<&'a VecN<T>> for &'a VecN<T> {
            type Output = VecN<T>;
            #[inline]
            fn $method(self, rhs: &'a VecN<T>) -> VecN<T> {
                assert_eq!(self.dim(), rhs.dim(), "dimension mismatch");
                VecN::from_coords_unchecked(
                    self.coords.iter().zip(rhs.coords.iter()).map(|(&a, &b)| a $op b).collect(),
                )
            }
        }
        impl<T: Scalar> $trait<VecN<T>> for VecN<T> {
            type Output = VecN<T>;
            #[inline]
            fn $method(self, rhs: VecN<T>) -> VecN<T> {
                (&self).$method(&rhs)
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);

impl<T: Scalar> Mul<T> for &VecN<T> {
    type Output = VecN<T>;
    fn mul(self, s: T) -> VecN<T> {
        self.scale(s)
    }
}

impl<T: Scalar> Neg for &VecN<T> {
    type Output = VecN<T>;
    fn neg(self) -> VecN<T> {
        self.map(|c| -c)
    }
}

/// `|a ^ b| = sqrt(|a|^2 |b|^2 - (a.b)^2)`, evaluated as the root of the sum
/// of squared 2x2 minors (Lagrange identity) so that nearly parallel inputs
/// do not lose all significant digits to cancellation.
pub fn wedge_norm<T: Scalar>(a: &VecN<T>, b: &VecN<T>) -> Result<T> {
    a.check_dim(b)?;
    Ok(wedge_norm_unchecked(a, b))
}

#[inline]
pub(crate) fn wedge_norm_unchecked<T: Scalar>(a: &VecN<T>, b: &VecN<T>) -> T {
    let n = a.dim();
    let mut acc = T::zero();
    for k in 0..n {
        for l in (k + 1)..n {
            let m = a[k] * b[l] - a[l] * b[k];
            acc += m * m;
        }
    }
    acc.sqrt()
}

fn check_same_dim<T: Scalar>(pts: &[&VecN<T>]) -> Result<()> {
    for p in &pts[1..] {
        pts[0].check_dim(p)?;
    }
    Ok(())
}

/// Coincidence under the relative threshold.
#[inline]
pub fn coincide<T: Scalar>(a: &VecN<T>, b: &VecN<T>) -> bool {
    let scale = T::one().max(a.norm()).max(b.norm());
    a.distance(b) <= T::coincident_tol() * scale
}

/// Errors when `a` and `b` coincide under the relative threshold.
pub fn ensure_distinct<T: Scalar>(a: &VecN<T>, b: &VecN<T>, what: &str) -> Result<()> {
    if coincide(a, b) {
        return Err(Error::CoincidentPoints(what.to_string()));
    }
    Ok(())
}

fn ensure_triple<T: Scalar>(v1: &VecN<T>, v2: &VecN<T>, v3: &VecN<T>) -> Result<()> {
    check_same_dim(&[v1, v2, v3])?;
    ensure_distinct(v1, v2, "v1 and v2")?;
    ensure_distinct(v2, v3, "v2 and v3")?;
    ensure_distinct(v3, v1, "v3 and v1")
}

/// Collinearity under the relative wedge threshold. Assumes distinct points.
pub fn is_collinear<T: Scalar>(v1: &VecN<T>, v2: &VecN<T>, v3: &VecN<T>) -> bool {
    let a = v2 - v1;
    let b = v3 - v2;
    wedge_norm_unchecked(&a, &b) <= T::collinear_tol() * a.norm() * b.norm()
}

/// Radius of the circle through three points; `+inf` when collinear.
pub fn circumradius<T: Scalar>(v1: &VecN<T>, v2: &VecN<T>, v3: &VecN<T>) -> Result<T> {
    ensure_triple(v1, v2, v3)?;
    if is_collinear(v1, v2, v3) {
        return Ok(T::infinity());
    }
    let a = v1 - v2;
    let b = v2 - v3;
    let c = v3 - v1;
    let w = wedge_norm_unchecked(&a, &b);
    Ok(a.norm() * b.norm() * c.norm() / (T::lit(2.0) * w))
}

/// Menger curvature, the reciprocal circumradius; zero for collinear points.
pub fn menger_curvature<T: Scalar>(v1: &VecN<T>, v2: &VecN<T>, v3: &VecN<T>) -> Result<T> {
    ensure_triple(v1, v2, v3)?;
    if is_collinear(v1, v2, v3) {
        return Ok(T::zero());
    }
    let a = v1 - v2;
    let b = v2 - v3;
    let c = v3 - v1;
    let w = wedge_norm_unchecked(&a, &b);
    Ok(T::lit(2.0) * w / (a.norm() * b.norm() * c.norm()))
}

/// Circumcenter from the barycentric weights `sin 2phi_k`, where `phi_k` is
/// the triangle angle at `v_k`.
///
/// With `a = v2 - v1`, `b = v3 - v1` one has
/// `sin 2phi_1 = 2 (a.b) |a ^ b| / (|a|^2 |b|^2)`; the common factor
/// `2 |a ^ b| / (|v1-v2|^2 |v2-v3|^2 |v3-v1|^2)` cancels in the normalization,
/// leaving `w_1 = (a.b) |v2 - v3|^2` and its cyclic analogues.
pub fn circumcenter<T: Scalar>(v1: &VecN<T>, v2: &VecN<T>, v3: &VecN<T>) -> Result<VecN<T>> {
    ensure_triple(v1, v2, v3)?;
    if is_collinear(v1, v2, v3) {
        return Err(Error::Collinear("circumcenter of collinear points".into()));
    }
    let d12 = v2 - v1;
    let d13 = v3 - v1;
    let d23 = v3 - v2;
    let w1 = d12.dot(&d13) * d23.norm_sq();
    let w2 = -d12.dot(&d23) * d13.norm_sq();
    let w3 = d13.dot(&d23) * d12.norm_sq();
    let total = w1 + w2 + w3;
    // relative to v1 to keep precision for data far from the origin
    let offset = d12.scale(w2 / total).axpy(w3 / total, &d13);
    Ok(v1 + &offset)
}

/// The circle through three points, or the line when they are collinear.
#[derive(Debug, Clone, PartialEq)]
pub enum Circumcircle<T> {
    Circle {
        center: VecN<T>,
        radius: T,
        /// Orthonormal basis of the circle's plane; `e1` points at `v1`.
        e1: VecN<T>,
        e2: VecN<T>,
    },
    Line {
        point: VecN<T>,
        direction: VecN<T>,
    },
}

impl<T: Scalar> Circumcircle<T> {
    pub fn radius(&self) -> T {
        match self {
            Circumcircle::Circle { radius, .. } => *radius,
            Circumcircle::Line { .. } => T::infinity(),
        }
    }

    /// Arc-length parametrization `c + r (cos(s/r) e1 + sin(s/r) e2)`;
    /// for a line, `point + s * direction`.
    pub fn point_at(&self, s: T) -> VecN<T> {
        match self {
            Circumcircle::Circle {
                center,
                radius,
                e1,
                e2,
            } => {
                let phi = s / *radius;
                center
                    .axpy(*radius * phi.cos(), e1)
                    .axpy(*radius * phi.sin(), e2)
            }
            Circumcircle::Line { point, direction } => point.axpy(s, direction),
        }
    }
}

pub fn circumcircle<T: Scalar>(
    v1: &VecN<T>,
    v2: &VecN<T>,
    v3: &VecN<T>,
) -> Result<Circumcircle<T>> {
    ensure_triple(v1, v2, v3)?;
    if is_collinear(v1, v2, v3) {
        return Ok(Circumcircle::Line {
            point: v1.clone(),
            direction: (v2 - v1).normalized(),
        });
    }
    let center = circumcenter(v1, v2, v3)?;
    let radius = circumradius(v1, v2, v3)?;
    let u1 = (v1 - &center).normalized();
    let u2 = (v2 - &center).normalized();
    let e2 = u2.axpy(-u2.dot(&u1), &u1).normalized();
    Ok(Circumcircle::Circle {
        center,
        radius,
        e1: u1,
        e2,
    })
}

/// Which of the three points a tangent is requested at.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TriplePoint {
    First,
    Second,
    Third,
}

/// Unit tangent at one of three points of the circle through them, oriented
/// along the traversal `v1 -> v2 -> v3`.
///
/// With cyclic differences `D_k = v_{k+1} - v_k` the tangent at `v_k` is
/// `(|D_{k-1}|^2 D_k + |D_k|^2 D_{k-1}) / (|D_k| |D_{k+1}| |D_{k-1}|)`.
/// The numerator has norm `|D_{k-1}| |D_k| |D_{k+1}|`, so the result is a
/// unit vector for every distinct triple; for collinear input it reduces to
/// the chord direction.
pub fn three_point_tangent<T: Scalar>(
    v1: &VecN<T>,
    v2: &VecN<T>,
    v3: &VecN<T>,
    at: TriplePoint,
) -> Result<VecN<T>> {
    ensure_triple(v1, v2, v3)?;
    let (prev, cur, next) = match at {
        TriplePoint::First => (v3, v1, v2),
        TriplePoint::Second => (v1, v2, v3),
        TriplePoint::Third => (v2, v3, v1),
    };
    Ok(tangent_unchecked(prev, cur, next))
}

/// Tangent at `cur` of the circle through `prev -> cur -> next`.
#[inline]
pub(crate) fn tangent_unchecked<T: Scalar>(prev: &VecN<T>, cur: &VecN<T>, next: &VecN<T>) -> VecN<T> {
    let d_in = cur - prev; // D_{k-1}
    let d_out = next - cur; // D_k
    let d_wrap = prev - next; // D_{k+1}
    let n_in = d_in.norm();
    let n_out = d_out.norm();
    let n_wrap = d_wrap.norm();
    d_out
        .scale(n_in * n_in)
        .axpy(n_out * n_out, &d_in)
        .scale(T::one() / (n_in * n_out * n_wrap))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn v(c: &[f64]) -> VecN<f64> {
        VecN::from_slice(c).unwrap()
    }

    fn cross_norm(a: &VecN<f64>, b: &VecN<f64>) -> f64 {
        let c = [
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ];
        (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt()
    }

    #[test]
    fn wedge_examples() {
        assert_eq!(wedge_norm(&v(&[1., 0., 0.]), &v(&[0., 1., 0.])).unwrap(), 1.0);
        assert_eq!(wedge_norm(&v(&[2., 0., 0.]), &v(&[4., 0., 0.])).unwrap(), 0.0);
        let a = v(&[1., 2., 2.]);
        let b = v(&[3., 0., 4.]);
        // cross product (8, 2, -6), norm sqrt(104)
        assert_relative_eq!(cross_norm(&a, &b), 104f64.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(wedge_norm(&a, &b).unwrap(), cross_norm(&a, &b), max_relative = 1e-14);
    }

    #[test]
    fn wedge_dimension_mismatch() {
        let err = wedge_norm(&v(&[1., 0.]), &v(&[1., 0., 0.])).unwrap_err();
        assert_eq!(err, Error::DimensionMismatch { left: 2, right: 3 });
    }

    #[test]
    fn rejects_non_finite_and_short() {
        assert_eq!(VecN::new([1.0, f64::NAN]).unwrap_err(), Error::NonFinite);
        assert!(VecN::new([1.0]).is_err());
    }

    #[test]
    fn circumradius_examples() {
        let tau = std::f64::consts::TAU;
        let pts: Vec<_> = (0..3)
            .map(|k| {
                let a = tau * k as f64 / 3.0;
                v(&[a.cos(), a.sin(), 0.0])
            })
            .collect();
        assert_relative_eq!(circumradius(&pts[0], &pts[1], &pts[2]).unwrap(), 1.0, max_relative = 1e-14);
        assert_eq!(
            circumradius(&v(&[0., 0., 0.]), &v(&[1., 0., 0.]), &v(&[2., 0., 0.])).unwrap(),
            f64::INFINITY
        );
        let h = 3f64.sqrt() / 2.0;
        let r = circumradius(&v(&[0., 0.]), &v(&[1., 0.]), &v(&[0.5, h])).unwrap();
        // r = s / (2 sin 60deg) = 1/sqrt(3)
        assert_relative_eq!(r, 1.0 / 3f64.sqrt(), max_relative = 1e-14);
    }

    #[test]
    fn coincident_points_are_errors() {
        let a = v(&[1., 2., 3.]);
        let b = v(&[0., 0., 1.]);
        assert!(matches!(circumradius(&a, &a, &b), Err(Error::CoincidentPoints(_))));
        assert!(matches!(menger_curvature(&a, &b, &a), Err(Error::CoincidentPoints(_))));
        assert!(matches!(
            three_point_tangent(&a, &b, &b, TriplePoint::First),
            Err(Error::CoincidentPoints(_))
        ));
        // a collinear triple is not confused with coincidence
        assert!(circumradius(&v(&[0., 0.]), &v(&[1e-6, 0.]), &v(&[1., 0.])).unwrap().is_infinite());
    }

    #[test]
    fn menger_examples() {
        let p: Vec<_> = [0.3f64, 1.7, 4.0]
            .iter()
            .map(|a| v(&[2.0 * a.cos(), 2.0 * a.sin(), 0.0]))
            .collect();
        assert_relative_eq!(menger_curvature(&p[0], &p[1], &p[2]).unwrap(), 0.5, max_relative = 1e-14);
        assert_eq!(menger_curvature(&v(&[0., 0.]), &v(&[1., 1.]), &v(&[3., 3.])).unwrap(), 0.0);
        let (a, b, c) = (v(&[0.1, -0.4, 0.9]), v(&[1.3, 0.2, -0.5]), v(&[-0.7, 0.8, 0.3]));
        let k = menger_curvature(&a, &b, &c).unwrap();
        assert_relative_eq!(k, 1.0 / circumradius(&a, &b, &c).unwrap(), max_relative = 1e-14);
    }

    #[test]
    fn circumcenter_examples() {
        let c = circumcenter(&v(&[0., 0.]), &v(&[1., 0.]), &v(&[0., 1.])).unwrap();
        assert_relative_eq!(c[0], 0.5, epsilon = 1e-15);
        assert_relative_eq!(c[1], 0.5, epsilon = 1e-15);

        let h = 3f64.sqrt() / 2.0;
        let (a, b, d) = (v(&[0., 0.]), v(&[1., 0.]), v(&[0.5, h]));
        let c = circumcenter(&a, &b, &d).unwrap();
        assert_relative_eq!(c[0], 0.5, epsilon = 1e-15);
        assert_relative_eq!(c[1], h / 3.0, epsilon = 1e-15);

        let center = v(&[3.0, -2.0, 7.5]);
        let e1 = v(&[0.6, 0.8, 0.0]);
        let e2 = v(&[0.0, 0.0, 1.0]);
        let on = |t: f64| center.axpy(2.5 * t.cos(), &e1).axpy(2.5 * t.sin(), &e2);
        let c = circumcenter(&on(0.2), &on(2.9), &on(4.4)).unwrap();
        assert!(c.distance(&center) < 1e-12 * center.norm());

        assert!(matches!(
            circumcenter(&v(&[0., 0.]), &v(&[1., 0.]), &v(&[2., 0.])),
            Err(Error::Collinear(_))
        ));
    }

    #[test]
    fn circumcircle_parametrization_hits_points() {
        let (a, b, c) = (v(&[0.2, 0.1, 0.0]), v(&[1.0, 0.5, 0.3]), v(&[-0.4, 0.9, 0.2]));
        let circle = circumcircle(&a, &b, &c).unwrap();
        let Circumcircle::Circle { center, radius, e1, e2 } = &circle else {
            panic!("expected a proper circle")
        };
        assert_relative_eq!(e1.norm(), 1.0, epsilon = 1e-14);
        assert_relative_eq!(e2.norm(), 1.0, epsilon = 1e-14);
        assert!(e1.dot(e2).abs() < 1e-14);
        for p in [&a, &b, &c] {
            assert_relative_eq!(p.distance(center), *radius, max_relative = 1e-12);
        }
        assert!(circle.point_at(0.0).distance(&a) < 1e-12);
        let line = circumcircle(&v(&[0., 0.]), &v(&[1., 0.]), &v(&[5., 0.])).unwrap();
        assert!(line.radius().is_infinite());
    }

    #[test]
    fn tangent_examples() {
        let t = three_point_tangent(
            &v(&[1., 0., 0.]),
            &v(&[0., 1., 0.]),
            &v(&[-1., 0., 0.]),
            TriplePoint::First,
        )
        .unwrap();
        assert!(t.distance(&v(&[0., 1., 0.])) < 1e-15);

        // (9 (1,0) + 1 (-3,0)) / 6 = (1,0)
        let t = three_point_tangent(&v(&[0., 0.]), &v(&[1., 0.]), &v(&[3., 0.]), TriplePoint::First)
            .unwrap();
        assert!(t.distance(&v(&[1., 0.])) < 1e-15);
    }

    #[test]
    fn tangent_follows_traversal_at_every_point() {
        // counter-clockwise traversal of the unit circle
        let at = |a: f64| v(&[a.cos(), a.sin()]);
        let ccw = |a: f64| v(&[-a.sin(), a.cos()]);
        let (a1, a2, a3) = (0.3, 1.9, 4.1);
        let cases = [
            (TriplePoint::First, a1),
            (TriplePoint::Second, a2),
            (TriplePoint::Third, a3),
        ];
        for (which, angle) in cases {
            let t = three_point_tangent(&at(a1), &at(a2), &at(a3), which).unwrap();
            assert!(t.distance(&ccw(angle)) < 1e-13, "{which:?}");
        }
    }

    fn arb_point(dim: usize) -> impl Strategy<Value = VecN<f64>> {
        prop::collection::vec(-10.0f64..10.0, dim).prop_map(|c| VecN::new(c).unwrap())
    }

    fn arb_triple() -> impl Strategy<Value = (VecN<f64>, VecN<f64>, VecN<f64>)> {
        (2usize..=5).prop_flat_map(|d| (arb_point(d), arb_point(d), arb_point(d)))
    }

    proptest! {
        #[test]
        fn lagrange_identity((a, b, _c) in arb_triple()) {
            let w = wedge_norm(&a, &b).unwrap();
            let lhs = w * w + a.dot(&b).powi(2);
            let rhs = a.norm_sq() * b.norm_sq();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1e-300));
        }

        #[test]
        fn circumcenter_equidistant((a, b, c) in arb_triple()) {
            prop_assume!(a.distance(&b) > 1e-3 && b.distance(&c) > 1e-3 && c.distance(&a) > 1e-3);
            prop_assume!(menger_curvature(&a, &b, &c).unwrap() > 1e-3);
            let center = circumcenter(&a, &b, &c).unwrap();
            let r = circumradius(&a, &b, &c).unwrap();
            for p in [&a, &b, &c] {
                prop_assert!((p.distance(&center) - r).abs() <= 1e-10 * r);
            }
            let k = menger_curvature(&a, &b, &c).unwrap();
            prop_assert!((k * r - 1.0).abs() < 1e-12);
        }

        #[test]
        fn tangent_unit_and_orthogonal_to_radius((a, b, c) in arb_triple()) {
            prop_assume!(a.distance(&b) > 1e-3 && b.distance(&c) > 1e-3 && c.distance(&a) > 1e-3);
            let t = three_point_tangent(&a, &b, &c, TriplePoint::First).unwrap();
            prop_assert!((t.norm() - 1.0).abs() < 1e-12);
            prop_assume!(menger_curvature(&a, &b, &c).unwrap() > 1e-3);
            let center = circumcenter(&a, &b, &c).unwrap();
            let radial = (&a - &center).normalized();
            prop_assert!(t.dot(&radial).abs() < 1e-10);
        }

        #[test]
        fn tangent_invariant_under_similarity(
            (a, b, c) in (arb_point(3), arb_point(3), arb_point(3)),
            shift in arb_point(3),
            angle in 0.0f64..6.3,
            lambda in 0.01f64..100.0,
        ) {
            prop_assume!(a.distance(&b) > 1e-2 && b.distance(&c) > 1e-2 && c.distance(&a) > 1e-2);
            let (s, co) = angle.sin_cos();
            let rot = |p: &VecN<f64>| v(&[co * p[0] - s * p[1], s * p[0] + co * p[1], p[2]]);
            let map = |p: &VecN<f64>| &rot(p).scale(lambda) + &shift;
            let t0 = three_point_tangent(&a, &b, &c, TriplePoint::Second).unwrap();
            let t1 = three_point_tangent(&map(&a), &map(&b), &map(&c), TriplePoint::Second).unwrap();
            prop_assert!(rot(&t0).distance(&t1) < 1e-10);
        }
    }
}
