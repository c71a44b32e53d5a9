//! Closed polygons: piecewise-linear maps `R/Z -> R^n` given by vertices
//! `p(theta_i)` at increasing parameters `theta_i` in `[0, 1)`.
//!
//! All index arithmetic is cyclic: `i + 1` is always the successor mod `m`,
//! and `theta_m` is read as `1 + theta_0`.

use serde::{Deserialize, Serialize};

use crate::curves::ParametricCurve;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::vecgeom::{coincide, VecN};

#[derive(Debug, Clone, PartialEq)]
pub struct ClosedPolygon<T> {
    thetas: Vec<T>,
    vertices: Vec<VecN<T>>,
    /// Cyclic parameter gaps. For the exact equipartition `k / m` every gap
    /// is stored as `1 / m` rather than a rounded difference.
    gaps: Vec<T>,
    edge_lengths: Vec<T>,
    /// `cumulative[k]` is the path length from vertex 0 to vertex `k`;
    /// `cumulative[m]` is the total length.
    cumulative: Vec<T>,
}

/// How an inscribed polygon samples its curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Partition {
    /// `theta_k = k / m`.
    #[default]
    ParameterUniform,
    /// Vertices at equal arc-length spacing; `theta_k` are the curve
    /// parameters that achieve it.
    ArclengthUniform,
}

impl std::str::FromStr for Partition {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "parameter" | "parameter-uniform" | "uniform" => Ok(Partition::ParameterUniform),
            "arclength" | "arclength-uniform" => Ok(Partition::ArclengthUniform),
            other => Err(Error::Parse(format!("unknown partition '{other}'"))),
        }
    }
}

/// Cyclic index distance `min(|i - j|, m - |i - j|)`.
pub fn cyclic_index_distance(m: usize, i: usize, j: usize) -> Result<usize> {
    for index in [i, j] {
        if index >= m {
            return Err(Error::IndexOutOfRange { index, len: m });
        }
    }
    Ok(cyclic_distance_unchecked(m, i, j))
}

#[inline]
pub(crate) fn cyclic_distance_unchecked(m: usize, i: usize, j: usize) -> usize {
    let d = i.abs_diff(j);
    d.min(m - d)
}

impl<T: Scalar> ClosedPolygon<T> {
    /// Builds a polygon from explicit parameters and vertices.
    ///
    /// Checks: at least three vertices of one dimension, parameters strictly
    /// increasing inside `[0, 1)`, consecutive vertices distinct.
    /// Pairwise distinctness of all vertices is the separate
    /// [`validate`](Self::validate) step.
    pub fn new(thetas: Vec<T>, vertices: Vec<VecN<T>>) -> Result<Self> {
        let m = vertices.len();
        if m < 3 {
            return Err(Error::InvalidPolygon(format!("need at least 3 vertices, got {m}")));
        }
        if thetas.len() != m {
            return Err(Error::InvalidPolygon(format!(
                "{} parameters for {m} vertices",
                thetas.len()
            )));
        }
        let dim = vertices[0].dim();
        for v in &vertices {
            if v.dim() != dim {
                return Err(Error::DimensionMismatch { left: dim, right: v.dim() });
            }
            if !v.is_finite() {
                return Err(Error::NonFinite);
            }
        }
        if !thetas.iter().all(|t| t.is_finite() && *t >= T::zero() && *t < T::one()) {
            return Err(Error::InvalidPolygon("parameters must lie in [0, 1)".into()));
        }
        if thetas.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidPolygon("parameters must be strictly increasing".into()));
        }
        let mut edge_lengths = Vec::with_capacity(m);
        for i in 0..m {
            let (a, b) = (&vertices[i], &vertices[(i + 1) % m]);
            if coincide(a, b) {
                return Err(Error::CoincidentPoints(format!(
                    "consecutive vertices {i} and {}",
                    (i + 1) % m
                )));
            }
            edge_lengths.push(a.distance(b));
        }
        let mut cumulative = Vec::with_capacity(m + 1);
        let mut acc = crate::sum::CompensatedSum::new();
        cumulative.push(T::zero());
        for &l in &edge_lengths {
            acc.add(l);
            cumulative.push(acc.value());
        }
        let gaps = if thetas == equipartition::<T>(m) {
            vec![T::one() / T::lit(m as f64); m]
        } else {
            (0..m)
                .map(|i| {
                    if i + 1 < m {
                        thetas[i + 1] - thetas[i]
                    } else {
                        T::one() + thetas[0] - thetas[i]
                    }
                })
                .collect()
        };
        Ok(Self {
            thetas,
            gaps,
            vertices,
            edge_lengths,
            cumulative,
        })
    }

    /// Polygon with equipartition parameters `theta_k = k / m`.
    pub fn from_vertices(vertices: Vec<VecN<T>>) -> Result<Self> {
        let m = vertices.len();
        let thetas = equipartition(m);
        Self::new(thetas, vertices)
    }

    /// Regular `m`-gon of the given circumradius in the first two coordinates
    /// of `R^dim`, vertex `k` at angle `2 pi k / m` and `theta_k = k / m`.
    pub fn regular_ngon(m: usize, radius: T, dim: usize) -> Result<Self> {
        if m < 3 {
            return Err(Error::InvalidParameter(format!("regular n-gon needs m >= 3, got {m}")));
        }
        if dim < 2 {
            return Err(Error::InvalidParameter(format!("dimension must be >= 2, got {dim}")));
        }
        if !(radius > T::zero()) || !radius.is_finite() {
            return Err(Error::InvalidParameter("radius must be positive".into()));
        }
        let vertices = (0..m)
            .map(|k| {
                let a = T::TAU() * T::lit(k as f64) / T::lit(m as f64);
                let mut v = VecN::zeros(dim);
                v = v.axpy(radius * a.cos(), &VecN::axis(dim, 0));
                v.axpy(radius * a.sin(), &VecN::axis(dim, 1))
            })
            .collect();
        Self::from_vertices(vertices)
    }

    /// Inscribes an `m`-gon in a closed curve.
    pub fn inscribe(curve: &ParametricCurve<T>, m: usize, partition: Partition) -> Result<Self> {
        if m < 3 {
            return Err(Error::InvalidParameter(format!("inscribed polygon needs m >= 3, got {m}")));
        }
        let thetas = match partition {
            Partition::ParameterUniform => equipartition(m),
            Partition::ArclengthUniform => curve.arclength_partition(m)?,
        };
        let vertices: Vec<_> = thetas.iter().map(|&t| curve.eval(t)).collect();
        let poly = Self::new(thetas, vertices)?;
        poly.validate()?;
        Ok(poly)
    }

    /// Checks that all vertices are pairwise distinct.
    pub fn validate(&self) -> Result<()> {
        let m = self.len();
        for i in 0..m {
            for j in (i + 1)..m {
                if coincide(&self.vertices[i], &self.vertices[j]) {
                    return Err(Error::CoincidentPoints(format!("vertices {i} and {j}")));
                }
            }
        }
        Ok(())
    }

    /// Same parameters, new vertices.
    pub fn with_vertices(&self, vertices: Vec<VecN<T>>) -> Result<Self> {
        Self::new(self.thetas.clone(), vertices)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.vertices[0].dim()
    }

    pub fn vertices(&self) -> &[VecN<T>] {
        &self.vertices
    }

    pub fn thetas(&self) -> &[T] {
        &self.thetas
    }

    #[inline]
    pub fn vertex(&self, i: usize) -> &VecN<T> {
        &self.vertices[i % self.len()]
    }

    /// Cyclic parameter gap `theta_{i+1} - theta_i`.
    #[inline]
    pub fn gap(&self, i: usize) -> T {
        self.gaps[i % self.len()]
    }

    /// Fineness: the largest cyclic parameter gap.
    pub fn fineness(&self) -> T {
        self.gaps.iter().copied().fold(T::zero(), T::max)
    }

    /// `p(theta_j) - p(theta_i)`, indices mod `m`.
    #[inline]
    pub fn edge_diff(&self, i: usize, j: usize) -> VecN<T> {
        self.vertex(j) - self.vertex(i)
    }

    #[inline]
    pub fn edge_length(&self, i: usize) -> T {
        self.edge_lengths[i % self.len()]
    }

    pub fn edge_lengths(&self) -> &[T] {
        &self.edge_lengths
    }

    pub fn total_length(&self) -> T {
        self.cumulative[self.len()]
    }

    /// Shorter of the two along-polygon path lengths between vertices.
    pub fn arc_distance(&self, i: usize, j: usize) -> T {
        let m = self.len();
        let (lo, hi) = ((i % m).min(j % m), (i % m).max(j % m));
        let forward = self.cumulative[hi] - self.cumulative[lo];
        forward.min(self.total_length() - forward)
    }

    /// Largest vertex-to-vertex distance.
    pub fn diameter(&self) -> T {
        let mut d = T::zero();
        for (k, a) in self.vertices.iter().enumerate() {
            for b in &self.vertices[k + 1..] {
                d = d.max(a.distance(b));
            }
        }
        d
    }

    /// Uniformly scaled copy (about the origin).
    pub fn scaled(&self, lambda: T) -> Result<Self> {
        self.with_vertices(self.vertices.iter().map(|v| v.scale(lambda)).collect())
    }
}

pub(crate) fn equipartition<T: Scalar>(m: usize) -> Vec<T> {
    (0..m).map(|k| T::lit(k as f64) / T::lit(m as f64)).collect()
}
