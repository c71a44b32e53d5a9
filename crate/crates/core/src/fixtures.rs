//! Seeded polygon fixtures for experiments and tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::polygon::ClosedPolygon;
use crate::scalar::Scalar;
use crate::vecgeom::VecN;

/// Regular `m`-gon of unit circumradius with every vertex displaced by a
/// uniform random vector in the cube `[-amplitude, amplitude]^dim`.
///
/// For `amplitude` well below the edge length `2 sin(pi / m)` the result is
/// a simple polygon.
pub fn perturbed_ngon<T: Scalar>(m: usize, amplitude: f64, dim: usize, seed: u64) -> Result<ClosedPolygon<T>> {
    let base = ClosedPolygon::<T>::regular_ngon(m, T::one(), dim)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vertices = base
        .vertices()
        .iter()
        .map(|v| {
            let shift = VecN::new((0..dim).map(|_| T::lit(amplitude * rng.gen_range(-1.0..1.0))))?;
            Ok(v + &shift)
        })
        .collect::<Result<Vec<_>>>()?;
    base.with_vertices(vertices)
}

/// Planar perturbation: only the first two coordinates move.
pub fn perturbed_planar_ngon<T: Scalar>(m: usize, amplitude: f64, dim: usize, seed: u64) -> Result<ClosedPolygon<T>> {
    let base = ClosedPolygon::<T>::regular_ngon(m, T::one(), dim)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vertices = base
        .vertices()
        .iter()
        .map(|v| {
            let shift = VecN::new(
                (0..dim).map(|k| if k < 2 { T::lit(amplitude * rng.gen_range(-1.0..1.0)) } else { T::zero() }),
            )?;
            Ok(v + &shift)
        })
        .collect::<Result<Vec<_>>>()?;
    base.with_vertices(vertices)
}

/// Star-shaped random polygon in `R^3`: vertex `k` at angle `2 pi k / m` with
/// radius in `[0.6, 1.4]` and height in `[-0.4, 0.4]`. Simple by
/// construction, and generically far from cocircular.
pub fn random_star_polygon<T: Scalar>(m: usize, seed: u64) -> Result<ClosedPolygon<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vertices = (0..m)
        .map(|k| {
            let a = std::f64::consts::TAU * k as f64 / m as f64;
            let r = rng.gen_range(0.6..1.4);
            let z = rng.gen_range(-0.4..0.4);
            VecN::new([T::lit(r * a.cos()), T::lit(r * a.sin()), T::lit(z)])
        })
        .collect::<Result<Vec<_>>>()?;
    ClosedPolygon::from_vertices(vertices)
}

/// Rotates vertex `k` of a polygon in `R^3` by `angle` about the line through
/// its two neighbours. All edge lengths are preserved.
pub fn hinge_rotate(p: &ClosedPolygon<f64>, k: usize, angle: f64) -> Result<ClosedPolygon<f64>> {
    if p.dim() != 3 {
        return Err(Error::InvalidParameter(format!("hinge rotation needs R^3, got R^{}", p.dim())));
    }
    let m = p.len();
    let (a, c) = (p.vertex(k + m - 1), p.vertex(k + 1));
    let axis = (c - a).normalized();
    let v = p.vertex(k) - a;
    let along = axis.scale(axis.dot(&v));
    let perp = &v - &along;
    let (x, y, z) = (axis[0], axis[1], axis[2]);
    let (px, py, pz) = (perp[0], perp[1], perp[2]);
    let cross = VecN::new([y * pz - z * py, z * px - x * pz, x * py - y * px])?;
    let moved = &(a + &along) + &(&perp.scale(angle.cos()) + &cross.scale(angle.sin()));
    let mut vertices = p.vertices().to_vec();
    vertices[k % m] = moved;
    p.with_vertices(vertices)
}
