//! Discrete and continuous Moebius-invariant knot energies for closed
//! polygons and parametric curves in `R^n`.
//!
//! The numeric core is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix `f64`, which is what the experiment harness and file formats use.

pub mod continuous_energy;
pub mod curves;
pub mod discrete_energy;
pub mod error;
pub mod experiments;
pub mod fixtures;
pub mod io;
pub mod moebius;
pub mod polygon;
pub mod scalar;
pub mod sum;
pub mod vecgeom;

pub use continuous_energy::{ContinuousReport, DiagonalHandling, QuadratureSpec};
pub use curves::{CurveFamily, MollifierKernel, ParametricCurve, SampledCurve};
pub use discrete_energy::{DiscreteEnergy, EnergyReport, PairTerm};
pub use error::{Error, ErrorClass, Result};
pub use moebius::{MoebiusTransform, Primitive};
pub use polygon::{ClosedPolygon, Partition};
pub use scalar::Scalar;
pub use vecgeom::{Circumcircle, TriplePoint, VecN};

pub type Vec64 = VecN<f64>;
pub type Polygon = ClosedPolygon<f64>;
pub type Curve = ParametricCurve<f64>;
pub type Transform = MoebiusTransform<f64>;
pub type Report = EnergyReport<f64>;

pub type Vec32 = VecN<f32>;
pub type Polygon32 = ClosedPolygon<f32>;
pub type Curve32 = ParametricCurve<f32>;
pub type Transform32 = MoebiusTransform<f32>;
