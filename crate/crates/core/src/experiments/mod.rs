//! Numerical experiments: inscribed-polygon convergence sweeps, Moebius
//! invariance sweeps, a fineness probe and finite-difference descent.
//!
//! Everything here works in `f64` and is deterministic for a fixed seed.

mod convergence;
mod invariance;
mod liminf;
mod minimize;
mod plot;

pub use convergence::{fit_rate, gamma_limsup_sweep, ConvergenceRow, ConvergenceTable, RateFit};
pub use invariance::{invariance_sweep, DeviationKind, InvarianceReport};
pub use liminf::{liminf_probe, stale_thetas, LiminfReport, LiminfRow};
pub use minimize::{
    cocircularity_spread, fd_gradient, minimize, EnergyMix, IterationRecord, MinimizeOptions, MinimizeTrace,
    Termination,
};
pub use plot::convergence_svg;
