use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::discrete_energy::DiscreteEnergy;
use crate::error::{Error, Result};
use crate::sum::compensated_sum;
use crate::vecgeom::{circumradius, VecN};
use crate::Polygon;

/// Weighted sum of discrete energies, written `ecos`, `kk + 0.01*simon`, ...
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyMix {
    pub terms: Vec<(DiscreteEnergy, f64)>,
}

impl EnergyMix {
    pub fn single(energy: DiscreteEnergy) -> Self {
        Self {
            terms: vec![(energy, 1.0)],
        }
    }

    pub fn evaluate(&self, p: &Polygon) -> Result<f64> {
        let values = self
            .terms
            .iter()
            .map(|&(e, w)| Ok(w * e.evaluate(p)?))
            .collect::<Result<Vec<_>>>()?;
        Ok(compensated_sum(values))
    }
}

impl From<DiscreteEnergy> for EnergyMix {
    fn from(e: DiscreteEnergy) -> Self {
        Self::single(e)
    }
}

impl fmt::Display for EnergyMix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, (e, w)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, "+")?;
            }
            if *w == 1.0 {
                write!(f, "{}", e.name())?;
            } else {
                write!(f, "{w}*{}", e.name())?;
            }
        }
        Ok(())
    }
}

impl FromStr for EnergyMix {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let terms = s
            .split('+')
            .map(|term| {
                let term = term.trim();
                match term.split_once('*') {
                    Some((w, e)) => {
                        let w: f64 = w
                            .trim()
                            .parse()
                            .map_err(|_| Error::Parse(format!("bad weight in '{term}'")))?;
                        if !(w.is_finite() && w > 0.0) {
                            return Err(Error::Parse(format!("weights must be positive, got {w}")));
                        }
                        Ok((e.trim().parse()?, w))
                    }
                    None => Ok((term.parse()?, 1.0)),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { terms })
    }
}

impl Serialize for EnergyMix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinimizeOptions {
    pub max_iter: usize,
    /// Stop once the gradient norm drops below this.
    pub grad_tol: f64,
    /// First trial displacement, as a fraction of the diameter.
    pub initial_step: f64,
    /// Stop when backtracking shrinks the step below this.
    pub min_step: f64,
    pub armijo: f64,
    /// Finite-difference step, as a fraction of the diameter.
    pub fd_scale: f64,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        Self {
            max_iter: 500,
            grad_tol: 1e-7,
            initial_step: 0.05,
            min_step: 1e-14,
            armijo: 1e-4,
            fd_scale: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub energy: f64,
    pub grad_norm: f64,
    /// Accepted step length along the negative gradient.
    pub step: f64,
    pub max_displacement: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum Termination {
    GradientTolerance,
    StepFloor,
    IterationCap,
    EvaluationError { message: String },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinimizeTrace {
    pub energy: EnergyMix,
    pub initial_energy: f64,
    /// One record per accepted step.
    pub records: Vec<IterationRecord>,
    pub termination: Termination,
    #[serde(skip)]
    pub final_polygon: Polygon,
}

impl MinimizeTrace {
    pub fn accepted_steps(&self) -> usize {
        self.records.len()
    }

    pub fn final_energy(&self) -> f64 {
        self.records.last().map_or(self.initial_energy, |r| r.energy)
    }

    pub fn energies_non_increasing(&self) -> bool {
        let mut prev = self.initial_energy;
        self.records.iter().all(|r| {
            let ok = r.energy <= prev;
            prev = r.energy;
            ok
        })
    }
}

fn flatten(p: &Polygon) -> Vec<f64> {
    p.vertices().iter().flat_map(|v| v.coords().to_vec()).collect()
}

fn rebuild(p: &Polygon, flat: &[f64]) -> Result<Polygon> {
    let dim = p.dim();
    let vertices = flat.chunks(dim).map(VecN::from_slice).collect::<Result<Vec<_>>>()?;
    p.with_vertices(vertices)
}

/// Central differences with step `h` in every vertex coordinate.
pub fn fd_gradient(energy: &EnergyMix, p: &Polygon, h: f64) -> Result<Vec<f64>> {
    let x = flatten(p);
    (0..x.len())
        .into_par_iter()
        .map(|k| {
            let mut plus = x.clone();
            let mut minus = x.clone();
            plus[k] += h;
            minus[k] -= h;
            let ep = energy.evaluate(&rebuild(p, &plus)?)?;
            let em = energy.evaluate(&rebuild(p, &minus)?)?;
            Ok((ep - em) / (2.0 * h))
        })
        .collect()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Gradient descent with finite-difference gradients and Armijo
/// backtracking. The step is halved until the Armijo condition holds and
/// doubled after every accepted step.
///
/// An energy failure while computing a gradient ends the run with
/// [`Termination::EvaluationError`]; failing trial points are treated as
/// rejected steps.
pub fn minimize(p0: &Polygon, energy: &EnergyMix, opts: &MinimizeOptions) -> Result<MinimizeTrace> {
    if !(opts.initial_step > 0.0 && opts.min_step > 0.0 && opts.fd_scale > 0.0 && opts.armijo > 0.0) {
        return Err(Error::InvalidParameter("step sizes and Armijo constant must be positive".into()));
    }
    let mut p = p0.clone();
    let mut e = energy.evaluate(&p)?;
    let initial_energy = e;
    let diameter = p.diameter();
    let h = opts.fd_scale * diameter;
    let mut records = Vec::new();
    let mut step: Option<f64> = None;

    let termination = loop {
        if records.len() >= opts.max_iter {
            break Termination::IterationCap;
        }
        let g = match fd_gradient(energy, &p, h) {
            Ok(g) => g,
            Err(err) => break Termination::EvaluationError { message: err.to_string() },
        };
        let gn = norm(&g);
        if gn < opts.grad_tol {
            break Termination::GradientTolerance;
        }
        let mut t = step.unwrap_or(opts.initial_step * diameter / gn);
        let x = flatten(&p);
        let accepted = loop {
            if t * gn < opts.min_step * diameter {
                break None;
            }
            let trial: Vec<f64> = x.iter().zip(&g).map(|(xi, gi)| xi - t * gi).collect();
            let candidate = rebuild(&p, &trial).and_then(|q| Ok((energy.evaluate(&q)?, q)));
            match candidate {
                Ok((et, q)) if et <= e - opts.armijo * t * gn * gn => break Some((et, q)),
                _ => t *= 0.5,
            }
        };
        let Some((et, q)) = accepted else {
            break Termination::StepFloor;
        };
        let max_displacement = p
            .vertices()
            .iter()
            .zip(q.vertices())
            .map(|(a, b)| a.distance(b))
            .fold(0.0, f64::max);
        records.push(IterationRecord {
            iteration: records.len() + 1,
            energy: et,
            grad_norm: gn,
            step: t,
            max_displacement,
        });
        p = q;
        e = et;
        step = Some(2.0 * t);
    };
    Ok(MinimizeTrace {
        energy: energy.clone(),
        initial_energy,
        records,
        termination,
        final_polygon: p,
    })
}

/// `(max - min) / mean` over the circumradii of all vertex triples; 0 for a
/// cocircular polygon, infinite if some triple is collinear.
pub fn cocircularity_spread(p: &Polygon) -> Result<f64> {
    let m = p.len();
    let mut radii = Vec::new();
    for a in 0..m {
        for b in (a + 1)..m {
            for c in (b + 1)..m {
                radii.push(circumradius(p.vertex(a), p.vertex(b), p.vertex(c))?);
            }
        }
    }
    let max = radii.iter().copied().fold(f64::MIN, f64::max);
    let min = radii.iter().copied().fold(f64::MAX, f64::min);
    if !max.is_finite() {
        return Ok(f64::INFINITY);
    }
    let mean = compensated_sum(radii.iter().copied()) / radii.len() as f64;
    Ok((max - min) / mean)
}
