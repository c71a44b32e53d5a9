//! Discrete knot energies of closed polygons.
//!
//! * [`e_cos_m`]: the Moebius-invariant discretization of the cosine
//!   formula, summed over ordered index pairs with cyclic distance `> 1`;
//! * [`e_cos_m_density`]: the piecewise-constant integrand whose double
//!   integral over the parameter torus reproduces [`e_cos_m`];
//! * [`kim_kusner`]: the Kim-Kusner energy `E^n`;
//! * [`simon_md`]: Simon's minimal distance energy `U_MD`.
//!
//! Every energy is accumulated row by row with compensated summation and a
//! fixed reduction order, so results do not depend on the thread count.

mod ecos;
mod kim_kusner;
mod simon;

use serde::{Deserialize, Serialize};

pub use ecos::{cos_alpha, cos_alpha_tilde, e_cos_m, e_cos_m_density, pair_term, PairTerm};
pub use kim_kusner::kim_kusner;
pub use simon::{segment_min_distance, simon_md};

use crate::error::{Error, Result};
use crate::polygon::ClosedPolygon;
use crate::scalar::Scalar;

/// Which discrete energy a report or experiment refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiscreteEnergy {
    ECos,
    KimKusner,
    SimonMd,
}

impl DiscreteEnergy {
    pub fn name(self) -> &'static str {
        match self {
            DiscreteEnergy::ECos => "ecos",
            DiscreteEnergy::KimKusner => "kk",
            DiscreteEnergy::SimonMd => "simon",
        }
    }

    pub fn evaluate<T: Scalar>(self, p: &ClosedPolygon<T>) -> Result<T> {
        Ok(self.report(p, false)?.value)
    }

    pub fn report<T: Scalar>(self, p: &ClosedPolygon<T>, keep_terms: bool) -> Result<EnergyReport<T>> {
        match self {
            DiscreteEnergy::ECos => e_cos_m(p, keep_terms),
            DiscreteEnergy::KimKusner => kim_kusner(p),
            DiscreteEnergy::SimonMd => simon_md(p),
        }
    }
}

impl std::str::FromStr for DiscreteEnergy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ecos" | "e_cos" => Ok(DiscreteEnergy::ECos),
            "kk" | "kim_kusner" | "kim-kusner" => Ok(DiscreteEnergy::KimKusner),
            "simon" | "simon_md" => Ok(DiscreteEnergy::SimonMd),
            other => Err(Error::Parse(format!("unknown discrete energy '{other}'"))),
        }
    }
}

/// Result of a discrete energy evaluation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyReport<T> {
    pub energy: DiscreteEnergy,
    pub value: T,
    pub term_count: usize,
    pub m: usize,
    pub fineness: T,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub terms: Option<Vec<PairTerm<T>>>,
}
