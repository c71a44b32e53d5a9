use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::discrete_energy::e_cos_m;
use crate::error::{Error, Result};
use crate::moebius::{apply_polygon, random_transform};
use crate::{Polygon, Transform};

/// Baselines at or below this are treated as zero.
const ZERO_BASELINE: f64 = 1e-10;
const MAX_DRAWS_PER_TRANSFORM: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DeviationKind {
    Relative,
    Absolute,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvarianceReport {
    pub seed: u64,
    pub n_transforms: usize,
    pub baseline: f64,
    pub kind: DeviationKind,
    pub max_deviation: f64,
    pub worst_index: Option<usize>,
    pub worst_value: Option<f64>,
    pub worst_transform: Option<Transform>,
}

/// Evaluates `E^m_cos` on `n_transforms` seeded random Moebius images of `p`
/// (inversion centres kept `0.1 * diameter` away from every vertex) and
/// reports the largest deviation from the untransformed value.
pub fn invariance_sweep(p: &Polygon, n_transforms: usize, seed: u64) -> Result<InvarianceReport> {
    let baseline = e_cos_m(p, false)?.value;
    let kind = if baseline.abs() <= ZERO_BASELINE {
        DeviationKind::Absolute
    } else {
        DeviationKind::Relative
    };
    let margin = 0.1 * p.diameter();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let seeds: Vec<u64> = (0..n_transforms).map(|_| rng.gen()).collect();

    let results = seeds
        .par_iter()
        .map(|&s| {
            let mut last = None;
            for attempt in 0..MAX_DRAWS_PER_TRANSFORM as u64 {
                let t = random_transform(s.wrapping_add(attempt), p.dim(), p.vertices(), margin)?;
                match apply_polygon(&t, p) {
                    Ok(image) => {
                        let value = e_cos_m(&image, false)?.value;
                        let deviation = match kind {
                            DeviationKind::Relative => (value - baseline).abs() / baseline.abs(),
                            DeviationKind::Absolute => value.abs(),
                        };
                        return Ok((deviation, value, t));
                    }
                    Err(e @ Error::PoleHit { .. }) => last = Some(e),
                    Err(e) => return Err(e),
                }
            }
            Err(last.expect("at least one draw was made"))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut report = InvarianceReport {
        seed,
        n_transforms,
        baseline,
        kind,
        max_deviation: 0.0,
        worst_index: None,
        worst_value: None,
        worst_transform: None,
    };
    for (k, (deviation, value, t)) in results.into_iter().enumerate() {
        if report.worst_index.is_none() || deviation > report.max_deviation {
            report.max_deviation = deviation;
            report.worst_index = Some(k);
            report.worst_value = Some(value);
            report.worst_transform = Some(t);
        }
    }
    Ok(report)
}
