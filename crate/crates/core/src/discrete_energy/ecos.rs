use serde::Serialize;

use super::{DiscreteEnergy, EnergyReport};
use crate::curves::reduce;
use crate::error::{Error, Result};
use crate::polygon::{cyclic_distance_unchecked, ClosedPolygon};
use crate::scalar::Scalar;
use crate::sum::{compensated_sum, CompensatedSum};
use crate::vecgeom::coincide;

/// One summand of `E^m_cos`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairTerm<T> {
    pub i: usize,
    pub j: usize,
    pub cross_ratio: T,
    pub cos_alpha: T,
    pub cos_alpha_tilde: T,
    /// `cross_ratio * (1 - (cos_alpha + cos_alpha_tilde) / 2)`
    pub contribution: T,
}

/// Difference vectors and norms shared by both angle formulas.
///
/// With `u = D_i / |D_i|`, `w = D_j / |D_j|`:
///
/// ```text
/// cos a_ij  = ((c.u)(a.w) + (a.u)(d.w) - |a|^2 u.w - |D_i||D_j|) / (|c| |d|)
/// cos a~_ij = ((d.u)(b.w) + (b.u)(c.w) - |b|^2 u.w - |D_i||D_j|) / (|c| |d|)
/// ```
///
/// where `a = D_i^j`, `b = D_{i+1}^{j+1}`, `c = D_{i+1}^j`, `d = D_i^{j+1}`.
/// These are the expanded dot products of the unit tangents
/// `t(i, i+1, j) . t(j+1, i, j)` at `p_j` and
/// `t(j+1, i, i+1) . t(j, j+1, i+1)` at `p_{i+1}`; only dot products and
/// norms appear, so collinear quadruples need no special case.
struct Quad<T> {
    len_i: T,
    len_j: T,
    a_norm_sq: T,
    b_norm_sq: T,
    c_norm: T,
    d_norm: T,
    a_norm: T,
    b_norm: T,
    uw: T,
    au: T,
    aw: T,
    bu: T,
    bw: T,
    cu: T,
    cw: T,
    du: T,
    dw: T,
}

impl<T: Scalar> Quad<T> {
    fn new(p: &ClosedPolygon<T>, i: usize, j: usize) -> Result<Self> {
        let pts = [p.vertex(i), p.vertex(i + 1), p.vertex(j), p.vertex(j + 1)];
        for s in 0..4 {
            for t in (s + 1)..4 {
                if coincide(pts[s], pts[t]) {
                    return Err(Error::DegeneratePair {
                        i,
                        j,
                        reason: "the four points are not pairwise distinct".into(),
                    });
                }
            }
        }
        let [pi, pi1, pj, pj1] = pts;
        let len_i = p.edge_length(i);
        let len_j = p.edge_length(j);
        let u = (pi1 - pi).scale(T::one() / len_i);
        let w = (pj1 - pj).scale(T::one() / len_j);
        let a = pj - pi;
        let b = pj1 - pi1;
        let c = pj - pi1;
        let d = pj1 - pi;
        let a_norm_sq = a.norm_sq();
        let b_norm_sq = b.norm_sq();
        Ok(Self {
            len_i,
            len_j,
            a_norm_sq,
            b_norm_sq,
            a_norm: a_norm_sq.sqrt(),
            b_norm: b_norm_sq.sqrt(),
            c_norm: c.norm(),
            d_norm: d.norm(),
            uw: u.dot(&w),
            au: a.dot(&u),
            aw: a.dot(&w),
            bu: b.dot(&u),
            bw: b.dot(&w),
            cu: c.dot(&u),
            cw: c.dot(&w),
            du: d.dot(&u),
            dw: d.dot(&w),
        })
    }

    fn cos_alpha(&self) -> T {
        (self.cu * self.aw + self.au * self.dw - self.a_norm_sq * self.uw - self.len_i * self.len_j)
            / (self.c_norm * self.d_norm)
    }

    fn cos_alpha_tilde(&self) -> T {
        (self.du * self.bw + self.bu * self.cw - self.b_norm_sq * self.uw - self.len_i * self.len_j)
            / (self.c_norm * self.d_norm)
    }

    fn cross_ratio(&self) -> T {
        self.len_i * self.len_j / (self.a_norm * self.b_norm)
    }
}

fn check_admissible<T: Scalar>(p: &ClosedPolygon<T>, i: usize, j: usize) -> Result<()> {
    let m = p.len();
    for index in [i, j] {
        if index >= m {
            return Err(Error::IndexOutOfRange { index, len: m });
        }
    }
    if cyclic_distance_unchecked(m, i, j) <= 1 {
        return Err(Error::AdjacentPair { i, j, m });
    }
    Ok(())
}

/// Clamps a cosine into `[-1, 1]` when it overshoots by rounding only.
fn clamp_cos<T: Scalar>(c: T, i: usize, j: usize, what: &str) -> Result<T> {
    let slack = T::rounding_slack();
    if !c.is_finite() || c > T::one() + slack || c < -T::one() - slack {
        return Err(Error::DegeneratePair {
            i,
            j,
            reason: format!("{what} = {c} outside [-1, 1]"),
        });
    }
    Ok(c.max(-T::one()).min(T::one()))
}

/// Cosine of the angle at `p_j` between the circles `C_{i,j}` (through
/// `p_i, p_{i+1}, p_j`) and `C_{j,i}` (through `p_j, p_{j+1}, p_i`).
pub fn cos_alpha<T: Scalar>(p: &ClosedPolygon<T>, i: usize, j: usize) -> Result<T> {
    check_admissible(p, i, j)?;
    clamp_cos(Quad::new(p, i, j)?.cos_alpha(), i, j, "cos alpha")
}

/// Cosine of the angle at `p_{i+1}` between the circles `C_{i,j+1}`
/// (through `p_i, p_{i+1}, p_{j+1}`) and `C_{j,i+1}` (through
/// `p_j, p_{j+1}, p_{i+1}`).
pub fn cos_alpha_tilde<T: Scalar>(p: &ClosedPolygon<T>, i: usize, j: usize) -> Result<T> {
    check_admissible(p, i, j)?;
    clamp_cos(Quad::new(p, i, j)?.cos_alpha_tilde(), i, j, "cos alpha tilde")
}

/// The full summand for the ordered pair `(i, j)`.
pub fn pair_term<T: Scalar>(p: &ClosedPolygon<T>, i: usize, j: usize) -> Result<PairTerm<T>> {
    check_admissible(p, i, j)?;
    pair_term_unchecked(p, i, j)
}

fn pair_term_unchecked<T: Scalar>(p: &ClosedPolygon<T>, i: usize, j: usize) -> Result<PairTerm<T>> {
    let q = Quad::new(p, i, j)?;
    let cos_alpha = clamp_cos(q.cos_alpha(), i, j, "cos alpha")?;
    let cos_alpha_tilde = clamp_cos(q.cos_alpha_tilde(), i, j, "cos alpha tilde")?;
    let cross_ratio = q.cross_ratio();
    let contribution = cross_ratio * (T::one() - T::lit(0.5) * (cos_alpha + cos_alpha_tilde));
    // cosines are clamped, so the bracket is already >= 0
    debug_assert!(contribution >= T::zero());
    Ok(PairTerm {
        i,
        j,
        cross_ratio,
        cos_alpha,
        cos_alpha_tilde,
        contribution,
    })
}

/// Row `i` of the ordered-pair sum, `j` ascending.
fn row_terms<T: Scalar>(p: &ClosedPolygon<T>, i: usize) -> Result<Vec<PairTerm<T>>> {
    let m = p.len();
    (0..m)
        .filter(|&j| cyclic_distance_unchecked(m, i, j) > 1)
        .map(|j| pair_term_unchecked(p, i, j))
        .collect()
}

/// `E^m_cos(p) = sum_{d_m(i,j) > 1} cross_ratio(i,j) (1 - (cos a_ij + cos a~_ij) / 2)`
/// over ordered pairs. Zero exactly when all vertices lie on one circle.
pub fn e_cos_m<T: Scalar>(p: &ClosedPolygon<T>, keep_terms: bool) -> Result<EnergyReport<T>> {
    use rayon::prelude::*;
    let m = p.len();
    type Row<T> = (T, usize, Option<Vec<PairTerm<T>>>);
    let rows: Vec<Result<Row<T>>> = (0..m)
        .into_par_iter()
        .map(|i| {
            let terms = row_terms(p, i)?;
            let sum = compensated_sum(terms.iter().map(|t| t.contribution));
            let n = terms.len();
            Ok((sum, n, keep_terms.then_some(terms)))
        })
        .collect();
    let mut acc = CompensatedSum::new();
    let mut count = 0;
    let mut kept = keep_terms.then(Vec::new);
    for row in rows {
        let (sum, n, terms) = row?;
        acc.add(sum);
        count += n;
        if let (Some(all), Some(terms)) = (kept.as_mut(), terms) {
            all.extend(terms);
        }
    }
    Ok(EnergyReport {
        energy: DiscreteEnergy::ECos,
        value: acc.value(),
        term_count: count,
        m,
        fineness: p.fineness(),
        terms: kept,
    })
}

/// Index of the half-open parameter cell `[theta_i, theta_{i+1})` containing
/// `x` (taken mod 1; the last cell wraps through 1).
fn cell_of<T: Scalar>(p: &ClosedPolygon<T>, x: T) -> usize {
    let thetas = p.thetas();
    let m = thetas.len();
    let mut x = reduce(x);
    if x < thetas[0] {
        x += T::one();
    }
    // last index with theta <= x
    match thetas.iter().rposition(|&t| t <= x) {
        Some(k) => k,
        None => m - 1,
    }
}

/// Piecewise-constant density whose double integral over the parameter
/// torus equals [`e_cos_m`]:
///
/// `I(x, y) = contribution(i, j) / (gap_i gap_j)` for `x` in cell `i`, `y` in
/// cell `j`, which is `(1 - (cos a + cos a~)/2) / (|D_i^j| |D_{i+1}^{j+1}|)`
/// times the polygon speeds `|D_i| / gap_i` and `|D_j| / gap_j`. Cells with
/// cyclic index distance `<= 1` carry density zero.
pub fn e_cos_m_density<T: Scalar>(p: &ClosedPolygon<T>, x: T, y: T) -> Result<T> {
    let m = p.len();
    let (i, j) = (cell_of(p, x), cell_of(p, y));
    if cyclic_distance_unchecked(m, i, j) <= 1 {
        return Ok(T::zero());
    }
    let term = pair_term_unchecked(p, i, j)?;
    Ok(term.contribution / (p.gap(i) * p.gap(j)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{perturbed_ngon, random_star_polygon};
    use crate::vecgeom::{three_point_tangent, TriplePoint, VecN};

    /// Unit tangent at the third point of the circle through `a -> b -> c`.
    fn t3(p: &ClosedPolygon<f64>, a: usize, b: usize, c: usize) -> VecN<f64> {
        three_point_tangent(p.vertex(a), p.vertex(b), p.vertex(c), TriplePoint::Third).unwrap()
    }

    fn oracle_cos_alpha(p: &ClosedPolygon<f64>, i: usize, j: usize) -> f64 {
        t3(p, i, i + 1, j).dot(&t3(p, j + 1, i, j))
    }

    fn oracle_cos_alpha_tilde(p: &ClosedPolygon<f64>, i: usize, j: usize) -> f64 {
        t3(p, j + 1, i, i + 1).dot(&t3(p, j, j + 1, i + 1))
    }

    #[test]
    fn cocircular_angles_vanish() {
        let hex = ClosedPolygon::<f64>::regular_ngon(6, 1.0, 3).unwrap();
        assert!((cos_alpha(&hex, 0, 3).unwrap() - 1.0).abs() < 1e-12);
        assert!((cos_alpha_tilde(&hex, 0, 3).unwrap() - 1.0).abs() < 1e-12);
        let ngon = ClosedPolygon::<f64>::regular_ngon(13, 2.0, 2).unwrap();
        for i in 0..13 {
            for j in 0..13 {
                if cyclic_distance_unchecked(13, i, j) > 1 {
                    assert!((cos_alpha(&ngon, i, j).unwrap() - 1.0).abs() < 1e-12);
                    assert!((cos_alpha_tilde(&ngon, i, j).unwrap() - 1.0).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn closed_form_matches_tangent_oracle() {
        for seed in 0..10 {
            let p = random_star_polygon::<f64>(9, seed).unwrap();
            for i in 0..9 {
                for j in 0..9 {
                    if cyclic_distance_unchecked(9, i, j) <= 1 {
                        continue;
                    }
                    let ca = cos_alpha(&p, i, j).unwrap();
                    let ct = cos_alpha_tilde(&p, i, j).unwrap();
                    assert!((ca - oracle_cos_alpha(&p, i, j)).abs() < 1e-12, "seed {seed} ({i},{j})");
                    assert!((ct - oracle_cos_alpha_tilde(&p, i, j)).abs() < 1e-12, "seed {seed} ({i},{j})");
                    // symmetry: the same two circles meet at equal angles at both crossings
                    assert!((ca - cos_alpha(&p, j, i).unwrap()).abs() < 1e-12);
                    assert!((ct - cos_alpha_tilde(&p, j, i).unwrap()).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn pair_terms_are_symmetric() {
        let p = perturbed_ngon::<f64>(10, 0.2, 3, 4).unwrap();
        for i in 0..10 {
            for j in 0..10 {
                if cyclic_distance_unchecked(10, i, j) > 1 {
                    let (a, b) = (pair_term(&p, i, j).unwrap(), pair_term(&p, j, i).unwrap());
                    assert!((a.contribution - b.contribution).abs() <= 1e-12 * a.contribution.max(1.0));
                }
            }
        }
    }

    #[test]
    fn admissibility_errors() {
        let p = ClosedPolygon::<f64>::regular_ngon(6, 1.0, 2).unwrap();
        assert_eq!(cos_alpha(&p, 2, 3).unwrap_err(), Error::AdjacentPair { i: 2, j: 3, m: 6 });
        assert_eq!(cos_alpha_tilde(&p, 0, 5).unwrap_err(), Error::AdjacentPair { i: 0, j: 5, m: 6 });
        assert_eq!(pair_term(&p, 1, 1).unwrap_err(), Error::AdjacentPair { i: 1, j: 1, m: 6 });
        assert_eq!(pair_term(&p, 0, 6).unwrap_err(), Error::IndexOutOfRange { index: 6, len: 6 });
    }

    #[test]
    fn degenerate_quadruple_reports_pair() {
        let v = |x: f64, y: f64| VecN::new([x, y]).unwrap();
        // vertices 0 and 3 coincide
        let p = ClosedPolygon::from_vertices(vec![v(0., 0.), v(1., 0.), v(1., 1.), v(0., 0.), v(-1., 1.), v(-1., 0.)])
            .unwrap();
        let err = e_cos_m(&p, false).unwrap_err();
        assert!(matches!(err, Error::DegeneratePair { i: 0, j: 2, .. }), "{err:?}");
    }

    #[test]
    fn regular_ngons_have_zero_energy() {
        for n in [4, 5, 8, 16, 33] {
            let p = ClosedPolygon::<f64>::regular_ngon(n, 1.7, 3).unwrap();
            let r = e_cos_m(&p, false).unwrap();
            assert!(r.value.abs() <= 1e-10, "n={n}: {}", r.value);
            assert_eq!(r.term_count, n * (n - 3));
        }
    }

    #[test]
    fn perturbed_polygons_have_positive_energy() {
        for seed in 0..5 {
            let p = perturbed_ngon::<f64>(12, 0.05, 3, seed).unwrap();
            assert!(e_cos_m(&p, false).unwrap().value > 1e-4);
        }
    }

    #[test]
    fn retained_terms_sum_to_value() {
        let p = random_star_polygon::<f64>(11, 2).unwrap();
        let r = e_cos_m(&p, true).unwrap();
        let terms = r.terms.as_ref().unwrap();
        assert_eq!(terms.len(), r.term_count);
        let total = compensated_sum(terms.iter().map(|t| t.contribution));
        assert!((total - r.value).abs() <= 1e-12 * r.value);
        for t in terms {
            assert!(t.contribution >= 0.0);
        }
    }

    #[test]
    fn density_is_zero_on_excluded_cells_and_integrates_to_energy() {
        let p = ClosedPolygon::new(
            vec![0.0, 0.07, 0.2, 0.31, 0.5, 0.58, 0.77, 0.9],
            random_star_polygon::<f64>(8, 5).unwrap().vertices().to_vec(),
        )
        .unwrap();
        // cell 7 wraps through 1: [0.9, 1.07)
        assert_eq!(e_cos_m_density(&p, 0.95, 0.03).unwrap(), 0.0);
        assert_eq!(e_cos_m_density(&p, 0.25, 0.35).unwrap(), 0.0);
        assert!(e_cos_m_density(&p, 0.1, 0.6).unwrap() > 0.0);
        let mids: Vec<f64> = (0..8).map(|i| p.thetas()[i] + 0.5 * p.gap(i)).collect();
        let mut acc = CompensatedSum::new();
        for i in 0..8 {
            for j in 0..8 {
                acc.add(e_cos_m_density(&p, mids[i], mids[j]).unwrap() * p.gap(i) * p.gap(j));
            }
        }
        let e = e_cos_m(&p, false).unwrap().value;
        assert!((acc.value() - e).abs() <= 1e-10 * e);
    }

    #[test]
    fn reparametrizing_changes_density_but_not_its_integral() {
        let shape = random_star_polygon::<f64>(7, 8).unwrap();
        let a = shape.clone();
        let b = ClosedPolygon::new(vec![0.0, 0.1, 0.15, 0.4, 0.62, 0.7, 0.81], shape.vertices().to_vec()).unwrap();
        let cell_sum = |p: &ClosedPolygon<f64>| {
            let mut acc = CompensatedSum::new();
            for i in 0..7 {
                for j in 0..7 {
                    let (x, y) = (p.thetas()[i] + 0.5 * p.gap(i), p.thetas()[j] + 0.5 * p.gap(j));
                    acc.add(e_cos_m_density(p, x, y).unwrap() * p.gap(i) * p.gap(j));
                }
            }
            acc.value()
        };
        let (da, db) = (e_cos_m_density(&a, 0.05, 0.5).unwrap(), e_cos_m_density(&b, 0.05, 0.45).unwrap());
        assert!((da - db).abs() > 1e-3 * da);
        assert!((cell_sum(&a) - cell_sum(&b)).abs() <= 1e-12 * cell_sum(&a));
    }

    #[test]
    fn float32_agrees_with_float64() {
        let p64 = perturbed_ngon::<f64>(10, 0.1, 3, 1).unwrap();
        let verts32 = p64
            .vertices()
            .iter()
            .map(|v| VecN::new(v.coords().iter().map(|&c| c as f32)).unwrap())
            .collect();
        let p32 = ClosedPolygon::<f32>::from_vertices(verts32).unwrap();
        let (a, b) = (e_cos_m(&p64, false).unwrap().value, e_cos_m(&p32, false).unwrap().value);
        assert!(((b as f64) - a).abs() < 1e-3 * a, "{a} vs {b}");
    }
}
