use super::{DiscreteEnergy, EnergyReport};
use crate::error::Result;
use crate::polygon::ClosedPolygon;
use crate::scalar::Scalar;
use crate::sum::compensated_sum;

/// Kim-Kusner energy
/// `E^n = sum_{i != j} (1/|p_i - p_j|^2 - 1/d(i,j)^2) |p_{i+1} - p_i| |p_{j+1} - p_j|`
/// with `d` the shorter arc distance along the polygon.
///
/// Adjacent pairs vanish since chord and arc agree on a straight edge.
pub fn kim_kusner<T: Scalar>(p: &ClosedPolygon<T>) -> Result<EnergyReport<T>> {
    use rayon::prelude::*;
    p.validate()?;
    let m = p.len();
    let rows: Vec<T> = (0..m)
        .into_par_iter()
        .map(|i| {
            compensated_sum((0..m).filter(|&j| j != i).map(|j| {
                let chord_sq = p.vertex(i).distance(p.vertex(j)).powi(2);
                let arc = p.arc_distance(i, j);
                (T::one() / chord_sq - T::one() / (arc * arc)) * p.edge_length(i) * p.edge_length(j)
            }))
        })
        .collect();
    Ok(EnergyReport {
        energy: DiscreteEnergy::KimKusner,
        value: compensated_sum(rows),
        term_count: m * (m - 1),
        m,
        fineness: p.fineness(),
        terms: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::fixtures::hinge_rotate;
    use crate::vecgeom::VecN;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn v(x: f64, y: f64) -> VecN<f64> {
        VecN::new([x, y]).unwrap()
    }

    #[test]
    fn unit_square_is_one() {
        let sq = ClosedPolygon::from_vertices(vec![v(0., 0.), v(1., 0.), v(1., 1.), v(0., 1.)]).unwrap();
        let r = kim_kusner(&sq).unwrap();
        assert!((r.value - 1.0).abs() <= 1e-12);
        assert_eq!(r.term_count, 12);
    }

    #[test]
    fn scale_invariant() {
        let p = crate::fixtures::random_star_polygon::<f64>(14, 9).unwrap();
        let base = kim_kusner(&p).unwrap().value;
        for lambda in [0.01, 0.5, 3.0, 250.0] {
            let s = kim_kusner(&p.scaled(lambda).unwrap()).unwrap().value;
            assert!((s - base).abs() <= 1e-12 * base.abs());
        }
    }

    #[test]
    fn regular_ngon_is_a_local_minimum_among_equilateral_polygons() {
        let p = ClosedPolygon::<f64>::regular_ngon(16, 1.0, 3).unwrap();
        let base = kim_kusner(&p).unwrap().value;
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        for _ in 0..50 {
            let k = rng.gen_range(0..16);
            let q = hinge_rotate(&p, k, rng.gen_range(-0.05..0.05)).unwrap();
            assert!(kim_kusner(&q).unwrap().value >= base - 1e-12);
        }
    }

    #[test]
    fn free_vertex_moves_can_lower_even_ngons() {
        // the shorter-arc minimum has a kink at antipodal pairs
        let p = ClosedPolygon::<f64>::regular_ngon(16, 1.0, 2).unwrap();
        let base = kim_kusner(&p).unwrap().value;
        let mut verts = p.vertices().to_vec();
        verts[0] = &verts[0] + &v(0.0, 1e-4);
        assert!(kim_kusner(&p.with_vertices(verts).unwrap()).unwrap().value < base);
    }

    #[test]
    fn coincident_vertices_rejected() {
        let p = ClosedPolygon::from_vertices(vec![v(0., 0.), v(1., 0.), v(0., 0.), v(0., 1.)]).unwrap();
        assert!(matches!(kim_kusner(&p), Err(Error::CoincidentPoints(_))));
    }
}
