use crate::error::{PslError, Result};
use crate::geometry::DistanceMatrix;

use super::{ComplexKind, FilteredComplex, Simplex, MAX_SUPPORTED_DIM};

/// Vietoris-Rips filtration with the diameter convention: a simplex enters at
/// the largest pairwise distance among its vertices. Simplices with an
/// infinite pair, or a diameter above `max_scale`, are omitted.
pub fn build_vr(dist: &DistanceMatrix, max_dim: usize, max_scale: f64) -> Result<FilteredComplex> {
    if max_dim > MAX_SUPPORTED_DIM {
        return Err(PslError::DimensionMismatch(format!(
            "max_dim {max_dim} exceeds {MAX_SUPPORTED_DIM}"
        )));
    }
    let n = dist.len();
    for i in 0..n {
        if dist.get(i, i) != 0.0 {
            return Err(PslError::DimensionMismatch(format!("nonzero diagonal at {i}")));
        }
        for j in (i + 1)..n {
            let d = dist.get(i, j);
            if d != dist.get(j, i) || d.is_nan() || d < 0.0 {
                return Err(PslError::DimensionMismatch(format!(
                    "distance ({i},{j}) is not a symmetric nonnegative value"
                )));
            }
        }
    }

    let mut simplices: Vec<(Simplex, f64)> = (0..n).map(|v| (Simplex::vertex(v), 0.0)).collect();
    let admissible = |d: f64| d.is_finite() && d <= max_scale;

    let mut nbrs: Vec<Vec<usize>> = vec![Vec::new(); n];
    if max_dim >= 1 {
        for i in 0..n {
            for j in (i + 1)..n {
                let d = dist.get(i, j);
                if admissible(d) {
                    simplices.push((Simplex::from_sorted(vec![i, j]), d));
                    nbrs[i].push(j);
                }
            }
        }
    }
    if max_dim >= 2 {
        for i in 0..n {
            for (a, &j) in nbrs[i].iter().enumerate() {
                for &k in &nbrs[i][a + 1..] {
                    let djk = dist.get(j, k);
                    if admissible(djk) {
                        let value = dist.get(i, j).max(dist.get(i, k)).max(djk);
                        simplices.push((Simplex::from_sorted(vec![i, j, k]), value));
                    }
                }
            }
        }
    }
    FilteredComplex::new(ComplexKind::VietorisRips, max_dim, n, simplices)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{pairwise_distances, DistanceSpec, LabeledPointCloud};

    fn dist(coords: &[[f64; 3]], spec: &DistanceSpec) -> DistanceMatrix {
        let c = LabeledPointCloud::from_coords(coords, &vec![1.0; coords.len()]).unwrap();
        pairwise_distances(&c, spec).unwrap()
    }

    #[test]
    fn single_edge() {
        let d = dist(&[[0.0; 3], [1.0, 0.0, 0.0]], &DistanceSpec::Euclidean);
        let fc = build_vr(&d, 1, f64::INFINITY).unwrap();
        assert_eq!(fc.dump(), "0 0 0\n0 1 0\n1 0 1 1\n");
    }

    #[test]
    fn equilateral_triangle_enters_at_side_length() {
        let h = 3f64.sqrt() / 2.0;
        let d = dist(
            &[[0.0; 3], [1.0, 0.0, 0.0], [0.5, h, 0.0]],
            &DistanceSpec::Euclidean,
        );
        let fc = build_vr(&d, 2, f64::INFINITY).unwrap();
        let tri = fc.get(fc.len() - 1);
        assert_eq!(tri.simplex.vertices(), &[0, 1, 2]);
        assert!((tri.value - 1.0).abs() < 1e-15);
    }

    #[test]
    fn bipartite_has_no_triangles() {
        let d = dist(
            &[[0.0; 3], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [1.0, 1.0, 0.0]],
            &DistanceSpec::split_at(2, 4),
        );
        let fc = build_vr(&d, 2, f64::INFINITY).unwrap();
        assert_eq!(fc.count_dim(2), 0);
        assert_eq!(fc.count_dim(1), 4);
    }

    #[test]
    fn max_scale_truncates() {
        let d = dist(&[[0.0; 3], [1.0, 0.0, 0.0], [5.0, 0.0, 0.0]], &DistanceSpec::Euclidean);
        let fc = build_vr(&d, 2, 4.5).unwrap();
        assert_eq!(fc.count_dim(1), 2);
        assert_eq!(fc.count_dim(2), 0);
    }

    #[test]
    fn rejects_high_dim() {
        let d = dist(&[[0.0; 3]], &DistanceSpec::Euclidean);
        assert!(build_vr(&d, 3, 1.0).is_err());
    }
}
