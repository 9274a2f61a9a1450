//! Charge-labeled point clouds and the distance matrices that drive every
//! filtration.
//!
//! Simplices refer to points by their position in the cloud. The `id` carried
//! by each [`LabeledPoint`] is a caller label (for example a PQR serial) and is
//! only required to be unique.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{PslError, Result};

/// Minimum admissible distance between two points, in Angstrom.
pub const DEFAULT_MIN_SEPARATION: f64 = 1e-9;

/// Half-width of the opt-in coordinate jitter, in Angstrom.
pub const JITTER_AMPLITUDE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledPoint {
    pub id: usize,
    pub coords: [f64; 3],
    pub charge: f64,
    pub element: String,
}

impl LabeledPoint {
    pub fn new(id: usize, coords: [f64; 3], charge: f64, element: impl Into<String>) -> Self {
        LabeledPoint {
            id,
            coords,
            charge,
            element: element.into().to_ascii_uppercase(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CloudOptions {
    pub min_separation: f64,
    /// When set, coordinates are perturbed by a seeded uniform jitter of
    /// `JITTER_AMPLITUDE` before validation.
    pub jitter_seed: Option<u64>,
}

impl Default for CloudOptions {
    fn default() -> Self {
        CloudOptions {
            min_separation: DEFAULT_MIN_SEPARATION,
            jitter_seed: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledPointCloud {
    points: Vec<LabeledPoint>,
}

impl LabeledPointCloud {
    pub fn new(points: Vec<LabeledPoint>) -> Result<Self> {
        Self::with_options(points, CloudOptions::default())
    }

    pub fn with_options(mut points: Vec<LabeledPoint>, opts: CloudOptions) -> Result<Self> {
        if points.is_empty() {
            return Err(PslError::EmptyCloud);
        }
        let mut ids = HashSet::with_capacity(points.len());
        for (i, p) in points.iter().enumerate() {
            if !p.coords.iter().all(|c| c.is_finite()) || !p.charge.is_finite() {
                return Err(PslError::NonFiniteCoordinate(i));
            }
            if !ids.insert(p.id) {
                return Err(PslError::DuplicateId(p.id));
            }
        }
        if let Some(seed) = opts.jitter_seed {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for p in points.iter_mut() {
                for c in p.coords.iter_mut() {
                    *c += rng.random_range(-JITTER_AMPLITUDE..=JITTER_AMPLITUDE);
                }
            }
        }
        for i in 0..points.len() {
            for j in (i + 1)..points.len() {
                if euclidean(&points[i].coords, &points[j].coords) <= opts.min_separation {
                    return Err(PslError::OverlappingPoints(i, j, opts.min_separation));
                }
            }
        }
        Ok(LabeledPointCloud { points })
    }

    /// Builds a cloud from bare coordinates and charges, labeling points
    /// `0..n` with element `X`.
    pub fn from_coords(coords: &[[f64; 3]], charges: &[f64]) -> Result<Self> {
        if coords.len() != charges.len() {
            return Err(PslError::DimensionMismatch(format!(
                "{} coordinates but {} charges",
                coords.len(),
                charges.len()
            )));
        }
        let points = coords
            .iter()
            .zip(charges)
            .enumerate()
            .map(|(i, (c, q))| LabeledPoint::new(i, *c, *q, "X"))
            .collect();
        Self::new(points)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[LabeledPoint] {
        &self.points
    }

    pub fn coords(&self, i: usize) -> &[f64; 3] {
        &self.points[i].coords
    }

    pub fn charge(&self, i: usize) -> f64 {
        self.points[i].charge
    }

    pub fn charges(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.charge).collect()
    }

    pub fn euclidean(&self, i: usize, j: usize) -> f64 {
        euclidean(&self.points[i].coords, &self.points[j].coords)
    }

    /// Same geometry, every charge replaced by `f(charge)`.
    pub fn map_charges(&self, f: impl Fn(f64) -> f64) -> Self {
        let points = self
            .points
            .iter()
            .map(|p| LabeledPoint {
                charge: f(p.charge),
                ..p.clone()
            })
            .collect();
        LabeledPointCloud { points }
    }
}

pub fn euclidean(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    let dz = a[2] - b[2];
    (dx * dx + dy * dy + dz * dz).sqrt()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DistanceSpec {
    Euclidean,
    /// Cross-set pairs keep their Euclidean distance; same-set pairs are
    /// infinitely far apart. Sets hold cloud indices.
    BipartiteModified { set_a: Vec<usize>, set_b: Vec<usize> },
}

impl DistanceSpec {
    /// Bipartite spec with the first `n_a` points in one set and the rest in
    /// the other.
    pub fn split_at(n_a: usize, n: usize) -> Self {
        DistanceSpec::BipartiteModified {
            set_a: (0..n_a).collect(),
            set_b: (n_a..n).collect(),
        }
    }

    fn membership(&self, n: usize) -> Result<Option<Vec<bool>>> {
        match self {
            DistanceSpec::Euclidean => Ok(None),
            DistanceSpec::BipartiteModified { set_a, set_b } => {
                let mut side = vec![None; n];
                for (ids, flag) in [(set_a, true), (set_b, false)] {
                    for &i in ids {
                        if i >= n {
                            return Err(PslError::InvalidPartition(format!(
                                "index {i} outside a cloud of {n} points"
                            )));
                        }
                        if side[i].is_some() {
                            return Err(PslError::InvalidPartition(format!(
                                "index {i} listed twice"
                            )));
                        }
                        side[i] = Some(flag);
                    }
                }
                side.into_iter()
                    .enumerate()
                    .map(|(i, s)| {
                        s.ok_or_else(|| {
                            PslError::InvalidPartition(format!("index {i} in neither set"))
                        })
                    })
                    .collect::<Result<Vec<_>>>()
                    .map(Some)
            }
        }
    }
}

/// Dense symmetric distance matrix; `+inf` marks pairs that never connect.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DistanceMatrix {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let d = f(i, j);
                data[i * n + j] = d;
                data[j * n + i] = d;
            }
        }
        DistanceMatrix { n, data }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n.max(1)).map(|r| r.to_vec()).collect()
    }
}

pub fn pairwise_distances(cloud: &LabeledPointCloud, spec: &DistanceSpec) -> Result<DistanceMatrix> {
    let side = spec.membership(cloud.len())?;
    Ok(DistanceMatrix::from_fn(cloud.len(), |i, j| match &side {
        Some(side) if side[i] == side[j] => f64::INFINITY,
        _ => cloud.euclidean(i, j),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cloud(coords: &[[f64; 3]]) -> LabeledPointCloud {
        LabeledPointCloud::from_coords(coords, &vec![1.0; coords.len()]).unwrap()
    }

    #[test]
    fn two_points_euclidean() {
        let c = cloud(&[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0]]);
        let d = pairwise_distances(&c, &DistanceSpec::Euclidean).unwrap();
        assert_eq!(d.rows(), vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
    }

    #[test]
    fn same_set_pairs_are_infinite() {
        let c = cloud(&[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 2.0, 0.0]]);
        let spec = DistanceSpec::BipartiteModified {
            set_a: vec![0, 1],
            set_b: vec![2],
        };
        let d = pairwise_distances(&c, &spec).unwrap();
        assert_eq!(d.get(0, 1), f64::INFINITY);
        assert_eq!(d.get(0, 0), 0.0);
        assert_eq!(d.get(0, 2), 2.0);
        assert_eq!(d.get(2, 1), 5f64.sqrt());
    }

    #[test]
    fn random_box_matches_scalar_formula() {
        let pts = [
            [0.13, 0.72, 0.05],
            [0.91, 0.33, 0.48],
            [0.27, 0.08, 0.86],
            [0.64, 0.59, 0.21],
        ];
        let d = pairwise_distances(&cloud(&pts), &DistanceSpec::Euclidean).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let s: f64 = (0..3).map(|k| (pts[i][k] - pts[j][k]).powi(2)).sum();
                assert!((d.get(i, j) - s.sqrt()).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn overlapping_points_rejected() {
        let err = LabeledPointCloud::from_coords(&[[1.0, 1.0, 1.0], [1.0, 1.0, 1.0]], &[1.0, 1.0])
            .unwrap_err();
        assert!(matches!(err, PslError::OverlappingPoints(0, 1, _)));
    }

    #[test]
    fn jitter_separates_duplicates_deterministically() {
        let pts = vec![
            LabeledPoint::new(0, [1.0, 1.0, 1.0], 1.0, "C"),
            LabeledPoint::new(1, [1.0, 1.0, 1.0], 1.0, "C"),
        ];
        let opts = CloudOptions {
            jitter_seed: Some(11),
            ..CloudOptions::default()
        };
        let a = LabeledPointCloud::with_options(pts.clone(), opts).unwrap();
        let b = LabeledPointCloud::with_options(pts, opts).unwrap();
        assert_eq!(a, b);
        assert!(a.euclidean(0, 1) > 0.0 && a.euclidean(0, 1) < 4e-6);
    }

    #[test]
    fn invalid_partitions() {
        let c = cloud(&[[0.0; 3], [1.0, 0.0, 0.0], [2.0, 0.0, 0.0]]);
        let overlap = DistanceSpec::BipartiteModified {
            set_a: vec![0, 1],
            set_b: vec![1, 2],
        };
        assert!(matches!(
            pairwise_distances(&c, &overlap),
            Err(PslError::InvalidPartition(_))
        ));
        let uncovered = DistanceSpec::BipartiteModified {
            set_a: vec![0],
            set_b: vec![2],
        };
        assert!(matches!(
            pairwise_distances(&c, &uncovered),
            Err(PslError::InvalidPartition(_))
        ));
    }

    #[test]
    fn empty_cloud_rejected() {
        assert!(matches!(
            LabeledPointCloud::new(vec![]),
            Err(PslError::EmptyCloud)
        ));
    }
}
