//! Two-cluster illustration: twelve points in two tight groups, one group
//! carrying a "high" charge and the other a "low" one, swept over a Rips
//! filtration at `q = 0` and `q = 1`.

use crate::engine::{psl_over_filtration, SweepPoint};
use crate::error::Result;
use crate::filtration::{build_vr, FilteredComplex};
use crate::geometry::{pairwise_distances, DistanceSpec, LabeledPointCloud};
use crate::sheaf::SheafWeighting;
use crate::spectrum::ZeroTolerance;

/// Offsets of cluster A around the origin; every point lies within 0.45 of
/// its cluster center, so both clusters have diameter below 1.
const CLUSTER_A: [[f64; 3]; 6] = [
    [0.0, 0.0, 0.0],
    [0.4, 0.1, 0.0],
    [0.1, 0.4, 0.05],
    [0.2, 0.15, 0.35],
    [-0.05, 0.2, -0.3],
    [0.3, -0.25, 0.15],
];

const CLUSTER_B: [[f64; 3]; 6] = [
    [0.0, 0.0, 0.0],
    [0.35, 0.2, 0.1],
    [-0.3, 0.15, 0.2],
    [0.1, -0.35, 0.2],
    [0.15, 0.3, -0.25],
    [-0.1, -0.1, -0.4],
];

/// Cluster B is translated along x; the closest cross pair is just over 5 apart.
pub const CLUSTER_SHIFT: f64 = 5.9;

pub const DEFAULT_CHARGES: (f64, f64) = (1.0, 0.01);

/// `0, 0.1, ..., 7`.
pub fn demo_grid() -> Vec<f64> {
    (0..=70).map(|i| i as f64 / 10.0).collect()
}

/// Points 0..6 form cluster A (charge `hi`), 6..12 cluster B (charge `lo`).
pub fn demo_cloud(hi: f64, lo: f64) -> Result<LabeledPointCloud> {
    let coords: Vec<[f64; 3]> = CLUSTER_A
        .iter()
        .copied()
        .chain(CLUSTER_B.iter().map(|p| [p[0] + CLUSTER_SHIFT, p[1], p[2]]))
        .collect();
    let charges: Vec<f64> = (0..12).map(|i| if i < 6 { hi } else { lo }).collect();
    LabeledPointCloud::from_coords(&coords, &charges)
}

pub fn demo_complex(cloud: &LabeledPointCloud) -> Result<FilteredComplex> {
    let dist = pairwise_distances(cloud, &DistanceSpec::Euclidean)?;
    build_vr(&dist, 2, f64::INFINITY)
}

#[derive(Debug, Clone)]
pub struct DemoRun {
    pub grid: Vec<f64>,
    pub q0: Vec<SweepPoint>,
    pub q1: Vec<SweepPoint>,
}

pub fn run_demo(charges: (f64, f64), delta: f64, tol: ZeroTolerance) -> Result<DemoRun> {
    let cloud = demo_cloud(charges.0, charges.1)?;
    let fc = demo_complex(&cloud)?;
    let w = SheafWeighting::from_cloud(&cloud);
    let grid = demo_grid();
    let q0 = psl_over_filtration(&fc, &cloud, &w, &grid, delta, 0, tol)?;
    let q1 = psl_over_filtration(&fc, &cloud, &w, &grid, delta, 1, tol)?;
    Ok(DemoRun { grid, q0, q1 })
}
