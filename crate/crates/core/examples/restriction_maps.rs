//! Restriction scalars and weighted coboundaries on a single triangle.
//!
//! Run with `cargo run --example restriction_maps`.

use psl::filtration::{build_vr, Simplex};
use psl::geometry::{pairwise_distances, DistanceSpec, LabeledPointCloud};
use psl::sheaf::{check_composition, coboundary_matrix, restriction_scalar, SheafWeighting};

fn main() -> psl::Result<()> {
    let cloud = LabeledPointCloud::from_coords(
        &[[0.0, 0.0, 0.0], [3.0, 0.0, 0.0], [0.0, 4.0, 0.0]],
        &[0.5, -0.8, 0.3],
    )?;
    let w = SheafWeighting::from_cloud(&cloud);

    let v0 = Simplex::new(vec![0])?;
    let e01 = Simplex::new(vec![0, 1])?;
    let e12 = Simplex::new(vec![1, 2])?;
    let t = Simplex::new(vec![0, 1, 2])?;
    println!("v0 -> e01: {:.6}  (q1 / r01 = {:.6})", restriction_scalar(&v0, &e01, &cloud, &w)?, -0.8 / 3.0);
    println!("e12 -> t: {:.6}  (q0 / (r01 r02) = {:.6})", restriction_scalar(&e12, &t, &cloud, &w)?, 0.5 / 12.0);

    let fc = build_vr(&pairwise_distances(&cloud, &DistanceSpec::Euclidean)?, 2, f64::INFINITY)?;
    let all: Vec<usize> = (0..fc.len()).collect();
    for q in 0..2 {
        let d = coboundary_matrix(&fc, &all, q, &cloud, &w)?;
        println!("\nd^{q} ({} x {}):\n{}", d.nrows(), d.ncols(), d.to_dense());
    }
    let d0 = coboundary_matrix(&fc, &all, 0, &cloud, &w)?.to_dense();
    let d1 = coboundary_matrix(&fc, &all, 1, &cloud, &w)?.to_dense();
    println!("max |d1 d0| = {:e}", (d1 * d0).amax());

    let report = check_composition(&cloud, &w, &fc)?;
    println!("composition: {} chains, {} violations", report.chains_checked, report.violations.len());
    Ok(())
}
