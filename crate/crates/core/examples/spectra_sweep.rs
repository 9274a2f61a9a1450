//! Sweep the persistent sheaf Laplacian over a Rips filtration and print the
//! JSON records.
//!
//! Run with `cargo run --example spectra_sweep -- [delta]`.

use psl::engine::{psl_over_filtration, SpectraSweep};
use psl::filtration::build_vr;
use psl::geometry::{pairwise_distances, DistanceSpec, LabeledPointCloud};
use psl::sheaf::SheafWeighting;
use psl::spectrum::ZeroTolerance;

fn main() -> psl::Result<()> {
    let delta: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0.0);
    let cloud = LabeledPointCloud::from_coords(
        &[
            [0.0, 0.0, 0.0],
            [2.5, 0.0, 0.0],
            [1.2, 2.2, 0.0],
            [1.3, 0.8, 2.4],
            [6.0, 0.5, 0.5],
            [7.5, 2.0, 0.0],
        ],
        &[0.4, -0.3, 0.6, -0.5, 0.2, -0.1],
    )?;
    let dist = pairwise_distances(&cloud, &DistanceSpec::Euclidean)?;
    let fc = build_vr(&dist, 2, f64::INFINITY)?;
    let w = SheafWeighting::from_cloud(&cloud);
    let grid: Vec<f64> = (3..=9).map(f64::from).collect();

    for q in [0, 1] {
        let points = psl_over_filtration(&fc, &cloud, &w, &grid, delta, q, ZeroTolerance::default())?;
        println!("q = {q}");
        for p in &points {
            println!(
                "  t = {:>3}  betti = {:>2}  lambda_min = {}",
                p.t,
                p.summary.betti,
                p.summary.lambda_min_nonzero.map_or("-".into(), |l| format!("{l:.6}"))
            );
        }
        println!("{}", serde_json::to_string_pretty(&SpectraSweep::new(q, delta, &points)).unwrap());
    }
    Ok(())
}
