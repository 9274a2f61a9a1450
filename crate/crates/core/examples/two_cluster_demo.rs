//! Betti numbers and smallest nonzero eigenvalues of the two-cluster cloud,
//! comparing a mixed charge pattern with uniform charges.
//!
//! Run with `cargo run --example two_cluster_demo -- [delta]`.

use psl::demo::{run_demo, DEFAULT_CHARGES};
use psl::spectrum::ZeroTolerance;

fn main() -> psl::Result<()> {
    let delta: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0.0);
    let mixed = run_demo(DEFAULT_CHARGES, delta, ZeroTolerance::default())?;
    let uniform = run_demo((1.0, 1.0), delta, ZeroTolerance::default())?;

    let fmt = |l: Option<f64>| l.map_or("-".to_string(), |v| format!("{v:.3e}"));
    println!("{:>5} | {:>6} {:>11} {:>11} | {:>6} {:>11} {:>11}", "t", "b0", "l0 mixed", "l0 unif", "b1", "l1 mixed", "l1 unif");
    for i in 0..mixed.grid.len() {
        let (a0, b0) = (&mixed.q0[i].summary, &uniform.q0[i].summary);
        let (a1, b1) = (&mixed.q1[i].summary, &uniform.q1[i].summary);
        assert_eq!(a0.betti, b0.betti);
        println!(
            "{:>5.1} | {:>6} {:>11} {:>11} | {:>6} {:>11} {:>11}",
            mixed.grid[i],
            a0.betti,
            fmt(a0.lambda_min_nonzero),
            fmt(b0.lambda_min_nonzero),
            a1.betti,
            fmt(a1.lambda_min_nonzero),
            fmt(b1.lambda_min_nonzero)
        );
    }
    Ok(())
}
