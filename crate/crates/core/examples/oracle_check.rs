//! Compare the engine with the dense reference on a few random clouds.
//!
//! Run with `cargo run --example oracle_check -- [trials] [seed]`.

use psl::verify::{run_verify, VerifyOptions};

fn main() -> psl::Result<()> {
    let mut args = std::env::args().skip(1);
    let trials = args.next().and_then(|s| s.parse().ok()).unwrap_or(5);
    let seed = args.next().and_then(|s| s.parse().ok()).unwrap_or(7);
    let reports = run_verify(&VerifyOptions {
        trials,
        seed,
        inject_fault: false,
    })?;
    let worst = reports.iter().map(|r| r.max_rel_err).fold(0.0, f64::max);
    let failed = reports.iter().filter(|r| !r.pass).count();
    for r in reports.iter().filter(|r| r.instance.contains("t=9") || r.instance.contains("betti0")).take(12) {
        println!("{:<50} {:>3} eigenvalues  rel err {:.1e}  {}", r.instance, r.engine.len(), r.max_rel_err, if r.pass { "ok" } else { "FAIL" });
    }
    println!("\n{} reports, {failed} failed, worst relative error {worst:.2e}", reports.len());
    Ok(())
}
