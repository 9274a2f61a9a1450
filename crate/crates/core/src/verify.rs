//! Seeded engine-versus-oracle battery.
//!
//! Each trial draws a small random cloud, builds its Rips and Alpha
//! filtrations, and compares engine spectra with the dense oracle at every
//! grid point, for `q` in {0, 1} and each persistence offset. Under the
//! trivial sheaf the `q = 0` Betti trace is also checked against union-find.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::engine::{assemble_psl_with, eigenvalues, AssemblyOptions};
use crate::error::Result;
use crate::filtration::{build_alpha, build_vr, snapshot_pair, FilteredComplex};
use crate::geometry::{pairwise_distances, DistanceMatrix, DistanceSpec, LabeledPointCloud};
use crate::oracle::{
    dense_psl, oracle_eigenvalues, persistent_betti0_unionfind, OracleReport, EIGEN_MATCH_REL,
};
use crate::sheaf::{FKind, SheafWeighting};
use crate::spectrum::{SpectrumSummary, ZeroTolerance};

pub const VERIFY_GRID: [f64; 7] = [3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0];
pub const VERIFY_DELTAS: [f64; 3] = [0.0, 0.5, 1.0];
pub const BOX_SIDE: f64 = 7.0;
pub const MIN_POINTS: usize = 4;
pub const MAX_POINTS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyOptions {
    pub trials: usize,
    pub seed: u64,
    /// Flip one coboundary sign in the engine; every run should then fail.
    pub inject_fault: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            trials: 50,
            seed: 7,
            inject_fault: false,
        }
    }
}

/// Random cloud in `[0, BOX_SIDE]^3` with charges in `[-1, -0.05] ∪ [0.05, 1]`.
pub fn random_cloud(rng: &mut impl Rng, n: usize) -> LabeledPointCloud {
    loop {
        let coords: Vec<[f64; 3]> = (0..n)
            .map(|_| std::array::from_fn(|_| rng.random_range(0.0..BOX_SIDE)))
            .collect();
        let charges: Vec<f64> = (0..n)
            .map(|_| {
                let m = rng.random_range(0.05..=1.0);
                if rng.random_bool(0.5) {
                    m
                } else {
                    -m
                }
            })
            .collect();
        if let Ok(c) = LabeledPointCloud::from_coords(&coords, &charges) {
            return c;
        }
    }
}

/// Random cloud for trial `trial` of the battery seeded by `seed`.
pub fn trial_cloud(seed: u64, trial: usize) -> LabeledPointCloud {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (trial as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let n = rng.random_range(MIN_POINTS..=MAX_POINTS);
    random_cloud(&mut rng, n)
}

fn compare_complex(
    label: &str,
    fc: &FilteredComplex,
    cloud: &LabeledPointCloud,
    w: &SheafWeighting,
    opts: &VerifyOptions,
    out: &mut Vec<OracleReport>,
) -> Result<()> {
    let assembly = AssemblyOptions {
        flip_first_coboundary_sign: opts.inject_fault,
    };
    for q in [0, 1] {
        for delta in VERIFY_DELTAS {
            for t in VERIFY_GRID {
                let pair = snapshot_pair(fc, t, delta)?;
                let engine = eigenvalues(&assemble_psl_with(fc, &pair, q, cloud, w, assembly)?)?;
                let oracle = oracle_eigenvalues(&dense_psl(fc, &pair, q, cloud, w)?);
                out.push(OracleReport::compare(
                    format!("{label} q={q} delta={delta} t={t}"),
                    engine,
                    oracle,
                    EIGEN_MATCH_REL,
                ));
            }
        }
    }
    Ok(())
}

/// Betti-0 trace of the trivial sheaf against union-find, one report per
/// offset.
fn betti0_reports(
    label: &str,
    cloud: &LabeledPointCloud,
    dist: &DistanceMatrix,
    fc: &FilteredComplex,
    opts: &VerifyOptions,
    out: &mut Vec<OracleReport>,
) -> Result<()> {
    let w = SheafWeighting::new(vec![1.0; cloud.len()], FKind::ConstantOne)?;
    let assembly = AssemblyOptions {
        flip_first_coboundary_sign: opts.inject_fault,
    };
    let tol = ZeroTolerance::default();
    for delta in VERIFY_DELTAS {
        let mut engine = Vec::new();
        let mut oracle = Vec::new();
        for t in VERIFY_GRID {
            let pair = snapshot_pair(fc, t, delta)?;
            let op = assemble_psl_with(fc, &pair, 0, cloud, &w, assembly)?;
            engine.push(SpectrumSummary::from_eigenvalues(&eigenvalues(&op)?, tol).betti as f64);
            oracle.push(persistent_betti0_unionfind(dist, t, t + delta) as f64);
        }
        out.push(OracleReport::exact(
            format!("{label} betti0 trivial delta={delta}"),
            engine,
            oracle,
        ));
    }
    Ok(())
}

/// Reports for one trial.
pub fn verify_trial(opts: &VerifyOptions, trial: usize) -> Result<Vec<OracleReport>> {
    let cloud = trial_cloud(opts.seed, trial);
    let label = format!("seed={} trial={trial} n={}", opts.seed, cloud.len());
    let w = SheafWeighting::from_cloud(&cloud);
    let dist = pairwise_distances(&cloud, &DistanceSpec::Euclidean)?;
    let vr = build_vr(&dist, 2, f64::INFINITY)?;
    let alpha = build_alpha(&cloud)?;
    let mut out = Vec::new();
    compare_complex(&format!("{label} vr"), &vr, &cloud, &w, opts, &mut out)?;
    compare_complex(&format!("{label} alpha"), &alpha, &cloud, &w, opts, &mut out)?;
    betti0_reports(&format!("{label} vr"), &cloud, &dist, &vr, opts, &mut out)?;
    Ok(out)
}

pub fn run_verify(opts: &VerifyOptions) -> Result<Vec<OracleReport>> {
    let per_trial: Vec<Result<Vec<OracleReport>>> =
        crate::parallel::par_map_ordered(&(0..opts.trials).collect::<Vec<_>>(), |&i| verify_trial(opts, i));
    let mut out = Vec::new();
    for r in per_trial {
        out.extend(r?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_trials_is_vacuous() {
        let r = run_verify(&VerifyOptions {
            trials: 0,
            ..VerifyOptions::default()
        })
        .unwrap();
        assert!(r.is_empty());
    }

    #[test]
    fn trial_clouds_are_seeded() {
        assert_eq!(trial_cloud(7, 3), trial_cloud(7, 3));
        assert_ne!(trial_cloud(7, 3), trial_cloud(8, 3));
        let c = trial_cloud(1, 0);
        assert!((MIN_POINTS..=MAX_POINTS).contains(&c.len()));
        assert!(c.charges().iter().all(|q| q.abs() >= 0.05 && q.abs() <= 1.0));
    }

    #[test]
    fn two_trials_pass() {
        let r = run_verify(&VerifyOptions {
            trials: 2,
            ..VerifyOptions::default()
        })
        .unwrap();
        assert!(!r.is_empty());
        for rep in &r {
            assert!(rep.pass, "{rep:?}");
        }
    }

    #[test]
    fn fault_is_detected() {
        let r = run_verify(&VerifyOptions {
            trials: 2,
            seed: 7,
            inject_fault: true,
        })
        .unwrap();
        assert!(r.iter().any(|rep| !rep.pass));
    }
}
