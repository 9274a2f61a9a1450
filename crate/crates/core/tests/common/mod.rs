#![allow(dead_code)]

use std::path::PathBuf;

use psl::filtration::{build_alpha, build_vr, snapshot_pair};
use psl::geometry::{pairwise_distances, DistanceSpec};
use psl::oracle::{dense_psl, oracle_eigenvalues};
use psl::protein::features::{pair_cloud, stats_block, FeatureConfig};
use psl::protein::site::{element_pair_sets, select_atom_sets};
use psl::protein::{read_pqr, MutationSpec, PqrAtom};
use psl::sheaf::SheafWeighting;
use psl::spectrum::SpectrumSummary;

pub const MICRO_MUTATION: &str = "A:3:Q:A";

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn micro_atoms() -> (Vec<PqrAtom>, Vec<PqrAtom>) {
    (
        read_pqr(&fixture("micro_wt.pqr")).unwrap(),
        read_pqr(&fixture("micro_mt.pqr")).unwrap(),
    )
}

/// `(header, mutation, values)` of the committed golden row.
pub fn golden() -> (Vec<String>, String, Vec<f64>) {
    let text = std::fs::read_to_string(fixture("micro_golden.csv")).unwrap();
    let mut lines = text.lines();
    let header: Vec<String> = lines.next().unwrap().split(',').skip(1).map(String::from).collect();
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let values = row[1..].iter().map(|s| s.parse().unwrap()).collect();
    (header, row[0].to_string(), values)
}

/// WT and MT halves of the feature vector rebuilt with the dense oracle:
/// same atom sets and complexes, but spectra from the reference assembly
/// and Jacobi eigensolver.
pub fn oracle_features(
    wt: &[PqrAtom],
    mt: &[PqrAtom],
    spec: &MutationSpec,
    config: &FeatureConfig,
) -> Vec<f64> {
    let mut out = Vec::new();
    for atoms in [wt, mt] {
        let kept: Vec<PqrAtom> = atoms
            .iter()
            .filter(|a| config.elements.contains(&a.element))
            .cloned()
            .collect();
        let sets = select_atom_sets(&kept, &spec.chain, spec.residue_seq, config.cutoff).unwrap();
        let pairs = element_pair_sets(&kept, &sets, &config.elements);
        for model in 0..2 {
            for pair in &pairs {
                if pair.is_empty() {
                    out.extend(vec![0.0; config.layout().block_len()]);
                    continue;
                }
                let (cloud, n_site) = pair_cloud(&kept, pair, config.jitter_seed).unwrap();
                let w = SheafWeighting::from_cloud(&cloud);
                let (fc, q) = if model == 0 {
                    let d = pairwise_distances(&cloud, &DistanceSpec::split_at(n_site, cloud.len())).unwrap();
                    (build_vr(&d, 2, f64::INFINITY).unwrap(), 0)
                } else {
                    (build_alpha(&cloud).unwrap(), 1)
                };
                let summaries: Vec<SpectrumSummary> = config
                    .grid
                    .iter()
                    .map(|&t| {
                        let p = snapshot_pair(&fc, t, config.delta).unwrap();
                        let op = dense_psl(&fc, &p, q, &cloud, &w).unwrap();
                        if op.matrix.nrows() == 0 {
                            SpectrumSummary::empty(config.zero_tolerance)
                        } else {
                            SpectrumSummary::from_eigenvalues(&oracle_eigenvalues(&op), config.zero_tolerance)
                        }
                    })
                    .collect();
                out.extend(stats_block(&summaries, config.grid.len()).unwrap());
            }
        }
    }
    out
}

/// Largest relative difference between two blocks, scaled per block by
/// `max(1, largest |value|)`, plus whether every Betti entry matches exactly.
pub fn block_agreement(engine: &[f64], oracle: &[f64], block_len: usize, grid_len: usize) -> (f64, bool) {
    assert_eq!(engine.len(), oracle.len());
    let mut worst: f64 = 0.0;
    let mut betti_exact = true;
    for (e, o) in engine.chunks(block_len).zip(oracle.chunks(block_len)) {
        betti_exact &= e[..grid_len] == o[..grid_len];
        let scale = e.iter().chain(o).map(|x| x.abs()).fold(1.0, f64::max);
        let err = e.iter().zip(o).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        worst = worst.max(err / scale);
    }
    (worst, betti_exact)
}
