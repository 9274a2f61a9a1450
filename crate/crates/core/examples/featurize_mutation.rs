//! Site features for the bundled micro-protein (GLN -> ALA at A:3).
//!
//! Run with `cargo run --example featurize_mutation -- [WT.pqr MT.pqr MUTATION]`.

use std::path::PathBuf;

use psl::protein::features::{COMPLEX_MODELS, STRUCTURES};
use psl::protein::{featurize_site, read_pqr, FeatureConfig, MutationSpec};

fn main() -> psl::Result<()> {
    let fixtures = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let args: Vec<String> = std::env::args().skip(1).collect();
    let (wt, mt, mutation) = match args.as_slice() {
        [w, m, s] => (PathBuf::from(w), PathBuf::from(m), s.clone()),
        _ => (fixtures.join("micro_wt.pqr"), fixtures.join("micro_mt.pqr"), "A:3:Q:A".to_string()),
    };
    let spec: MutationSpec = mutation.parse()?;
    let config = FeatureConfig::default();
    let v = featurize_site(&read_pqr(&wt)?, &read_pqr(&mt)?, &spec, &config)?;

    println!("{spec}: {} values", v.values.len());
    for w in &v.warnings {
        println!("warning: {w}");
    }
    let layout = &v.layout;
    let g = layout.grid.len();
    let mut offset = 0;
    for s in STRUCTURES {
        for c in COMPLEX_MODELS {
            for p in layout.pair_labels() {
                let block = &v.values[offset..offset + layout.block_len()];
                let betti: Vec<String> = block[..g].iter().map(|b| b.to_string()).collect();
                println!("{s:>4} {c:>6} {p}  betti [{}]  nonzero count at t={}: {}", betti.join(" "), layout.grid[g - 1], block[block.len() - 1]);
                offset += layout.block_len();
            }
        }
    }
    Ok(())
}
