//! Multiscale site descriptors.
//!
//! For each structure (wild type, mutant) and each of the nine element pairs,
//! two spectral blocks are computed over the filtration grid:
//!
//! * `vr0`: Rips complex under the bipartite site/neighborhood distance,
//!   zero-dimensional Laplacian;
//! * `alpha1`: Alpha complex on the union of both sets, one-dimensional
//!   Laplacian.
//!
//! A block is the Betti number at every grid point followed by the eight
//! nonzero-eigenvalue statistics at every grid point. The vector is the
//! wild-type part, then the mutant part, then their difference.

use serde::{Deserialize, Serialize};

use crate::engine::psl_over_filtration;
use crate::error::{PslError, Result};
use crate::filtration::{build_alpha, build_vr};
use crate::geometry::{pairwise_distances, CloudOptions, DistanceSpec, LabeledPoint, LabeledPointCloud};
use crate::parallel::par_map_ordered;
use crate::sheaf::SheafWeighting;
use crate::spectrum::{SpectrumSummary, ZeroTolerance, STAT_NAMES};

use super::pqr::PqrAtom;
use super::site::{check_residue, element_pair_sets, select_atom_sets, ElementPair, MutationSpec};

pub const LAYOUT_VERSION: &str = "psl-site-v1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureConfig {
    pub cutoff: f64,
    pub grid: Vec<f64>,
    pub elements: Vec<String>,
    pub delta: f64,
    pub zero_tolerance: ZeroTolerance,
    /// Seeded jitter for structures with coincident atoms; off by default.
    pub jitter_seed: Option<u64>,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        FeatureConfig {
            cutoff: 16.0,
            grid: (3..=9).map(f64::from).collect(),
            elements: ["C", "N", "O"].iter().map(|s| s.to_string()).collect(),
            delta: 0.0,
            zero_tolerance: ZeroTolerance::default(),
            jitter_seed: None,
        }
    }
}

impl FeatureConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid.is_empty() || self.grid.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(PslError::InvalidConfig("grid must be nonempty and strictly ascending".into()));
        }
        let top = *self.grid.last().unwrap();
        if !(self.cutoff > top) {
            return Err(PslError::InvalidConfig(format!(
                "cutoff {} must exceed the largest grid value {top}",
                self.cutoff
            )));
        }
        if !(self.delta >= 0.0) {
            return Err(PslError::InvalidConfig("delta must be >= 0".into()));
        }
        if self.elements.is_empty() {
            return Err(PslError::InvalidConfig("no elements selected".into()));
        }
        Ok(())
    }

    pub fn layout(&self) -> FeatureLayout {
        FeatureLayout {
            grid: self.grid.clone(),
            elements: self.elements.clone(),
        }
    }
}

pub const STRUCTURES: [&str; 3] = ["wt", "mt", "diff"];
pub const COMPLEX_MODELS: [&str; 2] = ["vr0", "alpha1"];

/// Ordered description of every entry of a [`SiteFeatureVector`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureLayout {
    pub grid: Vec<f64>,
    pub elements: Vec<String>,
}

impl FeatureLayout {
    pub fn block_len(&self) -> usize {
        self.grid.len() * (1 + STAT_NAMES.len())
    }

    pub fn structure_len(&self) -> usize {
        COMPLEX_MODELS.len() * self.elements.len().pow(2) * self.block_len()
    }

    pub fn len(&self) -> usize {
        STRUCTURES.len() * self.structure_len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn pair_labels(&self) -> Vec<String> {
        let mut out = Vec::new();
        for a in &self.elements {
            for b in &self.elements {
                out.push(format!("{a}{b}"));
            }
        }
        out
    }

    /// Column names such as `wt_vr0_CC_betti_t3` or `diff_alpha1_NO_median_t7`.
    pub fn field_names(&self) -> Vec<String> {
        let ts: Vec<String> = self.grid.iter().map(|t| format_grid_value(*t)).collect();
        let mut names = Vec::with_capacity(self.len());
        for s in STRUCTURES {
            for c in COMPLEX_MODELS {
                for p in self.pair_labels() {
                    for t in &ts {
                        names.push(format!("{s}_{c}_{p}_betti_t{t}"));
                    }
                    for t in &ts {
                        for stat in STAT_NAMES {
                            names.push(format!("{s}_{c}_{p}_{stat}_t{t}"));
                        }
                    }
                }
            }
        }
        names
    }
}

fn format_grid_value(t: f64) -> String {
    if t.fract() == 0.0 {
        format!("{t:.0}")
    } else {
        t.to_string().replace('.', "p")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SiteFeatureVector {
    pub values: Vec<f64>,
    pub layout: FeatureLayout,
    /// Channels with an empty site or neighborhood set, zero-filled:
    /// `(structure, pair label)`.
    pub empty_channels: Vec<(String, String)>,
    pub warnings: Vec<String>,
}

impl SiteFeatureVector {
    pub fn structure_block(&self, which: usize) -> &[f64] {
        let n = self.layout.structure_len();
        &self.values[which * n..(which + 1) * n]
    }
}

/// Betti numbers at every grid point, then the eight statistics at every
/// grid point. Empty snapshots contribute zeros.
pub fn stats_block(summaries: &[SpectrumSummary], grid_len: usize) -> Result<Vec<f64>> {
    if summaries.len() != grid_len {
        return Err(PslError::GridMismatch {
            expected: grid_len,
            got: summaries.len(),
        });
    }
    let mut out = Vec::with_capacity(grid_len * (1 + STAT_NAMES.len()));
    out.extend(summaries.iter().map(|s| s.betti as f64));
    for s in summaries {
        out.extend(s.stats.to_array());
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComplexModel {
    BipartiteRips,
    Alpha,
}

/// Point cloud of one element pair: site atoms first, then neighborhood
/// atoms. Returns the cloud and the number of site atoms.
pub fn pair_cloud(
    atoms: &[PqrAtom],
    pair: &ElementPair,
    jitter_seed: Option<u64>,
) -> Result<(LabeledPointCloud, usize)> {
    let points = pair
        .site
        .iter()
        .chain(&pair.neighborhood)
        .enumerate()
        .map(|(k, &i)| LabeledPoint::new(k, atoms[i].coords, atoms[i].charge, atoms[i].element.clone()))
        .collect();
    let opts = CloudOptions {
        jitter_seed,
        ..CloudOptions::default()
    };
    Ok((LabeledPointCloud::with_options(points, opts)?, pair.site.len()))
}

/// One 63-entry block (under the default grid) for one channel.
pub fn channel_block(
    atoms: &[PqrAtom],
    pair: &ElementPair,
    model: ComplexModel,
    config: &FeatureConfig,
) -> Result<Vec<f64>> {
    let grid_len = config.grid.len();
    if pair.is_empty() {
        return Ok(vec![0.0; grid_len * (1 + STAT_NAMES.len())]);
    }
    let (cloud, n_site) = pair_cloud(atoms, pair, config.jitter_seed)?;
    let weighting = SheafWeighting::from_cloud(&cloud);
    let (fc, q) = match model {
        ComplexModel::BipartiteRips => {
            let spec = DistanceSpec::split_at(n_site, cloud.len());
            let dist = pairwise_distances(&cloud, &spec)?;
            let max_scale = config.grid.last().unwrap() + config.delta;
            let fc = build_vr(&dist, 2, max_scale)?;
            if fc.count_dim(2) != 0 {
                return Err(PslError::Numerical("bipartite Rips complex has triangles".into()));
            }
            (fc, 0)
        }
        ComplexModel::Alpha => (build_alpha(&cloud)?, 1),
    };
    let sweep = psl_over_filtration(
        &fc,
        &cloud,
        &weighting,
        &config.grid,
        config.delta,
        q,
        config.zero_tolerance,
    )?;
    let summaries: Vec<SpectrumSummary> = sweep.into_iter().map(|p| p.summary).collect();
    stats_block(&summaries, grid_len)
}

pub fn featurize_site(
    wt_atoms: &[PqrAtom],
    mt_atoms: &[PqrAtom],
    spec: &MutationSpec,
    config: &FeatureConfig,
) -> Result<SiteFeatureVector> {
    config.validate()?;
    check_residue(wt_atoms, spec, spec.wild_aa, "wild-type")?;
    check_residue(mt_atoms, spec, spec.mutant_aa, "mutant")?;

    let keep = |atoms: &[PqrAtom]| -> Vec<PqrAtom> {
        atoms
            .iter()
            .filter(|a| config.elements.contains(&a.element))
            .cloned()
            .collect()
    };
    let structures = [("wt", keep(wt_atoms)), ("mt", keep(mt_atoms))];

    let mut warnings = Vec::new();
    let mut empty_channels = Vec::new();
    let mut tasks: Vec<(usize, ElementPair, ComplexModel)> = Vec::new();
    for (s, (name, atoms)) in structures.iter().enumerate() {
        let sets = select_atom_sets(atoms, &spec.chain, spec.residue_seq, config.cutoff)?;
        warnings.extend(sets.warnings.iter().map(|w| format!("{name}: {w}")));
        let pairs = element_pair_sets(atoms, &sets, &config.elements);
        for model in [ComplexModel::BipartiteRips, ComplexModel::Alpha] {
            for pair in &pairs {
                if model == ComplexModel::BipartiteRips && pair.is_empty() {
                    empty_channels.push((name.to_string(), pair.label()));
                }
                tasks.push((s, pair.clone(), model));
            }
        }
    }

    let blocks = par_map_ordered(&tasks, |(s, pair, model)| {
        channel_block(&structures[*s].1, pair, *model, config)
    });
    let layout = config.layout();
    let half = layout.structure_len() * 2;
    let mut values = Vec::with_capacity(layout.len());
    for b in blocks {
        values.extend(b?);
    }
    debug_assert_eq!(values.len(), half);
    let diff: Vec<f64> = (0..half / 2).map(|i| values[i] - values[half / 2 + i]).collect();
    values.extend(diff);
    if values.len() != layout.len() {
        return Err(PslError::DimensionMismatch(format!(
            "feature vector has {} entries, layout expects {}",
            values.len(),
            layout.len()
        )));
    }
    Ok(SiteFeatureVector {
        values,
        layout,
        empty_channels,
        warnings,
    })
}
