//! Persistent sheaf Laplacians on charge-labeled point clouds.
//!
//! The crate builds Vietoris-Rips and Alpha filtrations, attaches a cellular
//! sheaf whose restriction maps are weighted by vertex charges and edge
//! lengths, and computes spectra of the persistent sheaf Laplacian over a
//! filtration grid. The [`protein`] module turns those spectra into
//! fixed-length descriptors for point mutations.

pub mod engine;
pub mod error;
pub mod filtration;
pub mod cli;
pub mod demo;
pub mod geometry;
pub mod io;
pub mod oracle;
pub mod parallel;
pub mod protein;
pub mod sheaf;
pub mod spectrum;
pub mod verify;

pub use engine::{assemble_psl, psl_over_filtration, spectrum, PslOperator, SpectraSweep};
pub use error::{PslError, Result};
pub use filtration::{build_alpha, build_vr, snapshot_pair, FilteredComplex, Simplex, SnapshotPair};
pub use geometry::{pairwise_distances, DistanceSpec, LabeledPoint, LabeledPointCloud};
pub use sheaf::{SheafWeighting, FKind};
pub use spectrum::{SpectrumSummary, ZeroTolerance};
