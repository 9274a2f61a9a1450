//! Protein mutation-site descriptors built on PQR structures.

pub mod features;
pub mod pqr;
pub mod site;

pub use features::{featurize_site, FeatureConfig, FeatureLayout, SiteFeatureVector};
pub use pqr::{parse_pqr, read_pqr, PqrAtom};
pub use site::{select_atom_sets, MutationSpec};
