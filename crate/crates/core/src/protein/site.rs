//! Mutation-site atom subsetting: the site residue `A_m`, its neighborhood
//! `A_mn(r)`, and the element-specific pairings between them.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{PslError, Result};
use crate::geometry::euclidean;

use super::pqr::PqrAtom;

const AMINO_ACIDS: &str = "ACDEFGHIKLMNPQRSTVWY";

/// One-letter code of a residue name, including common protonation-state
/// variants written by PDB2PQR and force-field naming schemes.
pub fn one_letter(residue_name: &str) -> Option<char> {
    let code = match residue_name.to_ascii_uppercase().as_str() {
        "ALA" => 'A',
        "ARG" | "ARN" => 'R',
        "ASN" => 'N',
        "ASP" | "ASH" => 'D',
        "CYS" | "CYX" | "CYM" => 'C',
        "GLN" => 'Q',
        "GLU" | "GLH" => 'E',
        "GLY" => 'G',
        "HIS" | "HID" | "HIE" | "HIP" | "HSD" | "HSE" | "HSP" => 'H',
        "ILE" => 'I',
        "LEU" => 'L',
        "LYS" | "LYN" => 'K',
        "MET" => 'M',
        "PHE" => 'F',
        "PRO" => 'P',
        "SER" => 'S',
        "THR" => 'T',
        "TRP" => 'W',
        "TYR" => 'Y',
        "VAL" => 'V',
        _ => return None,
    };
    Some(code)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MutationSpec {
    pub chain: String,
    pub residue_seq: i64,
    pub wild_aa: char,
    pub mutant_aa: char,
}

impl FromStr for MutationSpec {
    type Err = PslError;

    /// `CHAIN:POS:WT:MT`, e.g. `A:39:Q:G`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || PslError::InvalidMutation(s.to_string());
        let parts: Vec<&str> = s.trim().split(':').collect();
        let [chain, pos, wt, mt] = parts.as_slice() else {
            return Err(bad());
        };
        let residue_seq = pos.parse().map_err(|_| bad())?;
        let aa = |x: &str| -> Result<char> {
            let mut it = x.chars();
            match (it.next(), it.next()) {
                (Some(c), None) if AMINO_ACIDS.contains(c.to_ascii_uppercase()) => {
                    Ok(c.to_ascii_uppercase())
                }
                _ => Err(bad()),
            }
        };
        let (wild_aa, mutant_aa) = (aa(wt)?, aa(mt)?);
        if wild_aa == mutant_aa {
            return Err(bad());
        }
        Ok(MutationSpec {
            chain: chain.to_string(),
            residue_seq,
            wild_aa,
            mutant_aa,
        })
    }
}

impl fmt::Display for MutationSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}:{}", self.chain, self.residue_seq, self.wild_aa, self.mutant_aa)
    }
}

/// Checks that the residue at the mutation site has the expected identity.
pub fn check_residue(
    atoms: &[PqrAtom],
    spec: &MutationSpec,
    expected: char,
    which: &'static str,
) -> Result<()> {
    let atom = atoms
        .iter()
        .find(|a| a.chain == spec.chain && a.residue_seq == spec.residue_seq)
        .ok_or_else(|| PslError::ResidueNotFound {
            chain: spec.chain.clone(),
            seq: spec.residue_seq,
        })?;
    if one_letter(&atom.residue_name) == Some(expected) {
        Ok(())
    } else {
        Err(PslError::ResidueIdentityMismatch {
            which,
            chain: spec.chain.clone(),
            seq: spec.residue_seq,
            expected,
            found: atom.residue_name.clone(),
        })
    }
}

/// Indices into the atom list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtomSets {
    pub site: Vec<usize>,
    pub neighborhood: Vec<usize>,
    pub warnings: Vec<String>,
}

/// `site` = every atom of the residue; `neighborhood` = every other atom
/// within `cutoff` (inclusive) of at least one site atom.
pub fn select_atom_sets(
    atoms: &[PqrAtom],
    chain: &str,
    residue_seq: i64,
    cutoff: f64,
) -> Result<AtomSets> {
    let (site, rest): (Vec<usize>, Vec<usize>) = (0..atoms.len())
        .partition(|&i| atoms[i].chain == chain && atoms[i].residue_seq == residue_seq);
    if site.is_empty() {
        return Err(PslError::ResidueNotFound {
            chain: chain.to_string(),
            seq: residue_seq,
        });
    }
    let neighborhood: Vec<usize> = rest
        .into_iter()
        .filter(|&j| {
            site.iter()
                .any(|&i| euclidean(&atoms[i].coords, &atoms[j].coords) <= cutoff)
        })
        .collect();
    let mut warnings = Vec::new();
    if neighborhood.is_empty() {
        warnings.push(format!(
            "residue {chain}:{residue_seq} has no atoms within {cutoff} A"
        ));
    }
    Ok(AtomSets {
        site,
        neighborhood,
        warnings,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElementPair {
    pub site_element: String,
    pub neighbor_element: String,
    pub site: Vec<usize>,
    pub neighborhood: Vec<usize>,
}

impl ElementPair {
    pub fn label(&self) -> String {
        format!("{}{}", self.site_element, self.neighbor_element)
    }

    pub fn is_empty(&self) -> bool {
        self.site.is_empty() || self.neighborhood.is_empty()
    }
}

/// `elements × elements` pairings, site element varying slowest.
pub fn element_pair_sets(atoms: &[PqrAtom], sets: &AtomSets, elements: &[String]) -> Vec<ElementPair> {
    let of = |idx: &[usize], e: &str| -> Vec<usize> {
        idx.iter().copied().filter(|&i| atoms[i].element == e).collect()
    };
    let mut out = Vec::with_capacity(elements.len() * elements.len());
    for e1 in elements {
        for e2 in elements {
            out.push(ElementPair {
                site_element: e1.clone(),
                neighbor_element: e2.clone(),
                site: of(&sets.site, e1),
                neighborhood: of(&sets.neighborhood, e2),
            });
        }
    }
    out
}
