//! Filtered simplicial complexes (Vietoris-Rips and Alpha) and nested
//! snapshot pairs `K ⊆ L` taken from them.

mod alpha;
pub(crate) mod delaunay;
mod vr;

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{PslError, Result};

pub use alpha::{build_alpha, circumradius};
pub use delaunay::{delaunay_cells, DelaunayCells};
pub use vr::build_vr;

/// Largest simplex dimension this crate builds.
pub const MAX_SUPPORTED_DIM: usize = 2;

/// An oriented simplex given by its strictly increasing vertex list.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Simplex(Vec<usize>);

impl Simplex {
    pub fn new(mut vertices: Vec<usize>) -> Result<Self> {
        vertices.sort_unstable();
        if vertices.is_empty() || vertices.windows(2).any(|w| w[0] == w[1]) {
            return Err(PslError::DimensionMismatch(format!(
                "simplex vertices must be distinct and nonempty: {vertices:?}"
            )));
        }
        Ok(Simplex(vertices))
    }

    /// Caller guarantees `vertices` is strictly increasing.
    pub(crate) fn from_sorted(vertices: Vec<usize>) -> Self {
        debug_assert!(vertices.windows(2).all(|w| w[0] < w[1]));
        Simplex(vertices)
    }

    pub fn vertex(v: usize) -> Self {
        Simplex(vec![v])
    }

    pub fn vertices(&self) -> &[usize] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    /// Codimension-1 faces paired with the position of the removed vertex.
    pub fn facets(&self) -> impl Iterator<Item = (usize, Simplex)> + '_ {
        let n = if self.0.len() > 1 { self.0.len() } else { 0 };
        (0..n).map(move |k| {
            let mut v = self.0.clone();
            v.remove(k);
            (k, Simplex(v))
        })
    }

    pub fn is_face_of(&self, other: &Simplex) -> bool {
        self.0.len() <= other.0.len() && self.0.iter().all(|v| other.0.binary_search(v).is_ok())
    }
}

impl fmt::Display for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// Incidence number `[face : coface]` for a codimension-1 face under
/// ascending-vertex orientation: `(-1)^k` where `coface[k]` is the vertex
/// missing from `face`.
pub fn signed_incidence(face: &Simplex, coface: &Simplex) -> Result<i32> {
    let not_a_face = || PslError::NotAFace {
        face: face.0.clone(),
        coface: coface.0.clone(),
    };
    if face.0.len() + 1 != coface.0.len() {
        return Err(not_a_face());
    }
    let mut missing = None;
    let mut fi = 0;
    for (k, &v) in coface.0.iter().enumerate() {
        if fi < face.0.len() && face.0[fi] == v {
            fi += 1;
        } else if missing.is_none() {
            missing = Some(k);
        } else {
            return Err(not_a_face());
        }
    }
    match missing {
        Some(k) if fi == face.0.len() => Ok(if k % 2 == 0 { 1 } else { -1 }),
        _ => Err(not_a_face()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ComplexKind {
    #[serde(rename = "vr")]
    VietorisRips,
    #[serde(rename = "alpha")]
    Alpha,
}

impl ComplexKind {
    pub fn label(self) -> &'static str {
        match self {
            ComplexKind::VietorisRips => "vr",
            ComplexKind::Alpha => "alpha",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilteredSimplex {
    pub simplex: Simplex,
    pub value: f64,
}

/// Face-closed, value-monotone simplicial complex stored in canonical order:
/// ascending by `(value, dim, vertices)`.
#[derive(Debug, Clone)]
pub struct FilteredComplex {
    kind: ComplexKind,
    max_dim: usize,
    n_vertices: usize,
    simplices: Vec<FilteredSimplex>,
    index: HashMap<Simplex, usize>,
}

fn canonical_cmp(a: &FilteredSimplex, b: &FilteredSimplex) -> Ordering {
    a.value
        .total_cmp(&b.value)
        .then_with(|| a.simplex.dim().cmp(&b.simplex.dim()))
        .then_with(|| a.simplex.cmp(&b.simplex))
}

impl FilteredComplex {
    /// Sorts into canonical order and checks face closure and monotonicity.
    pub fn new(
        kind: ComplexKind,
        max_dim: usize,
        n_vertices: usize,
        simplices: Vec<(Simplex, f64)>,
    ) -> Result<Self> {
        let mut simplices: Vec<FilteredSimplex> = simplices
            .into_iter()
            .map(|(simplex, value)| FilteredSimplex { simplex, value })
            .collect();
        simplices.sort_by(canonical_cmp);
        let index: HashMap<Simplex, usize> = simplices
            .iter()
            .enumerate()
            .map(|(i, s)| (s.simplex.clone(), i))
            .collect();
        if index.len() != simplices.len() {
            return Err(PslError::DimensionMismatch("duplicate simplex".into()));
        }
        for s in &simplices {
            if s.simplex.dim() > max_dim || s.simplex.vertices().iter().any(|&v| v >= n_vertices)
            {
                return Err(PslError::DimensionMismatch(format!(
                    "simplex {} out of range",
                    s.simplex
                )));
            }
            if !(s.value >= 0.0) || (s.simplex.dim() == 0 && s.value != 0.0) {
                return Err(PslError::DimensionMismatch(format!(
                    "simplex {} has invalid value {}",
                    s.simplex, s.value
                )));
            }
            for (_, face) in s.simplex.facets() {
                match index.get(&face) {
                    Some(&fi) if simplices[fi].value <= s.value => {}
                    Some(_) => {
                        return Err(PslError::DimensionMismatch(format!(
                            "face {face} enters after coface {}",
                            s.simplex
                        )))
                    }
                    None => {
                        return Err(PslError::DimensionMismatch(format!(
                            "face {face} of {} missing",
                            s.simplex
                        )))
                    }
                }
            }
        }
        Ok(FilteredComplex {
            kind,
            max_dim,
            n_vertices,
            simplices,
            index,
        })
    }

    pub fn kind(&self) -> ComplexKind {
        self.kind
    }

    pub fn max_dim(&self) -> usize {
        self.max_dim
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn simplices(&self) -> &[FilteredSimplex] {
        &self.simplices
    }

    pub fn get(&self, i: usize) -> &FilteredSimplex {
        &self.simplices[i]
    }

    pub fn index_of(&self, s: &Simplex) -> Option<usize> {
        self.index.get(s).copied()
    }

    pub fn max_value(&self) -> f64 {
        self.simplices.last().map_or(0.0, |s| s.value)
    }

    pub fn count_dim(&self, dim: usize) -> usize {
        self.simplices.iter().filter(|s| s.simplex.dim() == dim).count()
    }

    /// Line-oriented text dump, one `dim v0 v1 ... value` line per simplex in
    /// canonical order.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for s in &self.simplices {
            let _ = write!(out, "{}", s.simplex.dim());
            for v in s.simplex.vertices() {
                let _ = write!(out, " {v}");
            }
            let _ = writeln!(out, " {}", s.value);
        }
        out
    }
}

/// Nested pair `K ⊆ L` of sub-complexes, held as ascending simplex indices
/// into the parent [`FilteredComplex`].
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotPair {
    pub t_small: f64,
    pub t_large: f64,
    pub k: Vec<usize>,
    pub l: Vec<usize>,
}

impl SnapshotPair {
    pub fn is_static(&self) -> bool {
        self.k == self.l
    }
}

pub fn snapshot_pair(fc: &FilteredComplex, t: f64, delta: f64) -> Result<SnapshotPair> {
    if !(delta >= 0.0) {
        return Err(PslError::InvalidConfig(format!("delta must be >= 0, got {delta}")));
    }
    let t_large = t + delta;
    // Canonical order sorts by value first, so both sets are prefixes.
    let k_len = fc.simplices.partition_point(|s| s.value <= t);
    let l_len = fc.simplices.partition_point(|s| s.value <= t_large);
    Ok(SnapshotPair {
        t_small: t,
        t_large,
        k: (0..k_len).collect(),
        l: (0..l_len).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[usize]) -> Simplex {
        Simplex::new(v.to_vec()).unwrap()
    }

    #[test]
    fn incidence_sign_table() {
        assert_eq!(signed_incidence(&s(&[0]), &s(&[0, 1])).unwrap(), -1);
        assert_eq!(signed_incidence(&s(&[1]), &s(&[0, 1])).unwrap(), 1);
        assert_eq!(signed_incidence(&s(&[0, 2]), &s(&[0, 1, 2])).unwrap(), -1);
        assert_eq!(signed_incidence(&s(&[1, 2]), &s(&[0, 1, 2])).unwrap(), 1);
        assert_eq!(signed_incidence(&s(&[0, 1]), &s(&[0, 1, 2])).unwrap(), 1);
    }

    #[test]
    fn incidence_rejects_non_faces() {
        assert!(matches!(
            signed_incidence(&s(&[2]), &s(&[0, 1])),
            Err(PslError::NotAFace { .. })
        ));
        assert!(signed_incidence(&s(&[0]), &s(&[0, 1, 2])).is_err());
        assert!(signed_incidence(&s(&[0, 3]), &s(&[0, 1, 2])).is_err());
    }

    fn edge_complex() -> FilteredComplex {
        FilteredComplex::new(
            ComplexKind::VietorisRips,
            1,
            2,
            vec![(s(&[0, 1]), 1.0), (s(&[1]), 0.0), (s(&[0]), 0.0)],
        )
        .unwrap()
    }

    #[test]
    fn canonical_order_and_dump() {
        let fc = edge_complex();
        assert_eq!(fc.dump(), "0 0 0\n0 1 0\n1 0 1 1\n");
    }

    #[test]
    fn snapshot_membership() {
        let fc = edge_complex();
        let p = snapshot_pair(&fc, 0.9, 0.2).unwrap();
        assert_eq!(p.k, vec![0, 1]);
        assert_eq!(p.l, vec![0, 1, 2]);
        let p = snapshot_pair(&fc, 0.9, 0.0).unwrap();
        assert!(p.is_static());
        let p = snapshot_pair(&fc, 5.0, 3.0).unwrap();
        assert_eq!(p.k.len(), fc.len());
        assert!(p.is_static());
        assert!(snapshot_pair(&fc, 1.0, -0.1).is_err());
    }

    #[test]
    fn rejects_open_or_non_monotone_input() {
        let missing = FilteredComplex::new(
            ComplexKind::VietorisRips,
            1,
            2,
            vec![(s(&[0]), 0.0), (s(&[0, 1]), 1.0)],
        );
        assert!(missing.is_err());
        let backwards = FilteredComplex::new(
            ComplexKind::VietorisRips,
            2,
            3,
            vec![
                (s(&[0]), 0.0),
                (s(&[1]), 0.0),
                (s(&[2]), 0.0),
                (s(&[0, 1]), 2.0),
                (s(&[0, 2]), 1.0),
                (s(&[1, 2]), 1.0),
                (s(&[0, 1, 2]), 1.5),
            ],
        );
        assert!(backwards.is_err());
    }
}
