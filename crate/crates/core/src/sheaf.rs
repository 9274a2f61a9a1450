//! Cellular sheaves on charge-labeled simplicial complexes.
//!
//! Every stalk is the real line. For a face relation `σ ⪯ τ` the restriction
//! map is multiplication by
//!
//! ```text
//!     F(σ) · ∏_{v ∈ τ∖σ} q_v / F(τ)
//! ```
//!
//! where `F` is a nowhere-zero function on simplices and `q_v` the vertex
//! charges. With the default `F` (product of pairwise edge lengths, 1 on
//! vertices) the vertex-to-edge scalar for `v_i ⪯ e_ij` is `q_j / r_ij`.

use std::collections::HashMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{PslError, Result};
use crate::filtration::{signed_incidence, FilteredComplex, Simplex};
use crate::geometry::LabeledPointCloud;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FKind {
    /// `F(vertex) = 1`, `F(σ) = ∏` of Euclidean lengths over vertex pairs of `σ`.
    #[default]
    ProductOfPairwiseDistances,
    /// `F ≡ 1`.
    ConstantOne,
}

impl FKind {
    pub fn label(self) -> &'static str {
        match self {
            FKind::ProductOfPairwiseDistances => "product_of_pairwise_distances",
            FKind::ConstantOne => "constant_one",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SheafWeighting {
    charges: Vec<f64>,
    f_kind: FKind,
}

impl SheafWeighting {
    pub fn new(charges: Vec<f64>, f_kind: FKind) -> Result<Self> {
        if let Some(i) = charges.iter().position(|q| !q.is_finite()) {
            return Err(PslError::NonFiniteCoordinate(i));
        }
        Ok(SheafWeighting { charges, f_kind })
    }

    /// Cloud charges with the default `F`.
    pub fn from_cloud(cloud: &LabeledPointCloud) -> Self {
        SheafWeighting {
            charges: cloud.charges(),
            f_kind: FKind::default(),
        }
    }

    /// Unit charges and `F ≡ 1`: the constant sheaf, whose coboundaries are
    /// the plain simplicial ones.
    pub fn trivial(n: usize) -> Self {
        SheafWeighting {
            charges: vec![1.0; n],
            f_kind: FKind::ConstantOne,
        }
    }

    pub fn charges(&self) -> &[f64] {
        &self.charges
    }

    pub fn f_kind(&self) -> FKind {
        self.f_kind
    }

    pub fn scaled(&self, c: f64) -> Self {
        SheafWeighting {
            charges: self.charges.iter().map(|q| q * c).collect(),
            f_kind: self.f_kind,
        }
    }

    pub fn f_value(&self, s: &Simplex, cloud: &LabeledPointCloud) -> f64 {
        match self.f_kind {
            FKind::ConstantOne => 1.0,
            FKind::ProductOfPairwiseDistances => {
                let v = s.vertices();
                let mut f = 1.0;
                for a in 0..v.len() {
                    for b in (a + 1)..v.len() {
                        f *= cloud.euclidean(v[a], v[b]);
                    }
                }
                f
            }
        }
    }
}

/// Scalar of the restriction map `face ⪯ coface` (any codimension).
pub fn restriction_scalar(
    face: &Simplex,
    coface: &Simplex,
    cloud: &LabeledPointCloud,
    w: &SheafWeighting,
) -> Result<f64> {
    if !face.is_face_of(coface) {
        return Err(PslError::NotAFace {
            face: face.vertices().to_vec(),
            coface: coface.vertices().to_vec(),
        });
    }
    if let Some(&v) = coface.vertices().iter().find(|&&v| v >= w.charges.len()) {
        return Err(PslError::DimensionMismatch(format!(
            "vertex {v} has no charge ({} charges)",
            w.charges.len()
        )));
    }
    if face == coface {
        return Ok(1.0);
    }
    let f_coface = w.f_value(coface, cloud);
    if f_coface == 0.0 {
        return Err(PslError::ZeroF(coface.vertices().to_vec()));
    }
    let charge_product: f64 = coface
        .vertices()
        .iter()
        .filter(|v| face.vertices().binary_search(v).is_err())
        .map(|&v| w.charges[v])
        .product();
    Ok(w.f_value(face, cloud) * charge_product / f_coface)
}

/// Sparse sheaf coboundary `d^q` of a face-closed sub-complex. Rows are the
/// `(q+1)`-simplices and columns the `q`-simplices of the subset, both in the
/// parent complex's canonical order and stored as parent indices.
#[derive(Debug, Clone, PartialEq)]
pub struct CoboundaryMatrix {
    pub q: usize,
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    /// `(row, col, value)` triplets, row-major.
    pub entries: Vec<(usize, usize, f64)>,
}

impl CoboundaryMatrix {
    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.rows.len(), self.cols.len());
        for &(r, c, v) in &self.entries {
            m[(r, c)] = v;
        }
        m
    }

    /// Entries grouped by row, for row-wise products.
    pub fn row_entries(&self) -> Vec<Vec<(usize, f64)>> {
        let mut out = vec![Vec::new(); self.rows.len()];
        for &(r, c, v) in &self.entries {
            out[r].push((c, v));
        }
        out
    }
}

pub fn coboundary_matrix(
    fc: &FilteredComplex,
    subset: &[usize],
    q: usize,
    cloud: &LabeledPointCloud,
    w: &SheafWeighting,
) -> Result<CoboundaryMatrix> {
    if q > 1 {
        return Err(PslError::DimensionMismatch(format!("q = {q} is not supported")));
    }
    let mut rows = Vec::new();
    let mut cols = Vec::new();
    for &i in subset {
        let d = fc.get(i).simplex.dim();
        if d == q {
            cols.push(i);
        } else if d == q + 1 {
            rows.push(i);
        }
    }
    rows.sort_unstable();
    cols.sort_unstable();
    let col_pos: HashMap<usize, usize> = cols.iter().enumerate().map(|(p, &i)| (i, p)).collect();
    let mut entries = Vec::with_capacity(rows.len() * (q + 2));
    for (r, &ti) in rows.iter().enumerate() {
        let tau = &fc.get(ti).simplex;
        let mut row: Vec<(usize, usize, f64)> = Vec::with_capacity(q + 2);
        for (_, sigma) in tau.facets() {
            let c = fc
                .index_of(&sigma)
                .and_then(|si| col_pos.get(&si).copied())
                .ok_or_else(|| {
                    PslError::DimensionMismatch(format!("subset is not face-closed at {sigma}"))
                })?;
            let sign = f64::from(signed_incidence(&sigma, tau)?);
            row.push((r, c, sign * restriction_scalar(&sigma, tau, cloud, w)?));
        }
        row.sort_by_key(|e| e.1);
        entries.extend(row);
    }
    Ok(CoboundaryMatrix {
        q,
        rows,
        cols,
        entries,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompositionViolation {
    pub rho: Vec<usize>,
    pub sigma: Vec<usize>,
    pub tau: Vec<usize>,
    pub direct: f64,
    pub composed: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompositionReport {
    pub chains_checked: usize,
    pub violations: Vec<CompositionViolation>,
}

impl CompositionReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `S(ρ⪯τ) = S(σ⪯τ)·S(ρ⪯σ)` on every chain `ρ ⪯ σ ⪯ τ` of the
/// complex, degenerate chains included.
pub fn check_composition(
    cloud: &LabeledPointCloud,
    w: &SheafWeighting,
    fc: &FilteredComplex,
) -> Result<CompositionReport> {
    let mut report = CompositionReport {
        chains_checked: 0,
        violations: Vec::new(),
    };
    for tau in fc.simplices().iter().map(|s| &s.simplex) {
        let mut faces = all_faces(tau);
        faces.push(tau.clone());
        for sigma in &faces {
            for rho in faces.iter().filter(|r| r.is_face_of(sigma)) {
                let direct = restriction_scalar(rho, tau, cloud, w)?;
                let composed =
                    restriction_scalar(sigma, tau, cloud, w)? * restriction_scalar(rho, sigma, cloud, w)?;
                report.chains_checked += 1;
                if (direct - composed).abs() > 1e-12 * (1.0 + direct.abs()) {
                    report.violations.push(CompositionViolation {
                        rho: rho.vertices().to_vec(),
                        sigma: sigma.vertices().to_vec(),
                        tau: tau.vertices().to_vec(),
                        direct,
                        composed,
                    });
                }
            }
        }
    }
    Ok(report)
}

fn all_faces(s: &Simplex) -> Vec<Simplex> {
    let v = s.vertices();
    let k = v.len();
    (1u32..(1 << k) - 1)
        .map(|mask| {
            Simplex::from_sorted((0..k).filter(|i| mask & (1 << i) != 0).map(|i| v[i]).collect())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filtration::build_vr;
    use crate::geometry::{pairwise_distances, DistanceSpec};

    fn s(v: &[usize]) -> Simplex {
        Simplex::new(v.to_vec()).unwrap()
    }

    fn triangle_cloud(charges: &[f64]) -> LabeledPointCloud {
        LabeledPointCloud::from_coords(
            &[[0.0, 0.0, 0.0], [3.0, 0.0, 0.0], [0.0, 4.0, 0.0]],
            charges,
        )
        .unwrap()
    }

    fn complex(cloud: &LabeledPointCloud) -> FilteredComplex {
        let d = pairwise_distances(cloud, &DistanceSpec::Euclidean).unwrap();
        build_vr(&d, 2, f64::INFINITY).unwrap()
    }

    #[test]
    fn vertex_to_edge_is_charge_over_length() {
        let c = triangle_cloud(&[0.5, -0.7, 0.2]);
        let w = SheafWeighting::from_cloud(&c);
        let x = restriction_scalar(&s(&[0]), &s(&[0, 1]), &c, &w).unwrap();
        assert!((x - (-0.7 / 3.0)).abs() < 1e-15);
        let y = restriction_scalar(&s(&[1]), &s(&[0, 1]), &c, &w).unwrap();
        assert!((y - 0.5 / 3.0).abs() < 1e-15);
        assert_eq!(restriction_scalar(&s(&[0, 1]), &s(&[0, 1]), &c, &w).unwrap(), 1.0);
    }

    #[test]
    fn edge_to_triangle_scalar() {
        let c = triangle_cloud(&[0.5, -0.7, 0.2]);
        let w = SheafWeighting::from_cloud(&c);
        // e_01 ⪯ t_012 with r_02 = 4, r_12 = 5
        let x = restriction_scalar(&s(&[0, 1]), &s(&[0, 1, 2]), &c, &w).unwrap();
        assert!((x - 0.2 / (4.0 * 5.0)).abs() < 1e-15);
        let via = restriction_scalar(&s(&[0]), &s(&[0, 1]), &c, &w).unwrap();
        let direct = restriction_scalar(&s(&[0]), &s(&[0, 1, 2]), &c, &w).unwrap();
        assert!((direct - x * via).abs() < 1e-15);
    }

    #[test]
    fn not_a_face() {
        let c = triangle_cloud(&[1.0; 3]);
        let w = SheafWeighting::from_cloud(&c);
        assert!(matches!(
            restriction_scalar(&s(&[2]), &s(&[0, 1]), &c, &w),
            Err(PslError::NotAFace { .. })
        ));
    }

    #[test]
    fn single_edge_coboundary() {
        let c = LabeledPointCloud::from_coords(&[[0.0; 3], [1.0, 0.0, 0.0]], &[1.0, 0.01]).unwrap();
        let fc = complex(&c);
        let all: Vec<usize> = (0..fc.len()).collect();
        let d = coboundary_matrix(&fc, &all, 0, &c, &SheafWeighting::from_cloud(&c)).unwrap();
        assert_eq!(d.to_dense(), DMatrix::from_row_slice(1, 2, &[-0.01, 1.0]));
        let c1 = c.map_charges(|_| 1.0);
        let d = coboundary_matrix(&fc, &all, 0, &c1, &SheafWeighting::from_cloud(&c1)).unwrap();
        assert_eq!(d.to_dense(), DMatrix::from_row_slice(1, 2, &[-1.0, 1.0]));
    }

    #[test]
    fn triangle_cochain_property() {
        let c = triangle_cloud(&[0.3, -1.2, 0.8]);
        let fc = complex(&c);
        let all: Vec<usize> = (0..fc.len()).collect();
        let w = SheafWeighting::from_cloud(&c);
        let d0 = coboundary_matrix(&fc, &all, 0, &c, &w).unwrap().to_dense();
        let d1 = coboundary_matrix(&fc, &all, 1, &c, &w).unwrap().to_dense();
        assert_eq!((d0.nrows(), d0.ncols(), d1.nrows(), d1.ncols()), (3, 3, 1, 3));
        assert!((d1 * d0).amax() <= 1e-12);
    }

    #[test]
    fn trivial_sheaf_is_simplicial() {
        let c = triangle_cloud(&[0.3, -1.2, 0.8]);
        let fc = complex(&c);
        let all: Vec<usize> = (0..fc.len()).collect();
        let d1 = coboundary_matrix(&fc, &all, 1, &c, &SheafWeighting::trivial(3)).unwrap();
        for &(r, col, v) in &d1.entries {
            let face = &fc.get(d1.cols[col]).simplex;
            let coface = &fc.get(d1.rows[r]).simplex;
            assert_eq!(v, f64::from(signed_incidence(face, coface).unwrap()));
        }
    }

    #[test]
    fn composition_holds_including_degenerate_chains() {
        let c = triangle_cloud(&[0.3, -1.2, 0.8]);
        let fc = complex(&c);
        let report = check_composition(&c, &SheafWeighting::from_cloud(&c), &fc).unwrap();
        assert!(report.passed());
        // triangle: 7 faces incl. itself, summed over chain pairs
        assert!(report.chains_checked > 20);
    }

    #[test]
    fn zero_charge_gives_zero_map() {
        let c = LabeledPointCloud::from_coords(&[[0.0; 3], [2.0, 0.0, 0.0]], &[0.0, 1.0]).unwrap();
        let w = SheafWeighting::from_cloud(&c);
        assert_eq!(restriction_scalar(&s(&[1]), &s(&[0, 1]), &c, &w).unwrap(), 0.0);
    }
}
