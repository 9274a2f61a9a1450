//! Persistent sheaf Laplacian assembly and filtration sweeps.
//!
//! For a nested pair `K ⊆ L` the `q`-th operator acts on the `q`-cochains of
//! `K`:
//!
//! ```text
//!     Δ_q = B_K Z Zᵀ B_Kᵀ  +  D_K^{q-1} (D_K^{q-1})ᵀ
//! ```
//!
//! where `B = (d^q_L)ᵀ`, `B_K` keeps the rows of `B` indexed by `K`'s
//! `q`-simplices, and `Z` is an orthonormal basis of the `(q+1)`-cochains of
//! `L` whose coboundary adjoint lands in `K` (the kernel of the rows of `B`
//! indexed by `L∖K`). Only `(q+1)`-simplices with a face in `L∖K` constrain
//! that kernel, so the SVD runs on those columns alone.

use std::collections::HashMap;

use nalgebra::{DMatrix, SymmetricEigen, SVD};
use serde::{Deserialize, Serialize};

use crate::error::{PslError, Result};
use crate::filtration::{snapshot_pair, FilteredComplex, SnapshotPair};
use crate::geometry::LabeledPointCloud;
use crate::parallel::par_map_ordered;
use crate::sheaf::{coboundary_matrix, CoboundaryMatrix, SheafWeighting};
use crate::spectrum::{SpectrumStats, SpectrumSummary, ZeroTolerance};

/// Relative singular-value cutoff for the persistent subspace.
pub const SUBSPACE_SVD_CUTOFF: f64 = 1e-10;

const ASYMMETRY_LIMIT: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct PslOperator {
    pub q: usize,
    pub matrix: DMatrix<f64>,
    pub up_part: DMatrix<f64>,
    pub down_part: DMatrix<f64>,
    pub snapshot: SnapshotPair,
    /// Parent-complex indices of `K`'s `q`-simplices, in basis order.
    pub basis: Vec<usize>,
}

impl PslOperator {
    pub fn size(&self) -> usize {
        self.basis.len()
    }

    pub fn asymmetry(&self) -> f64 {
        (&self.matrix - self.matrix.transpose()).amax()
    }
}

/// Orthonormal basis of `ker(P · D_Lᵀ)`, columns in the row coordinates of
/// `d_l`. `k_q` lists the parent indices of `K`'s `q`-simplices; `P` selects
/// the remaining columns of `d_l`.
pub fn persistent_subspace_basis(d_l: &CoboundaryMatrix, k_q: &[usize]) -> DMatrix<f64> {
    let split = SubspaceSplit::new(d_l, k_q);
    let n = d_l.nrows();
    let z_t = split.touched_null_basis(d_l);
    let dim = split.free.len() + z_t.ncols();
    let mut z = DMatrix::zeros(n, dim);
    for (c, &r) in split.free.iter().enumerate() {
        z[(r, c)] = 1.0;
    }
    for c in 0..z_t.ncols() {
        for (p, &r) in split.touched.iter().enumerate() {
            z[(r, split.free.len() + c)] = z_t[(p, c)];
        }
    }
    z
}

/// Rows of `d_l` (i.e. `(q+1)`-simplices of `L`) split by whether they have a
/// face outside `K`.
struct SubspaceSplit {
    free: Vec<usize>,
    touched: Vec<usize>,
    /// Column positions in `d_l` of the `q`-simplices in `L∖K`.
    removed_cols: Vec<usize>,
}

impl SubspaceSplit {
    fn new(d_l: &CoboundaryMatrix, k_q: &[usize]) -> Self {
        let mut in_k: Vec<usize> = k_q.to_vec();
        in_k.sort_unstable();
        let removed: Vec<bool> = d_l
            .cols
            .iter()
            .map(|c| in_k.binary_search(c).is_err())
            .collect();
        let mut is_touched = vec![false; d_l.nrows()];
        for &(r, c, v) in &d_l.entries {
            if removed[c] && v != 0.0 {
                is_touched[r] = true;
            }
        }
        let (touched, free) = (0..d_l.nrows()).partition(|&r| is_touched[r]);
        let removed_cols = (0..d_l.ncols()).filter(|&c| removed[c]).collect();
        SubspaceSplit {
            free,
            touched,
            removed_cols,
        }
    }

    /// Null-space basis of the constraint block restricted to touched rows.
    fn touched_null_basis(&self, d_l: &CoboundaryMatrix) -> DMatrix<f64> {
        let nt = self.touched.len();
        if nt == 0 {
            return DMatrix::zeros(0, 0);
        }
        let m = self.removed_cols.len();
        let col_pos: HashMap<usize, usize> =
            self.removed_cols.iter().enumerate().map(|(p, &c)| (c, p)).collect();
        let row_pos: HashMap<usize, usize> =
            self.touched.iter().enumerate().map(|(p, &r)| (r, p)).collect();
        // A = P·D_Lᵀ on touched columns; padded with zero rows to at least
        // nt rows so the SVD returns a complete right basis.
        let mut a = DMatrix::zeros(m.max(nt), nt);
        for &(r, c, v) in &d_l.entries {
            if let (Some(&i), Some(&j)) = (col_pos.get(&c), row_pos.get(&r)) {
                a[(i, j)] = v;
            }
        }
        let svd = SVD::new(a, false, true);
        let v_t = svd.v_t.expect("requested V");
        let sigma_max = svd.singular_values.max();
        let cutoff = SUBSPACE_SVD_CUTOFF * sigma_max;
        let null_rows: Vec<usize> = (0..nt)
            .filter(|&i| sigma_max == 0.0 || svd.singular_values[i] <= cutoff)
            .collect();
        let mut z = DMatrix::zeros(nt, null_rows.len());
        for (c, &i) in null_rows.iter().enumerate() {
            for j in 0..nt {
                z[(j, c)] = v_t[(i, j)];
            }
        }
        z
    }
}

/// Test-only fault hooks for exercising the verification path.
#[doc(hidden)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AssemblyOptions {
    pub flip_first_coboundary_sign: bool,
}

pub fn assemble_psl(
    fc: &FilteredComplex,
    pair: &SnapshotPair,
    q: usize,
    cloud: &LabeledPointCloud,
    w: &SheafWeighting,
) -> Result<PslOperator> {
    assemble_psl_with(fc, pair, q, cloud, w, AssemblyOptions::default())
}

#[doc(hidden)]
pub fn assemble_psl_with(
    fc: &FilteredComplex,
    pair: &SnapshotPair,
    q: usize,
    cloud: &LabeledPointCloud,
    w: &SheafWeighting,
    opts: AssemblyOptions,
) -> Result<PslOperator> {
    validate_pair(fc, pair, q, cloud, w)?;
    let mut d_l = coboundary_matrix(fc, &pair.l, q, cloud, w)?;
    if opts.flip_first_coboundary_sign {
        if let Some(e) = d_l.entries.first_mut() {
            e.2 = -e.2;
        }
    }

    let mut in_k = vec![false; fc.len()];
    for &i in &pair.k {
        in_k[i] = true;
    }
    let basis: Vec<usize> = d_l.cols.iter().copied().filter(|&c| in_k[c]).collect();
    let n = basis.len();
    // d_l column position -> position in K's basis
    let k_pos: Vec<Option<usize>> = {
        let mut next = 0;
        d_l.cols
            .iter()
            .map(|&c| {
                in_k[c].then(|| {
                    next += 1;
                    next - 1
                })
            })
            .collect()
    };

    let split = SubspaceSplit::new(&d_l, &basis);
    let rows = d_l.row_entries();
    let mut up = DMatrix::zeros(n, n);
    for &r in &split.free {
        accumulate_outer(&mut up, rows[r].iter().map(|&(c, v)| (k_pos[c].expect("free row"), v)));
    }
    if !split.touched.is_empty() {
        let z_t = split.touched_null_basis(&d_l);
        if z_t.ncols() > 0 {
            let mut c_t = DMatrix::zeros(n, split.touched.len());
            for (j, &r) in split.touched.iter().enumerate() {
                for &(c, v) in &rows[r] {
                    if let Some(i) = k_pos[c] {
                        c_t[(i, j)] = v;
                    }
                }
            }
            let m = c_t * z_t;
            up += &m * m.transpose();
        }
    }
    symmetrize(&mut up);

    let mut down = DMatrix::zeros(n, n);
    if q >= 1 {
        let d_k = coboundary_matrix(fc, &pair.k, q - 1, cloud, w)?;
        if d_k.rows != basis {
            return Err(PslError::DimensionMismatch(
                "down coboundary rows disagree with the K basis".into(),
            ));
        }
        let mut by_col: Vec<Vec<(usize, f64)>> = vec![Vec::new(); d_k.ncols()];
        for &(r, c, v) in &d_k.entries {
            by_col[c].push((r, v));
        }
        for col in &by_col {
            accumulate_outer(&mut down, col.iter().copied());
        }
    }

    let matrix = &up + &down;
    Ok(PslOperator {
        q,
        matrix,
        up_part: up,
        down_part: down,
        snapshot: pair.clone(),
        basis,
    })
}

fn accumulate_outer(m: &mut DMatrix<f64>, entries: impl Iterator<Item = (usize, f64)> + Clone) {
    for (i, a) in entries.clone() {
        for (j, b) in entries.clone() {
            m[(i, j)] += a * b;
        }
    }
}

fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let s = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = s;
            m[(j, i)] = s;
        }
    }
}

fn validate_pair(
    fc: &FilteredComplex,
    pair: &SnapshotPair,
    q: usize,
    cloud: &LabeledPointCloud,
    w: &SheafWeighting,
) -> Result<()> {
    if q > 1 {
        return Err(PslError::DimensionMismatch(format!("q = {q} is not supported")));
    }
    if cloud.len() != fc.n_vertices() || w.charges().len() != cloud.len() {
        return Err(PslError::DimensionMismatch(format!(
            "complex has {} vertices, cloud {}, weighting {}",
            fc.n_vertices(),
            cloud.len(),
            w.charges().len()
        )));
    }
    if pair.k.iter().chain(&pair.l).any(|&i| i >= fc.len()) {
        return Err(PslError::DimensionMismatch("snapshot index out of range".into()));
    }
    let mut l = pair.l.clone();
    l.sort_unstable();
    if pair.k.iter().any(|i| l.binary_search(i).is_err()) {
        return Err(PslError::DimensionMismatch("K is not contained in L".into()));
    }
    Ok(())
}

/// All eigenvalues of the operator, ascending.
pub fn eigenvalues(op: &PslOperator) -> Result<Vec<f64>> {
    let asym = op.asymmetry();
    if asym > ASYMMETRY_LIMIT {
        return Err(PslError::NonSymmetric(asym));
    }
    if op.size() == 0 {
        return Ok(Vec::new());
    }
    let eig = SymmetricEigen::new(op.matrix.clone());
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    if vals.iter().any(|v| !v.is_finite()) {
        return Err(PslError::Numerical("eigensolver produced a non-finite value".into()));
    }
    vals.sort_by(f64::total_cmp);
    Ok(vals)
}

pub fn spectrum(op: &PslOperator, tol: ZeroTolerance) -> Result<SpectrumSummary> {
    Ok(SpectrumSummary::from_eigenvalues(&eigenvalues(op)?, tol))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub t: f64,
    pub summary: SpectrumSummary,
}

pub fn psl_over_filtration(
    fc: &FilteredComplex,
    cloud: &LabeledPointCloud,
    w: &SheafWeighting,
    grid: &[f64],
    delta: f64,
    q: usize,
    tol: ZeroTolerance,
) -> Result<Vec<SweepPoint>> {
    if grid.is_empty() || grid.windows(2).any(|p| !(p[0] < p[1])) {
        return Err(PslError::InvalidConfig(
            "grid must be nonempty and strictly ascending".into(),
        ));
    }
    par_map_ordered(grid, |&t| {
        let pair = snapshot_pair(fc, t, delta)?;
        let op = assemble_psl(fc, &pair, q, cloud, w)?;
        let summary = if op.size() == 0 {
            SpectrumSummary::empty(tol)
        } else {
            spectrum(&op, tol)?
        };
        Ok(SweepPoint { t, summary })
    })
    .into_iter()
    .collect()
}

/// JSON form of a sweep: `{q, delta, grid, records:[{t, betti, lambda_min,
/// stats, empty}]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub t: f64,
    pub betti: usize,
    pub lambda_min: Option<f64>,
    pub stats: SpectrumStats,
    pub empty: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectraSweep {
    pub q: usize,
    pub delta: f64,
    pub grid: Vec<f64>,
    pub records: Vec<SweepRecord>,
}

impl SpectraSweep {
    pub fn new(q: usize, delta: f64, points: &[SweepPoint]) -> Self {
        SpectraSweep {
            q,
            delta,
            grid: points.iter().map(|p| p.t).collect(),
            records: points
                .iter()
                .map(|p| SweepRecord {
                    t: p.t,
                    betti: p.summary.betti,
                    lambda_min: p.summary.lambda_min_nonzero,
                    stats: p.summary.stats,
                    empty: p.summary.empty,
                })
                .collect(),
        }
    }
}
