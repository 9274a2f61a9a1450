//! Brute-force reference implementations used to validate the engine.
//!
//! Nothing here calls into the engine's linear algebra or coboundary code:
//! coboundaries are rebuilt densely from the restriction formula, the
//! persistent subspace comes from a one-sided Jacobi SVD, spectra from cyclic
//! Jacobi rotations, and zero-dimensional persistence from union-find. Only
//! the complex and snapshot types are shared.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{PslError, Result};
use crate::filtration::{FilteredComplex, SnapshotPair};
use crate::geometry::{DistanceMatrix, LabeledPointCloud};
use crate::engine::PslOperator;
use crate::sheaf::{FKind, SheafWeighting};

/// Largest snapshot (simplex count of `L`) the dense oracle accepts.
pub const ORACLE_MAX_SIMPLICES: usize = 500;

/// Relative tolerance for engine/oracle eigenvalue agreement.
pub const EIGEN_MATCH_REL: f64 = 1e-8;

const SVD_CUTOFF: f64 = 1e-10;

fn f_of(vertices: &[usize], cloud: &LabeledPointCloud, kind: FKind) -> f64 {
    match kind {
        FKind::ConstantOne => 1.0,
        FKind::ProductOfPairwiseDistances => {
            let mut f = 1.0;
            for (a, &i) in vertices.iter().enumerate() {
                for &j in &vertices[a + 1..] {
                    let (p, q) = (cloud.coords(i), cloud.coords(j));
                    f *= ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) + (p[2] - q[2]).powi(2)).sqrt();
                }
            }
            f
        }
    }
}

/// Dense `(q+1) × q` coboundary over the simplices listed in `subset`, in the
/// order they appear there.
fn dense_coboundary(
    fc: &FilteredComplex,
    subset: &[usize],
    q: usize,
    cloud: &LabeledPointCloud,
    w: &SheafWeighting,
) -> (DMatrix<f64>, Vec<usize>, Vec<usize>) {
    let verts = |i: usize| fc.get(i).simplex.vertices();
    let cols: Vec<usize> = subset.iter().copied().filter(|&i| verts(i).len() == q + 1).collect();
    let rows: Vec<usize> = subset.iter().copied().filter(|&i| verts(i).len() == q + 2).collect();
    let mut d = DMatrix::zeros(rows.len(), cols.len());
    for (r, &ti) in rows.iter().enumerate() {
        let tau = verts(ti);
        for (c, &si) in cols.iter().enumerate() {
            let sigma = verts(si);
            let missing: Vec<usize> = (0..tau.len()).filter(|k| !sigma.contains(&tau[*k])).collect();
            if missing.len() != 1 || !sigma.iter().all(|v| tau.contains(v)) {
                continue;
            }
            let k = missing[0];
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let scalar = f_of(sigma, cloud, w.f_kind()) * w.charges()[tau[k]]
                / f_of(tau, cloud, w.f_kind());
            d[(r, c)] = sign * scalar;
        }
    }
    (d, rows, cols)
}

/// Orthonormal basis (as columns) of the row space of `a`, from a one-sided
/// Jacobi SVD of `aᵀ`.
fn row_space_basis(a: &DMatrix<f64>) -> DMatrix<f64> {
    let mut w = a.transpose();
    let (n, m) = (w.nrows(), w.ncols());
    for _sweep in 0..60 {
        let mut rotated = false;
        for i in 0..m {
            for j in (i + 1)..m {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, 0.0);
                for k in 0..n {
                    alpha += w[(k, i)] * w[(k, i)];
                    beta += w[(k, j)] * w[(k, j)];
                    gamma += w[(k, i)] * w[(k, j)];
                }
                if gamma == 0.0 || gamma.abs() <= 1e-15 * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for k in 0..n {
                    let (x, y) = (w[(k, i)], w[(k, j)]);
                    w[(k, i)] = c * x - s * y;
                    w[(k, j)] = s * x + c * y;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let norms: Vec<f64> = (0..m).map(|j| w.column(j).norm()).collect();
    let sigma_max = norms.iter().copied().fold(0.0, f64::max);
    let keep: Vec<usize> = (0..m)
        .filter(|&j| sigma_max > 0.0 && norms[j] > SVD_CUTOFF * sigma_max)
        .collect();
    let mut u = DMatrix::zeros(n, keep.len());
    for (c, &j) in keep.iter().enumerate() {
        for k in 0..n {
            u[(k, c)] = w[(k, j)] / norms[j];
        }
    }
    u
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
pub fn jacobi_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let n = m.nrows();
    let mut a = m.clone();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)] * a[(i, j)])
            .sum();
        let scale: f64 = a.iter().map(|x| x * x).sum();
        if off <= 1e-30 * scale || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut vals: Vec<f64> = (0..n).map(|i| a[(i, i)]).collect();
    vals.sort_by(f64::total_cmp);
    vals
}

/// Dense reference assembly of the persistent sheaf Laplacian.
pub fn dense_psl(
    fc: &FilteredComplex,
    pair: &SnapshotPair,
    q: usize,
    cloud: &LabeledPointCloud,
    w: &SheafWeighting,
) -> Result<PslOperator> {
    if pair.l.len() > ORACLE_MAX_SIMPLICES {
        return Err(PslError::InstanceTooLarge(pair.l.len(), ORACLE_MAX_SIMPLICES));
    }
    if q > 1 {
        return Err(PslError::DimensionMismatch(format!("q = {q} is not supported")));
    }
    let mut l_sorted = pair.l.clone();
    l_sorted.sort_unstable();
    let mut k_sorted = pair.k.clone();
    k_sorted.sort_unstable();

    let (d_l, _, l_cols) = dense_coboundary(fc, &l_sorted, q, cloud, w);
    let in_k: Vec<bool> = l_cols.iter().map(|c| k_sorted.binary_search(c).is_ok()).collect();
    let basis: Vec<usize> = l_cols.iter().zip(&in_k).filter(|(_, &k)| k).map(|(&c, _)| c).collect();
    let n = basis.len();

    // B = D_Lᵀ split into K rows and L∖K rows.
    let b = d_l.transpose();
    let k_rows: Vec<usize> = (0..l_cols.len()).filter(|&i| in_k[i]).collect();
    let x_rows: Vec<usize> = (0..l_cols.len()).filter(|&i| !in_k[i]).collect();
    let b_k = b.select_rows(&k_rows);
    let a = b.select_rows(&x_rows);
    let dim = b.ncols();
    let projector = if x_rows.is_empty() || dim == 0 {
        DMatrix::identity(dim, dim)
    } else {
        let u = row_space_basis(&a);
        DMatrix::identity(dim, dim) - &u * u.transpose()
    };
    let up = &b_k * projector * b_k.transpose();
    let down = if q == 0 {
        DMatrix::zeros(n, n)
    } else {
        let (d_k, _, _) = dense_coboundary(fc, &k_sorted, q - 1, cloud, w);
        &d_k * d_k.transpose()
    };
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

/// Spectrum of the dense oracle operator.
pub fn oracle_eigenvalues(op: &PslOperator) -> Vec<f64> {
    let sym = (&op.matrix + op.matrix.transpose()) * 0.5;
    jacobi_eigenvalues(&sym)
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Connected components of the graph on `n` vertices with the given edges.
pub fn count_components(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> usize {
    let mut parent: Vec<usize> = (0..n).collect();
    let mut components = n;
    for (a, b) in edges {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
            components -= 1;
        }
    }
    components
}

/// Persistent zero-dimensional Betti number of `K(t) → L(t_plus_delta)` for a
/// Rips-type filtration: every vertex is born at 0, so it equals the number
/// of components of the graph with edges of length `<= t_plus_delta`.
pub fn persistent_betti0_unionfind(dist: &DistanceMatrix, t: f64, t_plus_delta: f64) -> usize {
    debug_assert!(t <= t_plus_delta);
    let n = dist.len();
    let edges = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .filter(|&(i, j)| dist.get(i, j) <= t_plus_delta);
    count_components(n, edges)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub instance: String,
    pub engine: Vec<f64>,
    pub oracle: Vec<f64>,
    pub max_abs_err: f64,
    pub max_rel_err: f64,
    pub pass: bool,
}

impl OracleReport {
    /// Compares eigenvalue multisets; the relative error is measured against
    /// `max(1, largest |λ|)`.
    pub fn compare(instance: String, engine: Vec<f64>, oracle: Vec<f64>, rel_tol: f64) -> Self {
        let mut e = engine;
        let mut o = oracle;
        e.sort_by(f64::total_cmp);
        o.sort_by(f64::total_cmp);
        let (max_abs_err, max_rel_err, same_len) = if e.len() == o.len() {
            let abs = e.iter().zip(&o).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            let scale = e.iter().chain(&o).map(|x| x.abs()).fold(1.0, f64::max);
            (abs, abs / scale, true)
        } else {
            (f64::INFINITY, f64::INFINITY, false)
        };
        OracleReport {
            instance,
            pass: same_len && max_rel_err <= rel_tol,
            engine: e,
            oracle: o,
            max_abs_err,
            max_rel_err,
        }
    }

    /// Exact comparison of integer sequences, e.g. Betti traces.
    pub fn exact(instance: String, engine: Vec<f64>, oracle: Vec<f64>) -> Self {
        let same = engine == oracle;
        let max_abs_err = if engine.len() == oracle.len() {
            engine.iter().zip(&oracle).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
        } else {
            f64::INFINITY
        };
        OracleReport {
            instance,
            engine,
            oracle,
            max_abs_err,
            max_rel_err: max_abs_err,
            pass: same,
        }
    }
}
