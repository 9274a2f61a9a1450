use std::collections::HashMap;

use crate::error::{PslError, Result};
use crate::geometry::LabeledPointCloud;

use super::delaunay::delaunay_cells;
use super::{ComplexKind, FilteredComplex, Simplex, MAX_SUPPORTED_DIM};

type V3 = [f64; 3];

fn sub(a: &V3, b: &V3) -> V3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}
fn dot(a: &V3, b: &V3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}
fn cross(a: &V3, b: &V3) -> V3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}
fn axpy(acc: &mut V3, s: f64, x: &V3) {
    for k in 0..3 {
        acc[k] += s * x[k];
    }
}

/// Center and radius of the smallest sphere through 1 to 4 affinely
/// independent points.
pub fn circumsphere(points: &[V3]) -> (V3, f64) {
    let a = points[0];
    let offset = match points.len() {
        1 => [0.0; 3],
        2 => sub(&points[1], &a).map(|x| 0.5 * x),
        3 => {
            let u = sub(&points[1], &a);
            let v = sub(&points[2], &a);
            let w = cross(&u, &v);
            let mut num = [0.0; 3];
            axpy(&mut num, dot(&u, &u), &cross(&v, &w));
            axpy(&mut num, dot(&v, &v), &cross(&w, &u));
            num.map(|x| x / (2.0 * dot(&w, &w)))
        }
        4 => {
            let u = sub(&points[1], &a);
            let v = sub(&points[2], &a);
            let w = sub(&points[3], &a);
            let mut num = [0.0; 3];
            axpy(&mut num, dot(&u, &u), &cross(&v, &w));
            axpy(&mut num, dot(&v, &v), &cross(&w, &u));
            axpy(&mut num, dot(&w, &w), &cross(&u, &v));
            num.map(|x| x / (2.0 * dot(&u, &cross(&v, &w))))
        }
        n => panic!("circumsphere of {n} points"),
    };
    let mut center = a;
    axpy(&mut center, 1.0, &offset);
    (center, dot(&offset, &offset).sqrt())
}

pub fn circumradius(points: &[V3]) -> f64 {
    circumsphere(points).1
}

/// Alpha filtration of the cloud's Delaunay triangulation, truncated to
/// dimension 2. Values follow the radius convention: a Gabriel simplex enters
/// at the radius of its smallest circumsphere, an attached one at the
/// smallest value among its cofaces.
pub fn build_alpha(cloud: &LabeledPointCloud) -> Result<FilteredComplex> {
    let n = cloud.len();
    if n < 2 {
        return Err(PslError::DegenerateInput(format!(
            "alpha complex needs at least 2 points, got {n}"
        )));
    }
    let coords: Vec<V3> = cloud.points().iter().map(|p| p.coords).collect();
    let cells = delaunay_cells(&coords);
    let top = cells.dim;

    let mut by_dim: Vec<HashMap<Simplex, f64>> = vec![HashMap::new(); top + 1];
    for cell in &cells.cells {
        let k = cell.len();
        for mask in 1u32..(1 << k) {
            let face: Vec<usize> = (0..k).filter(|i| mask & (1 << i) != 0).map(|i| cell[i]).collect();
            by_dim[face.len() - 1].insert(Simplex::from_sorted(face), f64::NAN);
        }
    }

    for d in (1..=top).rev() {
        // (coface value, opposite vertex) for each simplex of dimension d
        let mut cofaces: HashMap<&Simplex, Vec<(f64, usize)>> = HashMap::new();
        if d < top {
            for (tau, &val) in &by_dim[d + 1] {
                for (k, face) in tau.facets() {
                    let key = by_dim[d].get_key_value(&face).map(|(s, _)| s).expect("closed");
                    cofaces.entry(key).or_default().push((val, tau.vertices()[k]));
                }
            }
        }
        let mut values = Vec::with_capacity(by_dim[d].len());
        for sigma in by_dim[d].keys() {
            let pts: Vec<V3> = sigma.vertices().iter().map(|&v| coords[v]).collect();
            let (center, radius) = circumsphere(&pts);
            let star = cofaces.get(sigma).map(Vec::as_slice).unwrap_or(&[]);
            let attached = star.iter().any(|&(_, v)| {
                let r = sub(&coords[v], &center);
                dot(&r, &r) < radius * radius
            });
            let value = if attached {
                star.iter().map(|&(val, _)| val).fold(f64::INFINITY, f64::min)
            } else {
                radius
            };
            values.push((sigma.clone(), value));
        }
        for (sigma, value) in values {
            by_dim[d].insert(sigma, value);
        }
    }

    let simplices: Vec<(Simplex, f64)> = by_dim
        .into_iter()
        .enumerate()
        .take(MAX_SUPPORTED_DIM + 1)
        .flat_map(|(d, m)| m.into_iter().map(move |(s, v)| (s, if d == 0 { 0.0 } else { v })))
        .collect();
    FilteredComplex::new(ComplexKind::Alpha, top.min(MAX_SUPPORTED_DIM), n, simplices)
}
