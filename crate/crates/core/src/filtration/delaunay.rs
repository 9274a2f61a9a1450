//! Delaunay triangulation of 3-D point sets.
//!
//! Full-dimensional inputs use incremental Bowyer-Watson insertion with a
//! symbolic vertex at infinity and Shewchuk's adaptive predicates. Points on a
//! common circumsphere are resolved by a strict in-sphere test. If an insertion
//! would still create a flat cell, the triangulation is rebuilt from a seeded,
//! deterministic perturbation of the coordinates (at most 1e-10 of the bounding
//! box extent), so the combinatorics stay fixed for a given input.
//!
//! Coplanar inputs fall back to a 2-D triangulation in the plane, collinear
//! inputs to the chain of consecutive points.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use robust::{orient3d, insphere, Coord3D};
use spade::{DelaunayTriangulation, HasPosition, Point2, Triangulation};

const INF: usize = usize::MAX;
const NONE: usize = usize::MAX;
const PERTURB_SEED: u64 = 0x5eed_de1a;
const MAX_REBUILDS: u32 = 8;

/// Maximal cells of a Delaunay triangulation, each a sorted vertex list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DelaunayCells {
    /// Affine dimension of the input (0 to 3).
    pub dim: usize,
    pub cells: Vec<Vec<usize>>,
}

pub fn delaunay_cells(points: &[[f64; 3]]) -> DelaunayCells {
    let n = points.len();
    if n <= 1 {
        return DelaunayCells {
            dim: 0,
            cells: (0..n).map(|i| vec![i]).collect(),
        };
    }
    match affine_frame(points) {
        Frame::Line => collinear_cells(points),
        Frame::Plane(a, b, c) => planar_cells(points, a, b, c),
        Frame::Space(seed) => {
            let mut coords = points.to_vec();
            let extent = bounding_extent(points);
            for attempt in 0..=MAX_REBUILDS {
                if let Some(tets) = Bowyer::triangulate(&coords, seed) {
                    return DelaunayCells { dim: 3, cells: tets };
                }
                let scale = extent * 1e-10 * f64::from(1u32 << attempt);
                let mut rng = ChaCha8Rng::seed_from_u64(PERTURB_SEED + u64::from(attempt));
                coords = points
                    .iter()
                    .map(|p| p.map(|c| c + rng.random_range(-scale..=scale)))
                    .collect();
            }
            panic!("Delaunay construction failed after {MAX_REBUILDS} perturbations");
        }
    }
}

fn c3(p: &[f64; 3]) -> Coord3D<f64> {
    Coord3D {
        x: p[0],
        y: p[1],
        z: p[2],
    }
}

fn orient(a: &[f64; 3], b: &[f64; 3], c: &[f64; 3], d: &[f64; 3]) -> f64 {
    orient3d(c3(a), c3(b), c3(c), c3(d))
}

fn collinear3(a: &[f64; 3], b: &[f64; 3], c: &[f64; 3]) -> bool {
    let proj = |p: &[f64; 3], i: usize, j: usize| robust::Coord { x: p[i], y: p[j] };
    [(0, 1), (1, 2), (2, 0)]
        .iter()
        .all(|&(i, j)| robust::orient2d(proj(a, i, j), proj(b, i, j), proj(c, i, j)) == 0.0)
}

fn bounding_extent(points: &[[f64; 3]]) -> f64 {
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for p in points {
        for k in 0..3 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    (0..3).map(|k| hi[k] - lo[k]).fold(0.0, f64::max).max(1.0)
}

enum Frame {
    Line,
    Plane(usize, usize, usize),
    Space([usize; 4]),
}

fn affine_frame(points: &[[f64; 3]]) -> Frame {
    let (a, b) = (0, 1);
    let Some(c) = (2..points.len()).find(|&i| !collinear3(&points[a], &points[b], &points[i]))
    else {
        return Frame::Line;
    };
    match (2..points.len()).find(|&i| orient(&points[a], &points[b], &points[c], &points[i]) != 0.0)
    {
        Some(d) => Frame::Space([a, b, c, d]),
        None => Frame::Plane(a, b, c),
    }
}

fn collinear_cells(points: &[[f64; 3]]) -> DelaunayCells {
    let o = points[0];
    let dir = [points[1][0] - o[0], points[1][1] - o[1], points[1][2] - o[2]];
    let mut order: Vec<(f64, usize)> = points
        .iter()
        .enumerate()
        .map(|(i, p)| ((0..3).map(|k| (p[k] - o[k]) * dir[k]).sum(), i))
        .collect();
    order.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
    let cells = order
        .windows(2)
        .map(|w| {
            let (i, j) = (w[0].1, w[1].1);
            vec![i.min(j), i.max(j)]
        })
        .collect();
    DelaunayCells { dim: 1, cells }
}

struct PlanarVertex {
    pos: Point2<f64>,
    idx: usize,
}

impl HasPosition for PlanarVertex {
    type Scalar = f64;
    fn position(&self) -> Point2<f64> {
        self.pos
    }
}

fn planar_cells(points: &[[f64; 3]], a: usize, b: usize, c: usize) -> DelaunayCells {
    let o = points[a];
    let sub = |p: &[f64; 3]| [p[0] - o[0], p[1] - o[1], p[2] - o[2]];
    let dot = |u: &[f64; 3], v: &[f64; 3]| u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
    let ab = sub(&points[b]);
    let nab = dot(&ab, &ab).sqrt();
    let e1 = ab.map(|x| x / nab);
    let ac = sub(&points[c]);
    let along = dot(&ac, &e1);
    let w = [ac[0] - along * e1[0], ac[1] - along * e1[1], ac[2] - along * e1[2]];
    let nw = dot(&w, &w).sqrt();
    let e2 = w.map(|x| x / nw);

    let mut tri: DelaunayTriangulation<PlanarVertex> = DelaunayTriangulation::new();
    for (idx, p) in points.iter().enumerate() {
        let r = sub(p);
        let pos = Point2::new(dot(&r, &e1), dot(&r, &e2));
        tri.insert(PlanarVertex { pos, idx })
            .expect("finite planar coordinates");
    }
    let mut cells: Vec<Vec<usize>> = tri
        .inner_faces()
        .map(|f| {
            let mut v: Vec<usize> = f.vertices().iter().map(|h| h.data().idx).collect();
            v.sort_unstable();
            v
        })
        .collect();
    if cells.is_empty() {
        cells = tri
            .undirected_edges()
            .map(|e| {
                let [p, q] = e.vertices();
                let (i, j) = (p.data().idx, q.data().idx);
                vec![i.min(j), i.max(j)]
            })
            .collect();
        cells.sort();
        return DelaunayCells { dim: 1, cells };
    }
    cells.sort();
    DelaunayCells { dim: 2, cells }
}

#[derive(Clone)]
struct Tet {
    v: [usize; 4],
    /// `nb[i]` is the cell across the face opposite `v[i]`.
    nb: [usize; 4],
    alive: bool,
}

struct Bowyer<'a> {
    pts: &'a [[f64; 3]],
    tets: Vec<Tet>,
    mark: Vec<u32>,
    stamp: u32,
    last: usize,
}

impl<'a> Bowyer<'a> {
    /// Returns the sorted finite tetrahedra, or `None` if a flat cell would
    /// have been created.
    fn triangulate(pts: &'a [[f64; 3]], seed: [usize; 4]) -> Option<Vec<Vec<usize>>> {
        let [a, b, c, d] = seed;
        let o = orient(&pts[a], &pts[b], &pts[c], &pts[d]);
        if o == 0.0 {
            return None;
        }
        let first = if o > 0.0 { [a, b, c, d] } else { [b, a, c, d] };
        // Ghost cells are oriented as if the vertex at infinity were a point
        // beyond their hull face: replacing INF by such a point gives a
        // positively oriented cell. Swapping two finite slots achieves that.
        let mut tets = Vec::with_capacity(pts.len() * 8);
        tets.push(Tet {
            v: first,
            nb: [NONE; 4],
            alive: true,
        });
        for i in 0..4 {
            let mut v = first;
            v[i] = INF;
            let others: Vec<usize> = (0..4).filter(|&k| k != i).collect();
            v.swap(others[0], others[1]);
            tets.push(Tet {
                v,
                nb: [NONE; 4],
                alive: true,
            });
        }
        let mut faces: HashMap<[usize; 3], (usize, usize)> = HashMap::new();
        for t in 0..tets.len() {
            for i in 0..4 {
                let mut key = [0; 3];
                let mut n = 0;
                for (k, &x) in tets[t].v.iter().enumerate() {
                    if k != i {
                        key[n] = x;
                        n += 1;
                    }
                }
                key.sort_unstable();
                if let Some((u, j)) = faces.remove(&key) {
                    tets[t].nb[i] = u;
                    tets[u].nb[j] = t;
                } else {
                    faces.insert(key, (t, i));
                }
            }
        }
        let mut bw = Bowyer {
            pts,
            tets,
            mark: Vec::new(),
            stamp: 0,
            last: 0,
        };
        for p in 0..pts.len() {
            if seed.contains(&p) {
                continue;
            }
            if !bw.insert(p) {
                return None;
            }
        }
        let mut out: Vec<Vec<usize>> = bw
            .tets
            .iter()
            .filter(|t| t.alive && !t.v.contains(&INF))
            .map(|t| {
                let mut v = t.v.to_vec();
                v.sort_unstable();
                v
            })
            .collect();
        out.sort();
        Some(out)
    }

    fn with_vertex(&self, t: usize, slot: usize, p: usize) -> [usize; 4] {
        let mut v = self.tets[t].v;
        v[slot] = p;
        v
    }

    fn orient_of(&self, v: &[usize; 4]) -> f64 {
        orient(&self.pts[v[0]], &self.pts[v[1]], &self.pts[v[2]], &self.pts[v[3]])
    }

    fn finite_conflict(&self, t: usize, p: usize) -> bool {
        let v = &self.tets[t].v;
        let s = |i: usize| c3(&self.pts[v[i]]);
        insphere(s(0), s(1), s(2), s(3), c3(&self.pts[p])) > 0.0
    }

    fn in_conflict(&self, t: usize, p: usize) -> bool {
        match self.tets[t].v.iter().position(|&x| x == INF) {
            None => self.finite_conflict(t, p),
            Some(k) => {
                let o = self.orient_of(&self.with_vertex(t, k, p));
                if o > 0.0 {
                    true
                } else if o < 0.0 {
                    false
                } else {
                    // Coplanar with the hull face: conflict iff the point sits
                    // strictly inside that face's circumcircle, which is the
                    // in-sphere test of the finite cell behind it.
                    self.finite_conflict(self.tets[t].nb[k], p)
                }
            }
        }
    }

    fn locate(&self, p: usize) -> Option<usize> {
        let mut t = self.last;
        if !self.tets[t].alive || self.tets[t].v.contains(&INF) {
            t = self.tets.iter().position(|x| x.alive && !x.v.contains(&INF))?;
        }
        for _ in 0..(4 * self.tets.len() + 16) {
            if self.tets[t].v.contains(&INF) {
                return self.in_conflict(t, p).then_some(t);
            }
            let next = (0..4).find(|&i| self.orient_of(&self.with_vertex(t, i, p)) < 0.0);
            match next {
                Some(i) => t = self.tets[t].nb[i],
                None => return Some(t),
            }
        }
        None
    }

    fn insert(&mut self, p: usize) -> bool {
        let start = match self.locate(p) {
            Some(t) if self.in_conflict(t, p) => t,
            _ => match (0..self.tets.len())
                .find(|&t| self.tets[t].alive && self.in_conflict(t, p))
            {
                Some(t) => t,
                None => return false,
            },
        };

        self.stamp += 1;
        if self.mark.len() < self.tets.len() {
            self.mark.resize(self.tets.len(), 0);
        }
        let stamp = self.stamp;
        // mark == stamp: in cavity; mark == stamp | high bit: checked, outside
        let outside = stamp | 0x8000_0000;
        let mut cavity = vec![start];
        self.mark[start] = stamp;
        let mut stack = vec![start];
        let mut boundary: Vec<(usize, usize)> = Vec::new();
        while let Some(t) = stack.pop() {
            for i in 0..4 {
                let n = self.tets[t].nb[i];
                if self.mark[n] == stamp {
                    continue;
                }
                if self.mark[n] != outside && self.in_conflict(n, p) {
                    self.mark[n] = stamp;
                    cavity.push(n);
                    stack.push(n);
                } else {
                    self.mark[n] = outside;
                    boundary.push((t, i));
                }
            }
        }

        let mut created = Vec::with_capacity(boundary.len());
        let mut pending: HashMap<(usize, usize), (usize, usize)> = HashMap::new();
        for &(t, i) in &boundary {
            let v = self.with_vertex(t, i, p);
            let finite: Vec<usize> = v.iter().copied().filter(|&x| x != INF).collect();
            let flat = if finite.len() == 4 {
                self.orient_of(&v) <= 0.0
            } else {
                collinear3(&self.pts[finite[0]], &self.pts[finite[1]], &self.pts[finite[2]])
            };
            if flat {
                return false;
            }
            let outer = self.tets[t].nb[i];
            let id = self.tets.len();
            let mut nb = [NONE; 4];
            nb[i] = outer;
            self.tets.push(Tet { v, nb, alive: true });
            if let Some(slot) = self.tets[outer].nb.iter().position(|&x| x == t) {
                self.tets[outer].nb[slot] = id;
            }
            for j in 0..4 {
                if j == i {
                    continue;
                }
                // Face opposite v[j] contains p; key it by its other two vertices.
                let mut key: Vec<usize> = (0..4).filter(|&k| k != i && k != j).map(|k| v[k]).collect();
                key.sort_unstable();
                let key = (key[0], key[1]);
                if let Some((other, oslot)) = pending.remove(&key) {
                    self.tets[id].nb[j] = other;
                    self.tets[other].nb[oslot] = id;
                } else {
                    pending.insert(key, (id, j));
                }
            }
            created.push(id);
        }
        if !pending.is_empty() {
            return false;
        }
        for t in cavity {
            self.tets[t].alive = false;
        }
        self.mark.resize(self.tets.len(), 0);
        self.last = created
            .iter()
            .copied()
            .find(|&t| !self.tets[t].v.contains(&INF))
            .unwrap_or(created[0]);
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circumsphere_empty(points: &[[f64; 3]], cell: &[usize]) -> bool {
        let s = |i: usize| c3(&points[cell[i]]);
        let sign = orient3d(s(0), s(1), s(2), s(3)).signum();
        (0..points.len())
            .filter(|i| !cell.contains(i))
            .all(|i| sign * insphere(s(0), s(1), s(2), s(3), c3(&points[i])) <= 0.0)
    }

    fn euler_characteristic(cells: &[Vec<usize>]) -> i64 {
        use std::collections::BTreeSet;
        let mut faces: [BTreeSet<Vec<usize>>; 4] = Default::default();
        for c in cells {
            for mask in 1u32..16 {
                let f: Vec<usize> = (0..4).filter(|k| mask & (1 << k) != 0).map(|k| c[k]).collect();
                faces[f.len() - 1].insert(f);
            }
        }
        faces
            .iter()
            .enumerate()
            .map(|(d, s)| if d % 2 == 0 { s.len() as i64 } else { -(s.len() as i64) })
            .sum()
    }

    #[test]
    fn single_tetrahedron() {
        let pts = [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        let d = delaunay_cells(&pts);
        assert_eq!(d.dim, 3);
        assert_eq!(d.cells, vec![vec![0, 1, 2, 3]]);
    }

    #[test]
    fn random_clouds_are_delaunay() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [5usize, 9, 20, 60] {
            let pts: Vec<[f64; 3]> = (0..n)
                .map(|_| [rng.random::<f64>(), rng.random::<f64>(), rng.random::<f64>()])
                .collect();
            let d = delaunay_cells(&pts);
            assert_eq!(d.dim, 3);
            assert!(d.cells.iter().all(|c| circumsphere_empty(&pts, c)));
            assert_eq!(euler_characteristic(&d.cells), 1);
            let used: std::collections::HashSet<usize> = d.cells.iter().flatten().copied().collect();
            assert_eq!(used.len(), n);
        }
    }

    #[test]
    fn cube_lattice_is_handled() {
        // Highly cospherical and coplanar input.
        let mut pts = Vec::new();
        for x in 0..3 {
            for y in 0..3 {
                for z in 0..3 {
                    pts.push([x as f64, y as f64, z as f64]);
                }
            }
        }
        let d = delaunay_cells(&pts);
        assert_eq!(d.dim, 3);
        assert_eq!(euler_characteristic(&d.cells), 1);
        let vol: f64 = d
            .cells
            .iter()
            .map(|c| orient(&pts[c[0]], &pts[c[1]], &pts[c[2]], &pts[c[3]]).abs() / 6.0)
            .sum();
        assert!((vol - 8.0).abs() < 1e-9, "volume {vol}");
    }

    #[test]
    fn planar_and_collinear_fallbacks() {
        let h = 3f64.sqrt() / 2.0;
        let tri = delaunay_cells(&[[0.0; 3], [1.0, 0.0, 0.0], [0.5, h, 0.0]]);
        assert_eq!(tri, DelaunayCells { dim: 2, cells: vec![vec![0, 1, 2]] });
        let line = delaunay_cells(&[[0.0; 3], [2.0, 2.0, 2.0], [1.0, 1.0, 1.0]]);
        assert_eq!(line, DelaunayCells { dim: 1, cells: vec![vec![0, 2], vec![1, 2]] });
        let pair = delaunay_cells(&[[0.0; 3], [1.0, 0.0, 0.0]]);
        assert_eq!(pair.cells, vec![vec![0, 1]]);
    }
}
