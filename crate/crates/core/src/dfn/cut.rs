//! Splits a convex-cell mesh along trace segments so every trace becomes a
//! chain of constrained edges.

use std::collections::{HashMap, HashSet};

use crate::error::{Error, Result};
use crate::mesh::polygon::{self, Point};
use crate::mesh::{build_mesh, edge_key, PolygonalMesh, Vertex};

struct Cutter {
    points: Vec<Point>,
    pinned: Vec<bool>,
    cells: Vec<Vec<usize>>,
    edge_cells: HashMap<(usize, usize), Vec<usize>>,
    constrained: HashSet<(usize, usize)>,
    tol: f64,
}

impl Cutter {
    fn new(points: Vec<Point>, cells: Vec<Vec<usize>>, tol: f64) -> Self {
        let mut c = Cutter {
            pinned: vec![false; points.len()],
            points,
            cells: Vec::new(),
            edge_cells: HashMap::new(),
            constrained: HashSet::new(),
            tol,
        };
        for cell in cells {
            c.push_cell(cell);
        }
        c
    }

    fn loop_edges(cell: &[usize]) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = cell.len();
        (0..n).map(move |i| edge_key(cell[i], cell[(i + 1) % n]))
    }

    fn push_cell(&mut self, cell: Vec<usize>) {
        let id = self.cells.len();
        for e in Self::loop_edges(&cell) {
            self.edge_cells.entry(e).or_default().push(id);
        }
        self.cells.push(cell);
    }

    fn replace_cell(&mut self, id: usize, cell: Vec<usize>) {
        let old = std::mem::take(&mut self.cells[id]);
        for e in Self::loop_edges(&old) {
            if let Some(v) = self.edge_cells.get_mut(&e) {
                v.retain(|&c| c != id);
                if v.is_empty() {
                    self.edge_cells.remove(&e);
                }
            }
        }
        for e in Self::loop_edges(&cell) {
            self.edge_cells.entry(e).or_default().push(id);
        }
        self.cells[id] = cell;
    }

    fn add_point(&mut self, p: Point) -> usize {
        self.points.push(p);
        self.pinned.push(false);
        self.points.len() - 1
    }

    /// Inserts vertex `w` between `u` and `v` in every cell using that edge.
    fn split_edge(&mut self, u: usize, v: usize, w: usize) {
        let key = edge_key(u, v);
        let users = self.edge_cells.get(&key).cloned().unwrap_or_default();
        for c in users {
            let mut cell = self.cells[c].clone();
            let n = cell.len();
            let i = (0..n)
                .find(|&i| edge_key(cell[i], cell[(i + 1) % n]) == key)
                .expect("edge registry is consistent");
            cell.insert(i + 1, w);
            self.replace_cell(c, cell);
        }
        if self.constrained.remove(&key) {
            self.constrained.insert(edge_key(u, w));
            self.constrained.insert(edge_key(w, v));
        }
    }

    /// Makes `p` a mesh vertex if it coincides with a vertex or lies on an
    /// edge; returns `None` when it is strictly inside a cell.
    fn locate_on_skeleton(&mut self, p: &Point) -> Option<usize> {
        let near = self
            .edge_cells
            .keys()
            .flat_map(|&(a, b)| [a, b])
            .find(|&v| (self.points[v] - p).norm() <= self.tol);
        if near.is_some() {
            return near;
        }
        let hit = self
            .edge_cells
            .keys()
            .copied()
            .find(|&(a, b)| polygon::point_segment_distance(p, &self.points[a], &self.points[b]) <= self.tol);
        hit.map(|(a, b)| {
            let w = self.add_point(*p);
            self.split_edge(a, b, w);
            w
        })
    }

    fn cut(&mut self, a: Point, b: Point) -> Result<()> {
        let d = b - a;
        let len = d.norm();
        let u = d / len;
        let tol = self.tol;
        let dist = |p: &Point| polygon::cross(&u, &(p - a));
        let param = |p: &Point| u.dot(&(p - a)) / len;
        let sign = |p: &Point| {
            let s = dist(p);
            if s.abs() <= tol {
                0
            } else if s > 0.0 {
                1
            } else {
                -1
            }
        };

        let mut ends: [Option<usize>; 2] = [None, None];
        for (k, p) in [a, b].iter().enumerate() {
            ends[k] = self.locate_on_skeleton(p);
            if let Some(v) = ends[k] {
                self.pinned[v] = true;
            }
        }

        let count = self.cells.len();
        for c in 0..count {
            let signs: Vec<i32> = self.cells[c].iter().map(|&v| sign(&self.points[v])).collect();
            if !signs.contains(&1) || !signs.contains(&-1) {
                continue;
            }
            // chord of the supporting line through the convex cell
            let cell = self.cells[c].clone();
            let n = cell.len();
            let mut chord: Vec<(f64, Option<usize>, (usize, usize), Point)> = Vec::new();
            for i in 0..n {
                let (p, q) = (self.points[cell[i]], self.points[cell[(i + 1) % n]]);
                if signs[i] == 0 {
                    chord.push((param(&p), Some(cell[i]), (0, 0), p));
                } else if signs[i] * signs[(i + 1) % n] < 0 {
                    let (dp, dq) = (dist(&p), dist(&q));
                    let x = p + (q - p) * (dp / (dp - dq));
                    chord.push((param(&x), None, (cell[i], cell[(i + 1) % n]), x));
                }
            }
            if chord.len() != 2 {
                return Err(Error::Triangulation(format!("trace cuts a non-convex cell ({} crossings)", chord.len())));
            }
            let (t0, t1) = (chord[0].0.min(chord[1].0), chord[0].0.max(chord[1].0));
            let eps = tol / len;
            if t1.min(1.0) - t0.max(0.0) <= eps {
                continue;
            }
            let mut ids = [0usize; 2];
            for (k, (_, vid, (p, q), x)) in chord.iter().enumerate() {
                ids[k] = match vid {
                    Some(v) => *v,
                    None => {
                        let w = self.add_point(*x);
                        self.split_edge(*p, *q, w);
                        w
                    }
                };
            }
            // interior segment endpoints become chord vertices
            let (ta, tb) = (param(&self.points[ids[0]]), param(&self.points[ids[1]]));
            let mut inner: Vec<(f64, usize)> = Vec::new();
            for (k, (t, p)) in [(0.0, a), (1.0, b)].into_iter().enumerate() {
                if ends[k].is_none() && t > ta.min(tb) + eps && t < ta.max(tb) - eps {
                    let w = self.add_point(p);
                    self.pinned[w] = true;
                    ends[k] = Some(w);
                    inner.push((t, w));
                }
            }
            // order interior chord vertices from ids[0] to ids[1]
            inner.sort_by(|x, y| x.0.total_cmp(&y.0));
            if ta > tb {
                inner.reverse();
            }
            let chord_inner: Vec<usize> = inner.into_iter().map(|x| x.1).collect();

            let cell = self.cells[c].clone();
            let n = cell.len();
            let i0 = cell.iter().position(|&v| v == ids[0]).expect("chord vertex in cell");
            let i1 = cell.iter().position(|&v| v == ids[1]).expect("chord vertex in cell");
            // walk from i0 to i1 along the loop, then back along the chord
            let mut first: Vec<usize> = Vec::new();
            let mut i = i0;
            loop {
                first.push(cell[i]);
                if i == i1 {
                    break;
                }
                i = (i + 1) % n;
            }
            first.extend(chord_inner.iter().rev());
            let mut second: Vec<usize> = Vec::new();
            let mut i = i1;
            loop {
                second.push(cell[i]);
                if i == i0 {
                    break;
                }
                i = (i + 1) % n;
            }
            second.extend(chord_inner.iter());
            self.replace_cell(c, first);
            self.push_cell(second);
        }

        for k in 0..2 {
            if ends[k].is_none() {
                return Err(Error::Triangulation("trace endpoint is outside the fracture mesh".into()));
            }
        }
        // every edge on the segment is a trace edge
        let eps = tol / len;
        let on_segment: Vec<(usize, usize)> = self
            .edge_cells
            .keys()
            .copied()
            .filter(|&(p, q)| {
                let (pp, qq) = (self.points[p], self.points[q]);
                sign(&pp) == 0
                    && sign(&qq) == 0
                    && param(&pp).min(param(&qq)) >= -eps
                    && param(&pp).max(param(&qq)) <= 1.0 + eps
            })
            .collect();
        self.constrained.extend(on_segment);
        Ok(())
    }
}

/// Cuts the cells (convex, CCW) by each segment in turn. Segment endpoints
/// become constrained vertices; cuts through the cell holding an interior
/// endpoint are extended to that cell's boundary without constraint.
pub fn cut_by_traces(points: Vec<Point>, cells: Vec<Vec<usize>>, segments: &[[Point; 2]], tol: f64) -> Result<PolygonalMesh> {
    let mut cutter = Cutter::new(points, cells, tol);
    for s in segments {
        cutter.cut(s[0], s[1])?;
    }
    let vertices: Vec<Vertex> = cutter
        .points
        .iter()
        .zip(&cutter.pinned)
        .map(|(p, &c)| Vertex { position: *p, constrained: c })
        .collect();
    let mut constrained: Vec<(usize, usize)> = cutter.constrained.into_iter().collect();
    constrained.sort_unstable();
    build_mesh(vertices, cutter.cells, &constrained).map(|m| m.compacted())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dfn::triangulate::{triangulate_polygon, MeshTarget};

    fn tri() -> (Vec<Point>, Vec<Vec<usize>>) {
        (vec![Point::new(0., 0.), Point::new(1., 0.), Point::new(0., 1.)], vec![vec![0, 1, 2]])
    }

    #[test]
    fn full_crossing_splits_triangle() {
        let (p, c) = tri();
        let m = cut_by_traces(p, c, &[[Point::new(-0.5, 0.25), Point::new(1.0, 0.25)]], 1e-12);
        // the segment leaves the triangle: its endpoints are not on the mesh
        assert!(m.is_err());
        let (p, c) = tri();
        let m = cut_by_traces(p, c, &[[Point::new(0.0, 0.25), Point::new(0.75, 0.25)]], 1e-12).unwrap();
        assert_eq!(m.num_cells(), 2);
        let mut sizes: Vec<usize> = m.cells.iter().map(|c| c.boundary.len()).collect();
        sizes.sort();
        assert_eq!(sizes, vec![3, 4]);
        assert!((m.total_area() - 0.5).abs() < 1e-15);
        assert_eq!(m.constrained_edges().len(), 1);
    }

    #[test]
    fn cut_through_vertex_gives_two_triangles() {
        let (p, c) = tri();
        let m = cut_by_traces(p, c, &[[Point::new(0.0, 0.0), Point::new(0.5, 0.5)]], 1e-12).unwrap();
        assert_eq!(m.num_cells(), 2);
        assert!(m.cells.iter().all(|c| c.boundary.len() == 3));
    }

    #[test]
    fn interior_endpoint_is_a_vertex_and_extension_is_free() {
        let (p, c) = tri();
        let m = cut_by_traces(p, c, &[[Point::new(0.0, 0.25), Point::new(0.3, 0.25)]], 1e-12).unwrap();
        assert_eq!(m.num_cells(), 2);
        let end = (0..m.num_vertices()).find(|&v| (m.position(v) - Point::new(0.3, 0.25)).norm() < 1e-15).unwrap();
        assert!(m.vertices[end].constrained);
        let ce = m.constrained_edges();
        assert_eq!(ce.len(), 1);
        // the extension from (0.3, 0.25) to the hypotenuse exists but is free
        let ext = (0..m.num_vertices()).find(|&v| (m.position(v) - Point::new(0.75, 0.25)).norm() < 1e-15).unwrap();
        let e = m.edge_between(end, ext).unwrap();
        assert!(!m.edges[e].constrained);
    }

    #[test]
    fn crossing_traces_on_a_grid_conserve_area() {
        let sq = vec![Point::new(0., 0.), Point::new(2., 0.), Point::new(2., 2.), Point::new(0., 2.)];
        let t = triangulate_polygon(&sq, MeshTarget::Area(0.02)).unwrap();
        let cells: Vec<Vec<usize>> = t.triangles.iter().map(|t| t.to_vec()).collect();
        let areas_before = t.area();
        let segs = [
            [Point::new(0.0, 0.731), Point::new(2.0, 1.113)],
            [Point::new(0.77, 0.0), Point::new(1.31, 1.52)],
        ];
        let m = cut_by_traces(t.points.clone(), cells, &segs, 1e-12).unwrap();
        assert!((m.total_area() - areas_before).abs() < 1e-12);
        // trace coverage: constrained edge length equals segment lengths
        let covered: f64 = m
            .constrained_edges()
            .iter()
            .map(|&(a, b)| (m.position(a) - m.position(b)).norm())
            .sum();
        let total: f64 = segs.iter().map(|s| (s[1] - s[0]).norm()).sum();
        assert!((covered - total).abs() < 1e-12, "{covered} vs {total}");
        // no cell crosses a segment: all vertices on one side
        for s in &segs {
            let u = (s[1] - s[0]).normalize();
            for c in 0..m.num_cells() {
                let d: Vec<f64> = m.cell_points(c).iter().map(|p| polygon::cross(&u, &(p - s[0]))).collect();
                let (lo, hi) = d.iter().fold((0.0f64, 0.0f64), |(l, h), &x| (l.min(x), h.max(x)));
                let c_t: Vec<f64> = m.cell_points(c).iter().map(|p| u.dot(&(p - s[0]))).collect();
                let inside = c_t.iter().cloned().fold(f64::INFINITY, f64::min) < (s[1] - s[0]).norm() - 1e-9
                    && c_t.iter().cloned().fold(f64::NEG_INFINITY, f64::max) > 1e-9;
                assert!(!(inside && lo < -1e-9 && hi > 1e-9), "cell {c} straddles a trace");
            }
        }
    }

    #[test]
    fn trace_on_grid_line_only_marks_edges() {
        let sq = vec![Point::new(0., 0.), Point::new(1., 0.), Point::new(1., 1.), Point::new(0., 1.)];
        let t = triangulate_polygon(&sq, MeshTarget::Area(0.125)).unwrap();
        let n = t.triangles.len();
        let cells: Vec<Vec<usize>> = t.triangles.iter().map(|t| t.to_vec()).collect();
        let m = cut_by_traces(t.points, cells, &[[Point::new(0.0, 0.5), Point::new(0.75, 0.5)]], 1e-12).unwrap();
        assert_eq!(m.num_cells(), n);
        let covered: f64 = m.constrained_edges().iter().map(|&(a, b)| (m.position(a) - m.position(b)).norm()).sum();
        assert!((covered - 0.75).abs() < 1e-14);
    }
}
