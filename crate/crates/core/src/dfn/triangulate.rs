//! Structured triangulation of a convex polygon: a uniform grid over the
//! bounding box, each quad split along its rising diagonal and clipped to
//! the polygon.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::mesh::polygon::{self, Point};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeshTarget {
    /// Maximum triangle area.
    Area(f64),
    /// Approximate number of triangles (within 20%).
    Cells(usize),
}

/// Plain triangle soup with shared vertices.
#[derive(Debug, Clone, Default)]
pub struct Triangulation {
    pub points: Vec<Point>,
    pub triangles: Vec<[usize; 3]>,
}

impl Triangulation {
    pub fn area(&self) -> f64 {
        self.triangles.iter().map(|t| polygon::orient(&self.points[t[0]], &self.points[t[1]], &self.points[t[2]]) / 2.0).sum()
    }
}

/// Deduplicates points that coincide within `tol` using a hash grid.
pub(crate) struct PointMerger {
    cell: f64,
    grid: HashMap<(i64, i64), Vec<usize>>,
    pub points: Vec<Point>,
    tol: f64,
}

impl PointMerger {
    pub fn new(tol: f64) -> Self {
        PointMerger { cell: 4.0 * tol, grid: HashMap::new(), points: Vec::new(), tol }
    }

    fn key(&self, p: &Point) -> (i64, i64) {
        ((p.x / self.cell).floor() as i64, (p.y / self.cell).floor() as i64)
    }

    pub fn insert(&mut self, p: Point) -> usize {
        let (kx, ky) = self.key(&p);
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(ids) = self.grid.get(&(kx + dx, ky + dy)) {
                    for &i in ids {
                        if (self.points[i] - p).norm() <= self.tol {
                            return i;
                        }
                    }
                }
            }
        }
        self.points.push(p);
        let id = self.points.len() - 1;
        self.grid.entry((kx, ky)).or_default().push(id);
        id
    }
}

const MAX_TRIANGLES: usize = 20_000_000;

fn grid_triangulation(poly: &[Point], nx: usize, ny: usize) -> Triangulation {
    let (lo, hi) = polygon::bounding_box(poly);
    let (w, h) = (hi.x - lo.x, hi.y - lo.y);
    let (dx, dy) = (w / nx as f64, h / ny as f64);
    let tol = 1e-10 * (w * w + h * h).sqrt();
    let mut merger = PointMerger::new(tol);
    let mut triangles = Vec::new();
    let n = poly.len();
    let node = |i: usize, j: usize| {
        let x = if i == nx { hi.x } else { lo.x + i as f64 * dx };
        let y = if j == ny { hi.y } else { lo.y + j as f64 * dy };
        Point::new(x, y)
    };
    for j in 0..ny {
        for i in 0..nx {
            let (p00, p10, p11, p01) = (node(i, j), node(i + 1, j), node(i + 1, j + 1), node(i, j + 1));
            for tri in [[p00, p10, p11], [p00, p11, p01]] {
                let mut piece = tri.to_vec();
                for k in 0..n {
                    piece = polygon::clip_left(&piece, &poly[k], &poly[(k + 1) % n], tol);
                    if piece.len() < 3 {
                        break;
                    }
                }
                if piece.len() < 3 || polygon::signed_area(&piece) <= tol * tol {
                    continue;
                }
                let ids: Vec<usize> = piece.iter().map(|p| merger.insert(*p)).collect();
                // convex piece: fan from the first vertex, skipping collapsed triangles
                for k in 1..ids.len() - 1 {
                    let t = [ids[0], ids[k], ids[k + 1]];
                    if t[0] != t[1] && t[1] != t[2] && t[0] != t[2] {
                        let a = polygon::orient(&merger.points[t[0]], &merger.points[t[1]], &merger.points[t[2]]);
                        if a > tol * tol {
                            triangles.push(t);
                        }
                    }
                }
            }
        }
    }
    Triangulation { points: merger.points, triangles }
}

fn grid_for_step(poly: &[Point], s: f64) -> (usize, usize) {
    let (lo, hi) = polygon::bounding_box(poly);
    let nx = ((hi.x - lo.x) / s).ceil().max(1.0) as usize;
    let ny = ((hi.y - lo.y) / s).ceil().max(1.0) as usize;
    (nx, ny)
}

/// Triangulates a convex CCW polygon. In area mode every triangle has area at
/// most the target.
pub fn triangulate_polygon(poly: &[Point], target: MeshTarget) -> Result<Triangulation> {
    let area = polygon::signed_area(poly);
    if !(area > 0.0) || !polygon::is_convex(poly) {
        return Err(Error::Network("fracture polygon must be convex and counter-clockwise".into()));
    }
    let (lo, hi) = polygon::bounding_box(poly);
    let bbox_area = (hi.x - lo.x) * (hi.y - lo.y);
    match target {
        MeshTarget::Area(a) => {
            if !(a > 0.0 && a.is_finite()) {
                return Err(Error::Config(format!("target area must be positive, got {a}")));
            }
            let (nx, ny) = grid_for_step(poly, (2.0 * a).sqrt());
            if 2 * nx.saturating_mul(ny) > MAX_TRIANGLES {
                return Err(Error::Config(format!("target area {a} needs too many triangles")));
            }
            Ok(grid_triangulation(poly, nx, ny))
        }
        MeshTarget::Cells(n) => {
            if n < 2 || n > MAX_TRIANGLES {
                return Err(Error::Config(format!("triangle count {n} out of range")));
            }
            // refine the step until the clipped count is close to the target
            let mut s = (2.0 * area / n as f64).sqrt();
            let mut best: Option<Triangulation> = None;
            for _ in 0..30 {
                let (nx, ny) = grid_for_step(poly, s);
                let t = grid_triangulation(poly, nx, ny);
                let err = |t: &Triangulation| (t.triangles.len() as f64 - n as f64).abs();
                if best.as_ref().map_or(true, |b| err(&t) < err(b)) {
                    best = Some(t.clone());
                }
                if err(&t) <= 0.05 * n as f64 {
                    break;
                }
                s *= (t.triangles.len() as f64 / n as f64).sqrt().clamp(0.8, 1.25);
            }
            let best = best.expect("at least one attempt");
            if (best.triangles.len() as f64 - n as f64).abs() > 0.2 * n as f64 {
                return Err(Error::Config(format!(
                    "cannot reach {n} triangles (closest {}) on a polygon of area {area} (bounding box {bbox_area})",
                    best.triangles.len()
                )));
            }
            Ok(best)
        }
    }
}
