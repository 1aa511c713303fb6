//! Element quality indicators.
//!
//! Each indicator lies in `[0, 1]` and equals 1 on "ideal" shapes:
//! `rho1` kernel fraction, `rho2` edge/area-to-diameter ratio, `rho3`
//! triangle-likeness, `rho4` uniformity of collinear edge chains.

use rayon::prelude::*;
use serde::Serialize;

use crate::mesh::polygon::{self, Point, COLLINEAR_TOL};
use crate::mesh::PolygonalMesh;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QualityScores {
    pub rho1: f64,
    pub rho2: f64,
    pub rho3: f64,
    pub rho4: f64,
    pub rho: f64,
}

pub fn rho1(pts: &[Point]) -> f64 {
    if polygon::is_convex(pts) {
        return 1.0;
    }
    let area = polygon::signed_area(pts);
    (polygon::kernel_area(pts) / area).clamp(0.0, 1.0)
}

pub fn rho2(pts: &[Point]) -> f64 {
    let area = polygon::signed_area(pts);
    let min_edge = polygon::edge_lengths(pts).into_iter().fold(f64::INFINITY, f64::min);
    (area.sqrt().min(min_edge) / polygon::diameter(pts)).clamp(0.0, 1.0)
}

pub fn rho3(pts: &[Point]) -> f64 {
    3.0 / pts.len() as f64
}

pub fn rho4(pts: &[Point]) -> f64 {
    let lengths = polygon::edge_lengths(pts);
    polygon::collinear_runs(pts, COLLINEAR_TOL)
        .iter()
        .map(|run| {
            let (lo, hi) = run
                .iter()
                .fold((f64::INFINITY, 0.0f64), |(lo, hi), &e| (lo.min(lengths[e]), hi.max(lengths[e])));
            lo / hi
        })
        .fold(1.0, f64::min)
}

pub fn combine(rho1: f64, rho2: f64, rho3: f64, rho4: f64) -> f64 {
    ((rho1 * rho2 + rho1 * rho3 + rho1 * rho4) / 3.0).sqrt()
}

/// All indicators of a CCW simple polygon.
pub fn scores(pts: &[Point]) -> QualityScores {
    let (r1, r2, r3, r4) = (rho1(pts), rho2(pts), rho3(pts), rho4(pts));
    QualityScores { rho1: r1, rho2: r2, rho3: r3, rho4: r4, rho: combine(r1, r2, r3, r4) }
}

pub fn cell_scores(mesh: &PolygonalMesh, cell: usize) -> QualityScores {
    scores(&mesh.cell_points(cell))
}

#[derive(Debug, Clone, Serialize)]
pub struct QualityReport {
    pub cells: Vec<QualityScores>,
    pub min: f64,
    pub mean: f64,
    /// Counts of `rho` in ten equal bins over `[0, 1]`.
    pub histogram: [usize; 10],
}

pub fn mesh_quality_report(mesh: &PolygonalMesh) -> QualityReport {
    let cells: Vec<QualityScores> = (0..mesh.num_cells()).into_par_iter().map(|c| cell_scores(mesh, c)).collect();
    let mut histogram = [0usize; 10];
    for s in &cells {
        histogram[((s.rho * 10.0) as usize).min(9)] += 1;
    }
    let min = cells.iter().map(|s| s.rho).fold(f64::INFINITY, f64::min);
    let mean = cells.iter().map(|s| s.rho).sum::<f64>() / cells.len().max(1) as f64;
    QualityReport { cells, min, mean, histogram }
}
