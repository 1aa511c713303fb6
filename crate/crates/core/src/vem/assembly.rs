//! Global DOF numbering and assembly of the VEM stiffness and load.
//!
//! Global numbering: vertex `v` owns DOF `v`; edge `e` owns the `k - 1` DOFs
//! starting at `NV + e (k - 1)`, stored from its lower to its higher global
//! vertex id; cell moments follow all vertex and edge DOFs.

use nalgebra::Matrix2;
use rayon::prelude::*;

use super::element::{num_local_dofs, VemElement};
use super::monomials::dim;
use super::sparse::CsrMatrix;
use crate::error::Result;
use crate::mesh::{Point, PolygonalMesh};

/// Local-to-global DOF map of one cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellDofs {
    pub global: Vec<usize>,
    /// Per local edge: interior DOFs are stored against the traversal direction.
    pub flips: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DofMap {
    pub k: usize,
    pub num_dofs: usize,
    pub num_vertex_dofs: usize,
    pub num_edge_dofs: usize,
    pub num_moment_dofs: usize,
    pub cells: Vec<CellDofs>,
}

/// Numbering for cells described by the global ids of their boundary
/// vertices and edges (`edges[i]` joins `vertices[i]` and `vertices[i + 1]`).
pub fn number_dofs(k: usize, num_vertices: usize, num_edges: usize, cells: &[(Vec<usize>, Vec<usize>)]) -> DofMap {
    let nm = dim(k as i32 - 2);
    let edge_base = num_vertices;
    let moment_base = num_vertices + num_edges * (k - 1);
    let mut out = Vec::with_capacity(cells.len());
    for (c, (verts, edges)) in cells.iter().enumerate() {
        let n = verts.len();
        let mut global = Vec::with_capacity(num_local_dofs(n, k));
        global.extend_from_slice(verts);
        let flips: Vec<bool> = (0..n).map(|i| verts[i] > verts[(i + 1) % n]).collect();
        for &e in edges {
            global.extend((0..k - 1).map(|j| edge_base + e * (k - 1) + j));
        }
        global.extend((0..nm).map(|b| moment_base + c * nm + b));
        out.push(CellDofs { global, flips });
    }
    DofMap {
        k,
        num_dofs: moment_base + cells.len() * nm,
        num_vertex_dofs: num_vertices,
        num_edge_dofs: num_edges * (k - 1),
        num_moment_dofs: cells.len() * nm,
        cells: out,
    }
}

pub fn mesh_dofs(mesh: &PolygonalMesh, k: usize) -> DofMap {
    let cells: Vec<_> = mesh.cells.iter().map(|c| (c.boundary.clone(), c.edges.clone())).collect();
    number_dofs(k, mesh.num_vertices(), mesh.num_edges(), &cells)
}

/// Builds the elements of all cells in parallel. `polygons[c]` is the vertex
/// loop of cell `c` in its own 2D coordinates.
pub fn build_elements(polygons: &[Vec<Point>], dofs: &DofMap) -> Result<Vec<VemElement>> {
    polygons
        .par_iter()
        .zip(dofs.cells.par_iter())
        .enumerate()
        .map(|(c, (pts, cd))| VemElement::new(pts, &cd.flips, dofs.k, c))
        .collect()
}

pub fn mesh_polygons(mesh: &PolygonalMesh) -> Vec<Vec<Point>> {
    (0..mesh.num_cells()).map(|c| mesh.cell_points(c)).collect()
}

#[derive(Debug, Clone)]
pub struct Assembled {
    pub stiffness: CsrMatrix,
    pub load: Vec<f64>,
}

/// Scatters local stiffness matrices and loads. `source(c, p)` evaluates the
/// source term of cell `c` at a point in that cell's coordinates.
pub fn assemble(
    elements: &[VemElement],
    dofs: &DofMap,
    kappa: &[Matrix2<f64>],
    source: &(dyn Fn(usize, &Point) -> f64 + Sync),
) -> Assembled {
    let locals: Vec<_> = elements
        .par_iter()
        .enumerate()
        .map(|(c, e)| (e.stiffness(&kappa[c]), e.load(&|p| source(c, p))))
        .collect();
    let mut triplets = Vec::with_capacity(locals.iter().map(|(a, _)| a.len()).sum());
    let mut load = vec![0.0; dofs.num_dofs];
    for ((a, f), cd) in locals.iter().zip(&dofs.cells) {
        for (i, &gi) in cd.global.iter().enumerate() {
            load[gi] += f[i];
            for (j, &gj) in cd.global.iter().enumerate() {
                triplets.push((gi, gj, a[(i, j)]));
            }
        }
    }
    Assembled { stiffness: CsrMatrix::from_triplets(dofs.num_dofs, &triplets), load }
}

/// Global DOFs lying on the listed `(cell, local edge)` sides together with
/// their positions in the cell's coordinates.
pub fn edge_dofs(elements: &[VemElement], dofs: &DofMap, sides: &[(usize, usize)]) -> Vec<(usize, usize, Point)> {
    let k = dofs.k;
    let mut out = Vec::new();
    for &(c, i) in sides {
        let e = &elements[c];
        let n = e.num_vertices;
        let mut local = vec![i, (i + 1) % n];
        local.extend((0..k - 1).map(|j| n + i * (k - 1) + j));
        for l in local {
            out.push((dofs.cells[c].global[l], c, e.dof_points[l]));
        }
    }
    out
}

/// Boundary sides of a single mesh as `(cell, local edge)`.
pub fn boundary_sides(mesh: &PolygonalMesh) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (c, cell) in mesh.cells.iter().enumerate() {
        for (i, &e) in cell.edges.iter().enumerate() {
            if mesh.edges[e].is_boundary() {
                out.push((c, i));
            }
        }
    }
    out
}
