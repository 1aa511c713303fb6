//! Boolean union of edge-connected cell sets and removal of aligned hanging nodes.

use std::collections::{HashMap, HashSet, VecDeque};

use super::polygon::{self, is_straight_turn};
use super::{edge_key, PolygonalMesh};
use crate::error::{Error, Result};

/// Returns true when `cells` form one component of the adjacency graph.
pub fn is_edge_connected(mesh: &PolygonalMesh, cells: &[usize]) -> bool {
    if cells.len() <= 1 {
        return true;
    }
    let set: HashSet<usize> = cells.iter().copied().collect();
    let mut seen = HashSet::with_capacity(set.len());
    let mut queue = VecDeque::from([cells[0]]);
    seen.insert(cells[0]);
    while let Some(c) = queue.pop_front() {
        for &q in &mesh.adjacency[c] {
            if set.contains(&q) && seen.insert(q) {
                queue.push_back(q);
            }
        }
    }
    seen.len() == set.len()
}

/// Boundary loop (CCW vertex ids) of the union of `cells`.
///
/// Shared unconstrained edges are dissolved and the remaining directed edges
/// are traced. Every original vertex on the outer boundary is kept.
pub fn merge_cells(mesh: &PolygonalMesh, cells: &[usize]) -> Result<Vec<usize>> {
    match cells {
        [] => return Err(Error::InvalidMerge("empty cell set")),
        [c] => return Ok(mesh.cells[*c].boundary.clone()),
        _ => {}
    }
    if !is_edge_connected(mesh, cells) {
        return Err(Error::DisconnectedMerge);
    }
    let set: HashSet<usize> = cells.iter().copied().collect();
    let mut directed: Vec<(usize, usize)> = Vec::new();
    for &c in cells {
        let cell = &mesh.cells[c];
        let n = cell.boundary.len();
        for i in 0..n {
            let edge = &mesh.edges[cell.edges[i]];
            let interior = edge.cells.len() == 2 && edge.cells.iter().all(|q| set.contains(q));
            if interior {
                if edge.constrained {
                    return Err(Error::InvalidMerge("constrained edge inside the union"));
                }
                continue;
            }
            directed.push((cell.boundary[i], cell.boundary[(i + 1) % n]));
        }
    }

    let mut next: HashMap<usize, usize> = HashMap::with_capacity(directed.len());
    for &(a, b) in &directed {
        if next.insert(a, b).is_some() {
            return Err(Error::InvalidMerge("union boundary touches itself at a vertex"));
        }
    }
    let start = directed.iter().map(|&(a, _)| a).min().expect("nonempty boundary");
    let mut loop_ = vec![start];
    let mut cur = next[&start];
    while cur != start {
        loop_.push(cur);
        if loop_.len() > directed.len() {
            return Err(Error::InvalidMerge("boundary does not close"));
        }
        cur = *next.get(&cur).ok_or(Error::InvalidMerge("boundary does not close"))?;
    }
    if loop_.len() != directed.len() {
        return Err(Error::InvalidMerge("union encloses a hole"));
    }

    let pts: Vec<_> = loop_.iter().map(|&v| mesh.position(v)).collect();
    if polygon::signed_area(&pts) <= 0.0 {
        return Err(Error::InvalidMerge("union is not counter-clockwise"));
    }
    polygon::check_simple(&pts).map_err(Error::InvalidMerge)?;

    let on_boundary: HashSet<usize> = loop_.iter().copied().collect();
    let swallowed = cells
        .iter()
        .flat_map(|&c| mesh.cells[c].boundary.iter())
        .any(|&v| mesh.vertices[v].constrained && !on_boundary.contains(&v));
    if swallowed {
        return Err(Error::InvalidMerge("constrained vertex would become interior"));
    }
    Ok(loop_)
}

/// Removes every vertex that is unconstrained, has exactly two incident edges
/// and continues a straight line in the cells using it. Idempotent.
pub fn simplify_aligned_edges(mesh: &PolygonalMesh, tol: f64) -> PolygonalMesh {
    let degree = mesh.vertex_degrees();
    let mut removable = vec![false; mesh.num_vertices()];
    for cell in &mesh.cells {
        let b = &cell.boundary;
        let n = b.len();
        for i in 0..n {
            let v = b[i];
            if mesh.vertices[v].constrained || degree[v] != 2 {
                continue;
            }
            let (p, q) = (b[(i + n - 1) % n], b[(i + 1) % n]);
            let constrained_side = [edge_key(p, v), edge_key(v, q)]
                .iter()
                .any(|&(a, c)| mesh.edge_between(a, c).is_some_and(|e| mesh.edges[e].constrained));
            if !constrained_side && is_straight_turn(&mesh.position(p), &mesh.position(v), &mesh.position(q), tol) {
                removable[v] = true;
            }
        }
    }
    if !removable.iter().any(|&r| r) {
        return mesh.clone();
    }
    let loops: Vec<Vec<usize>> = mesh
        .cells
        .iter()
        .map(|c| c.boundary.iter().copied().filter(|&v| !removable[v]).collect())
        .collect();
    mesh.rebuild(loops).expect("removing straight vertices keeps cells valid").compacted()
}

/// Replaces each group of cells by its union. Groups whose union is invalid
/// are kept as their original cells; their indices are returned alongside.
pub fn merge_groups(mesh: &PolygonalMesh, groups: &[Vec<usize>]) -> Result<(PolygonalMesh, Vec<usize>)> {
    let mut loops = Vec::with_capacity(groups.len());
    let mut failed = Vec::new();
    for (gi, g) in groups.iter().enumerate() {
        match merge_cells(mesh, g) {
            Ok(l) => loops.push(l),
            Err(e) => {
                log::warn!("merge of {} cells skipped: {e}", g.len());
                failed.push(gi);
                loops.extend(g.iter().map(|&c| mesh.cells[c].boundary.clone()));
            }
        }
    }
    Ok((mesh.rebuild(loops)?.compacted(), failed))
}
