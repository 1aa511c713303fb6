//! Polygonal meshes with constraint markers and cell adjacency.

pub mod io;
pub mod merge;
pub mod polygon;

use std::collections::HashMap;

pub use io::{format_mesh, parse_mesh, read_mesh, write_mesh};
pub use merge::{merge_cells, simplify_aligned_edges};
pub use polygon::Point;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vertex {
    pub position: Point,
    pub constrained: bool,
}

impl Vertex {
    pub fn new(x: f64, y: f64) -> Self {
        Vertex { position: Point::new(x, y), constrained: false }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    /// Endpoints with `endpoints.0 < endpoints.1`.
    pub endpoints: (usize, usize),
    pub constrained: bool,
    /// One or two incident cells.
    pub cells: Vec<usize>,
}

impl Edge {
    pub fn is_boundary(&self) -> bool {
        self.cells.len() == 1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    /// Counter-clockwise vertex loop.
    pub boundary: Vec<usize>,
    /// `edges[i]` joins `boundary[i]` and `boundary[i + 1]`.
    pub edges: Vec<usize>,
    pub area: f64,
    pub centroid: Point,
    pub diameter: f64,
}

impl Cell {
    pub fn num_vertices(&self) -> usize {
        self.boundary.len()
    }
}

#[derive(Debug, Clone)]
pub struct PolygonalMesh {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
    pub cells: Vec<Cell>,
    /// Sorted neighbor lists; cells sharing only constrained edges are not neighbors.
    pub adjacency: Vec<Vec<usize>>,
    /// Maximum cell diameter.
    pub h: f64,
    edge_index: HashMap<(usize, usize), usize>,
    vertex_cells: Vec<Vec<usize>>,
}

#[inline]
pub(crate) fn edge_key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Area, centroid and diameter of a vertex loop.
pub fn cell_geometry(pts: &[Point]) -> Option<(f64, Point, f64)> {
    let area = polygon::signed_area(pts);
    if area.abs() <= 0.0 || !area.is_finite() {
        return None;
    }
    let c = polygon::centroid(pts)?;
    Some((area, c, polygon::diameter(pts)))
}

/// Builds a mesh from raw vertices and cell loops. Clockwise loops are
/// reversed; constrained edges also flag their endpoints as constrained.
pub fn build_mesh(
    mut vertices: Vec<Vertex>,
    cells: Vec<Vec<usize>>,
    constrained_edges: &[(usize, usize)],
) -> Result<PolygonalMesh> {
    let nv = vertices.len();
    for (i, v) in vertices.iter().enumerate() {
        if !(v.position.x.is_finite() && v.position.y.is_finite()) {
            return Err(Error::Config(format!("vertex {i} has non-finite coordinates")));
        }
    }
    let mut out_cells = Vec::with_capacity(cells.len());
    for (ci, mut loop_) in cells.into_iter().enumerate() {
        if loop_.len() < 3 {
            return Err(Error::cell(ci, "fewer than three vertices"));
        }
        if let Some(&index) = loop_.iter().find(|&&v| v >= nv) {
            return Err(Error::DanglingIndex { cell: ci, index, count: nv });
        }
        let n = loop_.len();
        if (0..n).any(|i| loop_[i] == loop_[(i + 1) % n]) {
            return Err(Error::cell(ci, "repeated consecutive vertex"));
        }
        let mut pts: Vec<Point> = loop_.iter().map(|&v| vertices[v].position).collect();
        let Some((mut area, centroid, diameter)) = cell_geometry(&pts) else {
            return Err(Error::DegenerateCell(ci));
        };
        if area < 0.0 {
            loop_.reverse();
            pts.reverse();
            area = -area;
        }
        polygon::check_simple(&pts).map_err(|r| Error::cell(ci, r))?;
        out_cells.push(Cell { boundary: loop_, edges: Vec::new(), area, centroid, diameter });
    }

    let mut edges: Vec<Edge> = Vec::new();
    let mut edge_index: HashMap<(usize, usize), usize> = HashMap::new();
    // direction in which each edge was first traversed, to detect overlapping cells
    let mut first_dir: Vec<(usize, usize)> = Vec::new();
    for (ci, cell) in out_cells.iter_mut().enumerate() {
        let n = cell.boundary.len();
        let mut ids = Vec::with_capacity(n);
        for i in 0..n {
            let (a, b) = (cell.boundary[i], cell.boundary[(i + 1) % n]);
            let key = edge_key(a, b);
            let id = *edge_index.entry(key).or_insert_with(|| {
                edges.push(Edge { endpoints: key, constrained: false, cells: Vec::new() });
                first_dir.push((a, b));
                edges.len() - 1
            });
            let e = &mut edges[id];
            if !e.cells.is_empty() {
                if e.cells.len() >= 2 {
                    return Err(Error::NonManifoldEdge(key.0, key.1));
                }
                if e.cells[0] == ci {
                    return Err(Error::cell(ci, "edge used twice by the same cell"));
                }
                if first_dir[id] == (a, b) {
                    return Err(Error::cell(ci, format!("overlaps cell {} along edge ({a}, {b})", e.cells[0])));
                }
            }
            e.cells.push(ci);
            ids.push(id);
        }
        cell.edges = ids;
    }

    for &(a, b) in constrained_edges {
        let Some(&id) = edge_index.get(&edge_key(a, b)) else {
            return Err(Error::UnknownConstrainedEdge(a, b));
        };
        edges[id].constrained = true;
        vertices[a].constrained = true;
        vertices[b].constrained = true;
    }

    Ok(finish(vertices, edges, out_cells, edge_index))
}

fn finish(
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    cells: Vec<Cell>,
    edge_index: HashMap<(usize, usize), usize>,
) -> PolygonalMesh {
    let mut adjacency = vec![Vec::new(); cells.len()];
    for e in &edges {
        if e.cells.len() == 2 && !e.constrained {
            let (p, q) = (e.cells[0], e.cells[1]);
            adjacency[p].push(q);
            adjacency[q].push(p);
        }
    }
    for nb in &mut adjacency {
        nb.sort_unstable();
        nb.dedup();
    }
    let mut vertex_cells = vec![Vec::new(); vertices.len()];
    for (ci, c) in cells.iter().enumerate() {
        for &v in &c.boundary {
            vertex_cells[v].push(ci);
        }
    }
    let h = cells.iter().map(|c| c.diameter).fold(0.0, f64::max);
    PolygonalMesh { vertices, edges, cells, adjacency, h, edge_index, vertex_cells }
}

impl PolygonalMesh {
    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn position(&self, v: usize) -> Point {
        self.vertices[v].position
    }

    pub fn cell_points(&self, c: usize) -> Vec<Point> {
        self.cells[c].boundary.iter().map(|&v| self.vertices[v].position).collect()
    }

    pub fn edge_between(&self, a: usize, b: usize) -> Option<usize> {
        self.edge_index.get(&edge_key(a, b)).copied()
    }

    /// Cells whose boundary contains vertex `v`.
    pub fn vertex_cells(&self, v: usize) -> &[usize] {
        &self.vertex_cells[v]
    }

    pub fn are_adjacent(&self, p: usize, q: usize) -> bool {
        self.adjacency[p].binary_search(&q).is_ok()
    }

    /// Number of adjacency-graph edges.
    pub fn num_adjacencies(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Unordered adjacent pairs `(p, q)` with `p < q`, in ascending order.
    pub fn adjacent_pairs(&self) -> Vec<(usize, usize)> {
        let mut pairs = Vec::with_capacity(self.num_adjacencies());
        for (p, nb) in self.adjacency.iter().enumerate() {
            pairs.extend(nb.iter().filter(|&&q| q > p).map(|&q| (p, q)));
        }
        pairs
    }

    pub fn total_area(&self) -> f64 {
        self.cells.iter().map(|c| c.area).sum()
    }

    pub fn constrained_edges(&self) -> Vec<(usize, usize)> {
        self.edges.iter().filter(|e| e.constrained).map(|e| e.endpoints).collect()
    }

    /// Number of distinct edges incident to each vertex.
    pub fn vertex_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.vertices.len()];
        for e in &self.edges {
            deg[e.endpoints.0] += 1;
            deg[e.endpoints.1] += 1;
        }
        deg
    }

    /// Cell boundaries as index loops.
    pub fn cell_loops(&self) -> Vec<Vec<usize>> {
        self.cells.iter().map(|c| c.boundary.clone()).collect()
    }

    /// Rebuilds the mesh from new cell loops over the same vertex array,
    /// keeping vertex constraint flags and every constrained edge that still exists.
    pub fn rebuild(&self, loops: Vec<Vec<usize>>) -> Result<PolygonalMesh> {
        let constrained = self.constrained_edges();
        build_mesh(self.vertices.clone(), loops, &constrained)
    }

    /// Drops vertices not referenced by any cell and renumbers the rest.
    pub fn compacted(&self) -> PolygonalMesh {
        let mut used = vec![false; self.vertices.len()];
        for c in &self.cells {
            for &v in &c.boundary {
                used[v] = true;
            }
        }
        if used.iter().all(|&u| u) {
            return self.clone();
        }
        let mut map = vec![usize::MAX; self.vertices.len()];
        let mut vertices = Vec::new();
        for (i, v) in self.vertices.iter().enumerate() {
            if used[i] {
                map[i] = vertices.len();
                vertices.push(*v);
            }
        }
        let loops = self.cells.iter().map(|c| c.boundary.iter().map(|&v| map[v]).collect()).collect();
        let constrained: Vec<_> = self
            .constrained_edges()
            .into_iter()
            .map(|(a, b)| (map[a], map[b]))
            .collect();
        build_mesh(vertices, loops, &constrained).expect("renumbering preserves validity")
    }

    /// Bounding box `(min, max)` of all vertices.
    pub fn bounding_box(&self) -> (Point, Point) {
        let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for v in &self.vertices {
            lo.x = lo.x.min(v.position.x);
            lo.y = lo.y.min(v.position.y);
            hi.x = hi.x.max(v.position.x);
            hi.y = hi.y.max(v.position.y);
        }
        (lo, hi)
    }
}

/// Structured `nx × ny` grid of axis-aligned rectangles over `[x0,x1]×[y0,y1]`.
pub fn rect_grid(nx: usize, ny: usize, x0: f64, x1: f64, y0: f64, y1: f64) -> PolygonalMesh {
    let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            let x = x0 + (x1 - x0) * i as f64 / nx as f64;
            let y = y0 + (y1 - y0) * j as f64 / ny as f64;
            vertices.push(Vertex::new(x, y));
        }
    }
    let id = |i: usize, j: usize| j * (nx + 1) + i;
    let mut cells = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            cells.push(vec![id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    build_mesh(vertices, cells, &[]).expect("grid is valid")
}

/// Structured grid of rectangles each split into two triangles along the
/// lower-left to upper-right diagonal.
pub fn tri_grid(nx: usize, ny: usize, x0: f64, x1: f64, y0: f64, y1: f64) -> PolygonalMesh {
    let quads = rect_grid(nx, ny, x0, x1, y0, y1);
    let mut cells = Vec::with_capacity(2 * nx * ny);
    for c in &quads.cells {
        let b = &c.boundary;
        cells.push(vec![b[0], b[1], b[2]]);
        cells.push(vec![b[0], b[2], b[3]]);
    }
    build_mesh(quads.vertices.clone(), cells, &[]).expect("grid is valid")
}
