//! Makes trace node partitions identical across each fracture pair and
//! numbers vertices and edges globally.

use std::collections::HashMap;

use petgraph::unionfind::UnionFind;

use super::network::{FractureNetwork, Point3d};
use crate::error::{Error, Result};
use crate::mesh::{build_mesh, edge_key, PolygonalMesh, Vertex};

/// Stitched fracture meshes with global vertex and edge ids.
#[derive(Debug, Clone)]
pub struct StitchedMeshes {
    pub meshes: Vec<PolygonalMesh>,
    /// `vertex_global[f][v]` for local vertex `v` of fracture `f`.
    pub vertex_global: Vec<Vec<usize>>,
    pub edge_global: Vec<Vec<usize>>,
    pub num_vertices: usize,
    pub num_edges: usize,
    /// Sorted node parameters of each trace as seen from its two fractures.
    pub trace_nodes: Vec<[Vec<f64>; 2]>,
    /// Vertices inserted into each fracture mesh.
    pub inserted: Vec<usize>,
}

/// Local vertices of `mesh` on trace `m`, sorted by trace parameter.
fn trace_vertices(net: &FractureNetwork, f: usize, mesh: &PolygonalMesh, m: usize, tol: f64) -> Vec<(f64, usize)> {
    let t = &net.traces[m];
    let frame = &net.fractures[f].frame;
    let mut out: Vec<(f64, usize)> = (0..mesh.num_vertices())
        .filter_map(|v| {
            let p = frame.to_global(&mesh.position(v));
            (t.distance(&p) <= tol).then(|| (t.parameter(&p), v))
        })
        .collect();
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

/// Inserts the trace nodes of the partner fracture as hanging nodes.
fn insert_nodes(
    net: &FractureNetwork,
    f: usize,
    mesh: &PolygonalMesh,
    wanted: &[(usize, Vec<f64>)],
    tol: f64,
) -> Result<(PolygonalMesh, usize)> {
    let frame = &net.fractures[f].frame;
    let mut vertices = mesh.vertices.clone();
    // edge key -> new vertices ordered from the lower to the higher endpoint id
    let mut splits: HashMap<(usize, usize), Vec<(f64, usize)>> = HashMap::new();
    let mut inserted = 0;
    for (m, params) in wanted {
        let trace = &net.traces[*m];
        let len = trace.length();
        let existing = trace_vertices(net, f, mesh, *m, tol);
        for &t in params {
            if existing.iter().any(|&(s, _)| ((s - t) * len).abs() <= tol) {
                continue;
            }
            let p3 = trace.point(t);
            let p = frame.to_local(&p3);
            // the constrained edge of this trace that contains the parameter
            let host = mesh.edges.iter().position(|e| {
                if !e.constrained {
                    return false;
                }
                let (a, b) = e.endpoints;
                let pa = frame.to_global(&mesh.position(a));
                let pb = frame.to_global(&mesh.position(b));
                if trace.distance(&pa) > tol || trace.distance(&pb) > tol {
                    return false;
                }
                let (ta, tb) = (trace.parameter(&pa), trace.parameter(&pb));
                ta.min(tb) * len + tol < t * len && t * len < ta.max(tb) * len - tol
            });
            let Some(e) = host else {
                return Err(Error::NodeMatching {
                    trace: *m,
                    message: format!("fracture {f} has no trace edge containing parameter {t}"),
                });
            };
            let (a, _) = mesh.edges[e].endpoints;
            let da = (mesh.position(a) - p).norm();
            vertices.push(Vertex { position: p, constrained: true });
            splits.entry(mesh.edges[e].endpoints).or_default().push((da, vertices.len() - 1));
            inserted += 1;
        }
    }
    if inserted == 0 {
        return Ok((mesh.clone(), 0));
    }
    for v in splits.values_mut() {
        v.sort_by(|a, b| a.0.total_cmp(&b.0));
    }
    let chain = |a: usize, b: usize| -> Option<Vec<usize>> {
        let key = edge_key(a, b);
        splits.get(&key).map(|s| {
            let mut ids: Vec<usize> = s.iter().map(|x| x.1).collect();
            if a > b {
                ids.reverse();
            }
            ids
        })
    };
    let loops: Vec<Vec<usize>> = mesh
        .cells
        .iter()
        .map(|c| {
            let n = c.boundary.len();
            let mut out = Vec::with_capacity(n + 2);
            for i in 0..n {
                let (a, b) = (c.boundary[i], c.boundary[(i + 1) % n]);
                out.push(a);
                if let Some(ids) = chain(a, b) {
                    out.extend(ids);
                }
            }
            out
        })
        .collect();
    let mut constrained = Vec::new();
    for (a, b) in mesh.constrained_edges() {
        match chain(a, b) {
            Some(ids) => {
                let mut prev = a;
                for &w in &ids {
                    constrained.push((prev, w));
                    prev = w;
                }
                constrained.push((prev, b));
            }
            None => constrained.push((a, b)),
        }
    }
    Ok((build_mesh(vertices, loops, &constrained)?, inserted))
}

/// Unifies trace nodes across fracture pairs and builds global numbering.
pub fn stitch(net: &FractureNetwork, meshes: Vec<PolygonalMesh>) -> Result<StitchedMeshes> {
    let tol = net.tolerance();
    let nf = net.fractures.len();
    // union of node parameters per trace
    let mut wanted: Vec<Vec<(usize, Vec<f64>)>> = vec![Vec::new(); nf];
    for (m, t) in net.traces.iter().enumerate() {
        let len = t.length();
        let mut all: Vec<f64> = t
            .fractures
            .iter()
            .flat_map(|&f| trace_vertices(net, f, &meshes[f], m, tol).into_iter().map(|x| x.0))
            .collect();
        all.sort_by(f64::total_cmp);
        all.dedup_by(|a, b| ((*a - *b) * len).abs() <= tol);
        for &f in &t.fractures {
            wanted[f].push((m, all.clone()));
        }
    }
    let mut out_meshes = Vec::with_capacity(nf);
    let mut inserted = Vec::with_capacity(nf);
    for (f, mesh) in meshes.iter().enumerate() {
        let (m, n) = insert_nodes(net, f, mesh, &wanted[f], tol)?;
        out_meshes.push(m);
        inserted.push(n);
    }

    let offsets: Vec<usize> = out_meshes
        .iter()
        .scan(0, |acc, m| {
            let o = *acc;
            *acc += m.num_vertices();
            Some(o)
        })
        .collect();
    let total: usize = out_meshes.iter().map(|m| m.num_vertices()).sum();
    let mut uf = UnionFind::<usize>::new(total);
    let mut trace_nodes = Vec::with_capacity(net.traces.len());
    for (m, t) in net.traces.iter().enumerate() {
        let len = t.length();
        let [fa, fb] = t.fractures;
        let na = trace_vertices(net, fa, &out_meshes[fa], m, tol);
        let nb = trace_vertices(net, fb, &out_meshes[fb], m, tol);
        for side in [&na, &nb] {
            if side.windows(2).any(|w| ((w[1].0 - w[0].0) * len).abs() <= tol) {
                return Err(Error::NodeMatching { trace: m, message: "two distinct nodes closer than the tolerance".into() });
            }
        }
        if na.len() != nb.len() || na.iter().zip(&nb).any(|(a, b)| ((a.0 - b.0) * len).abs() > tol) {
            return Err(Error::NodeMatching {
                trace: m,
                message: format!("node partitions differ ({} vs {} nodes)", na.len(), nb.len()),
            });
        }
        for (a, b) in na.iter().zip(&nb) {
            uf.union(offsets[fa] + a.1, offsets[fb] + b.1);
        }
        trace_nodes.push([na.iter().map(|x| x.0).collect(), nb.iter().map(|x| x.0).collect()]);
    }

    let mut root_id: HashMap<usize, usize> = HashMap::new();
    let mut vertex_global = Vec::with_capacity(nf);
    for (f, m) in out_meshes.iter().enumerate() {
        let ids: Vec<usize> = (0..m.num_vertices())
            .map(|v| {
                let r = uf.find(offsets[f] + v);
                let next = root_id.len();
                *root_id.entry(r).or_insert(next)
            })
            .collect();
        vertex_global.push(ids);
    }
    let num_vertices = root_id.len();

    let mut edge_id: HashMap<(usize, usize), usize> = HashMap::new();
    let mut edge_global = Vec::with_capacity(nf);
    for (f, m) in out_meshes.iter().enumerate() {
        let ids: Vec<usize> = m
            .edges
            .iter()
            .map(|e| {
                let key = edge_key(vertex_global[f][e.endpoints.0], vertex_global[f][e.endpoints.1]);
                let next = edge_id.len();
                *edge_id.entry(key).or_insert(next)
            })
            .collect();
        edge_global.push(ids);
    }

    // matched vertices must coincide in space
    let mut pos: Vec<Option<Point3d>> = vec![None; num_vertices];
    for (f, m) in out_meshes.iter().enumerate() {
        for v in 0..m.num_vertices() {
            let p = net.fractures[f].frame.to_global(&m.position(v));
            let g = vertex_global[f][v];
            match pos[g] {
                None => pos[g] = Some(p),
                Some(q) if (q - p).norm() > tol => {
                    return Err(Error::NodeMatching { trace: usize::MAX, message: format!("global vertex {g} splits in space") })
                }
                _ => {}
            }
        }
    }

    Ok(StitchedMeshes {
        meshes: out_meshes,
        vertex_global,
        edge_global,
        num_vertices,
        num_edges: edge_id.len(),
        trace_nodes,
        inserted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dfn::network::{BoundaryRegion, BoundaryValue, DirichletCondition, Fracture};
    use crate::mesh::polygon::signed_area;
    use nalgebra::Matrix2;

    fn square(plane: fn(f64, f64) -> Point3d) -> Fracture {
        let v = vec![plane(-1., -1.), plane(1., -1.), plane(1., 1.), plane(-1., 1.)];
        Fracture::new(v, Matrix2::identity()).unwrap()
    }

    fn xy(a: f64, b: f64) -> Point3d {
        Point3d::new(a, b, 0.0)
    }

    fn xz(a: f64, b: f64) -> Point3d {
        Point3d::new(a, 0.0, b)
    }

    fn pair() -> FractureNetwork {
        let bc = DirichletCondition { region: BoundaryRegion::All, value: BoundaryValue::Constant(0.0) };
        FractureNetwork::new(vec![square(xy), square(xz)], vec![bc]).unwrap()
    }

    /// 2x2 quad mesh of `[-1,1]^2` with the middle column at `mid`, split along the second coordinate 0.
    fn quads(net: &FractureNetwork, f: usize, plane: fn(f64, f64) -> Point3d, mid: f64) -> PolygonalMesh {
        let xs = [-1.0, mid, 1.0];
        let ys = [-1.0, 0.0, 1.0];
        let frame = &net.fractures[f].frame;
        let vertices: Vec<Vertex> = ys
            .iter()
            .flat_map(|&y| xs.iter().map(move |&x| (x, y)))
            .map(|(x, y)| Vertex { position: frame.to_local(&plane(x, y)), constrained: false })
            .collect();
        let id = |i: usize, j: usize| j * 3 + i;
        let mut loops = Vec::new();
        for j in 0..2 {
            for i in 0..2 {
                let mut l = vec![id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)];
                let pts: Vec<_> = l.iter().map(|&v| vertices[v].position).collect();
                if signed_area(&pts) < 0.0 {
                    l.reverse();
                }
                loops.push(l);
            }
        }
        build_mesh(vertices, loops, &[(id(0, 1), id(1, 1)), (id(1, 1), id(2, 1))]).unwrap()
    }

    #[test]
    fn partitions_become_the_union() {
        let net = pair();
        assert_eq!(net.traces.len(), 1);
        let meshes = vec![quads(&net, 0, xy, 0.0), quads(&net, 1, xz, -0.4)];
        let st = stitch(&net, meshes).unwrap();
        let [a, b] = &st.trace_nodes[0];
        assert_eq!(a.len(), 4);
        let mut expect = vec![0.0, 0.3, 0.5, 1.0];
        if (a[1] - 0.3).abs() > 1e-12 {
            expect = vec![0.0, 0.5, 0.7, 1.0];
        }
        for i in 0..4 {
            assert!((a[i] - expect[i]).abs() < 1e-12 && (b[i] - expect[i]).abs() < 1e-12, "{a:?} {b:?}");
        }
        assert_eq!(st.inserted, vec![1, 1]);
        for m in &st.meshes {
            assert_eq!(m.num_cells(), 4);
            assert!((m.total_area() - 4.0).abs() < 1e-12);
            assert_eq!(m.constrained_edges().len(), 3);
        }
        assert_eq!(st.num_vertices, 10 + 10 - 4);
        // the three trace segments are shared
        assert_eq!(st.num_edges, 2 * 13 - 3);
    }

    #[test]
    fn matching_partitions_are_untouched() {
        let net = pair();
        let meshes = vec![quads(&net, 0, xy, 0.0), quads(&net, 1, xz, 0.0)];
        let before: Vec<usize> = meshes.iter().map(|m| m.num_vertices()).collect();
        let st = stitch(&net, meshes).unwrap();
        assert_eq!(st.inserted, vec![0, 0]);
        assert_eq!(st.meshes.iter().map(|m| m.num_vertices()).collect::<Vec<_>>(), before);
        assert_eq!(st.num_vertices, 18 - 3);
        // a single fracture keeps its local numbering
        assert_eq!(st.vertex_global[0], (0..9).collect::<Vec<_>>());
    }
}
