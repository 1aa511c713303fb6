//! Full DFN pipeline: triangulate, cut, agglomerate and stitch each fracture,
//! then assemble and solve the coupled virtual element system.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::cut::cut_by_traces;
use super::network::FractureNetwork;
use super::stitch::{stitch, StitchedMeshes};
use super::triangulate::{triangulate_polygon, MeshTarget};
use crate::agglomerate::{agglomerate, AgglomerationConfig, ReductionStats};
use crate::error::Result;
use crate::mesh::{Point, PolygonalMesh};
use crate::vem::assembly::{build_elements, edge_dofs, number_dofs, DofMap};
use crate::vem::element::VemElement;
use crate::vem::solve::{error_norms_on, projection_discrepancy, solve_elements, Discretization, ErrorNorms, SolveOptions};
use crate::vem::sparse::ConditionEstimate;

/// Triangulated and trace-cut mesh of one fracture.
pub fn cut_fracture_mesh(net: &FractureNetwork, f: usize, target: MeshTarget) -> Result<PolygonalMesh> {
    let fr = &net.fractures[f];
    let tri = triangulate_polygon(&fr.polygon, target)?;
    let cells: Vec<Vec<usize>> = tri.triangles.iter().map(|t| t.to_vec()).collect();
    let segments: Vec<[Point; 2]> = net
        .traces_of(f)
        .into_iter()
        .map(|m| {
            let t = &net.traces[m];
            [fr.frame.to_local(&t.endpoints[0]), fr.frame.to_local(&t.endpoints[1])]
        })
        .collect();
    cut_by_traces(tri.points, cells, &segments, 1e-10 * fr.diameter())
}

#[derive(Debug, Clone)]
pub struct DfnMesh {
    /// Meshes after cutting, before agglomeration.
    pub cut: Vec<PolygonalMesh>,
    pub agglomeration: Vec<ReductionStats>,
    pub stitched: StitchedMeshes,
}

impl DfnMesh {
    pub fn num_cells(&self) -> usize {
        self.stitched.meshes.iter().map(|m| m.num_cells()).sum()
    }

    pub fn num_cut_cells(&self) -> usize {
        self.cut.iter().map(|m| m.num_cells()).sum()
    }

    /// Largest cell diameter over all fractures.
    pub fn h(&self) -> f64 {
        self.stitched.meshes.iter().map(|m| m.h).fold(0.0, f64::max)
    }

    /// `(fracture, local cell)` of every global cell.
    pub fn cell_owners(&self) -> Vec<(usize, usize)> {
        self.stitched
            .meshes
            .iter()
            .enumerate()
            .flat_map(|(f, m)| (0..m.num_cells()).map(move |c| (f, c)))
            .collect()
    }
}

/// Builds the conforming network mesh; fractures are processed in parallel.
pub fn build_dfn_mesh(net: &FractureNetwork, target: MeshTarget, config: &AgglomerationConfig) -> Result<DfnMesh> {
    let per: Vec<(PolygonalMesh, PolygonalMesh, ReductionStats)> = (0..net.fractures.len())
        .into_par_iter()
        .map(|f| {
            let cut = cut_fracture_mesh(net, f, target)?;
            let agg = agglomerate(&cut, config)?;
            Ok((cut, agg.mesh, agg.stats))
        })
        .collect::<Result<_>>()?;
    let mut cut = Vec::new();
    let mut merged = Vec::new();
    let mut stats = Vec::new();
    for (c, m, s) in per {
        cut.push(c);
        merged.push(m);
        stats.push(s);
    }
    let stitched = stitch(net, merged)?;
    Ok(DfnMesh { cut, agglomeration: stats, stitched })
}

/// Global DOF map and elements of a stitched network mesh.
pub fn network_elements(mesh: &DfnMesh, k: usize) -> Result<(DofMap, Vec<VemElement>)> {
    let st = &mesh.stitched;
    let mut cells = Vec::new();
    let mut polygons = Vec::new();
    for (f, m) in st.meshes.iter().enumerate() {
        for c in &m.cells {
            cells.push((
                c.boundary.iter().map(|&v| st.vertex_global[f][v]).collect(),
                c.edges.iter().map(|&e| st.edge_global[f][e]).collect(),
            ));
        }
        for c in 0..m.num_cells() {
            polygons.push(m.cell_points(c));
        }
    }
    let dofs = number_dofs(k, st.num_vertices, st.num_edges, &cells);
    let elements = build_elements(&polygons, &dofs)?;
    Ok((dofs, elements))
}

#[derive(Debug, Clone)]
pub struct NetworkSolution {
    pub mesh: DfnMesh,
    pub disc: Discretization,
    pub owners: Vec<(usize, usize)>,
}

/// Assembles and solves on a built network mesh.
pub fn solve_on_mesh(net: &FractureNetwork, mesh: DfnMesh, opts: &SolveOptions) -> Result<NetworkSolution> {
    let (dofs, elements) = network_elements(&mesh, opts.k)?;
    let owners = mesh.cell_owners();
    let kappa: Vec<_> = owners.iter().map(|&(f, _)| net.fractures[f].kappa).collect();

    let tol = net.tolerance();
    let mut sides = Vec::new();
    for (g, &(f, c)) in owners.iter().enumerate() {
        let m = &mesh.stitched.meshes[f];
        for (i, &e) in m.cells[c].edges.iter().enumerate() {
            if m.edges[e].is_boundary() {
                sides.push((g, i));
            }
        }
    }
    let mut dirichlet = Vec::new();
    let mut seen = vec![false; dofs.num_dofs];
    for (c, i) in sides {
        let (f, lc) = owners[c];
        let frame = &net.fractures[f].frame;
        let m = &mesh.stitched.meshes[f];
        let b = &m.cells[lc].boundary;
        let pa = frame.to_global(&m.position(b[i]));
        let pb = frame.to_global(&m.position(b[(i + 1) % b.len()]));
        let Some(bc) = net.dirichlet.iter().find(|bc| bc.covers(&pa, &pb, tol)) else { continue };
        for (gd, _, p) in edge_dofs(&elements, &dofs, &[(c, i)]) {
            if !seen[gd] {
                seen[gd] = true;
                dirichlet.push((gd, bc.value.eval(f, &frame.to_global(&p))));
            }
        }
    }

    let source = |c: usize, p: &Point| -> f64 {
        let f = owners[c].0;
        net.source.as_ref().map_or(0.0, |s| s(f, &net.fractures[f].frame.to_global(p)))
    };
    let disc = solve_elements(elements, dofs, &kappa, &source, &dirichlet, opts)?;
    Ok(NetworkSolution { mesh, disc, owners })
}

impl NetworkSolution {
    /// Errors against the network's exact solution, if it has one.
    pub fn errors(&self, net: &FractureNetwork) -> Option<ErrorNorms> {
        let exact = net.exact.as_ref()?;
        let owners = &self.owners;
        let u = |c: usize, p: &Point| {
            let f = owners[c].0;
            (exact.u)(f, &net.fractures[f].frame.to_global(p))
        };
        let g = |c: usize, p: &Point| {
            let f = owners[c].0;
            let fr = &net.fractures[f];
            fr.frame.project(&(exact.grad)(f, &fr.frame.to_global(p)))
        };
        let cells: Vec<usize> = (0..owners.len()).collect();
        Some(error_norms_on(&self.disc, &cells, &u, &g))
    }

    /// `(‖Π⁰_k u_h‖, ‖Π⁰_{k-1}∇u_h‖)` over the whole network.
    pub fn solution_norms(&self) -> (f64, f64) {
        let zero = |_: usize, _: &Point| 0.0;
        let zg = |_: usize, _: &Point| [0.0, 0.0];
        let cells: Vec<usize> = (0..self.owners.len()).collect();
        let e = error_norms_on(&self.disc, &cells, &zero, &zg);
        (e.l2, e.h1)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DfnReport {
    pub k: usize,
    pub lambda: f64,
    pub cells_before: usize,
    pub cells: usize,
    pub cells_per_fracture: Vec<usize>,
    pub dofs: usize,
    pub free_dofs: usize,
    pub nnz: usize,
    pub h: f64,
    pub err_l2: Option<f64>,
    pub err_h1: Option<f64>,
    pub rel_l2: Option<f64>,
    pub rel_h1: Option<f64>,
    pub norm_l2: f64,
    pub norm_h1: f64,
    pub cond: Option<ConditionEstimate>,
    pub max_pi_nabla: f64,
    pub max_pi_0: f64,
    pub residual: f64,
    /// Summed over fractures.
    pub energy_before: i64,
    pub energy_after: i64,
    pub energy_saved: Vec<f64>,
    pub mesh_seconds: f64,
    pub solve_seconds: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct DfnConfig {
    pub target: MeshTarget,
    pub agglomeration: AgglomerationConfig,
    pub solve: SolveOptions,
}

/// Runs the whole pipeline and summarizes it.
pub fn solve_network(net: &FractureNetwork, config: &DfnConfig) -> Result<(NetworkSolution, DfnReport)> {
    let t0 = Instant::now();
    let mesh = build_dfn_mesh(net, config.target, &config.agglomeration)?;
    let mesh_seconds = t0.elapsed().as_secs_f64();
    let t1 = Instant::now();
    let sol = solve_on_mesh(net, mesh, &config.solve)?;
    let errs = sol.errors(net);
    let (norm_l2, norm_h1) = sol.solution_norms();
    let disc = projection_discrepancy(&sol.disc.elements);
    let solve_seconds = t1.elapsed().as_secs_f64();
    let report = DfnReport {
        k: config.solve.k,
        lambda: config.agglomeration.lambda,
        cells_before: sol.mesh.num_cut_cells(),
        cells: sol.mesh.num_cells(),
        cells_per_fracture: sol.mesh.stitched.meshes.iter().map(|m| m.num_cells()).collect(),
        dofs: sol.disc.num_dofs(),
        free_dofs: sol.disc.num_free,
        nnz: sol.disc.nnz,
        h: sol.mesh.h(),
        err_l2: errs.map(|e| e.l2),
        err_h1: errs.map(|e| e.h1),
        rel_l2: errs.map(|e| e.rel_l2()),
        rel_h1: errs.map(|e| e.rel_h1()),
        norm_l2,
        norm_h1,
        cond: sol.disc.cond,
        max_pi_nabla: disc.iter().map(|d| d.0).fold(0.0, f64::max),
        max_pi_0: disc.iter().map(|d| d.1).fold(0.0, f64::max),
        residual: sol.disc.residual,
        energy_before: sol.mesh.agglomeration.iter().map(|s| s.energy_before).sum(),
        energy_after: sol.mesh.agglomeration.iter().map(|s| s.energy_after).sum(),
        energy_saved: sol.mesh.agglomeration.iter().map(|s| s.energy_saved).collect(),
        mesh_seconds,
        solve_seconds,
    };
    Ok((sol, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dfn::network1::network1;
    use crate::vem::assembly::{assemble, mesh_dofs, mesh_polygons};
    use nalgebra::Matrix2;

    #[test]
    fn network1_pipeline_is_conforming() {
        let net = network1();
        for lambda in [0.0, 1.0] {
            let mesh = build_dfn_mesh(&net, MeshTarget::Area(0.05), &AgglomerationConfig::with_lambda(lambda)).unwrap();
            for nodes in &mesh.stitched.trace_nodes {
                assert_eq!(nodes[0].len(), nodes[1].len());
                for (a, b) in nodes[0].iter().zip(&nodes[1]) {
                    assert!((a - b).abs() < 1e-12);
                }
            }
            for (f, m) in mesh.stitched.meshes.iter().enumerate() {
                let a = net.fractures[f].area();
                assert!((m.total_area() - a).abs() < 1e-10 * a);
                assert_eq!(m.num_cells(), mesh.agglomeration[f].cells_after);
            }
        }
    }

    #[test]
    fn network1_linear_solve_is_accurate() {
        let net = network1();
        let cfg = DfnConfig {
            target: MeshTarget::Area(0.01),
            agglomeration: AgglomerationConfig::with_lambda(0.0),
            solve: SolveOptions::new(2),
        };
        let (_, rep) = solve_network(&net, &cfg).unwrap();
        assert!(rep.rel_h1.unwrap() < 0.05, "{rep:?}");
        assert!(rep.residual < 1e-12);
    }

    #[test]
    fn single_fracture_matches_single_mesh_system() {
        use super::super::network::{BoundaryRegion, BoundaryValue, DirichletCondition, Fracture, Point3d};
        let f = Fracture::new(
            vec![Point3d::new(0., 0., 0.), Point3d::new(1., 0., 0.), Point3d::new(1., 1., 0.), Point3d::new(0., 1., 0.)],
            Matrix2::identity(),
        )
        .unwrap();
        let bc = DirichletCondition { region: BoundaryRegion::All, value: BoundaryValue::Constant(0.0) };
        let net = FractureNetwork::new(vec![f], vec![bc]).unwrap();
        let mesh = build_dfn_mesh(&net, MeshTarget::Area(0.02), &AgglomerationConfig::with_lambda(0.5)).unwrap();
        for k in 1..=3 {
            let (dofs, el) = network_elements(&mesh, k).unwrap();
            let single = &mesh.stitched.meshes[0];
            let sd = mesh_dofs(single, k);
            assert_eq!(dofs, sd);
            let se = build_elements(&mesh_polygons(single), &sd).unwrap();
            let kappa = vec![Matrix2::identity(); el.len()];
            let a = assemble(&el, &dofs, &kappa, &|_, _| 1.0);
            let b = assemble(&se, &sd, &kappa, &|_, _| 1.0);
            assert_eq!(a.stiffness, b.stiffness);
            assert_eq!(a.load, b.load);
        }
    }
}
