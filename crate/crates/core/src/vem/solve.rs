//! Poisson solves on assembled element sets, error norms and diagnostics.

use nalgebra::{DVector, Matrix2};
use rayon::prelude::*;
use serde::Serialize;

use super::assembly::{assemble, boundary_sides, build_elements, edge_dofs, mesh_dofs, mesh_polygons, DofMap};
use super::element::{check_spd, VemElement};
use super::sparse::{condition_estimate, solve_spd, ConditionEstimate, SpdSystem};
use crate::error::{Error, Result};
use crate::mesh::{Point, PolygonalMesh};

pub type CellFn<'a> = dyn Fn(usize, &Point) -> f64 + Sync + 'a;
pub type CellGrad<'a> = dyn Fn(usize, &Point) -> [f64; 2] + Sync + 'a;

#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    pub k: usize,
    /// Estimate `cond(A)` of the reduced system.
    pub condition: bool,
    pub cond_max_iter: usize,
}

impl SolveOptions {
    pub fn new(k: usize) -> Self {
        SolveOptions { k, condition: false, cond_max_iter: 20_000 }
    }

    pub fn with_condition(mut self, on: bool) -> Self {
        self.condition = on;
        self
    }
}

#[derive(Debug, Clone)]
pub struct Discretization {
    pub dofs: DofMap,
    pub elements: Vec<VemElement>,
    /// Global DOF values.
    pub values: Vec<f64>,
    /// Stored entries of the reduced stiffness matrix.
    pub nnz: usize,
    pub num_free: usize,
    pub residual: f64,
    pub cond: Option<ConditionEstimate>,
}

impl Discretization {
    pub fn num_dofs(&self) -> usize {
        self.dofs.num_dofs
    }

    pub fn local_values(&self, c: usize) -> DVector<f64> {
        DVector::from_iterator(self.dofs.cells[c].global.len(), self.dofs.cells[c].global.iter().map(|&g| self.values[g]))
    }

    /// Monomial coefficients of `Π⁰_k u_h` on cell `c`.
    pub fn cell_projection(&self, c: usize) -> DVector<f64> {
        &self.elements[c].pi_zero * self.local_values(c)
    }

    /// `Π⁰_k u_h` evaluated at a point of cell `c`.
    pub fn eval(&self, c: usize, p: &Point) -> f64 {
        let coef = self.cell_projection(c);
        self.elements[c].basis.eval(p).iter().zip(coef.iter()).map(|(m, a)| m * a).sum()
    }
}

/// Assembles, eliminates the `dirichlet` DOFs and solves.
pub fn solve_elements(
    elements: Vec<VemElement>,
    dofs: DofMap,
    kappa: &[Matrix2<f64>],
    source: &CellFn,
    dirichlet: &[(usize, f64)],
    opts: &SolveOptions,
) -> Result<Discretization> {
    if dirichlet.is_empty() {
        return Err(Error::MissingBoundary);
    }
    for k in kappa {
        check_spd(k)?;
    }
    let sys = assemble(&elements, &dofs, kappa, source);
    let mut fixed = vec![None; dofs.num_dofs];
    for &(g, v) in dirichlet {
        fixed[g] = Some(v);
    }
    let reduced = SpdSystem::eliminate(&sys.stiffness, &sys.load, &fixed);
    let (sol, chol) = solve_spd(&reduced)?;
    let cond = opts.condition.then(|| condition_estimate(&reduced.matrix, &chol, opts.cond_max_iter));
    Ok(Discretization {
        nnz: reduced.matrix.nnz(),
        num_free: reduced.matrix.n,
        residual: sol.residual,
        values: sol.solution,
        cond,
        dofs,
        elements,
    })
}

/// Solves `-div(K grad u) = f` on a single mesh with `u = g` on the whole boundary.
pub fn solve_poisson(
    mesh: &PolygonalMesh,
    kappa: &Matrix2<f64>,
    f: &(dyn Fn(&Point) -> f64 + Sync),
    g: &dyn Fn(&Point) -> f64,
    opts: &SolveOptions,
) -> Result<Discretization> {
    check_spd(kappa)?;
    let dofs = mesh_dofs(mesh, opts.k);
    let elements = build_elements(&mesh_polygons(mesh), &dofs)?;
    let dirichlet: Vec<(usize, f64)> =
        edge_dofs(&elements, &dofs, &boundary_sides(mesh)).into_iter().map(|(gd, _, p)| (gd, g(&p))).collect();
    let kappas = vec![*kappa; mesh.num_cells()];
    solve_elements(elements, dofs, &kappas, &|_, p| f(p), &dirichlet, opts)
}

#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct ErrorNorms {
    /// `‖u − Π⁰_k u_h‖_{L²}`.
    pub l2: f64,
    /// `‖∇u − Π⁰_{k−1}∇u_h‖_{L²}`.
    pub h1: f64,
    pub l2_exact: f64,
    pub h1_exact: f64,
}

impl ErrorNorms {
    pub fn rel_l2(&self) -> f64 {
        self.l2 / self.l2_exact
    }

    pub fn rel_h1(&self) -> f64 {
        self.h1 / self.h1_exact
    }

    /// Combines norms computed on disjoint parts of a domain.
    pub fn combine(parts: &[ErrorNorms]) -> ErrorNorms {
        let s = |f: fn(&ErrorNorms) -> f64| parts.iter().map(|p| f(p).powi(2)).sum::<f64>().sqrt();
        ErrorNorms { l2: s(|p| p.l2), h1: s(|p| p.h1), l2_exact: s(|p| p.l2_exact), h1_exact: s(|p| p.h1_exact) }
    }
}

/// Errors of `u_h` against the exact solution over the cells in `cells`.
pub fn error_norms_on(disc: &Discretization, cells: &[usize], u: &CellFn, grad: &CellGrad) -> ErrorNorms {
    let sums: Vec<[f64; 4]> = cells
        .par_iter()
        .map(|&c| {
            let e = &disc.elements[c];
            let uh = disc.local_values(c);
            let c0 = &e.pi_zero * &uh;
            let gx = &e.grad[0] * &uh;
            let gy = &e.grad[1] * &uh;
            let n1 = gx.len();
            let mut s = [0.0; 4];
            for (p, &w) in e.quad_points.iter().zip(&e.quad_weights) {
                let m = e.basis.eval(p);
                let val: f64 = m.iter().zip(c0.iter()).map(|(a, b)| a * b).sum();
                let dx: f64 = m[..n1].iter().zip(gx.iter()).map(|(a, b)| a * b).sum();
                let dy: f64 = m[..n1].iter().zip(gy.iter()).map(|(a, b)| a * b).sum();
                let ue = u(c, p);
                let ge = grad(c, p);
                s[0] += w * (ue - val).powi(2);
                s[1] += w * ((ge[0] - dx).powi(2) + (ge[1] - dy).powi(2));
                s[2] += w * ue * ue;
                s[3] += w * (ge[0] * ge[0] + ge[1] * ge[1]);
            }
            s
        })
        .collect();
    let t = sums.iter().fold([0.0; 4], |a, s| [a[0] + s[0], a[1] + s[1], a[2] + s[2], a[3] + s[3]]);
    ErrorNorms { l2: t[0].sqrt(), h1: t[1].sqrt(), l2_exact: t[2].sqrt(), h1_exact: t[3].sqrt() }
}

pub fn error_norms(disc: &Discretization, u: &CellFn, grad: &CellGrad) -> ErrorNorms {
    let cells: Vec<usize> = (0..disc.elements.len()).collect();
    error_norms_on(disc, &cells, u, grad)
}

/// Per-cell `(‖Π∇D − I‖₂, ‖Π⁰D − I‖₂)`.
pub fn projection_discrepancy(elements: &[VemElement]) -> Vec<(f64, f64)> {
    elements.par_iter().map(|e| e.projection_discrepancy()).collect()
}

/// Projector discrepancies of every cell of `mesh` at order `k`.
pub fn mesh_projection_discrepancy(mesh: &PolygonalMesh, k: usize) -> Result<Vec<(f64, f64)>> {
    let dofs = mesh_dofs(mesh, k);
    Ok(projection_discrepancy(&build_elements(&mesh_polygons(mesh), &dofs)?))
}
