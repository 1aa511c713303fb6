//! Local virtual element of order `k` on one polygon.
//!
//! Local DOF order: vertex values (one per polygon vertex), then for `k ≥ 2`
//! the `k - 1` interior Gauss–Lobatto values of each edge `i` (joining
//! vertex `i` to `i + 1`), then the `k(k-1)/2` scaled moments
//! `(1/|E|) ∫ v m_β` for `m_β` of degree ≤ `k - 2`.

use nalgebra::{DMatrix, DVector, Matrix2};

use super::monomials::{dim, ScaledMonomials};
use super::quadrature::{gauss_lobatto, polygon_quadrature};
use crate::error::{Error, Result};
use crate::mesh::polygon::{self, Point};

/// Quadrature nodes on one edge with the local DOF attached to each node.
struct EdgeNodes {
    points: Vec<Point>,
    /// Weights already multiplied by the edge length.
    weights: Vec<f64>,
    dofs: Vec<usize>,
    normal: [f64; 2],
}

#[derive(Debug, Clone)]
pub struct VemElement {
    pub k: usize,
    pub num_vertices: usize,
    pub ndofs: usize,
    pub area: f64,
    pub centroid: Point,
    pub diameter: f64,
    pub basis: ScaledMonomials,
    /// `D[i][α] = dof_i(m_α)`.
    pub d: DMatrix<f64>,
    /// Coefficients of `Π∇ φ_i` in the monomial basis (columns = DOFs).
    pub pi_nabla: DMatrix<f64>,
    /// Coefficients of the enhanced `Π⁰_k φ_i`.
    pub pi_zero: DMatrix<f64>,
    /// Coefficients of `Π⁰_{k-1} φ_i`.
    pub pi_zero_km1: DMatrix<f64>,
    /// Coefficients of the two components of `Π⁰_{k-1} ∇φ_i` over degree `k-1`.
    pub grad: [DMatrix<f64>; 2],
    /// Mass matrix of the monomials of degree ≤ k.
    pub mass: DMatrix<f64>,
    pub quad_points: Vec<Point>,
    pub quad_weights: Vec<f64>,
    /// Positions of the vertex and edge DOFs (moments have none).
    pub dof_points: Vec<Point>,
}

pub fn num_local_dofs(num_vertices: usize, k: usize) -> usize {
    num_vertices * k + dim(k as i32 - 2)
}

fn solve_spd(m: &DMatrix<f64>, rhs: &DMatrix<f64>, cell: usize) -> Result<DMatrix<f64>> {
    let chol = m.clone().cholesky().ok_or(Error::SingularProjector { cell })?;
    Ok(chol.solve(rhs))
}

impl VemElement {
    /// Builds the element on the CCW polygon `pts`. `flip[i]` reverses the
    /// storage order of the interior DOFs of edge `i` relative to the
    /// traversal direction, so neighbors sharing an edge agree on numbering.
    /// `cell` is only used in error messages.
    pub fn new(pts: &[Point], flip: &[bool], k: usize, cell: usize) -> Result<Self> {
        assert!((1..=3).contains(&k), "supported orders are 1, 2, 3");
        let n = pts.len();
        assert_eq!(flip.len(), n);
        let area = polygon::signed_area(pts);
        let centroid = polygon::centroid(pts).ok_or(Error::DegenerateCell(cell))?;
        let diameter = polygon::diameter(pts);
        if !(area > 0.0) {
            return Err(Error::DegenerateCell(cell));
        }
        let basis = ScaledMonomials::new(k, centroid, diameter);
        let nk = basis.len();
        let nm = dim(k as i32 - 2);
        let n1 = dim(k as i32 - 1);
        let ndofs = num_local_dofs(n, k);
        let moment0 = n * k;

        let (quad_points, quad_weights) = polygon_quadrature(pts, 2 * k + 2)?;
        let mut mass = DMatrix::zeros(nk, nk);
        for (p, &w) in quad_points.iter().zip(&quad_weights) {
            let m = basis.eval(p);
            for a in 0..nk {
                for b in a..nk {
                    mass[(a, b)] += w * m[a] * m[b];
                }
            }
        }
        for a in 0..nk {
            for b in 0..a {
                mass[(a, b)] = mass[(b, a)];
            }
        }

        let (gl_x, gl_w) = gauss_lobatto(k + 1);
        let mut edges = Vec::with_capacity(n);
        let mut dof_points = vec![Point::origin(); n * k];
        dof_points[..n].copy_from_slice(pts);
        for i in 0..n {
            let (a, b) = (pts[i], pts[(i + 1) % n]);
            let len = (b - a).norm();
            let mut e = EdgeNodes {
                points: Vec::with_capacity(k + 1),
                weights: Vec::with_capacity(k + 1),
                dofs: Vec::with_capacity(k + 1),
                normal: [(b.y - a.y) / len, -(b.x - a.x) / len],
            };
            for j in 0..=k {
                let t = 0.5 * (gl_x[j] + 1.0);
                let p = a + (b - a) * t;
                let dof = if j == 0 {
                    i
                } else if j == k {
                    (i + 1) % n
                } else {
                    let stored = if flip[i] { k - 1 - j } else { j - 1 };
                    let d = n + i * (k - 1) + stored;
                    dof_points[d] = p;
                    d
                };
                e.points.push(p);
                e.weights.push(0.5 * gl_w[j] * len);
                e.dofs.push(dof);
            }
            edges.push(e);
        }

        let mut d = DMatrix::zeros(ndofs, nk);
        for (i, p) in dof_points.iter().enumerate() {
            let m = basis.eval(p);
            for a in 0..nk {
                d[(i, a)] = m[a];
            }
        }
        for b in 0..nm {
            for a in 0..nk {
                d[(moment0 + b, a)] = mass[(b, a)] / area;
            }
        }

        let mut bmat = DMatrix::zeros(nk, ndofs);
        for e in &edges {
            for (j, p) in e.points.iter().enumerate() {
                let g = basis.grad(p);
                for a in 1..nk {
                    bmat[(a, e.dofs[j])] += e.weights[j] * (g[a][0] * e.normal[0] + g[a][1] * e.normal[1]);
                }
            }
        }
        for a in 1..nk {
            for (c, b) in basis.laplacian(a) {
                bmat[(a, moment0 + b)] -= c * area;
            }
        }
        if k == 1 {
            let lens = polygon::edge_lengths(pts);
            let per: f64 = lens.iter().sum();
            for i in 0..n {
                bmat[(0, i)] = (lens[(i + n - 1) % n] + lens[i]) / (2.0 * per);
            }
        } else {
            bmat[(0, moment0)] = 1.0;
        }

        let g = &bmat * &d;
        let lu = g.clone().lu();
        let pi_nabla = lu.solve(&bmat).ok_or(Error::SingularProjector { cell })?;
        if pi_nabla.iter().any(|v| !v.is_finite()) {
            return Err(Error::SingularProjector { cell });
        }

        let hpi = &mass * &pi_nabla;
        let mut c = DMatrix::zeros(nk, ndofs);
        for a in 0..nk {
            if a < nm {
                c[(a, moment0 + a)] = area;
            } else {
                c.row_mut(a).copy_from(&hpi.row(a));
            }
        }
        let pi_zero = solve_spd(&mass, &c, cell)?;
        let mass1 = mass.view((0, 0), (n1, n1)).into_owned();
        let pi_zero_km1 = solve_spd(&mass1, &c.rows(0, n1).into_owned(), cell)?;

        let mut grad = [DMatrix::zeros(n1, ndofs), DMatrix::zeros(n1, ndofs)];
        for (comp, gm) in grad.iter_mut().enumerate() {
            let mut rhs = DMatrix::zeros(n1, ndofs);
            for e in &edges {
                for (j, p) in e.points.iter().enumerate() {
                    let m = basis.eval(p);
                    for b in 0..n1 {
                        rhs[(b, e.dofs[j])] += e.weights[j] * m[b] * e.normal[comp];
                    }
                }
            }
            for b in 0..n1 {
                if let Some((coef, g)) = basis.derivative(b, comp) {
                    rhs[(b, moment0 + g)] -= coef * area;
                }
            }
            *gm = solve_spd(&mass1, &rhs, cell)?;
        }

        Ok(VemElement {
            k,
            num_vertices: n,
            ndofs,
            area,
            centroid,
            diameter,
            basis,
            d,
            pi_nabla,
            pi_zero,
            pi_zero_km1,
            grad,
            mass,
            quad_points,
            quad_weights,
            dof_points,
        })
    }

    /// Local stiffness for a constant SPD tensor `kappa`: gradient-projection
    /// consistency plus `‖K‖₂ · (I - Π∇)ᵀ(I - Π∇)` dofi-dofi stabilization.
    pub fn stiffness(&self, kappa: &Matrix2<f64>) -> DMatrix<f64> {
        let n1 = self.grad[0].nrows();
        let mass1 = self.mass.view((0, 0), (n1, n1));
        let mut a = DMatrix::zeros(self.ndofs, self.ndofs);
        for i in 0..2 {
            for j in 0..2 {
                if kappa[(i, j)] != 0.0 {
                    a += kappa[(i, j)] * self.grad[i].transpose() * mass1 * &self.grad[j];
                }
            }
        }
        let rem = DMatrix::identity(self.ndofs, self.ndofs) - &self.d * &self.pi_nabla;
        a += tensor_norm(kappa) * rem.transpose() * rem;
        (&a + a.transpose()) * 0.5
    }

    /// Consistency part of the stiffness alone (for diagnostics and tests).
    pub fn consistency(&self, kappa: &Matrix2<f64>) -> DMatrix<f64> {
        let n1 = self.grad[0].nrows();
        let mass1 = self.mass.view((0, 0), (n1, n1));
        let mut a = DMatrix::zeros(self.ndofs, self.ndofs);
        for i in 0..2 {
            for j in 0..2 {
                a += kappa[(i, j)] * self.grad[i].transpose() * mass1 * &self.grad[j];
            }
        }
        a
    }

    /// Local load `(f, Π⁰_{k-1} φ_i)_E`.
    pub fn load(&self, f: &dyn Fn(&Point) -> f64) -> DVector<f64> {
        let n1 = self.pi_zero_km1.nrows();
        let mut fm = DVector::zeros(n1);
        for (p, &w) in self.quad_points.iter().zip(&self.quad_weights) {
            let fv = f(p);
            let m = self.basis.eval(p);
            for b in 0..n1 {
                fm[b] += w * fv * m[b];
            }
        }
        self.pi_zero_km1.transpose() * fm
    }

    /// `‖Π∇ D − I‖₂` and `‖Π⁰ D − I‖₂`.
    pub fn projection_discrepancy(&self) -> (f64, f64) {
        let nk = self.basis.len();
        let id = DMatrix::<f64>::identity(nk, nk);
        let a = &self.pi_nabla * &self.d - &id;
        let b = &self.pi_zero * &self.d - &id;
        (spectral_norm(&a), spectral_norm(&b))
    }

    /// DOF vector of a function given by value (the moments use quadrature).
    pub fn interpolate(&self, u: &dyn Fn(&Point) -> f64) -> DVector<f64> {
        let mut v = DVector::zeros(self.ndofs);
        for (i, p) in self.dof_points.iter().enumerate() {
            v[i] = u(p);
        }
        let nm = dim(self.k as i32 - 2);
        let moment0 = self.dof_points.len();
        for (p, &w) in self.quad_points.iter().zip(&self.quad_weights) {
            let uv = u(p);
            let m = self.basis.eval(p);
            for b in 0..nm {
                v[moment0 + b] += w * uv * m[b] / self.area;
            }
        }
        v
    }
}

pub fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    m.clone().svd(false, false).singular_values.iter().copied().fold(0.0, f64::max)
}

/// Spectral norm of a symmetric 2×2 tensor.
pub fn tensor_norm(k: &Matrix2<f64>) -> f64 {
    let tr = k[(0, 0)] + k[(1, 1)];
    let det = k[(0, 0)] * k[(1, 1)] - k[(0, 1)] * k[(1, 0)];
    let disc = (0.25 * tr * tr - det).max(0.0).sqrt();
    (0.5 * tr).abs() + disc
}

/// Checks that `k` is symmetric positive definite.
pub fn check_spd(k: &Matrix2<f64>) -> Result<()> {
    let sym = (k[(0, 1)] - k[(1, 0)]).abs() <= 1e-12 * k.abs().max();
    let det = k[(0, 0)] * k[(1, 1)] - k[(0, 1)] * k[(1, 0)];
    if sym && k[(0, 0)] > 0.0 && det > 0.0 {
        Ok(())
    } else {
        Err(Error::NotSpd)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn square() -> Vec<Point> {
        vec![Point::new(0., 0.), Point::new(1., 0.), Point::new(1., 1.), Point::new(0., 1.)]
    }

    fn pentagon() -> Vec<Point> {
        vec![Point::new(0., 0.), Point::new(1.2, 0.1), Point::new(1.4, 0.9), Point::new(0.6, 1.5), Point::new(-0.2, 0.8)]
    }

    fn concave() -> Vec<Point> {
        vec![Point::new(0., 0.), Point::new(2., 0.), Point::new(2., 2.), Point::new(1., 0.5), Point::new(0., 1.)]
    }

    #[test]
    fn projectors_reproduce_polynomials() {
        for pts in [square(), pentagon(), concave()] {
            for k in 1..=3 {
                let flip = vec![false; pts.len()];
                let e = VemElement::new(&pts, &flip, k, 0).unwrap();
                let (a, b) = e.projection_discrepancy();
                assert!(a < 1e-11, "k={k} pi_nabla {a}");
                assert!(b < 1e-11, "k={k} pi_zero {b}");
            }
        }
    }

    #[test]
    fn low_order_projectors_coincide() {
        let pts = pentagon();
        for k in 1..=2 {
            let e = VemElement::new(&pts, &[false; 5], k, 0).unwrap();
            assert!((&e.pi_nabla - &e.pi_zero).amax() < 1e-12);
        }
    }

    #[test]
    fn constants_have_zero_gradient() {
        for k in 1..=3 {
            let e = VemElement::new(&pentagon(), &[true, false, true, false, false], k, 0).unwrap();
            let one = e.interpolate(&|_| 1.0);
            assert!((&e.grad[0] * &one).amax() < 1e-13);
            assert!((&e.grad[1] * &one).amax() < 1e-13);
        }
    }

    #[test]
    fn stiffness_kernel_is_constants() {
        let kappa = Matrix2::identity();
        for k in 1..=3 {
            let e = VemElement::new(&square(), &[false; 4], k, 0).unwrap();
            let a = e.stiffness(&kappa);
            let one = e.interpolate(&|_| 1.0);
            assert!((&a * &one).amax() < 1e-12);
            let eig = a.symmetric_eigenvalues();
            let mut ev: Vec<f64> = eig.iter().copied().collect();
            ev.sort_by(f64::total_cmp);
            assert!(ev[0].abs() < 1e-12 && ev[1] > 1e-6, "k={k} {ev:?}");
        }
    }

    #[test]
    fn right_triangle_matches_linear_fem() {
        let pts = vec![Point::new(0., 0.), Point::new(1., 0.), Point::new(0., 1.)];
        let e = VemElement::new(&pts, &[false; 3], 1, 0).unwrap();
        let a = e.consistency(&Matrix2::identity());
        let fem = DMatrix::from_row_slice(3, 3, &[1.0, -0.5, -0.5, -0.5, 0.5, 0.0, -0.5, 0.0, 0.5]);
        assert!((a - fem).amax() < 1e-14);
    }

    #[test]
    fn linear_energy_equals_area() {
        for pts in [pentagon(), concave()] {
            for k in 1..=3 {
                let e = VemElement::new(&pts, &vec![false; pts.len()], k, 0).unwrap();
                let u = e.interpolate(&|p| p.x);
                let energy = (u.transpose() * e.stiffness(&Matrix2::identity()) * &u)[0];
                assert_abs_diff_eq!(energy, e.area, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn rejects_non_spd_tensor() {
        assert!(check_spd(&Matrix2::new(1.0, 0.0, 0.0, -1.0)).is_err());
        assert!(check_spd(&Matrix2::new(1.0, 0.5, 0.2, 1.0)).is_err());
        assert!(check_spd(&Matrix2::new(2.0, 0.5, 0.5, 1.0)).is_ok());
        assert_abs_diff_eq!(tensor_norm(&Matrix2::new(3.0, 0.0, 0.0, 1.0)), 3.0);
    }
}
