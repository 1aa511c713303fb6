//! Three orthogonal rectangular fractures with a known piecewise solution.
//!
//! `F1 = [-1, 0.5] x [-1, 1]` in `z = 0`, `F2 = [-1, 0] x [-1, 1]` in `y = 0`
//! (coordinates `x, z`) and `F3 = [-1, 1] x [-1, 1]` in `x = -0.5`
//! (coordinates `y, z`). The heads are
//!
//! ```text
//! u1 = -(1/2 + x) (x^3 + 8 x y (x^2 + y^2) atan2(y, x)) / 10
//! u2 = (1/2 + x) x^3 (-1/10 + 4 pi |z| / 5)
//! u3 = y (y - 1) (y + 1) z (z - 1)
//! ```
//!
//! and the sources are `f_i = -Δu_i` (unit transmissivity).

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{Matrix2, Vector3};

use super::network::{
    BoundaryRegion, BoundaryValue, DirichletCondition, ExactSolution, Fracture, FractureNetwork, Point3d,
};

/// Position of the third fracture plane.
pub const F3_X: f64 = -0.5;

pub fn u1(x: f64, y: f64) -> f64 {
    let th = y.atan2(x);
    -0.1 * (0.5 + x) * (x.powi(3) + 8.0 * x * y * (x * x + y * y) * th)
}

pub fn grad_u1(x: f64, y: f64) -> [f64; 2] {
    let th = y.atan2(x);
    let r2 = x * x + y * y;
    let ux = -x.powi(3) / 10.0
        - 4.0 * x * y * r2 * th / 5.0
        - (2.0 * x + 1.0) * (16.0 * x * x * y * th + 3.0 * x * x - 8.0 * x * y * y + 8.0 * y * r2 * th) / 20.0;
    let uy = -2.0 * x * (2.0 * x + 1.0) * (x * y + 2.0 * y * y * th + r2 * th) / 5.0;
    [ux, uy]
}

pub fn f1(x: f64, y: f64) -> f64 {
    let th = y.atan2(x);
    8.0 * x.powi(3) / 5.0 + 72.0 * x * x * y * th / 5.0 + 2.0 * x * x - 16.0 * x * y * y / 5.0
        + 24.0 * x * y * th / 5.0
        + 3.0 * x / 10.0
        + 8.0 * y.powi(3) * th / 5.0
        - 4.0 * y * y / 5.0
}

pub fn u2(x: f64, z: f64) -> f64 {
    (0.5 + x) * x.powi(3) * (-0.1 + 0.8 * PI * z.abs())
}

pub fn grad_u2(x: f64, z: f64) -> [f64; 2] {
    let ux = (4.0 * x.powi(3) + 1.5 * x * x) * (-0.1 + 0.8 * PI * z.abs());
    let uz = 0.8 * PI * (0.5 + x) * x.powi(3) * z.signum();
    [ux, uz]
}

pub fn f2(x: f64, z: f64) -> f64 {
    -0.3 * x * (4.0 * x + 1.0) * (8.0 * PI * z.abs() - 1.0)
}

pub fn u3(y: f64, z: f64) -> f64 {
    y * (y - 1.0) * (y + 1.0) * z * (z - 1.0)
}

pub fn grad_u3(y: f64, z: f64) -> [f64; 2] {
    [(3.0 * y * y - 1.0) * z * (z - 1.0), y * (y * y - 1.0) * (2.0 * z - 1.0)]
}

pub fn f3(y: f64, z: f64) -> f64 {
    -2.0 * y * (y * y + 3.0 * z * z - 3.0 * z - 1.0)
}

pub fn exact_u(fracture: usize, p: &Point3d) -> f64 {
    match fracture {
        0 => u1(p.x, p.y),
        1 => u2(p.x, p.z),
        _ => u3(p.y, p.z),
    }
}

pub fn exact_grad(fracture: usize, p: &Point3d) -> Vector3<f64> {
    match fracture {
        0 => {
            let [a, b] = grad_u1(p.x, p.y);
            Vector3::new(a, b, 0.0)
        }
        1 => {
            let [a, b] = grad_u2(p.x, p.z);
            Vector3::new(a, 0.0, b)
        }
        _ => {
            let [a, b] = grad_u3(p.y, p.z);
            Vector3::new(0.0, a, b)
        }
    }
}

pub fn source(fracture: usize, p: &Point3d) -> f64 {
    match fracture {
        0 => f1(p.x, p.y),
        1 => f2(p.x, p.z),
        _ => f3(p.y, p.z),
    }
}

pub fn fractures() -> Vec<Fracture> {
    let p = Point3d::new;
    let id = Matrix2::identity();
    vec![
        Fracture::new(vec![p(-1.0, -1.0, 0.0), p(0.5, -1.0, 0.0), p(0.5, 1.0, 0.0), p(-1.0, 1.0, 0.0)], id),
        Fracture::new(vec![p(-1.0, 0.0, -1.0), p(0.0, 0.0, -1.0), p(0.0, 0.0, 1.0), p(-1.0, 0.0, 1.0)], id),
        Fracture::new(vec![p(F3_X, -1.0, -1.0), p(F3_X, 1.0, -1.0), p(F3_X, 1.0, 1.0), p(F3_X, -1.0, 1.0)], id),
    ]
    .into_iter()
    .map(|f| f.expect("network 1 fractures are valid"))
    .collect()
}

/// The network with Dirichlet data from the exact solution on every fracture boundary.
pub fn network1() -> FractureNetwork {
    let bc = DirichletCondition { region: BoundaryRegion::All, value: BoundaryValue::Function(Arc::new(exact_u)) };
    let mut net = FractureNetwork::new(fractures(), vec![bc]).expect("network 1 is valid");
    net.source = Some(Arc::new(source));
    net.exact = Some(ExactSolution { u: Arc::new(exact_u), grad: Arc::new(exact_grad) });
    net
}

#[cfg(test)]
mod tests {
    use super::*;

    const H: f64 = 1e-5;

    fn check(u: fn(f64, f64) -> f64, g: fn(f64, f64) -> [f64; 2], f: fn(f64, f64) -> f64, pts: &[(f64, f64)]) {
        for &(a, b) in pts {
            let da = (u(a + H, b) - u(a - H, b)) / (2.0 * H);
            let db = (u(a, b + H) - u(a, b - H)) / (2.0 * H);
            let gr = g(a, b);
            assert!((gr[0] - da).abs() < 1e-7 && (gr[1] - db).abs() < 1e-7, "gradient at ({a}, {b})");
            let h = 1e-4;
            let lap = (u(a + h, b) + u(a - h, b) + u(a, b + h) + u(a, b - h) - 4.0 * u(a, b)) / (h * h);
            assert!((f(a, b) + lap).abs() < 1e-5, "source at ({a}, {b}): {} vs {}", f(a, b), -lap);
        }
    }

    #[test]
    fn sources_match_finite_differences() {
        let pts = [(-0.7, 0.3), (0.2, -0.6), (-0.3, -0.8), (0.4, 0.9), (-0.9, -0.1)];
        check(u1, grad_u1, f1, &pts);
        let pts2 = [(-0.7, 0.3), (-0.2, -0.6), (-0.5, 0.8), (-0.95, -0.2)];
        check(u2, grad_u2, f2, &pts2);
        check(u3, grad_u3, f3, &pts);
    }

    #[test]
    fn three_traces_with_continuous_heads_and_balanced_fluxes() {
        let net = network1();
        assert_eq!(net.traces.len(), 3);
        for t in &net.traces {
            let [i, j] = t.fractures;
            for k in 0..=20 {
                let p = t.point(k as f64 / 20.0);
                let (a, b) = (exact_u(i, &p), exact_u(j, &p));
                assert!((a - b).abs() < 1e-13, "head jump {a} vs {b} at {p:?}");
            }
        }
        // F1 ∩ F2 along y = z = 0: the normal-derivative jumps across the trace cancel
        let e = 1e-9;
        for x in [-0.9, -0.6, -0.3, -0.1] {
            let j1 = grad_u1(x, e)[1] - grad_u1(x, -e)[1];
            let j2 = grad_u2(x, e)[1] - grad_u2(x, -e)[1];
            assert!((j1 + j2).abs() < 1e-6, "flux imbalance {} at x = {x}", j1 + j2);
        }
    }

    #[test]
    fn trace_geometry() {
        let net = network1();
        let mut found = [false; 3];
        for t in &net.traces {
            let [a, b] = t.endpoints;
            match t.fractures {
                [0, 1] => {
                    found[0] = true;
                    assert!(a.y.abs() < 1e-14 && a.z.abs() < 1e-14 && b.y.abs() < 1e-14 && b.z.abs() < 1e-14);
                    assert!((a.x.min(b.x) + 1.0).abs() < 1e-12 && a.x.max(b.x).abs() < 1e-12);
                }
                [0, 2] => {
                    found[1] = true;
                    assert!((t.length() - 2.0).abs() < 1e-12);
                }
                [1, 2] => {
                    found[2] = true;
                    assert!((t.length() - 2.0).abs() < 1e-12);
                }
                other => panic!("unexpected trace {other:?}"),
            }
        }
        assert_eq!(found, [true; 3]);
    }
}
