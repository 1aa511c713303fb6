//! Manufactured solutions for single-mesh tests and convergence studies.

use nalgebra::Matrix2;

use crate::mesh::Point;

#[derive(Debug, Clone, Copy)]
pub struct Manufactured {
    pub name: &'static str,
    /// Polynomial degree, `None` if not a polynomial.
    pub degree: Option<usize>,
    u: fn(f64, f64) -> f64,
    grad: fn(f64, f64) -> [f64; 2],
    /// `[u_xx, u_xy, u_yy]`.
    hess: fn(f64, f64) -> [f64; 3],
}

impl Manufactured {
    pub fn u(&self, p: &Point) -> f64 {
        (self.u)(p.x, p.y)
    }

    pub fn grad(&self, p: &Point) -> [f64; 2] {
        (self.grad)(p.x, p.y)
    }

    pub fn hessian(&self, p: &Point) -> [f64; 3] {
        (self.hess)(p.x, p.y)
    }

    /// `-div(K grad u)` for a constant tensor `K`.
    pub fn source(&self, k: &Matrix2<f64>, p: &Point) -> f64 {
        let [xx, xy, yy] = self.hessian(p);
        -(k[(0, 0)] * xx + (k[(0, 1)] + k[(1, 0)]) * xy + k[(1, 1)] * yy)
    }
}

const PI: f64 = std::f64::consts::PI;

pub const CATALOG: [Manufactured; 4] = [
    Manufactured {
        name: "linear",
        degree: Some(1),
        u: |x, y| 1.0 + x + 2.0 * y,
        grad: |_, _| [1.0, 2.0],
        hess: |_, _| [0.0; 3],
    },
    Manufactured {
        name: "quadratic",
        degree: Some(2),
        u: |x, y| x * x - x * y + 2.0 * y * y + x,
        grad: |x, y| [2.0 * x - y + 1.0, -x + 4.0 * y],
        hess: |_, _| [2.0, -1.0, 4.0],
    },
    Manufactured {
        name: "cubic",
        degree: Some(3),
        u: |x, y| x * x * x - 2.0 * x * x * y + x * y * y + y * y * y + y,
        grad: |x, y| [3.0 * x * x - 4.0 * x * y + y * y, -2.0 * x * x + 2.0 * x * y + 3.0 * y * y + 1.0],
        hess: |x, y| [6.0 * x - 4.0 * y, -4.0 * x + 2.0 * y, 2.0 * x + 6.0 * y],
    },
    Manufactured {
        name: "sin",
        degree: None,
        u: |x, y| (PI * x).sin() * (PI * y).sin(),
        grad: |x, y| [PI * (PI * x).cos() * (PI * y).sin(), PI * (PI * x).sin() * (PI * y).cos()],
        hess: |x, y| {
            let s = -PI * PI * (PI * x).sin() * (PI * y).sin();
            [s, PI * PI * (PI * x).cos() * (PI * y).cos(), s]
        },
    },
];

pub fn by_name(name: &str) -> Option<Manufactured> {
    CATALOG.iter().copied().find(|m| m.name == name)
}

/// The catalog polynomial of exact degree `k` (1 to 3).
pub fn polynomial(k: usize) -> Manufactured {
    CATALOG.iter().copied().find(|m| m.degree == Some(k)).expect("degree 1 to 3")
}
