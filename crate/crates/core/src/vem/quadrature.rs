//! Gauss–Legendre and Gauss–Lobatto rules, and polygon quadrature built from
//! collapsed (Duffy) tensor rules on an ear-clipping sub-triangulation.

use crate::error::{Error, Result};
use crate::mesh::polygon::{self, Point};

/// Legendre polynomial `P_n(x)` and its derivative.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let (mut p0, mut p1) = (1.0, x);
    for j in 2..=n {
        let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
        p0 = p1;
        p1 = p2;
    }
    let dp = if (1.0 - x * x).abs() < 1e-300 { 0.0 } else { n as f64 * (p0 - x * p1) / (1.0 - x * x) };
    (p1, dp)
}

/// `n`-point Gauss–Legendre rule on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut t = -(std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(n, t);
            let dt = p / dp;
            t -= dt;
            if dt.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(n, t);
        x[i] = t;
        w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
    }
    (x, w)
}

/// `n`-point Gauss–Lobatto rule on `[-1, 1]` (`n ≥ 2`), nodes ascending.
pub fn gauss_lobatto(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2, "Gauss-Lobatto needs at least two points");
    let m = n - 1;
    let mut x = vec![0.0; n];
    x[0] = -1.0;
    x[m] = 1.0;
    // interior nodes are the roots of P'_m, found by Newton from Chebyshev-Gauss-Lobatto guesses
    for i in 1..m {
        let mut t = -(std::f64::consts::PI * i as f64 / m as f64).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(m, t);
            // P''_m from the Legendre ODE: (1 - t^2) P'' = 2 t P' - m (m + 1) P
            let d2p = (2.0 * t * dp - (m * (m + 1)) as f64 * p) / (1.0 - t * t);
            let dt = dp / d2p;
            t -= dt;
            if dt.abs() < 1e-16 {
                break;
            }
        }
        x[i] = t;
    }
    let w = x
        .iter()
        .map(|&t| {
            let (p, _) = legendre(m, t);
            2.0 / ((m * n) as f64 * p * p)
        })
        .collect();
    (x, w)
}

/// Interior Gauss–Lobatto points of a `(k+1)`-point rule on the segment `a -> b`,
/// as parameters in `(0, 1)` (empty for `k < 2`).
pub fn lobatto_interior_params(k: usize) -> Vec<f64> {
    if k < 2 {
        return Vec::new();
    }
    let (x, _) = gauss_lobatto(k + 1);
    x[1..k].iter().map(|t| 0.5 * (t + 1.0)).collect()
}

/// Internal Gauss–Lobatto points of order `k` mapped onto the segment `a -> b`.
pub fn gauss_lobatto_points(k: usize, a: &Point, b: &Point) -> Vec<Point> {
    lobatto_interior_params(k).into_iter().map(|t| a + (b - a) * t).collect()
}

/// Quadrature exact for polynomials of degree `degree` on the triangle `abc`.
pub fn triangle_rule(a: &Point, b: &Point, c: &Point, degree: usize, pts: &mut Vec<Point>, wts: &mut Vec<f64>) {
    // the collapsed map adds one degree in the first direction
    let n = (degree + 3) / 2;
    let (x, w) = gauss_legendre(n);
    let area2 = polygon::orient(a, b, c);
    for i in 0..n {
        let u = 0.5 * (x[i] + 1.0);
        for j in 0..n {
            let v = 0.5 * (x[j] + 1.0);
            let s = u;
            let t = v * (1.0 - u);
            pts.push(a + (b - a) * s + (c - a) * t);
            wts.push(0.25 * w[i] * w[j] * (1.0 - u) * area2);
        }
    }
}

/// Quadrature points and weights on a simple CCW polygon, exact for
/// polynomials of degree `degree`.
pub fn polygon_quadrature(poly: &[Point], degree: usize) -> Result<(Vec<Point>, Vec<f64>)> {
    let tris = polygon::triangulate(poly).map_err(Error::Triangulation)?;
    let mut pts = Vec::new();
    let mut wts = Vec::new();
    for [i, j, k] in tris {
        triangle_rule(&poly[i], &poly[j], &poly[k], degree, &mut pts, &mut wts);
    }
    Ok((pts, wts))
}
