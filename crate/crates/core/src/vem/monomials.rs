//! Scaled monomials `((x - xc)/h)^ax ((y - yc)/h)^ay` ordered by total degree,
//! then by the y exponent.

use crate::mesh::Point;

/// Number of monomials of degree ≤ k (0 for negative k).
pub fn dim(k: i32) -> usize {
    if k < 0 {
        0
    } else {
        let k = k as usize;
        (k + 1) * (k + 2) / 2
    }
}

pub fn index(ax: usize, ay: usize) -> usize {
    let d = ax + ay;
    d * (d + 1) / 2 + ay
}

pub fn exponents(k: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(dim(k as i32));
    for d in 0..=k {
        for ay in 0..=d {
            out.push((d - ay, ay));
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct ScaledMonomials {
    pub k: usize,
    pub center: Point,
    pub h: f64,
    pub exps: Vec<(usize, usize)>,
}

impl ScaledMonomials {
    pub fn new(k: usize, center: Point, h: f64) -> Self {
        ScaledMonomials { k, center, h, exps: exponents(k) }
    }

    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    fn powers(&self, p: &Point) -> (Vec<f64>, Vec<f64>) {
        let x = (p.x - self.center.x) / self.h;
        let y = (p.y - self.center.y) / self.h;
        let mut px = vec![1.0; self.k + 1];
        let mut py = vec![1.0; self.k + 1];
        for i in 1..=self.k {
            px[i] = px[i - 1] * x;
            py[i] = py[i - 1] * y;
        }
        (px, py)
    }

    pub fn eval(&self, p: &Point) -> Vec<f64> {
        let (px, py) = self.powers(p);
        self.exps.iter().map(|&(a, b)| px[a] * py[b]).collect()
    }

    /// Gradients `[d/dx, d/dy]` of every monomial.
    pub fn grad(&self, p: &Point) -> Vec<[f64; 2]> {
        let (px, py) = self.powers(p);
        self.exps
            .iter()
            .map(|&(a, b)| {
                let dx = if a > 0 { a as f64 * px[a - 1] * py[b] / self.h } else { 0.0 };
                let dy = if b > 0 { b as f64 * px[a] * py[b - 1] / self.h } else { 0.0 };
                [dx, dy]
            })
            .collect()
    }

    /// Laplacian of monomial `alpha` as `(coefficient, index)` terms over
    /// monomials of degree `deg(alpha) - 2`.
    pub fn laplacian(&self, alpha: usize) -> Vec<(f64, usize)> {
        let (a, b) = self.exps[alpha];
        let h2 = self.h * self.h;
        let mut out = Vec::new();
        if a >= 2 {
            out.push(((a * (a - 1)) as f64 / h2, index(a - 2, b)));
        }
        if b >= 2 {
            out.push(((b * (b - 1)) as f64 / h2, index(a, b - 2)));
        }
        out
    }

    /// `d/dx` (component 0) or `d/dy` (component 1) of monomial `alpha` as a
    /// single `(coefficient, index)` term, if nonzero.
    pub fn derivative(&self, alpha: usize, component: usize) -> Option<(f64, usize)> {
        let (a, b) = self.exps[alpha];
        match component {
            0 if a > 0 => Some((a as f64 / self.h, index(a - 1, b))),
            1 if b > 0 => Some((b as f64 / self.h, index(a, b - 1))),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_and_dimension() {
        assert_eq!(dim(3), 10);
        assert_eq!(dim(-1), 0);
        let e = exponents(2);
        assert_eq!(e, vec![(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]);
        for (i, &(a, b)) in e.iter().enumerate() {
            assert_eq!(index(a, b), i);
        }
    }

    #[test]
    fn values_at_center() {
        let m = ScaledMonomials::new(3, Point::new(0.3, -0.2), 0.7);
        let v = m.eval(&Point::new(0.3, -0.2));
        assert_eq!(v[0], 1.0);
        assert!(v[1..].iter().all(|&x| x == 0.0));
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let m = ScaledMonomials::new(3, Point::new(0.1, 0.2), 0.5);
        let p = Point::new(0.4, -0.3);
        let g = m.grad(&p);
        let eps = 1e-6;
        let fx: Vec<f64> = m
            .eval(&Point::new(p.x + eps, p.y))
            .iter()
            .zip(m.eval(&Point::new(p.x - eps, p.y)))
            .map(|(a, b)| (a - b) / (2.0 * eps))
            .collect();
        for (i, gi) in g.iter().enumerate() {
            assert!((gi[0] - fx[i]).abs() < 1e-7);
        }
    }
}
