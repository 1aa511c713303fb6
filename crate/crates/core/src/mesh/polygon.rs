//! Computational-geometry primitives on simple polygons given as point loops.
//!
//! All routines expect a closed loop without the repeated first point. Unless
//! stated otherwise the loop is assumed counter-clockwise.

use nalgebra::{Point2, Vector2};

pub type Point = Point2<f64>;

/// Default collinearity tolerance: relative cross product `|a x b| / (|a||b|)`.
pub const COLLINEAR_TOL: f64 = 1e-9;

/// Kernels smaller than this fraction of the polygon area count as empty.
pub const KERNEL_AREA_TOL: f64 = 1e-14;

#[inline]
pub fn cross(a: &Vector2<f64>, b: &Vector2<f64>) -> f64 {
    a.x * b.y - a.y * b.x
}

/// Twice the signed area of the triangle `abc`.
#[inline]
pub fn orient(a: &Point, b: &Point, c: &Point) -> f64 {
    cross(&(b - a), &(c - a))
}

pub fn signed_area(pts: &[Point]) -> f64 {
    if pts.len() < 3 {
        return 0.0;
    }
    let o = pts[0];
    let mut acc = 0.0;
    for i in 1..pts.len() - 1 {
        acc += cross(&(pts[i] - o), &(pts[i + 1] - o));
    }
    0.5 * acc
}

/// Area-weighted centroid. Returns `None` for zero-area loops.
pub fn centroid(pts: &[Point]) -> Option<Point> {
    if pts.len() < 3 {
        return None;
    }
    let o = pts[0];
    let mut area2 = 0.0;
    let mut cx = 0.0;
    let mut cy = 0.0;
    for i in 1..pts.len() - 1 {
        let a = pts[i] - o;
        let b = pts[i + 1] - o;
        let c = cross(&a, &b);
        area2 += c;
        cx += (a.x + b.x) * c;
        cy += (a.y + b.y) * c;
    }
    if area2 == 0.0 {
        return None;
    }
    Some(Point::new(o.x + cx / (3.0 * area2), o.y + cy / (3.0 * area2)))
}

/// Maximum pairwise vertex distance.
pub fn diameter(pts: &[Point]) -> f64 {
    let mut d2: f64 = 0.0;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            d2 = d2.max((pts[i] - pts[j]).norm_squared());
        }
    }
    d2.sqrt()
}

pub fn edge_lengths(pts: &[Point]) -> Vec<f64> {
    let n = pts.len();
    (0..n).map(|i| (pts[(i + 1) % n] - pts[i]).norm()).collect()
}

pub fn perimeter(pts: &[Point]) -> f64 {
    edge_lengths(pts).iter().sum()
}

/// True when `cur` continues the straight line `prev -> cur` towards `next`.
pub fn is_straight_turn(prev: &Point, cur: &Point, next: &Point, tol: f64) -> bool {
    let a = cur - prev;
    let b = next - cur;
    let na = a.norm();
    let nb = b.norm();
    if na == 0.0 || nb == 0.0 {
        return false;
    }
    cross(&a, &b).abs() / (na * nb) < tol && a.dot(&b) > 0.0
}

/// A loop is convex when no vertex turns clockwise beyond the collinearity tolerance.
pub fn is_convex(pts: &[Point]) -> bool {
    let n = pts.len();
    (0..n).all(|i| {
        let a = pts[i] - pts[(i + n - 1) % n];
        let b = pts[(i + 1) % n] - pts[i];
        let scale = a.norm() * b.norm();
        cross(&a, &b) >= -COLLINEAR_TOL * scale
    })
}

pub fn bounding_box(pts: &[Point]) -> (Point, Point) {
    let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in pts {
        lo.x = lo.x.min(p.x);
        lo.y = lo.y.min(p.y);
        hi.x = hi.x.max(p.x);
        hi.y = hi.y.max(p.y);
    }
    (lo, hi)
}

/// Clips a convex polygon against the closed half-plane to the left of `a -> b`.
pub fn clip_left(poly: &[Point], a: &Point, b: &Point, eps: f64) -> Vec<Point> {
    let n = poly.len();
    if n == 0 {
        return Vec::new();
    }
    let dir = b - a;
    let len = dir.norm();
    if len == 0.0 {
        return poly.to_vec();
    }
    let dist = |p: &Point| cross(&dir, &(p - a)) / len;
    let mut out: Vec<Point> = Vec::with_capacity(n + 2);
    for i in 0..n {
        let p = poly[i];
        let q = poly[(i + 1) % n];
        let dp = dist(&p);
        let dq = dist(&q);
        let p_in = dp >= -eps;
        let q_in = dq >= -eps;
        if p_in {
            out.push(p);
        }
        if (p_in && dq < -eps && dp > eps) || (!p_in && q_in && dq > eps) {
            let t = dp / (dp - dq);
            out.push(p + (q - p) * t);
        }
    }
    dedup_loop(&mut out, eps);
    out
}

fn dedup_loop(pts: &mut Vec<Point>, eps: f64) {
    let mut i = 0;
    while pts.len() > 1 && i < pts.len() {
        let j = (i + 1) % pts.len();
        if (pts[i] - pts[j]).norm() <= eps {
            pts.remove(j);
        } else {
            i += 1;
        }
    }
}

/// Kernel (visibility region) of a simple CCW polygon by successive half-plane
/// clipping. An empty vector means the polygon is not star-shaped.
pub fn kernel(pts: &[Point]) -> Vec<Point> {
    let n = pts.len();
    if n < 3 {
        return Vec::new();
    }
    let (lo, hi) = bounding_box(pts);
    let diam = (hi - lo).norm();
    let pad = 1e-3 * diam;
    let mut region = vec![
        Point::new(lo.x - pad, lo.y - pad),
        Point::new(hi.x + pad, lo.y - pad),
        Point::new(hi.x + pad, hi.y + pad),
        Point::new(lo.x - pad, hi.y + pad),
    ];
    let eps = 1e-14 * diam;
    for i in 0..n {
        region = clip_left(&region, &pts[i], &pts[(i + 1) % n], eps);
        if region.len() < 3 {
            return Vec::new();
        }
    }
    region
}

/// Area of the polygon kernel, with slivers below `KERNEL_AREA_TOL * |P|` reported as 0.
pub fn kernel_area(pts: &[Point]) -> f64 {
    let area = signed_area(pts);
    if is_convex(pts) {
        return area;
    }
    let k = kernel(pts);
    let ka = signed_area(&k);
    if ka < KERNEL_AREA_TOL * area {
        0.0
    } else {
        ka
    }
}

/// Partitions the boundary edges (edge `i` joins vertex `i` to `i + 1`) into
/// maximal chains of consecutive collinear edges.
pub fn collinear_runs(pts: &[Point], tol: f64) -> Vec<Vec<usize>> {
    let n = pts.len();
    let straight = |v: usize| is_straight_turn(&pts[(v + n - 1) % n], &pts[v], &pts[(v + 1) % n], tol);
    let Some(start) = (0..n).find(|&v| !straight(v)) else {
        return vec![(0..n).collect()];
    };
    let mut runs: Vec<Vec<usize>> = Vec::new();
    for step in 0..n {
        let e = (start + step) % n;
        if step == 0 || !straight(e) {
            runs.push(vec![e]);
        } else {
            runs.last_mut().expect("run started").push(e);
        }
    }
    runs
}

/// Distance from `p` to the closed segment `ab`.
pub fn point_segment_distance(p: &Point, a: &Point, b: &Point) -> f64 {
    let ab = b - a;
    let l2 = ab.norm_squared();
    if l2 == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a).dot(&ab) / l2).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

fn segments_touch(p1: &Point, p2: &Point, q1: &Point, q2: &Point, tol: f64) -> bool {
    let lp = (p2 - p1).norm();
    let lq = (q2 - q1).norm();
    let d1 = orient(q1, q2, p1) / lq;
    let d2 = orient(q1, q2, p2) / lq;
    let d3 = orient(p1, p2, q1) / lp;
    let d4 = orient(p1, p2, q2) / lp;
    let proper = ((d1 > tol && d2 < -tol) || (d1 < -tol && d2 > tol))
        && ((d3 > tol && d4 < -tol) || (d3 < -tol && d4 > tol));
    proper
        || point_segment_distance(p1, q1, q2) <= tol
        || point_segment_distance(p2, q1, q2) <= tol
        || point_segment_distance(q1, p1, p2) <= tol
        || point_segment_distance(q2, p1, p2) <= tol
}

/// Checks that the loop is a simple polygon: at least three distinct
/// vertices, no fold-backs, and no contact between non-adjacent edges.
pub fn check_simple(pts: &[Point]) -> Result<(), &'static str> {
    let n = pts.len();
    if n < 3 {
        return Err("fewer than three vertices");
    }
    let diam = diameter(pts);
    if diam == 0.0 || !diam.is_finite() {
        return Err("degenerate or non-finite coordinates");
    }
    let tol = 1e-12 * diam;
    for i in 0..n {
        let a = &pts[i];
        let b = &pts[(i + 1) % n];
        if (b - a).norm() <= tol {
            return Err("coincident consecutive vertices");
        }
        let c = &pts[(i + 2) % n];
        let u = b - a;
        let v = c - b;
        if cross(&u, &v).abs() <= COLLINEAR_TOL * u.norm() * v.norm() && u.dot(&v) < 0.0 {
            return Err("boundary folds back on itself");
        }
    }
    if n == 3 {
        return Ok(());
    }
    for i in 0..n {
        let (a, b) = (&pts[i], &pts[(i + 1) % n]);
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let (c, d) = (&pts[j], &pts[(j + 1) % n]);
            if segments_touch(a, b, c, d, tol) {
                return Err("non-adjacent edges intersect");
            }
        }
    }
    Ok(())
}

/// Even-odd point-in-polygon test (boundary points are unspecified).
pub fn contains_point(pts: &[Point], p: &Point) -> bool {
    let n = pts.len();
    let mut inside = false;
    for i in 0..n {
        let a = &pts[i];
        let b = &pts[(i + 1) % n];
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if p.x < x {
                inside = !inside;
            }
        }
    }
    inside
}

fn in_triangle_closed(p: &Point, a: &Point, b: &Point, c: &Point, tol: f64) -> bool {
    let d1 = orient(a, b, p) / (b - a).norm();
    let d2 = orient(b, c, p) / (c - b).norm();
    let d3 = orient(c, a, p) / (a - c).norm();
    d1 >= -tol && d2 >= -tol && d3 >= -tol
}

/// Ear-clipping triangulation of a simple CCW polygon. Straight (hanging)
/// vertices are skipped since they do not change the covered region.
/// Returns index triples into `pts`.
pub fn triangulate(pts: &[Point]) -> Result<Vec<[usize; 3]>, String> {
    let n = pts.len();
    if n < 3 {
        return Err("fewer than three vertices".into());
    }
    let diam = diameter(pts);
    let tol = 1e-12 * diam;
    let mut idx: Vec<usize> = (0..n)
        .filter(|&i| !is_straight_turn(&pts[(i + n - 1) % n], &pts[i], &pts[(i + 1) % n], COLLINEAR_TOL))
        .collect();
    if idx.len() < 3 {
        return Err("polygon has fewer than three corners".into());
    }
    let mut tris = Vec::with_capacity(idx.len() - 2);
    while idx.len() > 3 {
        let m = idx.len();
        let mut clipped = false;
        for k in 0..m {
            let (ip, ic, inx) = (idx[(k + m - 1) % m], idx[k], idx[(k + 1) % m]);
            let (a, b, c) = (&pts[ip], &pts[ic], &pts[inx]);
            let ab = b - a;
            let bc = c - b;
            if cross(&ab, &bc) <= COLLINEAR_TOL * ab.norm() * bc.norm() {
                continue;
            }
            let blocked = idx
                .iter()
                .filter(|&&j| j != ip && j != ic && j != inx)
                .any(|&j| in_triangle_closed(&pts[j], a, b, c, tol));
            if blocked {
                continue;
            }
            tris.push([ip, ic, inx]);
            idx.remove(k);
            clipped = true;
            break;
        }
        if !clipped {
            // only zero-area corners remain ear candidates
            let m = idx.len();
            let flat = (0..m).find(|&k| {
                let (a, b, c) = (&pts[idx[(k + m - 1) % m]], &pts[idx[k]], &pts[idx[(k + 1) % m]]);
                orient(a, b, c).abs() <= COLLINEAR_TOL * (b - a).norm() * (c - b).norm()
            });
            match flat {
                Some(k) => {
                    idx.remove(k);
                }
                None => return Err("no ear found".into()),
            }
        }
    }
    let (a, b, c) = (&pts[idx[0]], &pts[idx[1]], &pts[idx[2]]);
    if orient(a, b, c) > 0.0 {
        tris.push([idx[0], idx[1], idx[2]]);
    }
    Ok(tris)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn pts(v: &[(f64, f64)]) -> Vec<Point> {
        v.iter().map(|&(x, y)| Point::new(x, y)).collect()
    }

    #[test]
    fn unit_square_geometry() {
        let p = pts(&[(0., 0.), (1., 0.), (1., 1.), (0., 1.)]);
        assert_relative_eq!(signed_area(&p), 1.0);
        let c = centroid(&p).unwrap();
        assert_relative_eq!(c.x, 0.5);
        assert_relative_eq!(c.y, 0.5);
        assert_relative_eq!(diameter(&p), 2f64.sqrt());
    }

    #[test]
    fn right_triangle_geometry() {
        let p = pts(&[(0., 0.), (1., 0.), (0., 1.)]);
        assert_relative_eq!(signed_area(&p), 0.5);
        let c = centroid(&p).unwrap();
        assert_relative_eq!(c.x, 1.0 / 3.0);
        assert_relative_eq!(c.y, 1.0 / 3.0);
        assert_relative_eq!(diameter(&p), 2f64.sqrt());
    }

    #[test]
    fn rectangle_geometry() {
        let p = pts(&[(0., 0.), (2., 0.), (2., 1.), (0., 1.)]);
        assert_relative_eq!(signed_area(&p), 2.0);
        let c = centroid(&p).unwrap();
        assert_relative_eq!(c.x, 1.0);
        assert_relative_eq!(c.y, 0.5);
        assert_relative_eq!(diameter(&p), 5f64.sqrt());
    }

    #[test]
    fn convex_kernel_is_polygon() {
        let p = pts(&[(0., 0.), (2., 0.), (3., 1.), (1., 2.), (-0.5, 1.)]);
        let k = kernel(&p);
        assert_relative_eq!(signed_area(&k), signed_area(&p), max_relative = 1e-12);
    }

    #[test]
    fn concave_quad_kernel_strictly_inside() {
        let p = pts(&[(0., 0.), (2., 0.), (2., 2.), (1., 0.5)]);
        let ka = signed_area(&kernel(&p));
        assert!(ka > 0.0 && ka < signed_area(&p));
    }

    #[test]
    fn straight_runs_with_hanging_node() {
        let p = pts(&[(0., 0.), (0.5, 0.), (1., 0.), (1., 1.), (0., 1.)]);
        let mut runs = collinear_runs(&p, COLLINEAR_TOL);
        runs.sort_by_key(|r| std::cmp::Reverse(r.len()));
        assert_eq!(runs.len(), 4);
        assert_eq!(runs[0], vec![0, 1]);
    }

    #[test]
    fn simple_check_rejects_bowtie() {
        let p = pts(&[(0., 0.), (1., 1.), (1., 0.), (0., 1.)]);
        assert!(check_simple(&p).is_err());
        let q = pts(&[(0., 0.), (1., 0.), (1., 1.), (0., 1.)]);
        assert!(check_simple(&q).is_ok());
    }

    #[test]
    fn triangulate_concave_quad() {
        let p = pts(&[(0., 0.), (2., 0.), (2., 2.), (1., 0.5)]);
        let t = triangulate(&p).unwrap();
        assert_eq!(t.len(), 2);
        for tri in &t {
            let c = Point::new(
                (p[tri[0]].x + p[tri[1]].x + p[tri[2]].x) / 3.0,
                (p[tri[0]].y + p[tri[1]].y + p[tri[2]].y) / 3.0,
            );
            assert!(contains_point(&p, &c));
        }
    }
}
