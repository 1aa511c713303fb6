//! Generators and independent oracles shared by the integration tests.
#![allow(dead_code)]

use polyagg::agglomerate::CostModel;
use polyagg::mesh::polygon::{orient, signed_area};
use polyagg::mesh::{build_mesh, rect_grid, tri_grid, Point, PolygonalMesh, Vertex};
use rand::Rng;

fn segments_cross(a: &Point, b: &Point, c: &Point, d: &Point) -> bool {
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);
    o1 * o2 < 0.0 && o3 * o4 < 0.0
}

/// Random simple CCW polygon with `n` vertices: random points untangled by
/// 2-opt moves. Often not star-shaped.
pub fn random_simple_polygon(rng: &mut impl Rng, n: usize) -> Vec<Point> {
    loop {
        let mut p: Vec<Point> = (0..n).map(|_| Point::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let mut changed = true;
        let mut guard = 0;
        while changed && guard < 10_000 {
            changed = false;
            guard += 1;
            'outer: for i in 0..n {
                for j in i + 2..n {
                    if i == 0 && j == n - 1 {
                        continue;
                    }
                    if segments_cross(&p[i], &p[i + 1], &p[j], &p[(j + 1) % n]) {
                        p[i + 1..=j].reverse();
                        changed = true;
                        break 'outer;
                    }
                }
            }
        }
        if changed || !is_simple(&p) || signed_area(&p).abs() < 1e-3 {
            continue;
        }
        if signed_area(&p) < 0.0 {
            p.reverse();
        }
        return p;
    }
}

/// Random polygon star-shaped about the origin: jittered equal angles, random radii.
pub fn random_star_polygon(rng: &mut impl Rng, n: usize) -> Vec<Point> {
    let step = std::f64::consts::TAU / n as f64;
    (0..n)
        .map(|i| {
            let a = step * (i as f64 + rng.gen_range(-0.4..0.4));
            let r = rng.gen_range(0.2..1.0);
            Point::new(r * a.cos(), r * a.sin())
        })
        .collect()
}

pub fn is_simple(p: &[Point]) -> bool {
    let n = p.len();
    for i in 0..n {
        for j in i + 1..n {
            if j == i + 1 || (i == 0 && j == n - 1) {
                continue;
            }
            if segments_cross(&p[i], &p[(i + 1) % n], &p[j], &p[(j + 1) % n]) {
                return false;
            }
        }
    }
    true
}

/// Even-odd point-in-polygon test.
pub fn inside(poly: &[Point], q: &Point) -> bool {
    let n = poly.len();
    let mut c = false;
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        if (a.y > q.y) != (b.y > q.y) && q.x < (b.x - a.x) * (q.y - a.y) / (b.y - a.y) + a.x {
            c = !c;
        }
    }
    c
}

/// Whether interior point `q` sees every vertex: no boundary edge properly
/// crosses a sight line. For a simple polygon this is kernel membership.
pub fn sees_all_vertices(poly: &[Point], q: &Point) -> bool {
    let n = poly.len();
    (0..n).all(|v| {
        (0..n).all(|e| {
            let (a, b) = (poly[e], poly[(e + 1) % n]);
            e == v || (e + 1) % n == v || !segments_cross(q, &poly[v], &a, &b)
        })
    })
}

/// Dense-sampling visibility oracle: some sample point sees every vertex.
pub fn sampled_kernel_nonempty(poly: &[Point], samples: usize) -> bool {
    let (lo, hi) = polyagg::mesh::polygon::bounding_box(poly);
    for i in 0..samples {
        for j in 0..samples {
            let q = Point::new(
                lo.x + (hi.x - lo.x) * (i as f64 + 0.5) / samples as f64,
                lo.y + (hi.y - lo.y) * (j as f64 + 0.5) / samples as f64,
            );
            if inside(poly, &q) && sees_all_vertices(poly, &q) {
                return true;
            }
        }
    }
    false
}

/// Rotates by `theta`, scales by `s` and translates by `t`.
pub fn transform(poly: &[Point], theta: f64, s: f64, t: (f64, f64)) -> Vec<Point> {
    let (c, si) = (theta.cos(), theta.sin());
    poly.iter().map(|p| Point::new(s * (c * p.x - si * p.y) + t.0, s * (si * p.x + c * p.y) + t.1)).collect()
}

/// A structured mesh with every vertex moved by up to `amp` times the grid step,
/// redrawn until all cells stay valid.
pub fn jittered(rng: &mut impl Rng, nx: usize, ny: usize, triangles: bool, amp: f64) -> PolygonalMesh {
    let base = if triangles { tri_grid(nx, ny, 0.0, 1.0, 0.0, 1.0) } else { rect_grid(nx, ny, 0.0, 1.0, 0.0, 1.0) };
    let h = 1.0 / nx.max(ny) as f64;
    loop {
        let vertices: Vec<Vertex> = base
            .vertices
            .iter()
            .map(|v| Vertex {
                position: Point::new(
                    v.position.x + amp * h * rng.gen_range(-1.0..1.0),
                    v.position.y + amp * h * rng.gen_range(-1.0..1.0),
                ),
                constrained: false,
            })
            .collect();
        let loops = base.cell_loops();
        if let Ok(m) = build_mesh(vertices, loops, &[]) {
            return m;
        }
    }
}

/// Jittered grid keeping the boundary on the unit square.
pub fn distorted_square(rng: &mut impl Rng, nx: usize, triangles: bool, amp: f64) -> PolygonalMesh {
    let base = if triangles { tri_grid(nx, nx, 0.0, 1.0, 0.0, 1.0) } else { rect_grid(nx, nx, 0.0, 1.0, 0.0, 1.0) };
    let h = 1.0 / nx as f64;
    let vertices: Vec<Vertex> = base
        .vertices
        .iter()
        .map(|v| {
            let p = v.position;
            let on = |c: f64| c.abs() < 1e-12 || (c - 1.0).abs() < 1e-12;
            let dx = if on(p.x) { 0.0 } else { amp * h * rng.gen_range(-1.0..1.0) };
            let dy = if on(p.y) { 0.0 } else { amp * h * rng.gen_range(-1.0..1.0) };
            Vertex { position: Point::new(p.x + dx, p.y + dy), constrained: false }
        })
        .collect();
    build_mesh(vertices, base.cell_loops(), &[]).expect("small jitter keeps cells valid")
}

/// Minimum energy over every reassignment of the cells labeled `alpha` or
/// `beta` to one of the two labels, by exhaustive enumeration.
pub fn brute_force_swap(costs: &CostModel<'_>, labeling: &[usize], alpha: usize, beta: usize) -> i64 {
    let nodes: Vec<usize> = (0..labeling.len()).filter(|&p| labeling[p] == alpha || labeling[p] == beta).collect();
    let mut best = i64::MAX;
    let mut trial = labeling.to_vec();
    for mask in 0u32..(1 << nodes.len()) {
        for (i, &p) in nodes.iter().enumerate() {
            trial[p] = if mask >> i & 1 == 1 { alpha } else { beta };
        }
        best = best.min(costs.energy(&trial).total);
    }
    best
}
