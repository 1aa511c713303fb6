//! Fractures, traces and boundary conditions of a discrete fracture network.

use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use nalgebra::{Matrix2, Point3, Vector3};

use crate::error::{Error, Result};
use crate::mesh::polygon::{self, Point};

pub type Point3d = Point3<f64>;

/// Orthonormal in-plane frame of a fracture.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub origin: Point3d,
    pub e1: Vector3<f64>,
    pub e2: Vector3<f64>,
    pub normal: Vector3<f64>,
}

impl Frame {
    pub fn to_local(&self, p: &Point3d) -> Point {
        let d = p - self.origin;
        Point::new(d.dot(&self.e1), d.dot(&self.e2))
    }

    pub fn to_global(&self, p: &Point) -> Point3d {
        self.origin + self.e1 * p.x + self.e2 * p.y
    }

    /// In-plane components of a 3D vector.
    pub fn project(&self, v: &Vector3<f64>) -> [f64; 2] {
        [v.dot(&self.e1), v.dot(&self.e2)]
    }

    pub fn signed_distance(&self, p: &Point3d) -> f64 {
        (p - self.origin).dot(&self.normal)
    }
}

#[derive(Debug, Clone)]
pub struct Fracture {
    pub vertices: Vec<Point3d>,
    pub frame: Frame,
    /// Local CCW polygon in the frame.
    pub polygon: Vec<Point>,
    pub kappa: Matrix2<f64>,
}

impl Fracture {
    /// Planar convex fracture with the frame `e1` along the first edge and the
    /// normal from Newell's formula.
    pub fn new(vertices: Vec<Point3d>, kappa: Matrix2<f64>) -> Result<Self> {
        let n = vertices.len();
        if n < 3 {
            return Err(Error::Network("a fracture needs at least three vertices".into()));
        }
        let mut normal: Vector3<f64> = Vector3::zeros();
        for i in 0..n {
            let (a, b) = (vertices[i], vertices[(i + 1) % n]);
            normal.x += (a.y - b.y) * (a.z + b.z);
            normal.y += (a.z - b.z) * (a.x + b.x);
            normal.z += (a.x - b.x) * (a.y + b.y);
        }
        let nn = normal.norm();
        let e1 = vertices[1] - vertices[0];
        if nn == 0.0 || e1.norm() == 0.0 {
            return Err(Error::Network("degenerate fracture polygon".into()));
        }
        let normal = normal / nn;
        let e1 = (e1 - normal * e1.dot(&normal)).normalize();
        let e2 = normal.cross(&e1);
        let frame = Frame { origin: vertices[0], e1, e2, normal };
        let diam = vertices
            .iter()
            .flat_map(|a| vertices.iter().map(move |b| (a - b).norm()))
            .fold(0.0, f64::max);
        for v in &vertices {
            if frame.signed_distance(v).abs() > 1e-10 * diam {
                return Err(Error::Network("fracture vertices are not coplanar".into()));
            }
        }
        let polygon: Vec<Point> = vertices.iter().map(|v| frame.to_local(v)).collect();
        if !polygon::is_convex(&polygon) || polygon::signed_area(&polygon) <= 0.0 {
            return Err(Error::Network("fracture polygon must be convex".into()));
        }
        crate::vem::element::check_spd(&kappa)?;
        Ok(Fracture { vertices, frame, polygon, kappa })
    }

    pub fn area(&self) -> f64 {
        polygon::signed_area(&self.polygon)
    }

    pub fn diameter(&self) -> f64 {
        polygon::diameter(&self.polygon)
    }
}

/// Intersection segment of exactly two fractures.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub fractures: [usize; 2],
    pub endpoints: [Point3d; 2],
}

impl Trace {
    pub fn length(&self) -> f64 {
        (self.endpoints[1] - self.endpoints[0]).norm()
    }

    /// Parameter of the orthogonal projection of `p` on the segment.
    pub fn parameter(&self, p: &Point3d) -> f64 {
        let d = self.endpoints[1] - self.endpoints[0];
        (p - self.endpoints[0]).dot(&d) / d.norm_squared()
    }

    pub fn point(&self, t: f64) -> Point3d {
        self.endpoints[0] + (self.endpoints[1] - self.endpoints[0]) * t
    }

    pub fn distance(&self, p: &Point3d) -> f64 {
        let t = self.parameter(p).clamp(0.0, 1.0);
        (p - self.point(t)).norm()
    }
}

pub type SpaceFn = Arc<dyn Fn(usize, &Point3d) -> f64 + Send + Sync>;
pub type SpaceGrad = Arc<dyn Fn(usize, &Point3d) -> Vector3<f64> + Send + Sync>;

#[derive(Clone)]
pub enum BoundaryValue {
    Constant(f64),
    /// `a x + b y + c z + d`.
    Affine([f64; 4]),
    /// Value per fracture index and 3D point.
    Function(SpaceFn),
}

impl BoundaryValue {
    pub fn eval(&self, fracture: usize, p: &Point3d) -> f64 {
        match self {
            BoundaryValue::Constant(v) => *v,
            BoundaryValue::Affine([a, b, c, d]) => a * p.x + b * p.y + c * p.z + d,
            BoundaryValue::Function(f) => f(fracture, p),
        }
    }
}

impl std::fmt::Debug for BoundaryValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BoundaryValue::Constant(v) => write!(f, "Constant({v})"),
            BoundaryValue::Affine(c) => write!(f, "Affine({c:?})"),
            BoundaryValue::Function(_) => write!(f, "Function"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryRegion {
    /// Every fracture boundary edge.
    All,
    /// Fracture boundary edges lying on the plane `a x + b y + c z = d`.
    Plane([f64; 4]),
}

#[derive(Debug, Clone)]
pub struct DirichletCondition {
    pub region: BoundaryRegion,
    pub value: BoundaryValue,
}

impl DirichletCondition {
    /// Whether a boundary segment with these endpoints belongs to the region.
    pub fn covers(&self, a: &Point3d, b: &Point3d, tol: f64) -> bool {
        match self.region {
            BoundaryRegion::All => true,
            BoundaryRegion::Plane([pa, pb, pc, pd]) => {
                let n = (pa * pa + pb * pb + pc * pc).sqrt();
                let dist = |p: &Point3d| (pa * p.x + pb * p.y + pc * p.z - pd).abs() / n;
                dist(a) <= tol && dist(b) <= tol
            }
        }
    }
}

/// Known exact solution with its 3D gradient, per fracture.
#[derive(Clone)]
pub struct ExactSolution {
    pub u: SpaceFn,
    pub grad: SpaceGrad,
}

#[derive(Clone)]
pub struct FractureNetwork {
    pub fractures: Vec<Fracture>,
    pub traces: Vec<Trace>,
    pub dirichlet: Vec<DirichletCondition>,
    /// Source term per fracture; zero when absent.
    pub source: Option<SpaceFn>,
    pub exact: Option<ExactSolution>,
}

impl std::fmt::Debug for FractureNetwork {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FractureNetwork")
            .field("fractures", &self.fractures.len())
            .field("traces", &self.traces)
            .field("dirichlet", &self.dirichlet)
            .finish()
    }
}

impl FractureNetwork {
    /// Network with traces computed from the fracture geometry.
    pub fn new(fractures: Vec<Fracture>, dirichlet: Vec<DirichletCondition>) -> Result<Self> {
        let traces = compute_traces(&fractures)?;
        let net = FractureNetwork { fractures, traces, dirichlet, source: None, exact: None };
        net.validate()?;
        Ok(net)
    }

    pub fn with_traces(fractures: Vec<Fracture>, traces: Vec<Trace>, dirichlet: Vec<DirichletCondition>) -> Result<Self> {
        let net = FractureNetwork { fractures, traces, dirichlet, source: None, exact: None };
        net.validate()?;
        Ok(net)
    }

    /// Diagonal of the bounding box of all fracture vertices.
    pub fn bbox_diagonal(&self) -> f64 {
        let mut lo = Vector3::repeat(f64::INFINITY);
        let mut hi = Vector3::repeat(f64::NEG_INFINITY);
        for f in &self.fractures {
            for v in &f.vertices {
                lo = lo.inf(&v.coords);
                hi = hi.sup(&v.coords);
            }
        }
        (hi - lo).norm()
    }

    pub fn tolerance(&self) -> f64 {
        1e-9 * self.bbox_diagonal()
    }

    pub fn traces_of(&self, fracture: usize) -> Vec<usize> {
        (0..self.traces.len()).filter(|&t| self.traces[t].fractures.contains(&fracture)).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.fractures.is_empty() {
            return Err(Error::Network("no fractures".into()));
        }
        if self.dirichlet.is_empty() {
            return Err(Error::MissingBoundary);
        }
        let tol = self.tolerance();
        for (m, t) in self.traces.iter().enumerate() {
            let [i, j] = t.fractures;
            if i == j || i >= self.fractures.len() || j >= self.fractures.len() {
                return Err(Error::Network(format!("trace {m} must join two distinct fractures")));
            }
            if t.length() <= tol {
                return Err(Error::Network(format!("trace {m} has zero length")));
            }
            for &f in &t.fractures {
                let fr = &self.fractures[f];
                for p in &t.endpoints {
                    let q = fr.frame.to_local(p);
                    let inside = fr.frame.signed_distance(p).abs() <= tol
                        && (polygon::contains_point(&fr.polygon, &q) || on_boundary(&fr.polygon, &q, tol));
                    if !inside {
                        return Err(Error::TraceOutsideFracture { fracture: f, trace: m });
                    }
                }
            }
        }
        // a segment shared by three fractures shows up as two overlapping collinear traces
        for a in 0..self.traces.len() {
            for b in a + 1..self.traces.len() {
                let (ta, tb) = (&self.traces[a], &self.traces[b]);
                let line_dist = |p: &Point3d| {
                    let d = (ta.endpoints[1] - ta.endpoints[0]).normalize();
                    let r = p - ta.endpoints[0];
                    (r - d * r.dot(&d)).norm()
                };
                if line_dist(&tb.endpoints[0]) > tol || line_dist(&tb.endpoints[1]) > tol {
                    continue;
                }
                let (s0, s1) = (ta.parameter(&tb.endpoints[0]), ta.parameter(&tb.endpoints[1]));
                let overlap = s0.max(s1).min(1.0) - s0.min(s1).max(0.0);
                if overlap * ta.length() > tol {
                    return Err(Error::Network(format!(
                        "traces {a} and {b} overlap: a trace must join exactly two fractures"
                    )));
                }
            }
        }
        if self.fractures.len() > 1 {
            for f in 0..self.fractures.len() {
                if self.traces_of(f).is_empty() {
                    return Err(Error::Network(format!("fracture {f} intersects no other fracture")));
                }
            }
        }
        Ok(())
    }
}

fn on_boundary(poly: &[Point], p: &Point, tol: f64) -> bool {
    let n = poly.len();
    (0..n).any(|i| polygon::point_segment_distance(p, &poly[i], &poly[(i + 1) % n]) <= tol)
}

/// Intersection of a convex fracture with the plane of another one, as a
/// segment (or `None`).
fn plane_section(f: &Fracture, plane: &Frame, tol: f64) -> Option<[Point3d; 2]> {
    let d: Vec<f64> = f
        .vertices
        .iter()
        .map(|v| {
            let s = plane.signed_distance(v);
            if s.abs() <= tol {
                0.0
            } else {
                s
            }
        })
        .collect();
    let n = d.len();
    let mut pts: Vec<Point3d> = Vec::new();
    for i in 0..n {
        let j = (i + 1) % n;
        if d[i] == 0.0 {
            pts.push(f.vertices[i]);
        } else if d[i] * d[j] < 0.0 {
            let t = d[i] / (d[i] - d[j]);
            pts.push(f.vertices[i] + (f.vertices[j] - f.vertices[i]) * t);
        }
    }
    if pts.len() < 2 {
        return None;
    }
    // farthest pair (a convex section is a segment)
    let mut best = (0, 1, -1.0);
    for a in 0..pts.len() {
        for b in a + 1..pts.len() {
            let l = (pts[a] - pts[b]).norm();
            if l > best.2 {
                best = (a, b, l);
            }
        }
    }
    Some([pts[best.0], pts[best.1]])
}

/// Clips the segment `a b` (in the fracture's local frame) to its convex polygon.
fn clip_segment(poly: &[Point], a: Point, b: Point, tol: f64) -> Option<(f64, f64)> {
    let (mut t0, mut t1) = (0.0f64, 1.0f64);
    let d = b - a;
    let n = poly.len();
    for i in 0..n {
        let (p, q) = (poly[i], poly[(i + 1) % n]);
        let e = q - p;
        let len = e.norm();
        // inside is to the left: cross(e, x - p) >= 0
        let num = polygon::cross(&e, &(a - p)) / len;
        let den = polygon::cross(&e, &d) / len;
        if den.abs() <= tol * 1e-3 {
            if num < -tol {
                return None;
            }
            continue;
        }
        let t = -num / den;
        if den > 0.0 {
            t0 = t0.max(t);
        } else {
            t1 = t1.min(t);
        }
    }
    (t1 > t0).then_some((t0, t1))
}

/// Pairwise fracture intersections with positive length.
pub fn compute_traces(fractures: &[Fracture]) -> Result<Vec<Trace>> {
    let diag = {
        let mut lo = Vector3::repeat(f64::INFINITY);
        let mut hi = Vector3::repeat(f64::NEG_INFINITY);
        for f in fractures {
            for v in &f.vertices {
                lo = lo.inf(&v.coords);
                hi = hi.sup(&v.coords);
            }
        }
        (hi - lo).norm()
    };
    let tol = 1e-9 * diag;
    let mut traces = Vec::new();
    for i in 0..fractures.len() {
        for j in i + 1..fractures.len() {
            let (fi, fj) = (&fractures[i], &fractures[j]);
            if fi.vertices.iter().all(|v| fj.frame.signed_distance(v).abs() <= tol) {
                let pj: Vec<Point> = fj.vertices.iter().map(|v| fi.frame.to_local(v)).collect();
                let pj = if polygon::signed_area(&pj) < 0.0 { pj.into_iter().rev().collect() } else { pj };
                let mut clipped = pj;
                let n = fi.polygon.len();
                for k in 0..n {
                    clipped = polygon::clip_left(&clipped, &fi.polygon[k], &fi.polygon[(k + 1) % n], 0.0);
                }
                if clipped.len() >= 3 && polygon::signed_area(&clipped) > tol * tol {
                    return Err(Error::CoplanarFractures(i, j));
                }
                continue;
            }
            let Some([a, b]) = plane_section(fi, &fj.frame, tol) else { continue };
            // the section of fi lies in fj's plane; clip it against both polygons
            let Some((s0, s1)) = clip_segment(&fj.polygon, fj.frame.to_local(&a), fj.frame.to_local(&b), tol) else {
                continue;
            };
            let Some((r0, r1)) = clip_segment(&fi.polygon, fi.frame.to_local(&a), fi.frame.to_local(&b), tol) else {
                continue;
            };
            let (t0, t1) = (s0.max(r0), s1.min(r1));
            if t1 <= t0 {
                continue;
            }
            let p0 = a + (b - a) * t0;
            let p1 = a + (b - a) * t1;
            if (p1 - p0).norm() > tol {
                traces.push(Trace { fractures: [i, j], endpoints: [p0, p1] });
            }
        }
    }
    Ok(traces)
}

fn parse_f64(tok: &str, line: usize) -> Result<f64> {
    tok.parse().map_err(|_| Error::Parse { line, message: format!("expected a number, found {tok:?}") })
}

fn parse_value(toks: &[&str], line: usize) -> Result<BoundaryValue> {
    match toks {
        [v] => Ok(BoundaryValue::Constant(parse_f64(v, line)?)),
        ["affine", a, b, c, d] => Ok(BoundaryValue::Affine([
            parse_f64(a, line)?,
            parse_f64(b, line)?,
            parse_f64(c, line)?,
            parse_f64(d, line)?,
        ])),
        _ => Err(Error::Parse { line, message: "expected <value> or affine a b c d".into() }),
    }
}

/// Parses the DFN text format:
///
/// ```text
/// F 4                  # fracture with 4 vertices, one `x y z` per line
/// 0 0 0
/// ...
/// K 1 0 1              # optional transmissivity kxx kxy kyy of the last fracture
/// T 0 1 x0 y0 z0 x1 y1 z1          # optional explicit trace
/// BC dirichlet all 1.0
/// BC dirichlet plane a b c d affine p q r s
/// ```
///
/// Traces are computed from the geometry when no `T` line is present.
pub fn parse_network(text: &str) -> Result<FractureNetwork> {
    let lines: Vec<(usize, Vec<&str>)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").split_whitespace().collect::<Vec<_>>()))
        .filter(|(_, t)| !t.is_empty())
        .collect();
    let mut raw: Vec<(Vec<Point3d>, Matrix2<f64>)> = Vec::new();
    let mut traces = Vec::new();
    let mut bcs = Vec::new();
    let mut i = 0;
    while i < lines.len() {
        let (ln, toks) = &lines[i];
        let ln = *ln;
        match toks[0] {
            "F" => {
                let n: usize = toks
                    .get(1)
                    .and_then(|s| s.parse().ok())
                    .ok_or(Error::Parse { line: ln, message: "expected F <count>".into() })?;
                let mut verts = Vec::with_capacity(n);
                for k in 0..n {
                    let (vl, vt) = lines
                        .get(i + 1 + k)
                        .ok_or(Error::Parse { line: ln, message: format!("fracture needs {n} vertices") })?;
                    if vt.len() != 3 {
                        return Err(Error::Parse { line: *vl, message: "expected x y z".into() });
                    }
                    verts.push(Point3d::new(parse_f64(vt[0], *vl)?, parse_f64(vt[1], *vl)?, parse_f64(vt[2], *vl)?));
                }
                raw.push((verts, Matrix2::identity()));
                i += n + 1;
                continue;
            }
            "K" => {
                let last = raw.last_mut().ok_or(Error::Parse { line: ln, message: "K before any fracture".into() })?;
                if toks.len() != 4 {
                    return Err(Error::Parse { line: ln, message: "expected K kxx kxy kyy".into() });
                }
                let (a, b, c) = (parse_f64(toks[1], ln)?, parse_f64(toks[2], ln)?, parse_f64(toks[3], ln)?);
                last.1 = Matrix2::new(a, b, b, c);
            }
            "T" => {
                if toks.len() != 9 {
                    return Err(Error::Parse { line: ln, message: "expected T fi fj x0 y0 z0 x1 y1 z1".into() });
                }
                let fi: usize = toks[1].parse().map_err(|_| Error::Parse { line: ln, message: "bad fracture index".into() })?;
                let fj: usize = toks[2].parse().map_err(|_| Error::Parse { line: ln, message: "bad fracture index".into() })?;
                let c: Vec<f64> = toks[3..].iter().map(|t| parse_f64(t, ln)).collect::<Result<_>>()?;
                traces.push(Trace {
                    fractures: [fi, fj],
                    endpoints: [Point3d::new(c[0], c[1], c[2]), Point3d::new(c[3], c[4], c[5])],
                });
            }
            "BC" => {
                if toks.get(1) != Some(&"dirichlet") {
                    return Err(Error::Parse { line: ln, message: "only dirichlet conditions are supported".into() });
                }
                let (region, rest) = match toks.get(2) {
                    Some(&"all") => (BoundaryRegion::All, &toks[3..]),
                    Some(&"plane") if toks.len() >= 8 => {
                        let p = [
                            parse_f64(toks[3], ln)?,
                            parse_f64(toks[4], ln)?,
                            parse_f64(toks[5], ln)?,
                            parse_f64(toks[6], ln)?,
                        ];
                        (BoundaryRegion::Plane(p), &toks[7..])
                    }
                    _ => return Err(Error::Parse { line: ln, message: "expected BC dirichlet all|plane a b c d <value>".into() }),
                };
                bcs.push(DirichletCondition { region, value: parse_value(rest, ln)? });
            }
            other => return Err(Error::Parse { line: ln, message: format!("unknown record {other:?}") }),
        }
        i += 1;
    }
    if raw.is_empty() {
        return Err(Error::Parse { line: 0, message: "no fractures".into() });
    }
    let fractures = raw.into_iter().map(|(v, k)| Fracture::new(v, k)).collect::<Result<Vec<_>>>()?;
    if traces.is_empty() {
        FractureNetwork::new(fractures, bcs)
    } else {
        FractureNetwork::with_traces(fractures, traces, bcs)
    }
}

pub fn read_network(path: impl AsRef<Path>) -> Result<FractureNetwork> {
    parse_network(&std::fs::read_to_string(path)?)
}

/// Writes fractures, traces and constant/affine conditions in the text format.
pub fn format_network(net: &FractureNetwork) -> String {
    let mut s = String::new();
    for f in &net.fractures {
        let _ = writeln!(s, "F {}", f.vertices.len());
        for v in &f.vertices {
            let _ = writeln!(s, "{:?} {:?} {:?}", v.x, v.y, v.z);
        }
        if f.kappa != Matrix2::identity() {
            let _ = writeln!(s, "K {:?} {:?} {:?}", f.kappa[(0, 0)], f.kappa[(0, 1)], f.kappa[(1, 1)]);
        }
    }
    for t in &net.traces {
        let [a, b] = t.endpoints;
        let _ = writeln!(
            s,
            "T {} {} {:?} {:?} {:?} {:?} {:?} {:?}",
            t.fractures[0], t.fractures[1], a.x, a.y, a.z, b.x, b.y, b.z
        );
    }
    for bc in &net.dirichlet {
        let region = match bc.region {
            BoundaryRegion::All => "all".to_string(),
            BoundaryRegion::Plane([a, b, c, d]) => format!("plane {a:?} {b:?} {c:?} {d:?}"),
        };
        let value = match &bc.value {
            BoundaryValue::Constant(v) => format!("{v:?}"),
            BoundaryValue::Affine([a, b, c, d]) => format!("affine {a:?} {b:?} {c:?} {d:?}"),
            BoundaryValue::Function(_) => continue,
        };
        let _ = writeln!(s, "BC dirichlet {region} {value}");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rect_xy(x0: f64, x1: f64, y0: f64, y1: f64, z: f64) -> Fracture {
        let v = vec![
            Point3d::new(x0, y0, z),
            Point3d::new(x1, y0, z),
            Point3d::new(x1, y1, z),
            Point3d::new(x0, y1, z),
        ];
        Fracture::new(v, Matrix2::identity()).unwrap()
    }

    fn rect_xz(x0: f64, x1: f64, z0: f64, z1: f64, y: f64) -> Fracture {
        let v = vec![
            Point3d::new(x0, y, z0),
            Point3d::new(x1, y, z0),
            Point3d::new(x1, y, z1),
            Point3d::new(x0, y, z1),
        ];
        Fracture::new(v, Matrix2::identity()).unwrap()
    }

    #[test]
    fn frame_round_trip() {
        let f = rect_xz(-1.0, 0.0, -1.0, 1.0, 0.0);
        for v in &f.vertices {
            let back = f.frame.to_global(&f.frame.to_local(v));
            assert!((back - v).norm() < 1e-14);
        }
        assert!((f.area() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn perpendicular_rectangles_meet_on_a_segment() {
        let a = rect_xy(-1.0, 0.5, -1.0, 1.0, 0.0);
        let b = rect_xz(-1.0, 0.0, -1.0, 1.0, 0.0);
        let t = compute_traces(&[a, b]).unwrap();
        assert_eq!(t.len(), 1);
        let mut xs = [t[0].endpoints[0].x, t[0].endpoints[1].x];
        xs.sort_by(f64::total_cmp);
        assert!((xs[0] + 1.0).abs() < 1e-12 && xs[1].abs() < 1e-12);
        for p in &t[0].endpoints {
            assert!(p.y.abs() < 1e-14 && p.z.abs() < 1e-14);
        }
    }

    #[test]
    fn parallel_planes_do_not_meet() {
        let a = rect_xy(0.0, 1.0, 0.0, 1.0, 0.0);
        let b = rect_xy(0.0, 1.0, 0.0, 1.0, 1.0);
        assert!(compute_traces(&[a, b]).unwrap().is_empty());
    }

    #[test]
    fn coplanar_overlap_is_rejected() {
        let a = rect_xy(0.0, 1.0, 0.0, 1.0, 0.0);
        let b = rect_xy(0.5, 1.5, 0.0, 1.0, 0.0);
        assert!(matches!(compute_traces(&[a, b]), Err(Error::CoplanarFractures(0, 1))));
        let c = rect_xy(2.0, 3.0, 0.0, 1.0, 0.0);
        let a = rect_xy(0.0, 1.0, 0.0, 1.0, 0.0);
        assert!(compute_traces(&[a, c]).unwrap().is_empty());
    }

    #[test]
    fn non_planar_fracture_is_rejected() {
        let v = vec![
            Point3d::new(0., 0., 0.),
            Point3d::new(1., 0., 0.),
            Point3d::new(1., 1., 0.1),
            Point3d::new(0., 1., 0.),
        ];
        assert!(Fracture::new(v, Matrix2::identity()).is_err());
    }

    #[test]
    fn text_round_trip() {
        let text = "F 4\n-1 -1 0\n0.5 -1 0\n0.5 1 0\n-1 1 0\nF 4\n-1 0 -1\n0 0 -1\n0 0 1\n-1 0 1\nK 2 0 1\nBC dirichlet all 1.5\n";
        let net = parse_network(text).unwrap();
        assert_eq!(net.traces.len(), 1);
        assert_eq!(net.fractures[1].kappa, Matrix2::new(2.0, 0.0, 0.0, 1.0));
        let again = parse_network(&format_network(&net)).unwrap();
        assert_eq!(again.traces, net.traces);
        assert!(matches!(parse_network("F 3\n0 0 0\n1 0 0\n"), Err(Error::Parse { .. })));
        assert!(matches!(parse_network("F 3\n0 0 0\n1 0 0\n0 1 0\nQ\n"), Err(Error::Parse { line: 5, .. })));
    }

    #[test]
    fn isolated_fracture_is_rejected() {
        let a = rect_xy(0.0, 1.0, 0.0, 1.0, 0.0);
        let b = rect_xy(0.0, 1.0, 0.0, 1.0, 1.0);
        let bc = vec![DirichletCondition { region: BoundaryRegion::All, value: BoundaryValue::Constant(0.0) }];
        assert!(matches!(FractureNetwork::new(vec![a, b], bc), Err(Error::Network(_))));
    }

    #[test]
    fn explicit_trace_outside_is_rejected() {
        let a = rect_xy(-1.0, 0.5, -1.0, 1.0, 0.0);
        let b = rect_xz(-1.0, 0.0, -1.0, 1.0, 0.0);
        let t = Trace { fractures: [0, 1], endpoints: [Point3d::new(-1.0, 0.0, 0.0), Point3d::new(0.4, 0.0, 0.0)] };
        let bc = vec![DirichletCondition { region: BoundaryRegion::All, value: BoundaryValue::Constant(0.0) }];
        assert!(matches!(
            FractureNetwork::with_traces(vec![a, b], vec![t], bc),
            Err(Error::TraceOutsideFracture { fracture: 1, trace: 0 })
        ));
    }
}
