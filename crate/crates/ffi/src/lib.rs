//! C ABI for polyagg.
//!
//! Every fallible function returns a [`PolyaggStatus`]; on failure a message
//! is available from [`polyagg_last_error`] on the same thread. Handles are
//! opaque and must be released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use polyagg::agglomerate::{agglomerate, AgglomerationConfig, ScMode};
use polyagg::dfn::{network1, solve_network, DfnConfig, FractureNetwork, MeshTarget};
use polyagg::mesh::{build_mesh, read_mesh, write_mesh, Point, PolygonalMesh, Vertex};
use polyagg::quality;
use polyagg::vem::problems::by_name;
use polyagg::vem::{error_norms, solve_poisson, SolveOptions};
use polyagg::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolyaggStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    Io = 4,
    Numerical = 5,
    Panic = 6,
}

/// Opaque polygonal mesh.
pub struct PolyaggMesh(PolygonalMesh);

/// Opaque fracture network.
pub struct PolyaggNetwork(FractureNetwork);

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct PolyaggQuality {
    pub rho1: f64,
    pub rho2: f64,
    pub rho3: f64,
    pub rho4: f64,
    pub rho: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct PolyaggAgglomerationStats {
    pub cells_before: usize,
    pub cells_after: usize,
    pub energy_before: i64,
    pub energy_after: i64,
    pub cycles: usize,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct PolyaggSolveReport {
    pub cells: usize,
    pub dofs: usize,
    pub nnz: usize,
    pub err_l2: f64,
    pub err_h1: f64,
    /// NaN when no exact solution is known.
    pub rel_h1: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let s = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(s));
}

fn status_of(e: &Error) -> PolyaggStatus {
    match e {
        Error::Parse { .. } => PolyaggStatus::Parse,
        Error::Io(_) => PolyaggStatus::Io,
        _ if e.exit_code() == 3 => PolyaggStatus::Numerical,
        _ => PolyaggStatus::InvalidArgument,
    }
}

/// Runs `f`, recording errors and turning panics into a status.
fn guard(f: impl FnOnce() -> Result<(), (PolyaggStatus, String)>) -> PolyaggStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            PolyaggStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            PolyaggStatus::Panic
        }
    }
}

fn lib_err(e: Error) -> (PolyaggStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (PolyaggStatus, String) {
    (PolyaggStatus::NullPointer, format!("{what} is null"))
}

fn invalid(msg: impl Into<String>) -> (PolyaggStatus, String) {
    (PolyaggStatus::InvalidArgument, msg.into())
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, (PolyaggStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| invalid(format!("{what} is not valid UTF-8")))
}

unsafe fn slice<'a, T>(p: *const T, n: usize, what: &str) -> Result<&'a [T], (PolyaggStatus, String)> {
    if n == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, n))
}

fn sc_mode(mode: u32) -> Result<ScMode, (PolyaggStatus, String)> {
    match mode {
        0 => Ok(ScMode::Potts),
        1 => Ok(ScMode::Literal),
        m => Err(invalid(format!("unknown smoothness mode {m} (0 = potts, 1 = literal)"))),
    }
}

/// Message of the last failed call on this thread, or null. Valid until the next call.
#[no_mangle]
pub extern "C" fn polyagg_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Quality scores of one polygon given by `n` counter-clockwise vertices.
///
/// # Safety
/// `xs` and `ys` point to `n` readable doubles; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn polyagg_polygon_quality(
    xs: *const f64,
    ys: *const f64,
    n: usize,
    out: *mut PolyaggQuality,
) -> PolyaggStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if n < 3 {
            return Err(invalid("a polygon needs at least three vertices"));
        }
        let (xs, ys) = (slice(xs, n, "xs")?, slice(ys, n, "ys")?);
        let pts: Vec<Point> = xs.iter().zip(ys).map(|(&x, &y)| Point::new(x, y)).collect();
        let s = quality::scores(&pts);
        *out = PolyaggQuality { rho1: s.rho1, rho2: s.rho2, rho3: s.rho3, rho4: s.rho4, rho: s.rho };
        Ok(())
    })
}

/// Builds a mesh from vertex coordinates and cells in CSR form: cell `c`
/// has vertices `cell_vertices[cell_offsets[c] .. cell_offsets[c + 1]]`.
///
/// # Safety
/// `xs`, `ys` hold `num_vertices` doubles, `cell_offsets` holds `num_cells + 1`
/// entries and `cell_vertices` holds `cell_offsets[num_cells]` entries; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn polyagg_mesh_new(
    xs: *const f64,
    ys: *const f64,
    num_vertices: usize,
    cell_offsets: *const usize,
    cell_vertices: *const usize,
    num_cells: usize,
    out: *mut *mut PolyaggMesh,
) -> PolyaggStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let (xs, ys) = (slice(xs, num_vertices, "xs")?, slice(ys, num_vertices, "ys")?);
        let offsets = slice(cell_offsets, num_cells + 1, "cell_offsets")?;
        if offsets.windows(2).any(|w| w[1] < w[0]) {
            return Err(invalid("cell_offsets must be non-decreasing"));
        }
        let total = offsets.last().copied().unwrap_or(0);
        let idx = slice(cell_vertices, total, "cell_vertices")?;
        let vertices = xs.iter().zip(ys).map(|(&x, &y)| Vertex { position: Point::new(x, y), constrained: false }).collect();
        let loops = offsets.windows(2).map(|w| idx[w[0]..w[1]].to_vec()).collect();
        let mesh = build_mesh(vertices, loops, &[]).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(PolyaggMesh(mesh)));
        Ok(())
    })
}

/// Reads a mesh in the polyagg text format.
///
/// # Safety
/// `path` is a NUL-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn polyagg_mesh_read(path: *const c_char, out: *mut *mut PolyaggMesh) -> PolyaggStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let mesh = read_mesh(str_arg(path, "path")?).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(PolyaggMesh(mesh)));
        Ok(())
    })
}

/// # Safety
/// `mesh` is a live handle; `path` is a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn polyagg_mesh_write(mesh: *const PolyaggMesh, path: *const c_char) -> PolyaggStatus {
    guard(|| {
        let mesh = mesh.as_ref().ok_or_else(|| null("mesh"))?;
        write_mesh(&mesh.0, str_arg(path, "path")?).map_err(lib_err)
    })
}

/// # Safety
/// `mesh` is null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn polyagg_mesh_free(mesh: *mut PolyaggMesh) {
    if !mesh.is_null() {
        drop(Box::from_raw(mesh));
    }
}

/// Number of cells, 0 for a null handle.
///
/// # Safety
/// `mesh` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn polyagg_mesh_num_cells(mesh: *const PolyaggMesh) -> usize {
    mesh.as_ref().map_or(0, |m| m.0.num_cells())
}

/// # Safety
/// `mesh` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn polyagg_mesh_num_vertices(mesh: *const PolyaggMesh) -> usize {
    mesh.as_ref().map_or(0, |m| m.0.num_vertices())
}

/// Writes the combined score of every cell into `out` (length `len` ≥ cells).
///
/// # Safety
/// `mesh` is a live handle; `out` points to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn polyagg_mesh_quality(mesh: *const PolyaggMesh, out: *mut f64, len: usize) -> PolyaggStatus {
    guard(|| {
        let mesh = mesh.as_ref().ok_or_else(|| null("mesh"))?;
        let n = mesh.0.num_cells();
        if len < n {
            return Err(invalid(format!("buffer holds {len} values, mesh has {n} cells")));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let dst = std::slice::from_raw_parts_mut(out, n);
        for (c, d) in dst.iter_mut().enumerate() {
            *d = quality::cell_scores(&mesh.0, c).rho;
        }
        Ok(())
    })
}

/// Agglomerates `mesh` into a new handle. `sc_mode` is 0 for potts, 1 for literal.
///
/// # Safety
/// `mesh` is a live handle; `out` is writable; `stats` is null or writable.
#[no_mangle]
pub unsafe extern "C" fn polyagg_mesh_agglomerate(
    mesh: *const PolyaggMesh,
    lambda: f64,
    sc_mode_id: u32,
    max_cycles: usize,
    out: *mut *mut PolyaggMesh,
    stats: *mut PolyaggAgglomerationStats,
) -> PolyaggStatus {
    guard(|| {
        let mesh = mesh.as_ref().ok_or_else(|| null("mesh"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let cfg = AgglomerationConfig { lambda, sc_mode: sc_mode(sc_mode_id)?, max_cycles, cost_scale: None };
        let res = agglomerate(&mesh.0, &cfg).map_err(lib_err)?;
        if let Some(s) = stats.as_mut() {
            *s = PolyaggAgglomerationStats {
                cells_before: res.stats.cells_before,
                cells_after: res.stats.cells_after,
                energy_before: res.stats.energy_before,
                energy_after: res.stats.energy_after,
                cycles: res.stats.cycles,
            };
        }
        *out = Box::into_raw(Box::new(PolyaggMesh(res.mesh)));
        Ok(())
    })
}

/// Solves `-Δu = f` for a built-in manufactured solution (`linear`,
/// `quadratic`, `cubic`, `sin`) with Dirichlet data on the whole boundary.
///
/// # Safety
/// `mesh` is a live handle; `solution` is a NUL-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn polyagg_mesh_solve(
    mesh: *const PolyaggMesh,
    k: u32,
    solution: *const c_char,
    out: *mut PolyaggSolveReport,
) -> PolyaggStatus {
    guard(|| {
        let mesh = mesh.as_ref().ok_or_else(|| null("mesh"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        if !(1..=3).contains(&k) {
            return Err(invalid(format!("order must be 1, 2 or 3, got {k}")));
        }
        let name = str_arg(solution, "solution")?;
        let sol = by_name(name).ok_or_else(|| invalid(format!("unknown solution '{name}'")))?;
        let kappa = nalgebra::Matrix2::identity();
        let disc = solve_poisson(&mesh.0, &kappa, &|p| sol.source(&kappa, p), &|p| sol.u(p), &SolveOptions::new(k as usize))
            .map_err(lib_err)?;
        let e = error_norms(&disc, &|_, p| sol.u(p), &|_, p| sol.grad(p));
        *out = PolyaggSolveReport {
            cells: mesh.0.num_cells(),
            dofs: disc.num_dofs(),
            nnz: disc.nnz,
            err_l2: e.l2,
            err_h1: e.h1,
            rel_h1: e.rel_h1(),
        };
        Ok(())
    })
}

/// Loads a network: `builtin:network1` or a path to a network file.
///
/// # Safety
/// `spec` is a NUL-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn polyagg_network_load(spec: *const c_char, out: *mut *mut PolyaggNetwork) -> PolyaggStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let net = match str_arg(spec, "spec")? {
            "builtin:network1" => network1(),
            s if s.starts_with("builtin:") => return Err(invalid(format!("unknown built-in network '{s}'"))),
            path => polyagg::dfn::network::read_network(path).map_err(lib_err)?,
        };
        *out = Box::into_raw(Box::new(PolyaggNetwork(net)));
        Ok(())
    })
}

/// # Safety
/// `net` is null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn polyagg_network_free(net: *mut PolyaggNetwork) {
    if !net.is_null() {
        drop(Box::from_raw(net));
    }
}

/// # Safety
/// `net` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn polyagg_network_num_fractures(net: *const PolyaggNetwork) -> usize {
    net.as_ref().map_or(0, |n| n.0.fractures.len())
}

/// Runs the full pipeline with maximum triangle area `area`.
///
/// # Safety
/// `net` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn polyagg_network_solve(
    net: *const PolyaggNetwork,
    area: f64,
    lambda: f64,
    k: u32,
    out: *mut PolyaggSolveReport,
) -> PolyaggStatus {
    guard(|| {
        let net = net.as_ref().ok_or_else(|| null("net"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        if !(1..=3).contains(&k) {
            return Err(invalid(format!("order must be 1, 2 or 3, got {k}")));
        }
        if !(0.0..=1.0).contains(&lambda) {
            return Err(invalid(format!("lambda must lie in [0, 1], got {lambda}")));
        }
        let cfg = DfnConfig {
            target: MeshTarget::Area(area),
            agglomeration: AgglomerationConfig::with_lambda(lambda),
            solve: SolveOptions::new(k as usize),
        };
        let (_, r) = solve_network(&net.0, &cfg).map_err(lib_err)?;
        *out = PolyaggSolveReport {
            cells: r.cells,
            dofs: r.dofs,
            nnz: r.nnz,
            err_l2: r.err_l2.unwrap_or(f64::NAN),
            err_h1: r.err_h1.unwrap_or(f64::NAN),
            rel_h1: r.rel_h1.unwrap_or(f64::NAN),
        };
        Ok(())
    })
}
