use std::ffi::{CStr, CString};
use std::ptr;

use polyagg_ffi::*;

fn last_error() -> String {
    let p = polyagg_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

/// 2x2 unit-square grid.
unsafe fn grid() -> *mut PolyaggMesh {
    let xs = [0.0, 0.5, 1.0, 0.0, 0.5, 1.0, 0.0, 0.5, 1.0];
    let ys = [0.0, 0.0, 0.0, 0.5, 0.5, 0.5, 1.0, 1.0, 1.0];
    let offsets = [0usize, 4, 8, 12, 16];
    let cells = [0usize, 1, 4, 3, 1, 2, 5, 4, 3, 4, 7, 6, 4, 5, 8, 7];
    let mut m = ptr::null_mut();
    let s = polyagg_mesh_new(xs.as_ptr(), ys.as_ptr(), 9, offsets.as_ptr(), cells.as_ptr(), 4, &mut m);
    assert_eq!(s, PolyaggStatus::Ok);
    m
}

#[test]
fn polygon_quality_of_a_square() {
    let xs = [0.0, 1.0, 1.0, 0.0];
    let ys = [0.0, 0.0, 1.0, 1.0];
    let mut q = PolyaggQuality::default();
    let s = unsafe { polyagg_polygon_quality(xs.as_ptr(), ys.as_ptr(), 4, &mut q) };
    assert_eq!(s, PolyaggStatus::Ok);
    assert!(polyagg_last_error().is_null());
    assert!((q.rho - 0.905_006).abs() < 1e-6);
    assert_eq!(q.rho3, 0.75);
}

#[test]
fn null_and_bad_arguments_are_reported() {
    let mut q = PolyaggQuality::default();
    let s = unsafe { polyagg_polygon_quality(ptr::null(), ptr::null(), 4, &mut q) };
    assert_eq!(s, PolyaggStatus::NullPointer);
    assert!(last_error().contains("xs"));
    let xs = [0.0, 1.0];
    let s = unsafe { polyagg_polygon_quality(xs.as_ptr(), xs.as_ptr(), 2, &mut q) };
    assert_eq!(s, PolyaggStatus::InvalidArgument);

    let mut m = ptr::null_mut();
    let offsets = [0usize, 3];
    let cells = [0usize, 1, 7];
    let s = unsafe { polyagg_mesh_new(xs.as_ptr(), xs.as_ptr(), 2, offsets.as_ptr(), cells.as_ptr(), 1, &mut m) };
    assert_eq!(s, PolyaggStatus::InvalidArgument);
    assert!(m.is_null());
    assert!(last_error().contains("vertex"));

    let path = CString::new("/nonexistent/mesh.txt").unwrap();
    assert_eq!(unsafe { polyagg_mesh_read(path.as_ptr(), &mut m) }, PolyaggStatus::Io);
    assert_eq!(unsafe { polyagg_mesh_num_cells(ptr::null()) }, 0);
    unsafe { polyagg_mesh_free(ptr::null_mut()) };
}

#[test]
fn mesh_round_trip_quality_and_agglomeration() {
    unsafe {
        let m = grid();
        assert_eq!(polyagg_mesh_num_cells(m), 4);
        assert_eq!(polyagg_mesh_num_vertices(m), 9);
        let mut rho = [0.0; 4];
        assert_eq!(polyagg_mesh_quality(m, rho.as_mut_ptr(), 4), PolyaggStatus::Ok);
        assert!(rho.iter().all(|r| (r - 0.905_006).abs() < 1e-6));
        assert_eq!(polyagg_mesh_quality(m, rho.as_mut_ptr(), 3), PolyaggStatus::InvalidArgument);

        let dir = tempfile::tempdir().unwrap();
        let path = CString::new(dir.path().join("g.mesh").to_str().unwrap()).unwrap();
        assert_eq!(polyagg_mesh_write(m, path.as_ptr()), PolyaggStatus::Ok);
        let mut back = ptr::null_mut();
        assert_eq!(polyagg_mesh_read(path.as_ptr(), &mut back), PolyaggStatus::Ok);
        assert_eq!(polyagg_mesh_num_cells(back), 4);

        let mut out = ptr::null_mut();
        let mut stats = PolyaggAgglomerationStats::default();
        assert_eq!(polyagg_mesh_agglomerate(m, 0.0, 0, 50, &mut out, &mut stats), PolyaggStatus::Ok);
        assert_eq!(stats.cells_after, 4);
        polyagg_mesh_free(out);
        assert_eq!(polyagg_mesh_agglomerate(m, 0.5, 9, 50, &mut out, &mut stats), PolyaggStatus::InvalidArgument);
        assert_eq!(polyagg_mesh_agglomerate(m, 2.0, 0, 50, &mut out, &mut stats), PolyaggStatus::InvalidArgument);
        polyagg_mesh_free(back);
        polyagg_mesh_free(m);
    }
}

#[test]
fn solve_reproduces_polynomials() {
    unsafe {
        let m = grid();
        let name = CString::new("quadratic").unwrap();
        let mut r = PolyaggSolveReport::default();
        assert_eq!(polyagg_mesh_solve(m, 2, name.as_ptr(), &mut r), PolyaggStatus::Ok);
        assert!(r.err_h1 < 1e-10 && r.err_l2 < 1e-10, "{r:?}");
        assert_eq!(r.dofs, 9 + 12 + 4);
        assert_eq!(polyagg_mesh_solve(m, 4, name.as_ptr(), &mut r), PolyaggStatus::InvalidArgument);
        let bad = CString::new("nope").unwrap();
        assert_eq!(polyagg_mesh_solve(m, 1, bad.as_ptr(), &mut r), PolyaggStatus::InvalidArgument);
        polyagg_mesh_free(m);
    }
}

#[test]
fn network_pipeline() {
    unsafe {
        let spec = CString::new("builtin:network1").unwrap();
        let mut net = ptr::null_mut();
        assert_eq!(polyagg_network_load(spec.as_ptr(), &mut net), PolyaggStatus::Ok);
        assert_eq!(polyagg_network_num_fractures(net), 3);
        let mut r = PolyaggSolveReport::default();
        assert_eq!(polyagg_network_solve(net, 0.05, 1.0, 1, &mut r), PolyaggStatus::Ok);
        assert!(r.rel_h1 > 0.0 && r.rel_h1 < 0.5, "{r:?}");
        assert_eq!(polyagg_network_solve(net, -1.0, 1.0, 1, &mut r), PolyaggStatus::InvalidArgument);
        polyagg_network_free(net);
        let bad = CString::new("builtin:network9").unwrap();
        assert_eq!(polyagg_network_load(bad.as_ptr(), &mut net), PolyaggStatus::InvalidArgument);
    }
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/polyagg.h")).unwrap();
    let src = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/src/lib.rs")).unwrap();
    let mut n = 0;
    for line in src.lines().filter(|l| l.contains("extern \"C\" fn ")) {
        let name = line.split("fn ").nth(1).unwrap().split('(').next().unwrap();
        assert!(header.contains(&format!("{name}(")), "{name} missing from the header");
        n += 1;
    }
    assert!(n >= 12);
}

#[test]
fn header_compiles_as_c_when_a_compiler_exists() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/polyagg.h");
    let Ok(out) = std::process::Command::new("cc").args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-x", "c", header]).output()
    else {
        eprintln!("no C compiler, skipping");
        return;
    };
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
