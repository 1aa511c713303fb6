mod common;

use common::*;
use nalgebra::Matrix2;
use polyagg::agglomerate::{agglomerate, AgglomerationConfig};
use polyagg::mesh::{Point, PolygonalMesh};
use polyagg::vem::problems::polynomial;
use polyagg::vem::{error_norms, solve_poisson, SolveOptions};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn patch_errors(mesh: &PolygonalMesh, k: usize, kappa: Matrix2<f64>) -> (f64, f64) {
    let u = polynomial(k);
    let disc = solve_poisson(mesh, &kappa, &|p: &Point| u.source(&kappa, p), &|p: &Point| u.u(p), &SolveOptions::new(k)).unwrap();
    let e = error_norms(&disc, &|_, p| u.u(p), &|_, p| u.grad(p));
    (e.l2, e.h1)
}

fn meshes(seed: u64) -> Vec<(String, PolygonalMesh)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tri = distorted_square(&mut rng, 8, true, 0.3);
    let agg = agglomerate(&tri, &AgglomerationConfig::with_lambda(1.0)).unwrap().mesh;
    let agg_quarter = agglomerate(&tri, &AgglomerationConfig::with_lambda(0.25)).unwrap().mesh;
    vec![
        ("distorted quads".into(), distorted_square(&mut rng, 6, false, 0.3)),
        ("distorted triangles".into(), tri),
        ("agglomerated, lambda 1".into(), agg),
        ("agglomerated, lambda 0.25".into(), agg_quarter),
        ("free-boundary jitter".into(), jittered(&mut rng, 5, 5, false, 0.2)),
    ]
}

#[test]
fn degree_k_solutions_are_reproduced() {
    for seed in 0..3 {
        for (name, mesh) in meshes(seed) {
            for k in 1..=3 {
                let (l2, h1) = patch_errors(&mesh, k, Matrix2::identity());
                assert!(l2 <= 1e-9 && h1 <= 1e-9, "{name}, k = {k}: L2 {l2:e}, H1 {h1:e}");
            }
        }
    }
}

#[test]
fn anisotropic_tensor_patch() {
    let kappa = Matrix2::new(2.0, 0.5, 0.5, 1.0);
    for (name, mesh) in meshes(11) {
        for k in 1..=3 {
            let (l2, h1) = patch_errors(&mesh, k, kappa);
            assert!(l2 <= 1e-9 && h1 <= 1e-9, "{name}, k = {k}: L2 {l2:e}, H1 {h1:e}");
        }
    }
}
