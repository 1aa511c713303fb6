mod common;

use common::*;
use polyagg::agglomerate::{minimize, AgglomerationConfig, CostModel, ScMode};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn small_mesh(rng: &mut ChaCha8Rng) -> polyagg::mesh::PolygonalMesh {
    match rng.gen_range(0..4) {
        0 => jittered(rng, 2, 4, false, 0.2),
        1 => jittered(rng, 2, 2, true, 0.2),
        2 => jittered(rng, 3, 2, false, 0.2),
        _ => jittered(rng, 1, 3, true, 0.2),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn swap_matches_exhaustive_enumeration(seed in any::<u64>(), lambda in 0.0..=1.0f64, potts in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mesh = small_mesh(&mut rng);
        let n = mesh.num_cells();
        prop_assert!(n <= 8);
        let cfg = AgglomerationConfig { lambda, sc_mode: if potts { ScMode::Potts } else { ScMode::Literal }, ..Default::default() };
        let costs = CostModel::new(&mesh, &cfg);
        let mut labeling: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
        for _ in 0..4 {
            let alpha = labeling[rng.gen_range(0..n)];
            let beta = rng.gen_range(0..n);
            if alpha == beta {
                continue;
            }
            let before = costs.energy(&labeling).total;
            let best = brute_force_swap(&costs, &labeling, alpha, beta);
            let delta = costs.swap_move(&mut labeling, alpha, beta);
            let after = costs.energy(&labeling).total;
            prop_assert_eq!(after, best);
            prop_assert_eq!(after - before, delta);
        }
    }
}

#[test]
fn energy_history_never_increases() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let tris = rng.gen_bool(0.5);
        let mesh = if rng.gen_bool(0.5) { small_mesh(&mut rng) } else { jittered(&mut rng, 5, 4, tris, 0.25) };
        let cfg = AgglomerationConfig {
            lambda: rng.gen_range(0.0..=1.0),
            sc_mode: if rng.gen_bool(0.5) { ScMode::Potts } else { ScMode::Literal },
            ..Default::default()
        };
        let r = minimize(&mesh, &cfg).unwrap();
        assert!(r.history.windows(2).all(|w| w[1].total <= w[0].total), "{:?}", r.history);
        assert!(r.deltas.iter().all(|&d| d <= 0));
    }
}
