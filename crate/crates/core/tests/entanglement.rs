use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tsre::entanglement::topological_ee_with;
use tsre::hamiltonians::{cluster_state, ghz_state};
use tsre::oracle::{rdm_entropy, statevector};
use tsre::{EntropyBudget, Geometry, MatrixProductState, PartitionSpec};

#[test]
fn subsystem_entropy_matches_reduced_density_matrix() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (len, d) in [(8, 2), (9, 2), (6, 3)] {
        let psi = MatrixProductState::random(len, d, 5, &mut rng).unwrap().normalize().unwrap();
        let v = statevector(&psi).unwrap();
        let budget = EntropyBudget::for_local_dim(d);
        let regions = [vec![0..3], vec![2..5], vec![0..2, 4..6], vec![1..2, 3..len], vec![0..len]];
        for w in regions {
            let a = psi.subsystem_entropy(&w, &budget).unwrap();
            let b = rdm_entropy(&v, d, &w).unwrap();
            assert!((a - b).abs() < 1e-9, "L={len} d={d} {w:?}: {a} vs {b}");
        }
    }
}

#[test]
fn fixed_point_entanglement() {
    let budget = EntropyBudget::for_local_dim(2);
    for (geometry, len, ghz_value) in [(Geometry::Quad, 8, 0.0), (Geometry::Quad, 12, 0.0), (Geometry::Tri, 9, 1.0), (Geometry::Tri, 12, 1.0)] {
        let part = PartitionSpec::new(geometry, len).unwrap();
        let ghz = topological_ee_with(&ghz_state(len).unwrap(), &part, &budget).unwrap();
        assert!((ghz.s_topo - ghz_value).abs() < 1e-10, "{ghz:?}");
        let cl = topological_ee_with(&cluster_state(len).unwrap(), &part, &budget).unwrap();
        assert!((cl.s_topo - 2.0).abs() < 1e-10, "{cl:?}");
    }
}
