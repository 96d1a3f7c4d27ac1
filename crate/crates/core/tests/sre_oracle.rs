use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tsre::hamiltonians::{cluster_state, ghz_state};
use tsre::oracle::{exact_sre, statevector};
use tsre::partition::{Geometry, PartitionSpec, Region};
use tsre::pauli_mps::{full_state_sre, subsystem_sre, topological_sre_with, SreSettings};
use tsre::MatrixProductState;

fn random_state(len: usize, d: usize, chi: usize, seed: u64) -> MatrixProductState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    MatrixProductState::random(len, d, chi, &mut rng).unwrap().normalize().unwrap()
}

#[test]
fn full_state_matches_enumeration() {
    for (len, d, seed) in [(6, 2, 1), (7, 2, 2), (5, 3, 3), (4, 3, 4)] {
        let psi = random_state(len, d, 4, seed);
        let v = statevector(&psi).unwrap();
        for n in [2, 3] {
            let want = exact_sre(&v, d, n, None).unwrap();
            let got = full_state_sre(&psi, &SreSettings::exact(n)).unwrap();
            assert!((want - got).abs() < 1e-9, "L={len} d={d} n={n}: {got} vs {want}");
        }
    }
}

#[test]
fn subsystem_matches_enumeration() {
    let cases: Vec<(usize, usize, Vec<std::ops::Range<usize>>)> = vec![
        (7, 2, vec![0..3]),
        (7, 2, vec![2..5]),
        (8, 2, vec![1..3, 5..7]),
        (8, 2, vec![0..2, 6..8]),
        (6, 3, vec![1..4]),
        (6, 3, vec![0..1, 3..5]),
    ];
    for (k, (len, d, w)) in cases.into_iter().enumerate() {
        let psi = random_state(len, d, 3, 10 + k as u64);
        let v = statevector(&psi).unwrap();
        for n in [2, 3] {
            let want = exact_sre(&v, d, n, Some(&w)).unwrap();
            let got = subsystem_sre(&psi, &w, &SreSettings::exact(n)).unwrap();
            assert!((want - got).abs() < 1e-9, "L={len} d={d} {w:?} n={n}: {got} vs {want}");
        }
    }
}

#[test]
fn topological_combination_matches_enumeration() {
    let psi = cluster_state(8).unwrap().dope_with_t_gates(&[0, 3, 6]).unwrap();
    let v = statevector(&psi).unwrap();
    let part = PartitionSpec::new(Geometry::Quad, 8).unwrap();
    let rep = topological_sre_with(&psi, &part, &SreSettings::exact(2)).unwrap();
    let m = |r: Region| exact_sre(&v, 2, 2, Some(&part.windows(r))).unwrap();
    let want = -(m(Region::AB) + m(Region::BC) - m(Region::B) - m(Region::ABC));
    assert!((rep.m_topo - want).abs() < 1e-9, "{} vs {want}", rep.m_topo);
}

#[test]
fn doped_cluster_full_state() {
    let t = (4.0f64 / 3.0).log2();
    // odd chains lose two units to the edges
    for (len, units) in [(6, 6.0), (7, 5.0), (8, 8.0)] {
        let psi = cluster_state(len).unwrap().dope_with_t_gates(&(0..len).collect::<Vec<_>>()).unwrap();
        let m = full_state_sre(&psi, &SreSettings::for_local_dim(2)).unwrap();
        assert!((m - units * t).abs() < 1e-9, "L={len}: {m} vs {}", units * t);
    }
    let g = ghz_state(10).unwrap();
    assert!(full_state_sre(&g, &SreSettings::for_local_dim(2)).unwrap().abs() < 1e-10);
}
