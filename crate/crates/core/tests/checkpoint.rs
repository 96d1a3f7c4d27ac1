use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tsre::checkpoint::{load_mps, save_mps};
use tsre::pauli_mps::{topological_sre, SreSettings};
use tsre::{Geometry, MatrixProductState};

#[test]
fn file_round_trip_preserves_the_state() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let psi = MatrixProductState::random(8, 2, 6, &mut rng).unwrap().normalize().unwrap();
    let path = std::env::temp_dir().join(format!("tsre-ckpt-{}.mps", std::process::id()));
    save_mps(&psi, &path).unwrap();
    let back = load_mps(&path).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert!((psi.overlap(&back).unwrap().norm() - 1.0).abs() < 1e-12);
    let s = SreSettings::exact(2);
    let a = topological_sre(&psi, Geometry::Quad, &s).unwrap().m_topo;
    let b = topological_sre(&back, Geometry::Quad, &s).unwrap().m_topo;
    assert!((a - b).abs() < 1e-12);
}
