use tsre::hamiltonians::aklt_state;
use tsre::pauli_mps::{topological_sre, SreSettings};
use tsre::Geometry;

#[test]
fn topological_magic_approaches_its_bulk_value() {
    let settings = SreSettings::for_local_dim(3);
    let m: Vec<f64> = [16, 32, 64]
        .iter()
        .map(|&len| topological_sre(&aklt_state(len).unwrap(), Geometry::Quad, &settings).unwrap().m_topo)
        .collect();
    assert!(m.windows(2).all(|w| w[0] > w[1]), "{m:?}");
    assert!((m[2] - 0.1706).abs() < 2e-3, "{m:?}");
}
