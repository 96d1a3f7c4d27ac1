use tsre::dmrg::solve_model;
use tsre::hamiltonians::build_mpo;
use tsre::oracle::{exact_model_ground_state, model_hamiltonian};
use tsre::{ModelSpec, SolverConfig};

fn specs() -> Vec<ModelSpec> {
    vec![
        ModelSpec::tfim(6, 1.0, 0.7),
        ModelSpec::cluster_ising(6, 1.0, 0.4),
        ModelSpec::cluster_ising_disordered(6, 1.0, 0.24, 1.5, 3),
        ModelSpec::tci(6, 0.4),
        ModelSpec::tci(6, -0.8),
        ModelSpec::aklt(4, 0.0),
        ModelSpec::aklt(4, 0.3),
    ]
}

#[test]
fn mpo_matches_term_list() {
    for spec in specs() {
        let a = build_mpo(&spec).unwrap().to_dense().unwrap();
        let b = model_hamiltonian(&spec).unwrap().to_dense().unwrap();
        let err = a.iter().zip(&b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        assert!(err < 1e-12, "{spec:?}: {err}");
    }
}

#[test]
fn dmrg_matches_exact_diagonalization() {
    let mut specs = vec![
        ModelSpec::tfim(10, 1.0, 1.0),
        ModelSpec::cluster_ising(10, 1.0, 0.8),
        ModelSpec::cluster_ising_disordered(10, 1.0, 0.24, 1.0, 7),
        ModelSpec::tci(10, 0.3),
        ModelSpec::aklt(6, 0.5),
    ];
    specs.extend(self::specs());
    for spec in specs {
        let ed = exact_model_ground_state(&model_hamiltonian(&spec).unwrap()).unwrap();
        let gs = solve_model(&spec, &SolverConfig::for_local_dim(spec.local_dim()), None).unwrap();
        assert!(gs.converged, "{spec:?}");
        assert!((gs.energy - ed.energy).abs() < 1e-8 * ed.energy.abs().max(1.0), "{spec:?}: {} vs {}", gs.energy, ed.energy);
    }
}

#[test]
fn tilt_selects_a_sector_without_moving_the_energy() {
    let spec = ModelSpec::cluster_ising(8, 1.0, 0.1);
    let ed = exact_model_ground_state(&model_hamiltonian(&spec).unwrap()).unwrap();
    let cfg = SolverConfig { tilt: 1e-3, ..SolverConfig::for_local_dim(2) };
    let gs = solve_model(&spec, &cfg, None).unwrap();
    assert!((gs.energy - ed.energy).abs() < 1e-5, "{} vs {}", gs.energy, ed.energy);
    assert!(gs.variance < 1e-6);
}

#[test]
fn aklt_point_energy() {
    // the projector form gives -2/3 per bond at the AKLT point
    for len in [6, 8] {
        let gs = solve_model(&ModelSpec::aklt(len, 0.0), &SolverConfig::for_local_dim(3), None).unwrap();
        assert!((gs.energy + 2.0 / 3.0 * (len - 1) as f64).abs() < 1e-9, "L={len}: {}", gs.energy);
    }
}
