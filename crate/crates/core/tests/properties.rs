use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tsre::pauli_mps::{full_state_sre, subsystem_sre, SreSettings};
use tsre::{MatrixProductState, C64};

fn hadamard() -> Vec<C64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    vec![C64::new(s, 0.0), C64::new(s, 0.0), C64::new(s, 0.0), C64::new(-s, 0.0)]
}

fn phase_s() -> Vec<C64> {
    vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 1.0)]
}

fn state(len: usize, chi: usize, seed: u64) -> MatrixProductState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    MatrixProductState::random(len, 2, chi, &mut rng).unwrap().normalize().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn local_cliffords_preserve_sre(len in 3usize..7, chi in 1usize..5, seed in 0u64..1000, site in 0usize..7, gate in 0usize..2, n in 2usize..4) {
        let site = site % len;
        let psi = state(len, chi, seed);
        let mut moved = psi.clone();
        moved.apply_single_site(site, &if gate == 0 { hadamard() } else { phase_s() }, true).unwrap();
        let settings = SreSettings::exact(n);
        let a = full_state_sre(&psi, &settings).unwrap();
        let b = full_state_sre(&moved, &settings).unwrap();
        prop_assert!((a - b).abs() < 1e-9, "full {a} vs {b}");
        prop_assert!(a > -1e-10);
        let region = [0..len.div_ceil(2)];
        let a = subsystem_sre(&psi, &region, &settings).unwrap();
        let b = subsystem_sre(&moved, &region, &settings).unwrap();
        prop_assert!((a - b).abs() < 1e-9, "subsystem {a} vs {b}");
    }

    #[test]
    fn sre_ignores_global_scale(len in 3usize..6, seed in 0u64..1000) {
        let psi = state(len, 3, seed);
        let mut flipped = psi.clone();
        flipped.apply_single_site(0, &[C64::new(-1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(-1.0, 0.0)], true).unwrap();
        let s = SreSettings::exact(2);
        prop_assert!((full_state_sre(&psi, &s).unwrap() - full_state_sre(&flipped, &s).unwrap()).abs() < 1e-10);
    }
}
