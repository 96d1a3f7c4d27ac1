use tsre::analytic::{fixed_point_tables, FixedPoint, Quantity};
use tsre::hamiltonians::{cluster_state, ghz_state, product_plus_state};
use tsre::oracle::{exact_sre, rdm_entropy, statevector};
use tsre::{Geometry, MatrixProductState, PartitionSpec, Region};

fn state(p: FixedPoint, len: usize) -> MatrixProductState {
    match p {
        FixedPoint::Paramagnet => product_plus_state(len),
        FixedPoint::Ferromagnet => ghz_state(len),
        FixedPoint::Cluster => cluster_state(len),
    }
    .unwrap()
}

fn enumerated(psi: &MatrixProductState, part: &PartitionSpec, q: Quantity) -> f64 {
    let len = psi.len();
    match q {
        Quantity::Entanglement => {
            let v = statevector(psi).unwrap();
            let s = |r: Region| rdm_entropy(&v, 2, &part.windows(r)).unwrap();
            s(Region::AB) + s(Region::BC) - s(Region::B) - s(Region::ABC)
        }
        Quantity::Magic(n) => {
            let v = statevector(&psi.dope_with_t_gates(&n.sites(len)).unwrap()).unwrap();
            let m = |r: Region| exact_sre(&v, 2, 2, Some(&part.windows(r))).unwrap();
            -(m(Region::AB) + m(Region::BC) - m(Region::B) - m(Region::ABC))
        }
    }
}

#[test]
fn tables_match_enumeration() {
    let parts = [
        PartitionSpec::new(Geometry::Quad, 8).unwrap(),
        PartitionSpec::tri_windows(3, 2, 3).unwrap(),
        PartitionSpec::new(Geometry::Tri, 9).unwrap(),
    ];
    let mut checked = 0;
    for part in &parts {
        for e in fixed_point_tables().iter().filter(|e| e.geometry == part.geometry && e.parity.admits(part.len)) {
            let got = enumerated(&state(e.state, part.len), part, e.quantity);
            assert!((got - e.value).abs() < 1e-9, "{e} at L={}: {got} vs {}", part.len, e.value);
            checked += 1;
        }
    }
    assert!(checked >= 30, "only {checked} entries checked");
}
