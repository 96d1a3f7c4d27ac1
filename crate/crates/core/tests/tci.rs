use tsre::analytic::{tci_l8_closed_form, tci_l8_regions};
use tsre::hamiltonians::tci_ground_state;
use tsre::oracle::{exact_sre, statevector};
use tsre::pauli_mps::{topological_sre_with, SreSettings};
use tsre::{Geometry, PartitionSpec, Region};

#[test]
fn closed_form_matches_enumeration_and_engine() {
    let quad = PartitionSpec::new(Geometry::Quad, 8).unwrap();
    let tri = PartitionSpec::tri_windows(2, 4, 2).unwrap();
    for g in [-0.9, -0.55, -0.2, 0.15, 0.5, 0.85] {
        let psi = tci_ground_state(8, g, true).unwrap();
        let v = statevector(&psi).unwrap();
        for (geometry, part) in [(Geometry::Quad, &quad), (Geometry::Tri, &tri)] {
            let regions = tci_l8_regions(g, geometry).unwrap();
            for (k, r) in [Region::AB, Region::BC, Region::B, Region::ABC].into_iter().enumerate() {
                let want = exact_sre(&v, 2, 2, Some(&part.windows(r))).unwrap();
                assert!((regions[k] - want).abs() < 1e-9, "g={g} {geometry} {r:?}: {} vs {want}", regions[k]);
            }
            let closed = tci_l8_closed_form(g, geometry).unwrap();
            let engine = topological_sre_with(&psi, part, &SreSettings::exact(2)).unwrap().m_topo;
            assert!((closed - engine).abs() < 1e-9, "g={g} {geometry}: {closed} vs {engine}");
        }
    }
}
