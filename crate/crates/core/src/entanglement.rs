//! Topological entanglement entropy over tri- and quadripartitions.

use crate::error::Result;
use crate::mps::{EntropyBudget, MatrixProductState};
use crate::partition::{Geometry, PartitionSpec, Region};

#[derive(Clone, Debug, PartialEq)]
pub struct TeeReport {
    pub geometry: Geometry,
    pub s_ab: f64,
    pub s_bc: f64,
    pub s_b: f64,
    pub s_abc: f64,
    /// `S_AB + S_BC - S_B - S_ABC`.
    pub s_topo: f64,
}

impl TeeReport {
    pub fn region(&self, r: Region) -> f64 {
        match r {
            Region::AB => self.s_ab,
            Region::BC => self.s_bc,
            Region::B => self.s_b,
            Region::ABC => self.s_abc,
        }
    }
}

pub fn topological_ee(psi: &MatrixProductState, geometry: Geometry, budget: &EntropyBudget) -> Result<TeeReport> {
    topological_ee_with(psi, &PartitionSpec::new(geometry, psi.len())?, budget)
}

pub fn topological_ee_with(psi: &MatrixProductState, part: &PartitionSpec, budget: &EntropyBudget) -> Result<TeeReport> {
    if part.len != psi.len() {
        return Err(crate::Error::ChainLength { len: psi.len(), reason: format!("partition is for L={}", part.len) });
    }
    let psi = psi.normalize()?;
    let s = |r: Region| psi.subsystem_entropy(&part.windows(r), budget);
    let (s_ab, s_bc, s_b, s_abc) = (s(Region::AB)?, s(Region::BC)?, s(Region::B)?, s(Region::ABC)?);
    Ok(TeeReport { geometry: part.geometry, s_ab, s_bc, s_b, s_abc, s_topo: s_ab + s_bc - s_b - s_abc })
}
