//! Tensor-network tools for stabilizer Renyi entropies of spin chains: Pauli-basis
//! MPS, subsystem and topological SRE, DMRG ground states and exact references.

pub mod acceptance;
pub mod analytic;
pub mod checkpoint;
pub mod dmrg;
pub mod entanglement;
pub mod error;
pub mod hamiltonians;
pub mod lanczos;
pub mod mpo;
pub mod mps;
pub mod oracle;
pub mod partition;
pub mod pauli;
pub mod pauli_mps;
pub mod tensor;

pub use dmrg::{GroundState, SolverConfig};
pub use entanglement::TeeReport;
pub use error::{Error, Result};
pub use hamiltonians::{ModelKind, ModelSpec};
pub use mpo::MatrixProductOperator;
pub use mps::{EntropyBudget, MatrixProductState};
pub use partition::{Geometry, PartitionSpec, Region};
pub use pauli::PauliString;
pub use pauli_mps::{PauliMps, SreReport, SreSettings};
pub use tensor::{DenseTensor, TruncationPolicy, C64};
