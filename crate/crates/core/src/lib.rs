//! Canonical maximally entangled bases of `d ⊗ d`, teleportation-based
//! discrimination of those states, probe-state feasibility search and the
//! relative-entropy bound on more than `d` of them.
//!
//! Tensor products are big-endian throughout: the first factor is the most
//! significant digit of a flat index.

pub mod distinguish;
pub mod entropy;
pub mod linalg;
pub mod teleport;
pub mod weyl;

pub use distinguish::{
    catalog_probe, classify_sets, conjugated_probe_search, orthogonality_defect, probe_search, CensusReport,
    ProbeSearchResult, SearchConfig, SearchStatus, StateSet,
};
pub use entropy::{build_rho_separable, build_rho_states, entropy_bound_check, relative_entropy, DensityMatrix};
pub use linalg::{eig_hermitian, kron, partial_trace, ComplexMatrix, StateVector, C64};
pub use teleport::{run_teleport, standard_protocol, two_copy_discriminate, TeleportProtocol};
pub use weyl::{bell_state, compose_u, compose_v, weyl_u, weyl_v, BellIndex, WeylPhase};
