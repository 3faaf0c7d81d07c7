//! Truncated Fock-space numerics.

pub mod basis;
pub mod evolve;
pub mod omega;
pub mod ops;
pub mod snapshot;

pub use basis::{FockBasis, DEFAULT_DIM_LIMIT};
pub use evolve::{
    displacement_matrix, duality_evolution_check, evolve, expectation, fock_state, frame_exchange_matrix,
    DualityEvolutionReport, Evolved,
};
pub use omega::{
    embed, explicit_hole_element, hole_fock_pair, interior_transformation_residual, omega_generator,
    omega_matrix, omega_on_mode, pairing_matrix, BiorthogonalPair, OmegaMatrix, MAX_OMEGA_CUTOFF,
};
pub use ops::{ladder_matrix, number_matrix, second_quantize, second_quantize_poly};
pub use snapshot::{read_snapshot, write_snapshot};
