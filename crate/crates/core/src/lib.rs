//! Particle-hole duality toolkit for quadratic bosonic Hamiltonians.
//!
//! The crate covers the Bogoliubov-de Gennes description of quadratic forms,
//! exact ladder-operator algebra for the non-unitary particle-hole map, truncated
//! Fock-space numerics, Lindblad steady states, Gaussian entanglement and small
//! dimer/trimer networks.

pub mod bdg;
pub mod error;
pub mod fock;
pub mod gaussian;
pub mod ladder;
pub mod lindblad;
pub mod linalg;
pub mod network;
pub mod quadratic;

pub use bdg::{
    build_bdg, check_symmetries, composition_diagnostic, quasimodes, reconstruct_check, spectral_distance, spectrum, DynamicalMatrix,
    Normalization, QuasiMode, QuasiModeSet, Regime, SpectrumReport, SymmetryReport,
};
pub use error::{Error, Result};
pub use fock::FockBasis;
pub use gaussian::{
    dual_frame_entanglement, generator_from_quadratic, ground_state, log_negativity, tmsv, EntanglementScenario,
    GaussianState, SymplecticGenerator,
};
pub use ladder::{
    dual_quadratic, gauge_transform, hole_frame_expectation, loop_flux, normal_order, ph_substitute, Direction,
    FrameTag, HoppingGraph, LadderPolynomial,
};
pub use lindblad::{Channel, DissipativeModel, Jump, SteadyStateReport};
pub use linalg::{CMat, C64};
pub use network::{
    build_dimer, build_trimer, chiral_flow, hole_loop_flux_check, single_excitation_block, time_reversal_check,
    DimerKind, DimerSpec, GaugeStyle, TrimerKind, TrimerSpec,
};
pub use quadratic::QuadraticForm;
