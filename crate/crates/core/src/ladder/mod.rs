//! Exact normal-ordered ladder-operator algebra, particle-hole substitution,
//! coefficient-level duality, frame expectations and loop fluxes.

pub mod duality;
pub mod expectation;
pub mod flux;
pub mod poly;
pub mod substitution;

pub use duality::{dual_quadratic, dual_quadratic_with};
pub use expectation::{displaced_number, fock_matrix_element, hole_frame_expectation};
pub use flux::{angles_equal, gauge_transform, loop_flux, wrap_angle, HoppingGraph};
pub use poly::{normal_order, Ladder, LadderPolynomial, Monomial, RawExpr};
pub use substitution::{excitation_violation, frame_represent, ph_substitute, Direction, FrameTag};
