//! Evans function computation for travelling-wave stability of scalar
//! reaction-diffusion equations.
//!
//! The linearization of a travelling wave produces a 2-by-2 nonautonomous
//! linear system `y' = A(xi; lambda) y`. This crate builds the two solutions
//! decaying at the left and right ends by shooting towards the matching
//! point `xi = 0` and forms the Evans function `D(lambda)` as their wedge
//! product. Zeros of `D` in the admissible region are eigenvalues of the
//! linearized operator.
//!
//! Three one-step integrators are provided: the exponential midpoint rule,
//! the fourth-order Magnus method, and the two-stage Gauss-Legendre method.
//! Shooting is done by default in transformed coordinates in which the
//! dominant exponential factor has been removed analytically, so large
//! spectral parameters and long truncation intervals do not overflow.
//! The [`analysis`] module measures the Evans-function error of each method
//! against self-convergent references and evaluates the closed-form
//! leading-order error predictions alongside.
//!
//! The crate is `no_std` (with `alloc`); file formats and the command-line
//! front end live in the companion `evans-cli` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod analysis;
pub mod error;
pub mod evans;
pub mod integrate;
pub mod linalg;
pub mod model;
pub mod quadrature;
pub mod spectral;

pub use error::Error;
pub use evans::{asymptotic_evans, evaluate_evans, AsymptoticSeries, EvansResult};
pub use integrate::{propagate, Coordinates, GridSpec, MethodKind, PropagationResult};
pub use linalg::{expm2, wedge, C2Matrix, C2Vector};
pub use model::{quad_potential, PotentialKind, ReactionModel, TabulatedProfile};
pub use spectral::{build_frame, Side, SpectralFrame};

/// Crate-wide result type.
pub type Result<T> = core::result::Result<T, Error>;
