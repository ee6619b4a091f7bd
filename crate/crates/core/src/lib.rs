//! Semiclassical and quantum Rabi model dynamics.
//!
//! Exact numerical integration, the rotating wave approximation, closed-form
//! one-photon and multiphoton solutions, and truncated Fock-space dynamics
//! with coherent-state initial conditions.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod integrator;
pub mod model;
pub mod quantum;
pub mod semiclassical;
pub mod special;

pub use error::{Error, Result};
pub use model::{
    derive_params, linspace, transform_from_rotating, transform_to_rotating, ComplexPair,
    DerivedParams, SemiclassicalParams, TimeSeries,
};
pub use num_complex::Complex64;
