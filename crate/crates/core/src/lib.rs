//! Quantum-optical description of light in dielectric slab waveguides.
//!
//! Fields are treated as coherent states on a stack of thin layers. Each
//! layer interface acts as a beam splitter on the forward and backward
//! amplitudes, which gives closed-form guided modes for the step-index slab
//! and a layer-by-layer ray picture for the graded-index slab.

pub mod cli;
pub mod error;
pub mod fresnel;
pub mod gi_slab;
pub mod quantum;
pub mod roots;
pub mod si_slab;

pub use error::{Error, Result};

/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Reduced Planck constant ħ (J·s).
pub const REDUCED_PLANCK: f64 = 1.054_571_817e-34;
