//! Symmetric step-index slab waveguide.
//!
//! The cross-section is cut into layers of thickness Δx centred at
//! `x_j = jΔx`. Layers with `|j| ≤ m` form the core (area II), the rest out
//! to `|j| = M` the left (I) and right (III) cladding. Coherent-state
//! eigenvalues are constant within each area and are tied together by
//! continuity at `x = ±d/2`, which also fixes β through the TE eigenvalue
//! equation.

mod fields;
mod grid;
mod modes;

pub use fields::{
    amplitude_ratios, energy_flow, layer_fields, mode_field, normalize_to_energy_flow,
    AmplitudeRatios, EnergyFlowOptions, LayerField, ModeField,
};
pub use grid::{build_grid, LayerGrid, Region};
pub use modes::{eigen_residual, expected_mode_count, solve_modes, GuidedMode, Parity};

use serde::{Deserialize, Serialize};

use crate::error::{ensure_positive, Error, Result};

/// Geometry and materials of a symmetric step-index slab.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlabSpec {
    /// Core index.
    pub n1: f64,
    /// Cladding index, `1 ≤ n2 < n1`.
    pub n2: f64,
    /// Core width (m).
    pub d: f64,
    /// Vacuum wavelength (m).
    pub lambda0: f64,
}

impl SlabSpec {
    pub fn new(n1: f64, n2: f64, d: f64, lambda0: f64) -> Result<Self> {
        ensure_positive("n1", n1)?;
        ensure_positive("n2", n2)?;
        if n2 < 1.0 {
            return Err(Error::domain(format!("cladding index must be at least 1, got {n2}")));
        }
        if !(n1 > n2) {
            return Err(Error::domain(format!(
                "core index {n1} must exceed cladding index {n2}"
            )));
        }
        ensure_positive("core width", d)?;
        ensure_positive("vacuum wavelength", lambda0)?;
        Ok(SlabSpec { n1, n2, d, lambda0 })
    }

    pub fn k0(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.lambda0
    }

    /// `k₀√(n₁² − n₂²)`, the largest transverse wavenumber a guided mode can have.
    pub fn max_kappa(&self) -> f64 {
        self.k0() * ((self.n1 - self.n2) * (self.n1 + self.n2)).sqrt()
    }

    /// Normalized frequency `V = (k₀d/2)√(n₁² − n₂²)`.
    pub fn v_number(&self) -> f64 {
        0.5 * self.d * self.max_kappa()
    }
}
