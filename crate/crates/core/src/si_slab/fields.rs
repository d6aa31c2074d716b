use std::f64::consts::SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{GuidedMode, LayerGrid, Parity, Region};
use crate::error::{ensure_positive, Error, Result};
use crate::quantum::CoherentAmplitude;
use crate::{REDUCED_PLANCK, SPEED_OF_LIGHT};

/// Cladding-to-core eigenvalue ratios `α^(I)/α^(II)` and `α^(III)/α^(II)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeRatios {
    pub ratio_left: Complex64,
    pub ratio_right: Complex64,
}

/// Ratios fixed by field continuity at `x = ±d/2`:
/// even `√2·e^{γd/2}·cos(κd/2)` on both sides; odd `√2·i·e^{γd/2}·sin(κd/2)`
/// on the right and its negative on the left.
pub fn amplitude_ratios(mode: &GuidedMode) -> AmplitudeRatios {
    let half = 0.5 * mode.spec.d;
    let grow = (mode.gamma * half).exp();
    match mode.parity {
        Parity::Even => {
            let r = Complex64::new(SQRT_2 * grow * (mode.kappa * half).cos(), 0.0);
            AmplitudeRatios {
                ratio_left: r,
                ratio_right: r,
            }
        }
        Parity::Odd => {
            let r = Complex64::new(0.0, SQRT_2 * grow * (mode.kappa * half).sin());
            AmplitudeRatios {
                ratio_left: -r,
                ratio_right: r,
            }
        }
    }
}

/// Coherent eigenvalues of one mode in all three areas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeField {
    pub mode: GuidedMode,
    /// `α^(II)` (even or odd weighting of the `±κ` waves).
    pub alpha_core: Complex64,
    pub alpha_left: Complex64,
    pub alpha_right: Complex64,
}

pub fn mode_field(mode: &GuidedMode, alpha_core: CoherentAmplitude) -> ModeField {
    let ratios = amplitude_ratios(mode);
    let a = alpha_core.to_complex();
    ModeField {
        mode: *mode,
        alpha_core: a,
        alpha_left: ratios.ratio_left * a,
        alpha_right: ratios.ratio_right * a,
    }
}

impl ModeField {
    /// Core expression for the eigenvalue of the averaged operator at `x`:
    /// `√2·α·cos κx` (even) or `√2·i·α·sin κx` (odd).
    pub fn core_coefficient(&self, x: f64) -> Complex64 {
        let k = self.mode.kappa * x;
        match self.mode.parity {
            Parity::Even => self.alpha_core * (SQRT_2 * k.cos()),
            Parity::Odd => self.alpha_core * Complex64::new(0.0, SQRT_2 * k.sin()),
        }
    }

    /// Area (I) expression `α^(I)·e^{γx}`.
    pub fn left_coefficient(&self, x: f64) -> Complex64 {
        self.alpha_left * (self.mode.gamma * x).exp()
    }

    /// Area (III) expression `α^(III)·e^{−γx}`.
    pub fn right_coefficient(&self, x: f64) -> Complex64 {
        self.alpha_right * (-self.mode.gamma * x).exp()
    }

    pub fn coefficient(&self, region: Region, x: f64) -> Complex64 {
        match region {
            Region::LeftCladding => self.left_coefficient(x),
            Region::Core => self.core_coefficient(x),
            Region::RightCladding => self.right_coefficient(x),
        }
    }

    /// `[ĉ_j, ĉ_j†]` at a layer centre: 1 in the core, `e^{±2γx}` in the cladding.
    pub fn commutator(&self, region: Region, x: f64) -> f64 {
        match region {
            Region::LeftCladding => (2.0 * self.mode.gamma * x).exp(),
            Region::Core => 1.0,
            Region::RightCladding => (-2.0 * self.mode.gamma * x).exp(),
        }
    }
}

/// Per-layer expectation values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LayerField {
    pub j: i64,
    pub x: f64,
    pub region: Region,
    /// `⟨ĉ_j†ĉ_j⟩`, the raw squared eigenvalue even where the commutator is not one.
    pub mean_photons: f64,
    pub commutator: f64,
    /// Eigenvalue of the layer-averaged operator `ĉ_j`. The averaged electric
    /// field is proportional to it, with a scale fixed by normalization.
    pub e_field_re: f64,
    pub e_field_im: f64,
}

impl LayerField {
    pub fn e_field(&self) -> Complex64 {
        Complex64::new(self.e_field_re, self.e_field_im)
    }
}

fn check_grid(mode: &GuidedMode, grid: &LayerGrid) -> Result<()> {
    let d = mode.spec.d;
    if (grid.core_width() - d).abs() > 1e-12 * d {
        return Err(Error::domain(format!(
            "grid core width {} does not match the mode's slab width {d}",
            grid.core_width()
        )));
    }
    Ok(())
}

/// Photon numbers, commutators and field coefficients on every layer,
/// ordered by ascending `j`.
pub fn layer_fields(
    mode: &GuidedMode,
    grid: &LayerGrid,
    alpha_core: CoherentAmplitude,
) -> Result<Vec<LayerField>> {
    check_grid(mode, grid)?;
    let field = mode_field(mode, alpha_core);
    Ok(grid
        .indices()
        .map(|j| {
            let x = grid.center(j);
            let region = grid.region(j);
            let c = field.coefficient(region, x);
            LayerField {
                j,
                x,
                region,
                mean_photons: c.norm_sqr(),
                commutator: field.commutator(region, x),
                e_field_re: c.re,
                e_field_im: c.im,
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EnergyFlowOptions {
    /// Add the symmetric-ordering term `ħβ/2·[ĉ, ĉ†]` of every layer.
    pub include_vacuum: bool,
}

/// Energy flow `S = c²·Σ_j ħβ·N_j` (plus the vacuum term when asked).
pub fn energy_flow(
    mode: &GuidedMode,
    grid: &LayerGrid,
    alpha_core: CoherentAmplitude,
    options: EnergyFlowOptions,
) -> Result<f64> {
    let layers = layer_fields(mode, grid, alpha_core)?;
    let (photons, vacuum) = layer_sums(&layers);
    let quanta = if options.include_vacuum {
        photons + 0.5 * vacuum
    } else {
        photons
    };
    Ok(flow_per_photon(mode) * quanta)
}

fn flow_per_photon(mode: &GuidedMode) -> f64 {
    SPEED_OF_LIGHT * SPEED_OF_LIGHT * REDUCED_PLANCK * mode.beta
}

fn layer_sums(layers: &[LayerField]) -> (f64, f64) {
    layers.iter().fold((0.0, 0.0), |(n, c), l| {
        (n + l.mean_photons, c + l.commutator)
    })
}

/// Real-positive `α^(II)` whose energy flow equals `s_target`.
pub fn normalize_to_energy_flow(
    mode: &GuidedMode,
    grid: &LayerGrid,
    s_target: f64,
    options: EnergyFlowOptions,
) -> Result<CoherentAmplitude> {
    ensure_positive("target energy flow", s_target)?;
    if grid.layer_count() == 0 {
        return Err(Error::domain("empty layer grid"));
    }
    let unit = layer_fields(mode, grid, CoherentAmplitude::new(1.0, 0.0)?)?;
    let (photons, vacuum) = layer_sums(&unit);
    if !(photons > 0.0) {
        return Err(Error::Numerical("mode carries no photons on this grid".into()));
    }
    let mut quanta = s_target / flow_per_photon(mode);
    if options.include_vacuum {
        quanta -= 0.5 * vacuum;
        if quanta <= 0.0 {
            return Err(Error::domain(
                "target energy flow is below the vacuum contribution",
            ));
        }
    }
    CoherentAmplitude::real((quanta / photons).sqrt())
}
