//! Coherent-state amplitude algebra and the field–atom phase-retardation model.
//!
//! A coherent state in one spatial mode is fully described by its complex
//! eigenvalue under the annihilation operator, so every state transform here
//! is an operation on complex amplitudes. Mean photon numbers are `|α|²`.
//!
//! The refractive index arises from repeated off-resonant scattering: each
//! atom imprints a small phase `ξ = χΔτ` with `χ = g²/Δω`, and `m` atoms per
//! spatial period shorten the wavelength so that `n = 1 + ξ/(k₀d)`.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, ensure_positive, Error, Result};

/// Complex eigenvalue `α` of a coherent state in a single spatial mode.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CoherentAmplitude {
    pub re: f64,
    pub im: f64,
}

impl CoherentAmplitude {
    pub const VACUUM: CoherentAmplitude = CoherentAmplitude { re: 0.0, im: 0.0 };

    pub fn new(re: f64, im: f64) -> Result<Self> {
        ensure_finite("amplitude real part", re)?;
        ensure_finite("amplitude imaginary part", im)?;
        Ok(CoherentAmplitude { re, im })
    }

    pub fn real(re: f64) -> Result<Self> {
        Self::new(re, 0.0)
    }

    pub fn from_complex(z: Complex64) -> Result<Self> {
        Self::new(z.re, z.im)
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    /// Poissonian mean photon number `|α|²`.
    pub fn mean_photons(self) -> f64 {
        self.re * self.re + self.im * self.im
    }

    pub fn magnitude(self) -> f64 {
        self.re.hypot(self.im)
    }

    pub fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn scale(self, k: f64) -> Self {
        CoherentAmplitude {
            re: self.re * k,
            im: self.im * k,
        }
    }

    /// Multiplication by `i`.
    pub fn times_i(self) -> Self {
        CoherentAmplitude {
            re: -self.im,
            im: self.re,
        }
    }
}

impl From<CoherentAmplitude> for Complex64 {
    fn from(a: CoherentAmplitude) -> Self {
        a.to_complex()
    }
}

impl Add for CoherentAmplitude {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        CoherentAmplitude {
            re: self.re + rhs.re,
            im: self.im + rhs.im,
        }
    }
}

impl Sub for CoherentAmplitude {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        CoherentAmplitude {
            re: self.re - rhs.re,
            im: self.im - rhs.im,
        }
    }
}

impl Neg for CoherentAmplitude {
    type Output = Self;
    fn neg(self) -> Self {
        CoherentAmplitude {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl Mul<f64> for CoherentAmplitude {
    type Output = Self;
    fn mul(self, k: f64) -> Self {
        self.scale(k)
    }
}

/// Two-mode mixing with real coefficients:
/// `(a, b) → (a·cosθ + b·sinθ, −a·sinθ + b·cosθ)`.
///
/// This is the action of `exp[θ(a†b − ab†)]` on a pair of coherent states.
/// The map is a rotation, so total mean photon number is conserved and
/// successive angles add.
pub fn beam_splitter_transform(
    a: CoherentAmplitude,
    b: CoherentAmplitude,
    theta: f64,
) -> Result<(CoherentAmplitude, CoherentAmplitude)> {
    check_inputs(a, b, theta)?;
    let (s, c) = theta.sin_cos();
    Ok((a * c + b * s, b * c - a * s))
}

/// Variant generated by `exp[iθ(a b† + a† b)]`:
/// `(a, b) → (a·cosθ + i·b·sinθ, i·a·sinθ + b·cosθ)`.
pub fn beam_splitter_transform_phased(
    a: CoherentAmplitude,
    b: CoherentAmplitude,
    theta: f64,
) -> Result<(CoherentAmplitude, CoherentAmplitude)> {
    check_inputs(a, b, theta)?;
    let (s, c) = theta.sin_cos();
    Ok((a * c + b.times_i() * s, a.times_i() * s + b * c))
}

fn check_inputs(a: CoherentAmplitude, b: CoherentAmplitude, theta: f64) -> Result<()> {
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::domain("beam splitter inputs must be finite"));
    }
    ensure_finite("mixing angle", theta)?;
    Ok(())
}

/// Field–atom coupling in the off-resonant regime.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtomCoupling {
    /// Coupling constant `g` (rad/s).
    pub g: f64,
    /// Detuning `Δω = ω₀ − ω` (rad/s), strictly positive.
    pub delta_omega: f64,
    /// Interaction duration `Δτ` (s).
    pub delta_tau: f64,
}

impl AtomCoupling {
    pub fn new(g: f64, delta_omega: f64, delta_tau: f64) -> Result<Self> {
        ensure_finite("coupling constant g", g)?;
        ensure_finite("detuning", delta_omega)?;
        if delta_omega <= 0.0 {
            return Err(Error::domain(format!(
                "detuning must be positive (off-resonant regime), got {delta_omega}"
            )));
        }
        ensure_positive("interaction duration", delta_tau)?;
        Ok(AtomCoupling {
            g,
            delta_omega,
            delta_tau,
        })
    }

    /// Coupling with the uncertainty-limited duration `Δτ = 1/Δω`.
    pub fn with_uncertainty_duration(g: f64, delta_omega: f64) -> Result<Self> {
        ensure_finite("detuning", delta_omega)?;
        if delta_omega <= 0.0 {
            return Err(Error::domain(format!(
                "detuning must be positive (off-resonant regime), got {delta_omega}"
            )));
        }
        Self::new(g, delta_omega, 1.0 / delta_omega)
    }

    /// `|g·√N̄/Δω|`, which must stay far below one for the effective
    /// Hamiltonian to apply. Callers decide what "far below" means.
    pub fn perturbation_parameter(&self, mean_excitation: f64) -> f64 {
        (self.g * mean_excitation.max(0.0).sqrt() / self.delta_omega).abs()
    }
}

/// Small phase imprinted by a single interaction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseRetardation {
    /// `ξ = χΔτ` (rad).
    pub xi: f64,
    /// `χ = g²/Δω` (rad/s).
    pub chi: f64,
}

pub fn interaction_phase(coupling: &AtomCoupling) -> Result<PhaseRetardation> {
    if coupling.delta_omega <= 0.0 {
        return Err(Error::domain("on-resonant coupling is not supported"));
    }
    ensure_positive("interaction duration", coupling.delta_tau)?;
    let chi = coupling.g * coupling.g / coupling.delta_omega;
    Ok(PhaseRetardation {
        xi: chi * coupling.delta_tau,
        chi,
    })
}

/// Amplitude `iξα` of the secondary mode after one interaction.
///
/// The second-order phase δ that accompanies `iξ` is dropped: it only ever
/// multiplies another small quantity. The primary amplitude is left as is.
pub fn secondary_amplitude(
    alpha_p: CoherentAmplitude,
    ret: &PhaseRetardation,
) -> Result<CoherentAmplitude> {
    if !alpha_p.is_finite() {
        return Err(Error::domain("primary amplitude must be finite"));
    }
    ensure_finite("phase retardation", ret.xi)?;
    Ok(alpha_p.times_i() * ret.xi)
}

/// `ξ/(k₀d)`, the excess of the refractive index over unity.
pub fn index_excess(xi: f64, k0: f64, atom_spacing: f64) -> Result<f64> {
    ensure_positive("vacuum wavenumber", k0)?;
    ensure_positive("atom spacing", atom_spacing)?;
    ensure_finite("phase retardation", xi)?;
    if xi < 0.0 {
        return Err(Error::domain(format!(
            "phase retardation must be non-negative, got {xi}"
        )));
    }
    Ok(xi / (k0 * atom_spacing))
}

/// `n = 1 + ξ/(k₀d)`.
pub fn refractive_index(xi: f64, k0: f64, atom_spacing: f64) -> Result<f64> {
    Ok(1.0 + index_excess(xi, k0, atom_spacing)?)
}

/// Wavelength of the composite field inside the medium, `λ′ = λ/n`.
pub fn wavelength_in_medium(lambda: f64, n: f64) -> Result<f64> {
    ensure_positive("wavelength", lambda)?;
    if !(n >= 1.0) {
        return Err(Error::domain(format!("index must be at least 1, got {n}")));
    }
    Ok(lambda / n)
}

/// Total phase delay `m·ξ` accumulated over `m` atoms.
pub fn composite_phase(atoms: i64, xi: f64) -> Result<f64> {
    if atoms < 0 {
        return Err(Error::domain(format!(
            "atom count must be non-negative, got {atoms}"
        )));
    }
    ensure_finite("phase retardation", xi)?;
    Ok(atoms as f64 * xi)
}

/// Dilute atomic medium whose dispersion follows from the retardation model.
///
/// The coupling constant scales as `g ∝ √ω`, so `g²` is stored per unit
/// angular frequency. The interaction duration is `Δτ = 1/Δω`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomicMedium {
    /// Atomic resonance ω₀ (rad/s).
    pub omega0: f64,
    /// `g²/ω` (rad/s).
    pub coupling_sq_per_omega: f64,
    /// Spacing between atoms along the path (m).
    pub atom_spacing: f64,
}

impl AtomicMedium {
    pub fn new(omega0: f64, coupling_sq_per_omega: f64, atom_spacing: f64) -> Result<Self> {
        ensure_positive("resonance frequency", omega0)?;
        ensure_positive("coupling strength", coupling_sq_per_omega)?;
        ensure_positive("atom spacing", atom_spacing)?;
        Ok(AtomicMedium {
            omega0,
            coupling_sq_per_omega,
            atom_spacing,
        })
    }

    /// Refractive index at angular frequency `omega < omega0`.
    pub fn index_at(&self, omega: f64) -> Result<f64> {
        ensure_positive("angular frequency", omega)?;
        let g = (self.coupling_sq_per_omega * omega).sqrt();
        let coupling = AtomCoupling::with_uncertainty_duration(g, self.omega0 - omega)?;
        let ret = interaction_phase(&coupling)?;
        refractive_index(ret.xi, omega / crate::SPEED_OF_LIGHT, self.atom_spacing)
    }
}
