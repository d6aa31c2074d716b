//! Graded-index slab with the power-law profile `n(x) = n₁√(1 − (g|x|)^q)`.
//!
//! The core is cut into thin homogeneous layers. β is fixed by the launch
//! and conserved at every interface, so each layer has its own κ_j and the
//! interfaces reflect only through the small differences `κ_j − κ_{j+1}`.

mod trace;

pub use trace::{
    reflection_loss_per_period, trace_trajectory, zero_crossing_period, Direction, RayLaunch,
    StepRule, Trajectory, TrajectoryPoint,
};

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, ensure_positive, Error, Result};
use crate::fresnel::{normalized_fresnel, TransverseWavenumber};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GiProfile {
    /// Axial index n₁.
    pub n1: f64,
    /// Focusing constant g (1/m).
    pub g: f64,
    /// Profile exponent; 2 is the parabolic profile.
    pub q: f64,
    /// Core width (m), at most `2/g`.
    pub d: f64,
}

impl GiProfile {
    pub fn new(n1: f64, g: f64, q: f64, d: f64) -> Result<Self> {
        ensure_positive("n1", n1)?;
        ensure_positive("focusing constant g", g)?;
        ensure_positive("profile exponent q", q)?;
        ensure_positive("core width", d)?;
        if 0.5 * d * g > 1.0 + 4.0 * f64::EPSILON {
            return Err(Error::domain(format!(
                "core half-width {} exceeds 1/g = {}, where the index turns imaginary",
                0.5 * d,
                1.0 / g
            )));
        }
        Ok(GiProfile { n1, g, q, d })
    }

    /// Profile with `g = 2√(2Δ_r)/d`.
    pub fn from_contrast(n1: f64, delta_r: f64, d: f64, q: f64) -> Result<Self> {
        ensure_positive("relative index difference", delta_r)?;
        if delta_r >= 0.5 {
            return Err(Error::domain(format!(
                "relative index difference must be below 1/2, got {delta_r}"
            )));
        }
        ensure_positive("core width", d)?;
        Self::new(n1, 2.0 * (2.0 * delta_r).sqrt() / d, q, d)
    }

    /// `n(x)²` without the range check; it goes negative past `|x| = 1/g`.
    fn index_sq_raw(&self, x: f64) -> f64 {
        self.n1 * self.n1 * (1.0 - (self.g * x.abs()).powf(self.q))
    }

    fn is_parabolic(&self) -> bool {
        self.q == 2.0
    }

    fn require_parabolic(&self, what: &str) -> Result<()> {
        if self.is_parabolic() {
            Ok(())
        } else {
            Err(Error::domain(format!(
                "{what} holds only for q = 2, profile has q = {}",
                self.q
            )))
        }
    }
}

pub fn index_at(profile: &GiProfile, x: f64) -> Result<f64> {
    ensure_finite("position", x)?;
    if profile.g * x.abs() >= 1.0 {
        return Err(Error::domain(format!(
            "index undefined at |x| = {} ≥ 1/g = {}",
            x.abs(),
            1.0 / profile.g
        )));
    }
    Ok(profile.index_sq_raw(x).sqrt())
}

/// Exact transverse wavenumber at `x`. Past the turning point the result is
/// evanescent (or grazing exactly at it) rather than an error.
pub fn kappa_at_layer(
    profile: &GiProfile,
    beta: f64,
    k0: f64,
    x: f64,
) -> Result<TransverseWavenumber> {
    TransverseWavenumber::from_beta(index_at(profile, x)?, k0, beta)
}

/// Quadratic approximation `κ₀[1 − n₁²k₀²g²x²/(2κ₀²)]`, `κ₀ = √(n₁²k₀² − β²)`.
pub fn kappa_paraxial(profile: &GiProfile, beta: f64, k0: f64, x: f64) -> Result<f64> {
    profile.require_parabolic("the quadratic κ approximation")?;
    let axis = TransverseWavenumber::from_beta(profile.n1, k0, beta)?;
    let k_axis = axis
        .kappa()
        .ok_or_else(|| Error::domain("β must be below n₁k₀ for a transverse wave on axis"))?;
    let nkg = profile.n1 * k0 * profile.g * x;
    Ok(k_axis * (1.0 - nkg * nkg / (2.0 * k_axis * k_axis)))
}

/// `|r̃_{j,j+1}|` between the layers centred at `jΔx` and `(j+1)Δx`, using the
/// exact κ of each layer. Both layers must propagate.
pub fn interface_reflection_magnitude(
    profile: &GiProfile,
    beta: f64,
    k0: f64,
    j: i64,
    dx: f64,
) -> Result<f64> {
    ensure_positive("layer thickness", dx)?;
    let k_a = kappa_at_layer(profile, beta, k0, j as f64 * dx)?;
    let k_b = kappa_at_layer(profile, beta, k0, (j + 1) as f64 * dx)?;
    match (k_a.kappa(), k_b.kappa()) {
        (Some(a), Some(b)) => Ok(normalized_fresnel(a, b)?.r_norm.abs()),
        _ => Err(Error::domain(format!(
            "interface {j}|{} touches a turning layer; no transmitted wave",
            j + 1
        ))),
    }
}

/// Turning amplitude `x_t` where `n(x_t)k₀ = β`: `(1/g)(1 − β²/(n₁k₀)²)^{1/q}`.
pub fn turning_amplitude(profile: &GiProfile, beta: f64, k0: f64) -> Result<f64> {
    ensure_positive("propagation constant", beta)?;
    ensure_positive("vacuum wavenumber", k0)?;
    let b = beta / (profile.n1 * k0);
    if b >= 1.0 {
        return Err(Error::domain(format!(
            "β = {beta} is not below n₁k₀ = {}; the ray has no transverse motion",
            profile.n1 * k0
        )));
    }
    Ok(((1.0 - b) * (1.0 + b)).powf(1.0 / profile.q) / profile.g)
}

/// Period of the continuum ray `x(z) = x_t·sin(Ωz)`, `Ω = n₁k₀g/β`, for q = 2.
pub fn analytic_period(profile: &GiProfile, beta: f64, k0: f64) -> Result<f64> {
    profile.require_parabolic("the closed-form period")?;
    ensure_positive("propagation constant", beta)?;
    ensure_positive("vacuum wavenumber", k0)?;
    Ok(2.0 * std::f64::consts::PI * beta / (profile.n1 * k0 * profile.g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    const K0: f64 = 2.0 * PI / 1.55e-6;

    fn fig() -> GiProfile {
        GiProfile::from_contrast(1.45, 0.01, 50e-6, 2.0).unwrap()
    }

    fn beta_at(theta_deg: f64) -> f64 {
        1.45 * K0 * theta_deg.to_radians().sin()
    }

    #[test]
    fn contrast_gives_focusing_constant() {
        let p = fig();
        assert!((p.g - 5656.854249492381).abs() < 1e-9);
        let edge = index_at(&p, 25e-6).unwrap();
        assert!((edge - 1.45 * (0.98f64).sqrt()).abs() < 1e-14);
        assert_eq!(index_at(&p, 0.0).unwrap(), 1.45);
    }

    #[test]
    fn index_domain() {
        let p = GiProfile::new(1.45, 5.66e3, 2.0, 2.0 / 5.66e3).unwrap();
        assert!(index_at(&p, 1.0 / 5.66e3).is_err());
        assert!(index_at(&p, -0.999 / 5.66e3).is_ok());
        assert!(GiProfile::new(1.45, 5.66e3, 2.0, 1e-3).is_err());
    }

    #[test]
    fn index_decreases_outward() {
        let p = fig();
        let mut prev = f64::INFINITY;
        for i in 0..100 {
            let n = index_at(&p, i as f64 * 0.25e-6).unwrap();
            assert!(n < prev);
            assert_eq!(n, index_at(&p, -(i as f64) * 0.25e-6).unwrap());
            prev = n;
        }
    }

    #[test]
    fn paraxial_kappa_on_axis_is_exact() {
        let p = fig();
        let b = beta_at(88.0);
        let exact = kappa_at_layer(&p, b, K0, 0.0).unwrap().kappa().unwrap();
        assert_eq!(kappa_paraxial(&p, b, K0, 0.0).unwrap(), exact);
    }

    #[test]
    fn paraxial_kappa_close_to_axis() {
        let p = fig();
        let b = beta_at(88.0);
        for i in 1..=10 {
            let x = i as f64 * 0.0005 / p.g;
            let exact = kappa_at_layer(&p, b, K0, x).unwrap().kappa().unwrap();
            let approx = kappa_paraxial(&p, b, K0, x).unwrap();
            assert!(((approx - exact) / exact).abs() < 1e-4, "gx = {}", p.g * x);
        }
    }

    #[test]
    fn beyond_turning_is_evanescent() {
        let p = fig();
        let b = beta_at(88.0);
        let k = kappa_at_layer(&p, b, K0, 0.05 / p.g).unwrap();
        assert!(k.gamma().is_some());
        assert!(0.05 > p.g * turning_amplitude(&p, b, K0).unwrap());
    }

    #[test]
    fn paraxial_kappa_step_has_odd_factor() {
        let p = fig();
        let b = beta_at(88.0);
        let dx = 0.1e-6;
        let axis = ((1.45 * K0).powi(2) - b * b).sqrt();
        let unit = (1.45 * K0 * p.g * dx).powi(2) / (2.0 * axis);
        for j in 0..20 {
            let a = kappa_paraxial(&p, b, K0, j as f64 * dx).unwrap();
            let c = kappa_paraxial(&p, b, K0, (j + 1) as f64 * dx).unwrap();
            let want = (2 * j + 1) as f64 * unit;
            assert!(((a - c) - want).abs() < 1e-9 * want + 1e-12 * axis);
        }
    }

    #[test]
    fn paraxial_requires_parabola() {
        let p = GiProfile::new(1.45, 5.66e3, 1.5, 50e-6).unwrap();
        assert!(kappa_paraxial(&p, beta_at(88.0), K0, 1e-6).is_err());
        assert!(analytic_period(&p, beta_at(88.0), K0).is_err());
    }

    #[test]
    fn reflection_scales_with_square_of_step() {
        let p = fig();
        let b = beta_at(88.0);
        for j in [0, 3, 10] {
            let r1 = interface_reflection_magnitude(&p, b, K0, j, 0.1e-6).unwrap();
            let r2 = interface_reflection_magnitude(&p, b, K0, j, 0.05e-6).unwrap();
            assert!((r1 / r2 / 4.0 - 1.0).abs() < 0.05, "j = {j}: {}", r1 / r2);
        }
    }

    #[test]
    fn axis_interface_reflects_least() {
        let p = fig();
        let b = beta_at(86.0);
        let dx = 0.1e-6;
        let r0 = interface_reflection_magnitude(&p, b, K0, 0, dx).unwrap();
        let mut j = 1;
        while let Ok(r) = interface_reflection_magnitude(&p, b, K0, j, dx) {
            assert!(r > r0);
            assert_eq!(r, interface_reflection_magnitude(&p, b, K0, -j - 1, dx).unwrap());
            j += 1;
        }
        assert!(j > 50);
    }

    #[test]
    fn flat_profile_does_not_reflect() {
        // g → 0 leaves the profile flat on the scale of the layers.
        let p = GiProfile::new(1.45, 1e-300, 2.0, 1e-3).unwrap();
        let r = interface_reflection_magnitude(&p, beta_at(80.0), K0, 5, 1e-6).unwrap();
        assert_eq!(r, 0.0);
    }

    #[test]
    fn turning_layer_rejected() {
        let p = fig();
        let b = beta_at(88.0);
        let xt = turning_amplitude(&p, b, K0).unwrap();
        let j = (xt / 0.1e-6).floor() as i64;
        assert!(interface_reflection_magnitude(&p, b, K0, j, 0.1e-6).is_err());
        assert!(interface_reflection_magnitude(&p, b, K0, j - 1, 0.1e-6).is_ok());
    }

    #[test]
    fn turning_amplitude_forms() {
        let p = GiProfile::new(1.45, 5.66e3, 2.0, 2.0 / 5.66e3).unwrap();
        let xt = turning_amplitude(&p, beta_at(88.0), K0).unwrap();
        assert!((xt - 88f64.to_radians().cos() / 5.66e3).abs() < 1e-18);
        assert!((xt - 6.166e-6).abs() < 1e-9);
        assert!(turning_amplitude(&p, 1.45 * K0, K0).is_err());
        let near = turning_amplitude(&p, 1.45 * K0 * (1.0 - 1e-12), K0).unwrap();
        assert!(near < 1e-9);
    }

    #[test]
    fn turning_amplitude_general_exponent() {
        for q in [1.0, 1.5, 3.0, 8.0] {
            let p = GiProfile::new(1.45, 5.66e3, q, 2.0 / 5.66e3).unwrap();
            let b = beta_at(85.0);
            let xt = turning_amplitude(&p, b, K0).unwrap();
            let root = crate::roots::bisect(
                |x| index_at(&p, x).unwrap() * K0 - b,
                0.0,
                0.999 / p.g,
                1e-15,
            )
            .unwrap();
            assert!((xt - root).abs() < 1e-12 * root, "q = {q}");
        }
    }

    #[test]
    fn analytic_period_value() {
        let p = GiProfile::new(1.45, 5.66e3, 2.0, 2.0 / 5.66e3).unwrap();
        let lam = analytic_period(&p, beta_at(88.0), K0).unwrap();
        assert!((lam - 2.0 * PI * 88f64.to_radians().sin() / 5.66e3).abs() < 1e-15);
        assert!((lam - 1.109e-3).abs() < 1e-6);
    }
}
