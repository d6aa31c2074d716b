//! Interface physics between two dielectrics for TE fields.
//!
//! Amplitudes on each side are rescaled by `κ^{-1/2}`, which turns the
//! conventional Fresnel pair into the photon-conserving pair
//!
//! ```text
//! t̃ = 2√(κ₁κ₂)/(κ₁+κ₂),   r̃ = (κ₁−κ₂)/(κ₁+κ₂),   t̃² + r̃² = 1
//! ```
//!
//! so that an interface acts on coherent amplitudes as a real rotation by
//! the mixing angle `ϑ` with `tan ϑ = r̃/t̃`. Interfaces are positionless:
//! the phase `exp(±iκξ)` at the interface position is absorbed into the
//! amplitudes on either side.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, ensure_positive, Error, Result};
use crate::quantum::CoherentAmplitude;

/// Classification of the transverse wavenumber in one medium for a fixed β.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum WavenumberKind {
    /// Real `κ > 0`.
    Propagating(f64),
    /// `κ = iγ` with decay rate `γ > 0`.
    Evanescent(f64),
    /// `κ = 0` exactly: grazing propagation at the critical angle.
    Grazing,
}

/// Transverse component of the wave vector together with the invariant
/// `κ² + β² = (n·k₀)²` it was derived from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransverseWavenumber {
    pub kind: WavenumberKind,
    pub beta: f64,
    pub n: f64,
    pub k0: f64,
}

impl TransverseWavenumber {
    pub fn from_beta(n: f64, k0: f64, beta: f64) -> Result<Self> {
        ensure_positive("refractive index", n)?;
        ensure_positive("vacuum wavenumber", k0)?;
        ensure_finite("propagation constant", beta)?;
        if beta < 0.0 {
            return Err(Error::domain("propagation constant must be non-negative"));
        }
        let nk = n * k0;
        // (nk − β)(nk + β) keeps relative accuracy when β ≈ nk.
        let kappa_sq = (nk - beta) * (nk + beta);
        let kind = if kappa_sq > 0.0 {
            WavenumberKind::Propagating(kappa_sq.sqrt())
        } else if kappa_sq < 0.0 {
            WavenumberKind::Evanescent((-kappa_sq).sqrt())
        } else {
            WavenumberKind::Grazing
        };
        Ok(TransverseWavenumber { kind, beta, n, k0 })
    }

    /// Real κ, or `None` when the field does not propagate transversely.
    pub fn kappa(&self) -> Option<f64> {
        match self.kind {
            WavenumberKind::Propagating(k) => Some(k),
            _ => None,
        }
    }

    /// κ with evanescent and grazing fields mapped to zero, the value the
    /// normalized coefficients take in the total-reflection limit.
    pub fn kappa_or_zero(&self) -> f64 {
        self.kappa().unwrap_or(0.0)
    }

    pub fn gamma(&self) -> Option<f64> {
        match self.kind {
            WavenumberKind::Evanescent(g) => Some(g),
            _ => None,
        }
    }

    pub fn is_propagating(&self) -> bool {
        matches!(self.kind, WavenumberKind::Propagating(_))
    }

    /// Signed `κ²`: positive when propagating, `−γ²` when evanescent.
    pub fn kappa_squared(&self) -> f64 {
        match self.kind {
            WavenumberKind::Propagating(k) => k * k,
            WavenumberKind::Evanescent(g) => -g * g,
            WavenumberKind::Grazing => 0.0,
        }
    }
}

/// Normalized Fresnel pair and mixing angle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterfaceCoeffs {
    pub t_norm: f64,
    pub r_norm: f64,
    pub theta_mix: f64,
}

impl InterfaceCoeffs {
    /// Coefficients of a rotation by `theta_mix`.
    pub fn from_mixing_angle(theta_mix: f64) -> Result<Self> {
        ensure_finite("mixing angle", theta_mix)?;
        let (r, t) = theta_mix.sin_cos();
        if t < 0.0 {
            return Err(Error::domain("mixing angle must lie in [-π/2, π/2]"));
        }
        Ok(InterfaceCoeffs {
            t_norm: t,
            r_norm: r,
            theta_mix,
        })
    }

    /// Transfer matrix carrying `(forward, backward)` amplitudes on the
    /// incidence side to those on the far side: `(1/t̃)·[[1, r̃], [r̃, 1]]`.
    /// Undefined for a totally reflecting interface.
    pub fn transfer_matrix(&self) -> Result<[[f64; 2]; 2]> {
        if self.t_norm <= 0.0 {
            return Err(Error::domain(
                "transfer matrix undefined for a totally reflecting interface",
            ));
        }
        let inv = 1.0 / self.t_norm;
        let r = self.r_norm * inv;
        Ok([[inv, r], [r, inv]])
    }
}

/// Result of applying Snell's law at a planar interface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Refraction {
    /// Refraction angle from the interface normal (rad).
    Refracted { theta2: f64 },
    TotalReflection,
}

/// Relative slack on `n₁ sinθ₁ ≤ n₂` so that incidence at exactly the
/// critical angle is not lost to rounding.
const CRITICAL_SLACK: f64 = 8.0 * f64::EPSILON;

/// Snell refraction with angles measured from the interface normal, so that
/// `β = n·k₀·sinθ` is the conserved quantity.
pub fn snell_refract(n1: f64, n2: f64, theta1: f64) -> Result<Refraction> {
    check_index("n1", n1)?;
    check_index("n2", n2)?;
    ensure_finite("incidence angle", theta1)?;
    if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&theta1) {
        return Err(Error::domain(format!(
            "incidence angle must lie in [0, π/2], got {theta1}"
        )));
    }
    if n1 == n2 {
        return Ok(Refraction::Refracted { theta2: theta1 });
    }
    let s = n1 * theta1.sin() / n2;
    if s > 1.0 + CRITICAL_SLACK {
        Ok(Refraction::TotalReflection)
    } else {
        Ok(Refraction::Refracted {
            theta2: s.min(1.0).asin(),
        })
    }
}

/// Critical angle `asin(n₂/n₁)` for `n₁ > n₂`.
pub fn critical_angle(n1: f64, n2: f64) -> Result<f64> {
    check_index("n1", n1)?;
    check_index("n2", n2)?;
    if n2 >= n1 {
        return Err(Error::domain("critical angle requires n1 > n2"));
    }
    Ok((n2 / n1).asin())
}

fn check_index(name: &str, n: f64) -> Result<()> {
    ensure_finite(name, n)?;
    if n < 1.0 {
        return Err(Error::domain(format!("{name} must be at least 1, got {n}")));
    }
    Ok(())
}

/// Normalized Fresnel coefficients from the transverse wavenumbers on both
/// sides. A zero κ encodes the total-reflection limit.
pub fn normalized_fresnel(kappa1: f64, kappa2: f64) -> Result<InterfaceCoeffs> {
    ensure_finite("kappa1", kappa1)?;
    ensure_finite("kappa2", kappa2)?;
    if kappa1 < 0.0 || kappa2 < 0.0 {
        return Err(Error::domain("transverse wavenumbers must be non-negative"));
    }
    let sum = kappa1 + kappa2;
    if sum == 0.0 {
        return Err(Error::domain("degenerate interface: both wavenumbers vanish"));
    }
    let t_norm = 2.0 * (kappa1 * kappa2).sqrt() / sum;
    let r_norm = (kappa1 - kappa2) / sum;
    Ok(InterfaceCoeffs {
        t_norm,
        r_norm,
        theta_mix: r_norm.atan2(t_norm),
    })
}

/// Conventional Fresnel coefficients recovered from the normalized pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConventionalCoeffs {
    /// Transmission `j+ → j′+`.
    pub t: f64,
    /// Transmission `j′− → j−`.
    pub t_prime: f64,
    /// Reflection `j+ → j−`.
    pub r: f64,
    /// Reflection `j′− → j′+`.
    pub r_prime: f64,
}

pub fn conventional_from_normalized(
    coeffs: &InterfaceCoeffs,
    kappa1: f64,
    kappa2: f64,
) -> Result<ConventionalCoeffs> {
    ensure_positive("kappa1", kappa1)?;
    ensure_positive("kappa2", kappa2)?;
    Ok(ConventionalCoeffs {
        t: coeffs.t_norm * (kappa1 / kappa2).sqrt(),
        t_prime: coeffs.t_norm * (kappa2 / kappa1).sqrt(),
        r: coeffs.r_norm,
        r_prime: -coeffs.r_norm,
    })
}

/// Two-port action of an interface on coherent amplitudes.
///
/// `a_in` is the forward amplitude arriving from side j, `b_in` the backward
/// amplitude arriving from side j′. Returns `(a_out, b_out)`: the forward
/// amplitude leaving into j′ and the backward amplitude leaving into j,
/// `a_out = t̃·a + r̃·b`, `b_out = −r̃·a + t̃·b`.
pub fn interface_transform(
    a_in: CoherentAmplitude,
    b_in: CoherentAmplitude,
    coeffs: &InterfaceCoeffs,
) -> (CoherentAmplitude, CoherentAmplitude) {
    let (t, r) = (coeffs.t_norm, coeffs.r_norm);
    (a_in * t + b_in * r, b_in * t - a_in * r)
}

/// Inverse (transpose) of [`interface_transform`].
pub fn interface_transform_inverse(
    a_out: CoherentAmplitude,
    b_out: CoherentAmplitude,
    coeffs: &InterfaceCoeffs,
) -> (CoherentAmplitude, CoherentAmplitude) {
    let (t, r) = (coeffs.t_norm, coeffs.r_norm);
    (a_out * t - b_out * r, a_out * r + b_out * t)
}

/// Relative index difference `Δ = (n₁² − n₂²)/(2n₁²)`.
pub fn relative_index_difference(n1: f64, n2: f64) -> Result<f64> {
    ensure_positive("n1", n1)?;
    ensure_positive("n2", n2)?;
    Ok((n1 * n1 - n2 * n2) / (2.0 * n1 * n1))
}

/// Penetration depth of the evanescent field from the position–momentum
/// uncertainty of a totally reflected field: `λ₀/(2π·n₁·√(2Δ))`.
pub fn evanescent_penetration(n1: f64, delta_r: f64, lambda0: f64) -> Result<f64> {
    ensure_positive("n1", n1)?;
    ensure_positive("vacuum wavelength", lambda0)?;
    ensure_finite("relative index difference", delta_r)?;
    if !(delta_r > 0.0 && delta_r < 0.5) {
        return Err(Error::domain(format!(
            "relative index difference must lie in (0, 1/2), got {delta_r}"
        )));
    }
    Ok(lambda0 / (2.0 * std::f64::consts::PI * n1 * (2.0 * delta_r).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, SQRT_2};

    fn amp(re: f64, im: f64) -> CoherentAmplitude {
        CoherentAmplitude::new(re, im).unwrap()
    }

    #[test]
    fn homogeneous_medium_goes_straight() {
        for &th in &[0.0, 0.3, 1.2, FRAC_PI_2] {
            assert_eq!(
                snell_refract(1.45, 1.45, th).unwrap(),
                Refraction::Refracted { theta2: th }
            );
        }
    }

    #[test]
    fn critical_incidence_grazes() {
        let tc = critical_angle(1.45, 1.44).unwrap();
        assert!((tc.to_degrees() - 83.2671).abs() < 1e-4);
        match snell_refract(1.45, 1.44, tc).unwrap() {
            Refraction::Refracted { theta2 } => assert!((theta2 - FRAC_PI_2).abs() < 1e-6),
            other => panic!("expected grazing refraction, got {other:?}"),
        }
    }

    #[test]
    fn beyond_critical_is_total_reflection() {
        assert_eq!(
            snell_refract(1.45, 1.44, 89f64.to_radians()).unwrap(),
            Refraction::TotalReflection
        );
    }

    #[test]
    fn snell_domain() {
        assert!(snell_refract(0.9, 1.2, 0.1).is_err());
        assert!(snell_refract(1.2, 1.5, -0.1).is_err());
        assert!(snell_refract(1.2, 1.5, 2.0).is_err());
    }

    #[test]
    fn matched_and_grazing_limits() {
        let c = normalized_fresnel(4.2e6, 4.2e6).unwrap();
        assert_eq!((c.t_norm, c.r_norm, c.theta_mix), (1.0, 0.0, 0.0));
        let c = normalized_fresnel(3.0e5, 0.0).unwrap();
        assert_eq!((c.t_norm, c.r_norm), (0.0, 1.0));
        assert_eq!(c.theta_mix, FRAC_PI_2);
        assert!(normalized_fresnel(0.0, 0.0).is_err());
        assert!(normalized_fresnel(-1.0, 2.0).is_err());
    }

    #[test]
    fn closed_form_values() {
        let c = normalized_fresnel(2.0, 1.0).unwrap();
        assert!((c.t_norm - 2.0 * SQRT_2 / 3.0).abs() < 1e-15);
        assert!((c.t_norm - 0.942809).abs() < 1e-6);
        assert!((c.r_norm - 1.0 / 3.0).abs() < 1e-15);
        assert!((c.theta_mix.tan() - c.r_norm / c.t_norm).abs() < 1e-15);
    }

    #[test]
    fn conventional_coefficients() {
        let c = normalized_fresnel(2.0, 1.0).unwrap();
        let cc = conventional_from_normalized(&c, 2.0, 1.0).unwrap();
        assert!((cc.t - 4.0 / 3.0).abs() < 1e-15);
        assert!((cc.t_prime - 2.0 / 3.0).abs() < 1e-15);
        assert!((cc.r - 1.0 / 3.0).abs() < 1e-15);
        assert!((cc.r_prime + 1.0 / 3.0).abs() < 1e-15);
        // Classical TE transmission 2κ₁/(κ₁+κ₂).
        assert!((cc.t - 2.0 * 2.0 / 3.0).abs() < 1e-15);
        // Stokes relation.
        assert!((cc.t * cc.t_prime + cc.r * cc.r - 1.0).abs() < 1e-15);

        let m = normalized_fresnel(5.0, 5.0).unwrap();
        let cm = conventional_from_normalized(&m, 5.0, 5.0).unwrap();
        assert_eq!((cm.t, cm.t_prime, cm.r), (1.0, 1.0, 0.0));
        assert!(conventional_from_normalized(&c, 2.0, 0.0).is_err());
    }

    #[test]
    fn interface_transform_examples() {
        let a = amp(0.7, -0.2);
        let clear = InterfaceCoeffs::from_mixing_angle(0.0).unwrap();
        assert_eq!(
            interface_transform(a, CoherentAmplitude::VACUUM, &clear),
            (a, CoherentAmplitude::VACUUM)
        );

        let mirror = normalized_fresnel(1.0, 0.0).unwrap();
        let (x, y) = interface_transform(a, CoherentAmplitude::VACUUM, &mirror);
        assert_eq!(x.mean_photons(), 0.0);
        assert_eq!(y, -a);

        let half = InterfaceCoeffs {
            t_norm: FRAC_1_SQRT_2,
            r_norm: FRAC_1_SQRT_2,
            theta_mix: std::f64::consts::FRAC_PI_4,
        };
        let (x, y) = interface_transform(amp(1.0, 0.0), amp(1.0, 0.0), &half);
        assert!((x.re - SQRT_2).abs() < 1e-15 && x.im == 0.0);
        assert!(y.re.abs() < 1e-15 && y.im == 0.0);
    }

    #[test]
    fn transverse_wavenumber_branches() {
        let k0 = 4.0e6;
        let p = TransverseWavenumber::from_beta(1.45, k0, 1.40 * k0).unwrap();
        let kappa = p.kappa().unwrap();
        let lhs = kappa * kappa + p.beta * p.beta;
        assert!((lhs - (1.45 * k0).powi(2)).abs() < 1e-9 * lhs);

        let e = TransverseWavenumber::from_beta(1.44, k0, 1.447 * k0).unwrap();
        let g = e.gamma().unwrap();
        let rhs = e.beta * e.beta - g * g;
        assert!((rhs - (1.44 * k0).powi(2)).abs() < 1e-9 * rhs);
        assert_eq!(e.kappa_or_zero(), 0.0);

        let z = TransverseWavenumber::from_beta(1.0, 2.0, 2.0).unwrap();
        assert_eq!(z.kind, WavenumberKind::Grazing);
        assert!(TransverseWavenumber::from_beta(1.0, 2.0, -1.0).is_err());
    }

    #[test]
    fn penetration_examples() {
        let lambda0 = 1.55e-6;
        let depth = evanescent_penetration(1.45, 0.01, lambda0).unwrap();
        let ratio = depth / (lambda0 / 1.29);
        assert!((ratio - 1.0).abs() < 0.005, "{ratio}");

        let pi = std::f64::consts::PI;
        let depth = evanescent_penetration(1.0, 1.0 / (8.0 * pi * pi), lambda0).unwrap();
        assert!((depth - lambda0).abs() < 1e-15 * lambda0 * 10.0);

        let mut last = f64::INFINITY;
        for i in 1..50 {
            let d = evanescent_penetration(1.45, 0.0099 * i as f64, lambda0).unwrap();
            assert!(d < last);
            last = d;
        }
        assert!(evanescent_penetration(1.45, 0.0, lambda0).is_err());
        assert!(evanescent_penetration(1.45, 0.5, lambda0).is_err());
    }

    #[test]
    fn relative_difference_matches_contrast() {
        let d = relative_index_difference(1.45, 1.44).unwrap();
        assert!((d - (1.45f64.powi(2) - 1.44f64.powi(2)) / (2.0 * 1.45f64.powi(2))).abs() < 1e-18);
    }

    #[test]
    fn transfer_matrix_requires_transmission() {
        let mirror = normalized_fresnel(1.0, 0.0).unwrap();
        assert!(mirror.transfer_matrix().is_err());
    }
}
