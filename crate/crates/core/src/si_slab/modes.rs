use serde::{Deserialize, Serialize};

use super::SlabSpec;
use crate::error::{Error, Result};
use crate::roots::scan_roots;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn as_str(self) -> &'static str {
        match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        }
    }
}

/// A solved TE mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GuidedMode {
    pub parity: Parity,
    /// Propagation constant β (rad/m).
    pub beta: f64,
    /// Core transverse wavenumber κ (rad/m).
    pub kappa: f64,
    /// Cladding decay rate γ (1/m).
    pub gamma: f64,
    /// Eigenvalue-equation residual recomputed from β (1/m).
    pub residual: f64,
    pub spec: SlabSpec,
}

impl GuidedMode {
    /// Effective index β/k₀.
    pub fn effective_index(&self) -> f64 {
        self.beta / self.spec.k0()
    }
}

/// Residual of the TE eigenvalue equation evaluated from β alone:
/// `|γ − κ tan(κd/2)|` for even modes, `|γ + κ cot(κd/2)|` for odd ones.
pub fn eigen_residual(spec: &SlabSpec, parity: Parity, beta: f64) -> f64 {
    let k0 = spec.k0();
    let (core, clad) = (spec.n1 * k0, spec.n2 * k0);
    let kappa = ((core - beta) * (core + beta)).max(0.0).sqrt();
    let gamma = ((beta - clad) * (beta + clad)).max(0.0).sqrt();
    let half = 0.5 * kappa * spec.d;
    match parity {
        Parity::Even => (gamma - kappa * half.tan()).abs(),
        Parity::Odd => (gamma + kappa / half.tan()).abs(),
    }
}

/// Number of TE modes of a symmetric slab, `⌊2V/π⌋ + 1`.
pub fn expected_mode_count(spec: &SlabSpec) -> usize {
    (2.0 * spec.v_number() / std::f64::consts::PI).floor() as usize + 1
}

/// Residual bound relative to k₀ that every reported mode must meet.
pub const RESIDUAL_BOUND: f64 = 1e-10;

/// Finds every guided TE mode, sorted by descending β.
///
/// Works in `u = κd/2 ∈ (0, V)` with `w = γd/2 = √(V² − u²)`, using the
/// multiplied-out forms `u·sin u − w·cos u` (even) and `w·sin u + u·cos u`
/// (odd). They share the roots of the tan/cot equations but have no poles,
/// so every sign change found in the scan brackets a genuine root.
pub fn solve_modes(spec: &SlabSpec) -> Result<Vec<GuidedMode>> {
    let v = spec.v_number();
    // Scan step in u of at most π/16, i.e. a κ step of at most π/(8d).
    let steps = ((16.0 * v / std::f64::consts::PI).ceil() as usize).max(64);
    let w_of = |u: f64| ((v - u) * (v + u)).max(0.0).sqrt();

    let tol = 4.0 * f64::EPSILON;
    let even = scan_roots(|u| u * u.sin() - w_of(u) * u.cos(), 0.0, v, steps, tol)?;
    let odd = scan_roots(|u| w_of(u) * u.sin() + u * u.cos(), 0.0, v, steps, tol)?;

    let k0 = spec.k0();
    let core = spec.n1 * k0;
    let mut modes = Vec::with_capacity(even.len() + odd.len());
    for (parity, roots) in [(Parity::Even, even), (Parity::Odd, odd)] {
        for u in roots {
            let w = w_of(u);
            if !(u > 0.0 && w > 0.0) {
                continue;
            }
            let kappa = 2.0 * u / spec.d;
            let gamma = 2.0 * w / spec.d;
            let beta = ((core - kappa) * (core + kappa)).sqrt();
            let residual = eigen_residual(spec, parity, beta);
            if !(residual < RESIDUAL_BOUND * k0) {
                return Err(Error::Numerical(format!(
                    "{} mode at u = {u} misses the residual bound: {residual:e} ≥ {:e}",
                    parity.as_str(),
                    RESIDUAL_BOUND * k0
                )));
            }
            modes.push(GuidedMode {
                parity,
                beta,
                kappa,
                gamma,
                residual,
                spec: *spec,
            });
        }
    }
    if !modes.iter().any(|m| m.parity == Parity::Even) {
        return Err(Error::Numerical(
            "fundamental even mode not found; a symmetric slab always guides one".into(),
        ));
    }
    modes.sort_by(|a, b| b.beta.total_cmp(&a.beta));
    Ok(modes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference() -> SlabSpec {
        SlabSpec::new(1.45, 1.44, 5e-6, 1.55e-6).unwrap()
    }

    #[test]
    fn reference_slab_has_two_modes() {
        let modes = solve_modes(&reference()).unwrap();
        assert_eq!(modes.len(), 2);
        assert_eq!(modes[0].parity, Parity::Even);
        assert_eq!(modes[1].parity, Parity::Odd);
        assert!(modes[0].beta > modes[1].beta);
    }

    #[test]
    fn narrow_slab_is_single_mode() {
        let spec = SlabSpec::new(1.45, 1.44, 2e-6, 1.55e-6).unwrap();
        assert!(spec.v_number() < std::f64::consts::FRAC_PI_2);
        let modes = solve_modes(&spec).unwrap();
        assert_eq!(modes.len(), 1);
        assert_eq!(modes[0].parity, Parity::Even);
    }

    #[test]
    fn modes_are_guided_and_consistent() {
        let spec = SlabSpec::new(1.5, 1.45, 12e-6, 1.0e-6).unwrap();
        let k0 = spec.k0();
        let modes = solve_modes(&spec).unwrap();
        assert_eq!(modes.len(), expected_mode_count(&spec));
        for m in &modes {
            assert!(m.beta > spec.n2 * k0 && m.beta < spec.n1 * k0);
            let core = (spec.n1 * k0).powi(2);
            let clad = (spec.n2 * k0).powi(2);
            assert!((m.kappa.powi(2) + m.beta.powi(2) - core).abs() < 1e-9 * core);
            assert!((m.beta.powi(2) - m.gamma.powi(2) - clad).abs() < 1e-9 * clad);
            assert!(m.residual < RESIDUAL_BOUND * k0);
        }
        for w in modes.windows(2) {
            assert!(w[0].beta > w[1].beta);
            assert_ne!(w[0].parity, w[1].parity);
        }
    }

    #[test]
    fn residual_flags_wrong_beta() {
        let spec = reference();
        let m = solve_modes(&spec).unwrap()[0];
        let off = eigen_residual(&spec, Parity::Even, m.beta * (1.0 - 1e-5));
        assert!(off > 1e3 * m.residual.max(1e-30));
    }
}
