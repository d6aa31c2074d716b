use serde::{Deserialize, Serialize};

use super::{solve_modes, SlabSpec};
use crate::error::{ensure_positive, Error, Result};

/// Which area of the slab a layer belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Region {
    /// Area (I), `x < −d/2`.
    LeftCladding,
    /// Area (II), the core.
    Core,
    /// Area (III), `x > d/2`.
    RightCladding,
}

impl Region {
    pub fn as_str(self) -> &'static str {
        match self {
            Region::LeftCladding => "left-cladding",
            Region::Core => "core",
            Region::RightCladding => "right-cladding",
        }
    }
}

/// Layer discretization of the slab cross-section.
///
/// The core width is always `(2m+1)·Δx`, which puts the core–cladding
/// interfaces on layer boundaries at `±(m+½)Δx`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LayerGrid {
    /// Layer thickness Δx (m).
    pub dx: f64,
    /// Core half-count: the core is `|j| ≤ m`.
    pub m: usize,
    /// Truncation half-count: the cladding is `m+1 ≤ |j| ≤ M`.
    pub big_m: usize,
    /// Δx asked for before snapping to an odd divisor of d.
    pub requested_dx: f64,
}

impl LayerGrid {
    /// Grid with `2m+1` core layers of exactly `d/(2m+1)` and cladding out to `M`.
    pub fn new(spec: &SlabSpec, m: usize, big_m: usize) -> Result<Self> {
        if big_m <= m {
            return Err(Error::domain(format!(
                "truncation M = {big_m} must exceed core half-count m = {m}"
            )));
        }
        let dx = spec.d / (2 * m + 1) as f64;
        Ok(LayerGrid {
            dx,
            m,
            big_m,
            requested_dx: dx,
        })
    }

    /// The same layers with the truncation moved to `big_m`.
    pub fn with_truncation(&self, big_m: usize) -> Result<Self> {
        if big_m <= self.m {
            return Err(Error::domain(format!(
                "truncation M = {big_m} must exceed core half-count m = {}",
                self.m
            )));
        }
        Ok(LayerGrid { big_m, ..*self })
    }

    pub fn core_width(&self) -> f64 {
        (2 * self.m + 1) as f64 * self.dx
    }

    pub fn layer_count(&self) -> usize {
        2 * self.big_m + 1
    }

    /// Layer indices `−M..=M`.
    pub fn indices(&self) -> impl Iterator<Item = i64> {
        let big_m = self.big_m as i64;
        -big_m..=big_m
    }

    /// Centre `x_j = jΔx`.
    pub fn center(&self, j: i64) -> f64 {
        j as f64 * self.dx
    }

    pub fn region(&self, j: i64) -> Region {
        let m = self.m as i64;
        if j < -m {
            Region::LeftCladding
        } else if j > m {
            Region::RightCladding
        } else {
            Region::Core
        }
    }

    /// Distance from the outermost layer centre to the core edge, `x_M − d/2`.
    pub fn cladding_extent(&self) -> f64 {
        (self.big_m as f64 - self.m as f64 - 0.5) * self.dx
    }
}

/// Number of core layers `2m+1` closest to `d/dx_target`; ties go to the
/// coarser grid.
fn odd_layer_count(ratio: f64) -> usize {
    let mut lo = ratio.floor() as usize;
    if lo % 2 == 0 {
        lo = lo.saturating_sub(1);
    }
    let lo = lo.max(1);
    let hi = lo + 2;
    let dist_lo = ratio - lo as f64;
    let dist_hi = hi as f64 - ratio;
    // Rounding in d/dx_target must not decide an exact tie.
    if dist_hi < dist_lo - 1e-9 * ratio {
        hi
    } else {
        lo
    }
}

/// Builds the layer grid for `spec`.
///
/// Δx is snapped so that `d/Δx` is odd. The cladding extends to the smallest
/// `M` with `exp(−2γ(x_M − d/2)) < tail_tol`, using the slowest-decaying
/// guided mode so that the tail bound holds for every mode on the grid.
pub fn build_grid(spec: &SlabSpec, dx_target: f64, tail_tol: f64) -> Result<LayerGrid> {
    ensure_positive("layer thickness", dx_target)?;
    if dx_target >= spec.d {
        return Err(Error::domain(format!(
            "layer thickness {dx_target} must be smaller than the core width {}",
            spec.d
        )));
    }
    if !(tail_tol > 0.0 && tail_tol < 1.0) {
        return Err(Error::domain(format!(
            "tail tolerance must lie in (0, 1), got {tail_tol}"
        )));
    }
    let count = odd_layer_count(spec.d / dx_target);
    let m = (count - 1) / 2;
    let dx = spec.d / count as f64;

    let modes = solve_modes(spec)?;
    let gamma = modes
        .iter()
        .map(|md| md.gamma)
        .fold(f64::INFINITY, f64::min);

    let tail = |big_m: usize| (-2.0 * gamma * (big_m as f64 - m as f64 - 0.5) * dx).exp();
    let layers = -tail_tol.ln() / (2.0 * gamma * dx);
    let mut big_m = m + 1 + (layers + 0.5).floor().max(0.0) as usize;
    while !(tail(big_m) < tail_tol) {
        big_m += 1;
    }
    while big_m > m + 1 && tail(big_m - 1) < tail_tol {
        big_m -= 1;
    }
    Ok(LayerGrid {
        dx,
        m,
        big_m,
        requested_dx: dx_target,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference() -> SlabSpec {
        SlabSpec::new(1.45, 1.44, 5e-6, 1.55e-6).unwrap()
    }

    #[test]
    fn snaps_to_odd_divisor() {
        let g = build_grid(&reference(), 0.1e-6, 1e-8).unwrap();
        assert_eq!(g.m, 24);
        assert!((g.dx - 5e-6 / 49.0).abs() < 1e-20);
        assert!((g.dx - 0.10204e-6).abs() < 1e-11);
        assert!((g.core_width() - 5e-6).abs() < 1e-18);
    }

    #[test]
    fn odd_count_choice() {
        assert_eq!(odd_layer_count(50.0), 49);
        assert_eq!(odd_layer_count(49.99999999999999), 49);
        assert_eq!(odd_layer_count(50.000000000001), 49);
        assert_eq!(odd_layer_count(50.6), 51);
        assert_eq!(odd_layer_count(47.2), 47);
        assert_eq!(odd_layer_count(1.5), 1);
    }

    #[test]
    fn tail_bound_is_met_minimally() {
        let spec = reference();
        let tol = 1e-8;
        let g = build_grid(&spec, 0.1e-6, tol).unwrap();
        let gamma = solve_modes(&spec)
            .unwrap()
            .iter()
            .map(|m| m.gamma)
            .fold(f64::INFINITY, f64::min);
        let tail = |e: f64| (-2.0 * gamma * e).exp();
        assert!(tail(g.cladding_extent()) < tol);
        let shorter = g.with_truncation(g.big_m - 1).unwrap();
        assert!(tail(shorter.cladding_extent()) >= tol);
    }

    #[test]
    fn rejects_coarse_or_bad_inputs() {
        let spec = reference();
        assert!(build_grid(&spec, 5e-6, 1e-8).is_err());
        assert!(build_grid(&spec, 6e-6, 1e-8).is_err());
        assert!(build_grid(&spec, 1e-7, 0.0).is_err());
        assert!(build_grid(&spec, 1e-7, 1.0).is_err());
        assert!(LayerGrid::new(&spec, 4, 4).is_err());
    }

    #[test]
    fn regions() {
        let g = LayerGrid::new(&reference(), 2, 5).unwrap();
        assert_eq!(g.region(-3), Region::LeftCladding);
        assert_eq!(g.region(-2), Region::Core);
        assert_eq!(g.region(2), Region::Core);
        assert_eq!(g.region(3), Region::RightCladding);
        assert_eq!(g.indices().count(), 11);
    }
}
