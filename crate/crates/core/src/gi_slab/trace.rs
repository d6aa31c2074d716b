use serde::{Deserialize, Serialize};

use super::{index_at, interface_reflection_magnitude, turning_amplitude, GiProfile};
use crate::error::{ensure_finite, ensure_positive, Error, Result};
use crate::quantum::CoherentAmplitude;
use crate::roots::bisect;

/// How the ray advances through the layer stack.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum StepRule {
    /// κ² varies linearly between layer centres; the slope `dz/dx = β/κ` is
    /// integrated exactly over each half layer and the ray turns where the
    /// interpolated κ² vanishes.
    #[default]
    Interpolated,
    /// Each layer is homogeneous with κ_j from its centre and contributes
    /// `Δz = Δx·β/κ_j`; the ray turns at the boundary of the first layer
    /// whose κ² is not positive.
    LayerCenter,
}

impl StepRule {
    pub fn as_str(self) -> &'static str {
        match self {
            StepRule::Interpolated => "interpolated",
            StepRule::LayerCenter => "layer-center",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = "+x")]
    Up,
    #[serde(rename = "-x")]
    Down,
}

impl Direction {
    fn sign(self) -> f64 {
        match self {
            Direction::Up => 1.0,
            Direction::Down => -1.0,
        }
    }

    fn flip(self) -> Self {
        match self {
            Direction::Up => Direction::Down,
            Direction::Down => Direction::Up,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Up => "+x",
            Direction::Down => "-x",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayLaunch {
    /// Launch angle from the x-axis, in degrees.
    pub theta_in_deg: f64,
    pub x_start: f64,
    pub dx: f64,
    pub z_max: f64,
    pub lambda0: f64,
    pub rule: StepRule,
    pub amplitude: CoherentAmplitude,
}

impl RayLaunch {
    pub fn new(theta_in_deg: f64, x_start: f64, dx: f64, z_max: f64, lambda0: f64) -> Self {
        RayLaunch {
            theta_in_deg,
            x_start,
            dx,
            z_max,
            lambda0,
            rule: StepRule::default(),
            amplitude: CoherentAmplitude { re: 1.0, im: 0.0 },
        }
    }

    pub fn k0(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.lambda0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub z: f64,
    pub x: f64,
    /// Layer holding the point; on a boundary, the layer being entered.
    pub j: i64,
    pub direction: Direction,
    /// Local transverse wavenumber, zero at a turn.
    pub kappa: f64,
    /// Local index the step rule assigns to the point.
    pub index: f64,
    pub amplitude: CoherentAmplitude,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub points: Vec<TrajectoryPoint>,
    pub beta: f64,
    pub k0: f64,
    pub dx: f64,
    pub x_turn: f64,
    pub rule: StepRule,
}

impl Trajectory {
    /// `√((n·k₀)² − κ²)` at a point, which equals β when Snell's law holds.
    pub fn local_beta(&self, p: &TrajectoryPoint) -> f64 {
        let nk = p.index * self.k0;
        ((nk - p.kappa) * (nk + p.kappa)).sqrt()
    }

    /// Largest relative departure of the local β from the launch β.
    pub fn max_beta_deviation(&self) -> f64 {
        self.points
            .iter()
            .map(|p| (self.local_beta(p) - self.beta).abs() / self.beta)
            .fold(0.0, f64::max)
    }

    pub fn max_abs_x(&self) -> f64 {
        self.points.iter().map(|p| p.x.abs()).fold(0.0, f64::max)
    }

    pub fn turns(&self) -> impl Iterator<Item = &TrajectoryPoint> {
        self.points.windows(2).filter_map(|w| {
            if w[0].direction != w[1].direction {
                Some(&w[1])
            } else {
                None
            }
        })
    }
}

/// Safety cap on marching steps; 10⁷ covers about ten metres at Δx = 0.1 µm.
const MAX_STEPS: usize = 10_000_000;

/// Traces a ray launched at `x_start` with `β = n(x_start)·k₀·sin θ_in`.
///
/// Amplitudes pass every interface unchanged and reverse direction at the
/// turning point. Points are recorded at the launch, on every layer boundary
/// crossed, at every turn and at `z_max`.
pub fn trace_trajectory(profile: &GiProfile, launch: &RayLaunch) -> Result<Trajectory> {
    let theta = ensure_finite("launch angle", launch.theta_in_deg)?;
    if !(theta > 0.0 && theta < 90.0) {
        return Err(Error::domain(format!(
            "launch angle must lie in (0°, 90°) from the x-axis, got {theta}°"
        )));
    }
    ensure_finite("start position", launch.x_start)?;
    ensure_positive("layer thickness", launch.dx)?;
    ensure_positive("propagation length", launch.z_max)?;
    ensure_positive("vacuum wavelength", launch.lambda0)?;
    if !launch.amplitude.is_finite() {
        return Err(Error::domain("launch amplitude must be finite"));
    }
    if launch.x_start.abs() >= 0.5 * profile.d {
        return Err(Error::domain(format!(
            "start position {} lies outside the core half-width {}",
            launch.x_start,
            0.5 * profile.d
        )));
    }
    if launch.dx >= profile.d {
        return Err(Error::domain("layer thickness must be smaller than the core width"));
    }
    let k0 = launch.k0();
    let beta = index_at(profile, launch.x_start)? * k0 * theta.to_radians().sin();
    let x_turn = turning_amplitude(profile, beta, k0)?;
    if x_turn >= 0.5 * profile.d {
        return Err(Error::domain(format!(
            "turning point {x_turn} lies beyond the core edge {}; the ray leaves the core",
            0.5 * profile.d
        )));
    }
    // Every half-layer step advances z by at least (Δx/2)·β/κ(0); refuse runs
    // whose step bound exceeds the cap rather than fail after the fact.
    let kappa_axis = ((profile.n1 * k0 - beta) * (profile.n1 * k0 + beta)).sqrt();
    let step_bound = launch.z_max * kappa_axis / (0.5 * launch.dx * beta);
    if step_bound > MAX_STEPS as f64 {
        return Err(Error::Numerical(format!(
            "trajectory may need up to {step_bound:.3e} steps, above the limit of {MAX_STEPS}"
        )));
    }
    let mut march = March {
        profile,
        beta,
        k0,
        dx: launch.dx,
        z_max: launch.z_max,
        amplitude: launch.amplitude,
        points: Vec::new(),
    };
    match launch.rule {
        StepRule::Interpolated => march.interpolated(launch.x_start)?,
        StepRule::LayerCenter => march.layer_center(launch.x_start)?,
    }
    Ok(Trajectory {
        points: march.points,
        beta,
        k0,
        dx: launch.dx,
        x_turn,
        rule: launch.rule,
    })
}

struct March<'a> {
    profile: &'a GiProfile,
    beta: f64,
    k0: f64,
    dx: f64,
    z_max: f64,
    amplitude: CoherentAmplitude,
    points: Vec<TrajectoryPoint>,
}

impl March<'_> {
    fn kappa_sq_center(&self, j: i64) -> f64 {
        let nk_sq = self.profile.index_sq_raw(j as f64 * self.dx) * self.k0 * self.k0;
        nk_sq - self.beta * self.beta
    }

    fn layer_of(&self, x: f64, dir: Direction) -> i64 {
        // Nudge boundary points into the layer being entered.
        let s = x / self.dx + 0.5 * dir.sign() * 1e-9;
        s.round() as i64
    }

    fn push(&mut self, z: f64, x: f64, dir: Direction, kappa_sq: f64) {
        let kappa = kappa_sq.max(0.0).sqrt();
        let index = self.index_sq_interp(x).sqrt();
        let j = self.layer_of(x, dir);
        self.points.push(TrajectoryPoint {
            z,
            x,
            j,
            direction: dir,
            kappa,
            index,
            amplitude: self.amplitude,
        });
    }

    fn check_in_core(&self, x: f64) -> Result<()> {
        if x.abs() > 0.5 * self.profile.d {
            return Err(Error::domain(format!(
                "ray reached x = {x} outside the core half-width {}",
                0.5 * self.profile.d
            )));
        }
        Ok(())
    }

    /// `n²` linearly interpolated between the centres around `x`.
    fn index_sq_interp(&self, x: f64) -> f64 {
        let s = x / self.dx;
        let j = s.floor();
        let t = s - j;
        let (xa, xb) = (j * self.dx, (j + 1.0) * self.dx);
        (1.0 - t) * self.profile.index_sq_raw(xa) + t * self.profile.index_sq_raw(xb)
    }

    /// κ² linearly interpolated between the centres around `x`.
    fn kappa_sq_interp(&self, x: f64) -> f64 {
        let s = x / self.dx;
        let j = s.floor();
        let t = s - j;
        let j = j as i64;
        (1.0 - t) * self.kappa_sq_center(j) + t * self.kappa_sq_center(j + 1)
    }

    fn interpolated(&mut self, x_start: f64) -> Result<()> {
        let h = 0.5 * self.dx;
        let mut dir = Direction::Up;
        let mut x = x_start;
        let mut z = 0.0;
        // The ray sits in half-layer cell [node·h, (node+1)·h].
        let mut node = (x_start / h).floor() as i64;
        let mut a = self.kappa_sq_interp(x);
        if !(a > 0.0) {
            return Err(Error::domain("launch position is not inside the guided region"));
        }
        self.push(z, x, dir, a);

        for _ in 0..MAX_STEPS {
            let target_node = match dir {
                Direction::Up => node + 1,
                Direction::Down => node,
            };
            let xb = target_node as f64 * h;
            let b = if target_node % 2 != 0 {
                // Boundary: midpoint of the two centres, so the interpolant is exact.
                let j = (target_node - 1).div_euclid(2);
                0.5 * (self.kappa_sq_center(j) + self.kappa_sq_center(j + 1))
            } else {
                self.kappa_sq_center(target_node / 2)
            };
            let beta = self.beta;
            if b > 0.0 {
                let dz = beta * 2.0 * (xb - x).abs() / (a.sqrt() + b.sqrt());
                if z + dz >= self.z_max {
                    return self.finish_segment(z, x, a, xb, b, dir);
                }
                self.check_in_core(xb)?;
                z += dz;
                x = xb;
                a = b;
                node = match dir {
                    Direction::Up => node + 1,
                    Direction::Down => node - 1,
                };
                if target_node % 2 != 0 {
                    self.push(z, x, dir, a);
                }
            } else {
                if !(a > 0.0) {
                    return Err(Error::Numerical(format!("ray trapped at turning point x = {x}")));
                }
                let x0 = x + (xb - x) * a / (a - b);
                let dz = beta * 2.0 * (x0 - x).abs() / a.sqrt();
                if z + dz >= self.z_max {
                    return self.finish_segment(z, x, a, x0, 0.0, dir);
                }
                self.check_in_core(x0)?;
                z += dz;
                x = x0;
                a = 0.0;
                dir = dir.flip();
                self.push(z, x, dir, 0.0);
            }
        }
        Err(Error::Numerical("trajectory exceeded the step limit".into()))
    }

    /// Places the final point at `z_max` inside the segment from `xa` toward `xb`.
    fn finish_segment(
        &mut self,
        z: f64,
        xa: f64,
        a: f64,
        xb: f64,
        b: f64,
        dir: Direction,
    ) -> Result<()> {
        let beta = self.beta;
        let len = xb - xa;
        let kappa_sq = |t: f64| (1.0 - t) * a + t * b;
        let z_of = |t: f64| {
            if t == 0.0 {
                return z;
            }
            let k = kappa_sq(t).max(0.0).sqrt();
            z + beta * 2.0 * (t * len).abs() / (a.sqrt() + k)
        };
        let remaining = self.z_max - z;
        let t = if remaining <= 0.0 {
            0.0
        } else {
            bisect(|t| z_of(t) - self.z_max, 0.0, 1.0, 1e-15)?
        };
        self.push(self.z_max, xa + t * len, dir, kappa_sq(t));
        Ok(())
    }

    fn layer_center(&mut self, x_start: f64) -> Result<()> {
        let beta = self.beta;
        let mut dir = Direction::Up;
        let mut j = (x_start / self.dx).round() as i64;
        let mut k_sq = self.kappa_sq_center(j);
        if !(k_sq > 0.0) {
            return Err(Error::domain("launch layer is not inside the guided region"));
        }
        let mut x = x_start;
        let mut z = 0.0;
        self.push_center(z, x, j, dir, k_sq);

        for _ in 0..MAX_STEPS {
            let edge = (j as f64 + 0.5 * dir.sign()) * self.dx;
            let dz = (edge - x).abs() * beta / k_sq.sqrt();
            if z + dz >= self.z_max {
                let frac = (self.z_max - z) / dz;
                let xf = x + frac * (edge - x);
                self.push_center(self.z_max, xf, j, dir, k_sq);
                return Ok(());
            }
            self.check_in_core(edge)?;
            z += dz;
            x = edge;
            let next = j + dir.sign() as i64;
            let k_next = self.kappa_sq_center(next);
            if k_next > 0.0 {
                j = next;
                k_sq = k_next;
            } else {
                dir = dir.flip();
            }
            self.push_center(z, x, j, dir, k_sq);
        }
        Err(Error::Numerical("trajectory exceeded the step limit".into()))
    }

    fn push_center(&mut self, z: f64, x: f64, j: i64, dir: Direction, kappa_sq: f64) {
        self.points.push(TrajectoryPoint {
            z,
            x,
            j,
            direction: dir,
            kappa: kappa_sq.sqrt(),
            index: self.profile.index_sq_raw(j as f64 * self.dx).sqrt(),
            amplitude: self.amplitude,
        });
    }
}

/// Mean period from the interpolated zero crossings of `x(z)`.
///
/// Returns `None` with fewer than two crossings.
pub fn zero_crossing_period(points: &[(f64, f64)]) -> Option<f64> {
    let mut crossings = Vec::new();
    if let Some(&(z, x)) = points.first() {
        if x == 0.0 {
            crossings.push(z);
        }
    }
    for w in points.windows(2) {
        let (z1, x1) = w[0];
        let (z2, x2) = w[1];
        if (x1 < 0.0 && x2 >= 0.0) || (x1 > 0.0 && x2 <= 0.0) {
            if x2 == 0.0 {
                crossings.push(z2);
            } else {
                crossings.push(z1 + (z2 - z1) * x1 / (x1 - x2));
            }
        }
    }
    if crossings.len() < 2 {
        return None;
    }
    let half = (crossings[crossings.len() - 1] - crossings[0]) / (crossings.len() - 1) as f64;
    Some(2.0 * half)
}

impl Trajectory {
    pub fn zero_crossing_period(&self) -> Option<f64> {
        let zx: Vec<(f64, f64)> = self.points.iter().map(|p| (p.z, p.x)).collect();
        zero_crossing_period(&zx)
    }
}

/// Reflected photon fraction `Σ r̃²` over one period of an on-axis launch.
///
/// Each interface between propagating layers is crossed twice per period on
/// each side of the axis.
pub fn reflection_loss_per_period(
    profile: &GiProfile,
    beta: f64,
    k0: f64,
    dx: f64,
) -> Result<f64> {
    let mut sum = 0.0;
    let mut j = 0;
    loop {
        let x_next = (j + 1) as f64 * dx;
        if profile.g * x_next >= 1.0 {
            break;
        }
        match interface_reflection_magnitude(profile, beta, k0, j, dx) {
            Ok(r) => sum += r * r,
            Err(Error::Domain(_)) => break,
            Err(e) => return Err(e),
        }
        j += 1;
    }
    if j == 0 {
        return Err(Error::domain(
            "no interface propagates on both sides; the ray turns inside the axial layer",
        ));
    }
    Ok(4.0 * sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gi_slab::analytic_period;

    fn fig() -> GiProfile {
        GiProfile::new(1.45, 5.66e3, 2.0, 2.0 / 5.66e3).unwrap()
    }

    fn launch(theta: f64, dx: f64, z_max: f64) -> RayLaunch {
        RayLaunch::new(theta, 0.0, dx, z_max, 1.55e-6)
    }

    #[test]
    fn interpolated_trace_basics() {
        let p = fig();
        let t = trace_trajectory(&p, &launch(88.0, 0.1e-6, 3e-3)).unwrap();
        assert!(t.points.windows(2).all(|w| w[1].z > w[0].z));
        assert!(t.max_beta_deviation() < 1e-12);
        assert!(t.max_abs_x() <= t.x_turn + t.dx);
        assert_eq!(t.points.last().unwrap().z, 3e-3);
        let lam = analytic_period(&p, t.beta, t.k0).unwrap();
        let per = t.zero_crossing_period().unwrap();
        assert!((per - lam).abs() < 0.01 * lam, "{per} vs {lam}");
        for turn in t.turns() {
            assert!((turn.x.abs() - t.x_turn).abs() < t.dx);
            assert_eq!(turn.kappa, 0.0);
        }
    }

    #[test]
    fn layer_center_trace_basics() {
        let p = fig();
        let mut l = launch(86.0, 0.1e-6, 3e-3);
        l.rule = StepRule::LayerCenter;
        let t = trace_trajectory(&p, &l).unwrap();
        assert!(t.points.windows(2).all(|w| w[1].z > w[0].z));
        assert!(t.max_beta_deviation() < 1e-12);
        assert!(t.max_abs_x() <= t.x_turn + t.dx);
        assert!(t.zero_crossing_period().is_some());
        for turn in t.turns() {
            assert!((turn.x.abs() - t.x_turn).abs() < t.dx);
        }
    }

    #[test]
    fn amplitude_is_carried_unchanged() {
        let p = fig();
        let mut l = launch(84.0, 0.2e-6, 1e-3);
        l.amplitude = CoherentAmplitude::new(0.6, -0.8).unwrap();
        let t = trace_trajectory(&p, &l).unwrap();
        assert!(t.points.iter().all(|q| q.amplitude == l.amplitude));
    }

    #[test]
    fn off_axis_start() {
        let p = fig();
        let l = RayLaunch::new(87.0, 2.0e-6, 0.1e-6, 2e-3, 1.55e-6);
        let t = trace_trajectory(&p, &l).unwrap();
        assert_eq!(t.points[0].x, 2.0e-6);
        assert!(t.max_beta_deviation() < 1e-12);
        assert!(t.x_turn > 2.0e-6);
        assert!(t.max_abs_x() <= t.x_turn + t.dx);
    }

    #[test]
    fn grazing_launch_stays_near_axis() {
        let p = fig();
        let t = trace_trajectory(&p, &launch(89.99, 0.1e-6, 1e-3)).unwrap();
        assert!(t.max_abs_x() < 0.1e-6);
        assert!(t.max_beta_deviation() < 1e-12);
    }

    #[test]
    fn rejects_bad_launches() {
        let p = fig();
        assert!(trace_trajectory(&p, &launch(90.0, 1e-7, 1e-3)).is_err());
        assert!(trace_trajectory(&p, &launch(0.0, 1e-7, 1e-3)).is_err());
        assert!(trace_trajectory(&p, &launch(88.0, 0.0, 1e-3)).is_err());
        let mut l = launch(88.0, 1e-7, 1e-3);
        l.x_start = 1.0 / p.g;
        assert!(trace_trajectory(&p, &l).is_err());
        // A narrow core cannot hold a steep ray.
        let narrow = GiProfile::new(1.45, 5.66e3, 2.0, 10e-6).unwrap();
        assert!(trace_trajectory(&narrow, &launch(80.0, 1e-7, 1e-3)).is_err());
    }

    #[test]
    fn zero_crossings_of_sampled_sine() {
        let pts: Vec<(f64, f64)> = (0..=1000)
            .map(|i| {
                let z = i as f64 * 0.01;
                (z, (2.0 * std::f64::consts::PI * z / 2.5).sin())
            })
            .collect();
        let per = zero_crossing_period(&pts).unwrap();
        assert!((per - 2.5).abs() < 1e-4, "{per}");
        assert!(zero_crossing_period(&pts[1..50]).is_none());
    }

    #[test]
    fn reflection_sum_counts_every_crossing() {
        let p = fig();
        let k0 = 2.0 * std::f64::consts::PI / 1.55e-6;
        let beta = 1.45 * k0 * 88f64.to_radians().sin();
        let dx = 0.1e-6;
        let mut direct = 0.0;
        for j in -100..100 {
            if let Ok(r) = interface_reflection_magnitude(&p, beta, k0, j, dx) {
                direct += 2.0 * r * r;
            }
        }
        let s = reflection_loss_per_period(&p, beta, k0, dx).unwrap();
        assert!((s - direct).abs() < 1e-13 * direct);
    }
}
