use rayon::prelude::*;

use super::config::{Command, Params, RunConfig};
use super::emit::{
    emit, Document, FresnelDocument, FresnelMetadata, FresnelRecord, GiMetadata, IndexDocument,
    IndexMetadata, IndexRecord, ModeRecord, ModesDocument, ModesMetadata, ProfileDocument,
    ProfileMetadata, ProfileRow, TrajectoryDocument, TrajectoryMetadata, GRID_NOTE, G_NOTE,
    PHOTON_NOTE,
};
use crate::error::{Error, Result};
use crate::fresnel::{
    conventional_from_normalized, critical_angle, evanescent_penetration, normalized_fresnel,
    relative_index_difference, snell_refract, Refraction, TransverseWavenumber, WavenumberKind,
};
use crate::gi_slab::{
    analytic_period, index_at, kappa_at_layer, kappa_paraxial, reflection_loss_per_period,
    trace_trajectory, turning_amplitude, GiProfile, RayLaunch,
};
use crate::quantum::{index_excess, interaction_phase, wavelength_in_medium, AtomCoupling};
use crate::si_slab::{
    build_grid, layer_fields, normalize_to_energy_flow, solve_modes, EnergyFlowOptions, SlabSpec,
};

/// Telecom wavelength used when a graded-index or interface run gives none.
pub const DEFAULT_LAMBDA0: f64 = 1.55e-6;
pub const DEFAULT_TAIL_TOL: f64 = 1e-8;
pub const DEFAULT_S_TARGET: f64 = 1e-3;

/// Computes the document of a single (non-sweep) run.
pub fn compute(cfg: &RunConfig) -> Result<Document> {
    let p = &cfg.params;
    match cfg.command {
        Command::Modes => modes(p).map(Document::Modes),
        Command::Profile => profile(p).map(Document::Profile),
        Command::Fresnel => fresnel(p).map(Document::Fresnel),
        Command::Trajectory => trajectory(cfg).map(Document::Trajectory),
        Command::Index => index(p).map(Document::Index),
        Command::Sweep => Err(Error::usage("command", "a sweep has no single document")),
    }
}

/// Serialized output of a run; a sweep is the in-order concatenation of its runs.
pub fn render(cfg: &RunConfig) -> Result<Vec<u8>> {
    if cfg.command == Command::Sweep {
        let parts = cfg
            .sweep_runs()?
            .par_iter()
            .map(render)
            .collect::<Result<Vec<_>>>()?;
        return Ok(parts.concat());
    }
    let doc = compute(cfg)?;
    let mut out = Vec::new();
    emit(&doc, cfg.format, &mut out)?;
    Ok(out)
}

fn modes(p: &Params) -> Result<ModesDocument> {
    let spec = SlabSpec::new(
        p.number("n1")?,
        p.number("n2")?,
        p.number("d")?,
        p.number("lambda0")?,
    )?;
    let dx_requested = p.number_or("dx", spec.lambda0 / 20.0)?;
    let tail_tol = p.number_or("tail_tol", DEFAULT_TAIL_TOL)?;
    let s_target = p.number_or("s_target", DEFAULT_S_TARGET)?;
    let opts = EnergyFlowOptions {
        include_vacuum: p.flag("include_vacuum"),
    };
    let grid = build_grid(&spec, dx_requested, tail_tol)?;
    let v = spec.v_number();
    let mut records = Vec::new();
    for mode in solve_modes(&spec)? {
        let alpha = normalize_to_energy_flow(&mode, &grid, s_target, opts)?;
        records.push(ModeRecord {
            parity: mode.parity,
            beta: mode.beta,
            kappa: mode.kappa,
            gamma: mode.gamma,
            residual: mode.residual,
            v_number: v,
            alpha_core: alpha.re,
            layers: layer_fields(&mode, &grid, alpha)?,
        });
    }
    Ok(ModesDocument {
        command: "modes".into(),
        metadata: ModesMetadata {
            n1: spec.n1,
            n2: spec.n2,
            d: spec.d,
            lambda0: spec.lambda0,
            v_number: v,
            dx_requested,
            dx: grid.dx,
            m: grid.m,
            big_m: grid.big_m,
            tail_tol,
            s_target,
            include_vacuum: opts.include_vacuum,
            grid_note: GRID_NOTE.into(),
            photon_note: PHOTON_NOTE.into(),
        },
        modes: records,
    })
}

fn gi_profile(p: &Params) -> Result<GiProfile> {
    let n1 = p.number("n1")?;
    let q = p.number_or("q", 2.0)?;
    match (p.number_opt("g")?, p.number_opt("delta_r")?) {
        (Some(g), None) => {
            let d = p.number_or("d", 2.0 / g)?;
            GiProfile::new(n1, g, q, d)
        }
        (None, Some(dr)) => GiProfile::from_contrast(n1, dr, p.number("d")?, q),
        _ => Err(Error::usage("g", "give exactly one of g and delta_r")),
    }
}

fn gi_metadata(p: &Params, prof: &GiProfile, beta: f64, k0: f64) -> Result<GiMetadata> {
    Ok(GiMetadata {
        n1: prof.n1,
        g: prof.g,
        q: prof.q,
        d: prof.d,
        lambda0: p.number_or("lambda0", DEFAULT_LAMBDA0)?,
        theta_in: p.number("theta_in")?,
        x_start: p.number_or("x_start", 0.0)?,
        dx: p.number("dx")?,
        beta,
        x_turn: turning_amplitude(prof, beta, k0)?,
        analytic_period: analytic_period(prof, beta, k0).ok(),
        g_note: G_NOTE.into(),
    })
}

fn launch_beta(p: &Params, prof: &GiProfile) -> Result<(f64, f64)> {
    let lambda0 = p.number_or("lambda0", DEFAULT_LAMBDA0)?;
    let k0 = 2.0 * std::f64::consts::PI / lambda0;
    let theta = p.number("theta_in")?;
    if theta >= 90.0 {
        return Err(Error::domain(format!(
            "launch angle must lie below 90°, got {theta}°"
        )));
    }
    let n = index_at(prof, p.number_or("x_start", 0.0)?)?;
    Ok((n * k0 * theta.to_radians().sin(), k0))
}

fn profile(p: &Params) -> Result<ProfileDocument> {
    let prof = gi_profile(p)?;
    let (beta, k0) = launch_beta(p, &prof)?;
    let dx = p.number("dx")?;
    let kappa = |j: i64| -> Result<Option<f64>> {
        let x = j as f64 * dx;
        if prof.g * x.abs() >= 1.0 {
            return Ok(None);
        }
        Ok(kappa_at_layer(&prof, beta, k0, x)?.kappa())
    };
    if kappa(0)?.is_none() {
        return Err(Error::domain("the axial layer does not propagate at this β"));
    }
    let mut top = 0;
    while kappa(top + 1)?.is_some() {
        top += 1;
    }
    let mut layers = Vec::new();
    for j in -top..=top {
        let x = j as f64 * dx;
        let k = kappa(j)?.unwrap_or(0.0);
        let k_next = kappa(j + 1)?.unwrap_or(0.0);
        layers.push(ProfileRow {
            j,
            x,
            index: index_at(&prof, x)?,
            kappa: k,
            kappa_paraxial: kappa_paraxial(&prof, beta, k0, x).ok(),
            r_next: normalized_fresnel(k, k_next)?.r_norm,
        });
    }
    Ok(ProfileDocument {
        command: "profile".into(),
        metadata: ProfileMetadata {
            gi: gi_metadata(p, &prof, beta, k0)?,
            reflection_loss_per_period: reflection_loss_per_period(&prof, beta, k0, dx)?,
        },
        layers,
    })
}

fn trajectory(cfg: &RunConfig) -> Result<TrajectoryDocument> {
    let p = &cfg.params;
    let prof = gi_profile(p)?;
    let mut launch = RayLaunch::new(
        p.number("theta_in")?,
        p.number_or("x_start", 0.0)?,
        p.number("dx")?,
        p.number("z_max")?,
        p.number_or("lambda0", DEFAULT_LAMBDA0)?,
    );
    launch.rule = cfg.step_rule()?;
    let t = trace_trajectory(&prof, &launch)?;
    Ok(TrajectoryDocument {
        command: "trajectory".into(),
        metadata: TrajectoryMetadata {
            gi: gi_metadata(p, &prof, t.beta, t.k0)?,
            z_max: launch.z_max,
            step_rule: t.rule,
            zero_crossing_period: t.zero_crossing_period(),
            max_beta_deviation: t.max_beta_deviation(),
        },
        points: t.points,
    })
}

fn fresnel(p: &Params) -> Result<FresnelDocument> {
    if p.contains("kappa1") {
        let (k1, k2) = (p.number("kappa1")?, p.number("kappa2")?);
        let c = normalized_fresnel(k1, k2)?;
        let conv = conventional_from_normalized(&c, k1, k2).ok();
        return Ok(FresnelDocument {
            command: "fresnel".into(),
            metadata: FresnelMetadata {
                n1: None,
                n2: None,
                theta_in: None,
                lambda0: None,
            },
            result: FresnelRecord {
                beta: None,
                kappa1: k1,
                side2: if k2 > 0.0 { "propagating" } else { "grazing" }.into(),
                kappa2: k2,
                gamma2: None,
                t_norm: c.t_norm,
                r_norm: c.r_norm,
                theta_mix: c.theta_mix,
                t: conv.map(|v| v.t),
                t_prime: conv.map(|v| v.t_prime),
                r: conv.map(|v| v.r),
                r_prime: conv.map(|v| v.r_prime),
                theta_out: None,
                critical_angle: None,
                delta_r: None,
                penetration_depth: None,
            },
        });
    }
    let (n1, n2) = (p.number("n1")?, p.number("n2")?);
    let theta = p.number("theta_in")?;
    let lambda0 = p.number_or("lambda0", DEFAULT_LAMBDA0)?;
    if theta > 90.0 {
        return Err(Error::domain(format!(
            "incidence angle must not exceed 90°, got {theta}°"
        )));
    }
    let k0 = 2.0 * std::f64::consts::PI / lambda0;
    let th = theta.to_radians();
    let beta = n1 * k0 * th.sin();
    let side1 = TransverseWavenumber::from_beta(n1, k0, beta)?;
    let side2 = TransverseWavenumber::from_beta(n2, k0, beta)?;
    let (k1, k2) = (side1.kappa_or_zero(), side2.kappa_or_zero());
    let c = normalized_fresnel(k1, k2)?;
    let conv = conventional_from_normalized(&c, k1, k2).ok();
    let theta_out = match snell_refract(n1, n2, th)? {
        Refraction::Refracted { theta2 } => Some(theta2.to_degrees()),
        Refraction::TotalReflection => None,
    };
    let delta_r = if n1 > n2 {
        Some(relative_index_difference(n1, n2)?)
    } else {
        None
    };
    let penetration_depth = match delta_r {
        Some(dr) => Some(evanescent_penetration(n1, dr, lambda0)?),
        None => None,
    };
    Ok(FresnelDocument {
        command: "fresnel".into(),
        metadata: FresnelMetadata {
            n1: Some(n1),
            n2: Some(n2),
            theta_in: Some(theta),
            lambda0: Some(lambda0),
        },
        result: FresnelRecord {
            beta: Some(beta),
            kappa1: k1,
            side2: match side2.kind {
                WavenumberKind::Propagating(_) => "propagating",
                WavenumberKind::Evanescent(_) => "evanescent",
                WavenumberKind::Grazing => "grazing",
            }
            .into(),
            kappa2: k2,
            gamma2: side2.gamma(),
            t_norm: c.t_norm,
            r_norm: c.r_norm,
            theta_mix: c.theta_mix,
            t: conv.map(|v| v.t),
            t_prime: conv.map(|v| v.t_prime),
            r: conv.map(|v| v.r),
            r_prime: conv.map(|v| v.r_prime),
            theta_out,
            critical_angle: critical_angle(n1, n2).ok().map(f64::to_degrees),
            delta_r,
            penetration_depth,
        },
    })
}

fn index(p: &Params) -> Result<IndexDocument> {
    let coupling_g = p.number("coupling")?;
    let delta_omega = p.number("delta_omega")?;
    let (coupling, note) = match p.number_opt("delta_tau")? {
        Some(tau) => (AtomCoupling::new(coupling_g, delta_omega, tau)?, "given"),
        None => (
            AtomCoupling::with_uncertainty_duration(coupling_g, delta_omega)?,
            "defaulted to 1/delta_omega",
        ),
    };
    let spacing = p.number("atom_spacing")?;
    let lambda0 = p.number("lambda0")?;
    let k0 = 2.0 * std::f64::consts::PI / lambda0;
    let ret = interaction_phase(&coupling)?;
    let excess = index_excess(ret.xi, k0, spacing)?;
    let n = 1.0 + excess;
    let lambda_in = wavelength_in_medium(lambda0, n)?;
    let atoms = lambda_in / spacing;
    Ok(IndexDocument {
        command: "index".into(),
        metadata: IndexMetadata {
            coupling: coupling.g,
            delta_omega: coupling.delta_omega,
            delta_tau: coupling.delta_tau,
            atom_spacing: spacing,
            lambda0,
            delta_tau_note: note.into(),
        },
        result: IndexRecord {
            chi: ret.chi,
            xi: ret.xi,
            index: n,
            index_excess: excess,
            wavelength_in_medium: lambda_in,
            atoms_per_wavelength: atoms,
            phase_per_wavelength: atoms * ret.xi,
        },
    })
}
