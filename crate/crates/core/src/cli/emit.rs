use std::io::Write;

use serde::{Deserialize, Serialize};

use super::config::Format;
use crate::error::{Error, Result};
use crate::gi_slab::{StepRule, TrajectoryPoint};
use crate::si_slab::{LayerField, Parity};

pub const GRID_NOTE: &str =
    "dx snapped so that d/dx is odd; core interfaces sit on layer boundaries at ±(m+1/2)dx";
pub const PHOTON_NOTE: &str =
    "cladding photon numbers are raw |c_j|^2; divide by the commutator column to renormalize";
pub const G_NOTE: &str =
    "g in 1/m; a quoted focusing constant of 5.66 is read as 5.66e3 1/m, the value that gives micron-scale amplitudes";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModesMetadata {
    pub n1: f64,
    pub n2: f64,
    pub d: f64,
    pub lambda0: f64,
    pub v_number: f64,
    pub dx_requested: f64,
    pub dx: f64,
    pub m: usize,
    pub big_m: usize,
    pub tail_tol: f64,
    pub s_target: f64,
    pub include_vacuum: bool,
    pub grid_note: String,
    pub photon_note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeRecord {
    pub parity: Parity,
    pub beta: f64,
    pub kappa: f64,
    pub gamma: f64,
    pub residual: f64,
    pub v_number: f64,
    /// Real-positive core eigenvalue fixed by the energy-flow target.
    pub alpha_core: f64,
    pub layers: Vec<LayerField>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModesDocument {
    pub command: String,
    pub metadata: ModesMetadata,
    pub modes: Vec<ModeRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GiMetadata {
    pub n1: f64,
    pub g: f64,
    pub q: f64,
    pub d: f64,
    pub lambda0: f64,
    pub theta_in: f64,
    pub x_start: f64,
    pub dx: f64,
    pub beta: f64,
    pub x_turn: f64,
    pub analytic_period: Option<f64>,
    pub g_note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryMetadata {
    #[serde(flatten)]
    pub gi: GiMetadata,
    pub z_max: f64,
    pub step_rule: StepRule,
    pub zero_crossing_period: Option<f64>,
    pub max_beta_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryDocument {
    pub command: String,
    pub metadata: TrajectoryMetadata,
    pub points: Vec<TrajectoryPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub j: i64,
    pub x: f64,
    pub index: f64,
    pub kappa: f64,
    /// Quadratic approximation; absent unless the profile is parabolic.
    pub kappa_paraxial: Option<f64>,
    /// `r̃_{j,j+1}`; 1 into the turning layer.
    pub r_next: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileMetadata {
    #[serde(flatten)]
    pub gi: GiMetadata,
    pub reflection_loss_per_period: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileDocument {
    pub command: String,
    pub metadata: ProfileMetadata,
    pub layers: Vec<ProfileRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FresnelMetadata {
    pub n1: Option<f64>,
    pub n2: Option<f64>,
    pub theta_in: Option<f64>,
    pub lambda0: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FresnelRecord {
    pub beta: Option<f64>,
    pub kappa1: f64,
    /// `propagating`, `evanescent` or `grazing`.
    pub side2: String,
    pub kappa2: f64,
    pub gamma2: Option<f64>,
    pub t_norm: f64,
    pub r_norm: f64,
    pub theta_mix: f64,
    pub t: Option<f64>,
    pub t_prime: Option<f64>,
    pub r: Option<f64>,
    pub r_prime: Option<f64>,
    /// Degrees from the normal.
    pub theta_out: Option<f64>,
    pub critical_angle: Option<f64>,
    pub delta_r: Option<f64>,
    pub penetration_depth: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FresnelDocument {
    pub command: String,
    pub metadata: FresnelMetadata,
    pub result: FresnelRecord,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexMetadata {
    pub coupling: f64,
    pub delta_omega: f64,
    pub delta_tau: f64,
    pub atom_spacing: f64,
    pub lambda0: f64,
    pub delta_tau_note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexRecord {
    pub chi: f64,
    pub xi: f64,
    pub index: f64,
    pub index_excess: f64,
    pub wavelength_in_medium: f64,
    pub atoms_per_wavelength: f64,
    pub phase_per_wavelength: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexDocument {
    pub command: String,
    pub metadata: IndexMetadata,
    pub result: IndexRecord,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Document {
    Modes(ModesDocument),
    Profile(ProfileDocument),
    Fresnel(FresnelDocument),
    Trajectory(TrajectoryDocument),
    Index(IndexDocument),
}

/// 17 significant digits, enough to recover every f64 exactly.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

fn metadata_lines(w: &mut dyn Write, command: &str, meta: &impl Serialize) -> Result<()> {
    writeln!(w, "# command: {command}")?;
    let value = serde_json::to_value(meta).map_err(|e| Error::Numerical(e.to_string()))?;
    if let serde_json::Value::Object(map) = value {
        for (k, v) in map {
            let text = match v {
                serde_json::Value::Number(n) => match (n.as_i64(), n.as_f64()) {
                    (Some(i), _) if !n.is_f64() => i.to_string(),
                    (_, Some(f)) => fmt_f64(f),
                    _ => n.to_string(),
                },
                serde_json::Value::String(s) => s,
                serde_json::Value::Null => "none".into(),
                other => other.to_string(),
            };
            writeln!(w, "# {k}: {text}")?;
        }
    }
    Ok(())
}

fn json_line(w: &mut dyn Write, doc: &impl Serialize) -> Result<()> {
    serde_json::to_writer(&mut *w, doc).map_err(|e| Error::Io(e.into()))?;
    writeln!(w)?;
    Ok(())
}

pub fn emit(doc: &Document, format: Format, w: &mut dyn Write) -> Result<()> {
    match doc {
        Document::Modes(d) => emit_modes(d, format, w),
        Document::Profile(d) => emit_profile(d, format, w),
        Document::Fresnel(d) => emit_fresnel(d, format, w),
        Document::Trajectory(d) => emit_trajectory(d, format, w),
        Document::Index(d) => emit_index(d, format, w),
    }
}

pub fn emit_modes(doc: &ModesDocument, format: Format, w: &mut dyn Write) -> Result<()> {
    if format == Format::Json {
        return json_line(w, doc);
    }
    metadata_lines(w, &doc.command, &doc.metadata)?;
    writeln!(w, "parity,beta,kappa,gamma,residual,v_number,alpha_core")?;
    for m in &doc.modes {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            m.parity.as_str(),
            fmt_f64(m.beta),
            fmt_f64(m.kappa),
            fmt_f64(m.gamma),
            fmt_f64(m.residual),
            fmt_f64(m.v_number),
            fmt_f64(m.alpha_core)
        )?;
    }
    writeln!(w, "parity,j,x,region,mean_photons,commutator,e_field_re,e_field_im")?;
    for m in &doc.modes {
        for l in &m.layers {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{}",
                m.parity.as_str(),
                l.j,
                fmt_f64(l.x),
                l.region.as_str(),
                fmt_f64(l.mean_photons),
                fmt_f64(l.commutator),
                fmt_f64(l.e_field_re),
                fmt_f64(l.e_field_im)
            )?;
        }
    }
    Ok(())
}

pub fn emit_trajectory(doc: &TrajectoryDocument, format: Format, w: &mut dyn Write) -> Result<()> {
    if format == Format::Json {
        return json_line(w, doc);
    }
    metadata_lines(w, &doc.command, &doc.metadata)?;
    writeln!(w, "z,x,j,direction,kappa,index,alpha_re,alpha_im")?;
    for p in &doc.points {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            fmt_f64(p.z),
            fmt_f64(p.x),
            p.j,
            p.direction.as_str(),
            fmt_f64(p.kappa),
            fmt_f64(p.index),
            fmt_f64(p.amplitude.re),
            fmt_f64(p.amplitude.im)
        )?;
    }
    Ok(())
}

pub fn emit_profile(doc: &ProfileDocument, format: Format, w: &mut dyn Write) -> Result<()> {
    if format == Format::Json {
        return json_line(w, doc);
    }
    metadata_lines(w, &doc.command, &doc.metadata)?;
    writeln!(w, "j,x,index,kappa,kappa_paraxial,r_next")?;
    for r in &doc.layers {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            r.j,
            fmt_f64(r.x),
            fmt_f64(r.index),
            fmt_f64(r.kappa),
            fmt_opt(r.kappa_paraxial),
            fmt_f64(r.r_next)
        )?;
    }
    Ok(())
}

pub fn emit_fresnel(doc: &FresnelDocument, format: Format, w: &mut dyn Write) -> Result<()> {
    if format == Format::Json {
        return json_line(w, doc);
    }
    metadata_lines(w, &doc.command, &doc.metadata)?;
    let r = &doc.result;
    writeln!(
        w,
        "beta,kappa1,side2,kappa2,gamma2,t_norm,r_norm,theta_mix,t,t_prime,r,r_prime,theta_out,critical_angle,delta_r,penetration_depth"
    )?;
    writeln!(
        w,
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
        fmt_opt(r.beta),
        fmt_f64(r.kappa1),
        r.side2,
        fmt_f64(r.kappa2),
        fmt_opt(r.gamma2),
        fmt_f64(r.t_norm),
        fmt_f64(r.r_norm),
        fmt_f64(r.theta_mix),
        fmt_opt(r.t),
        fmt_opt(r.t_prime),
        fmt_opt(r.r),
        fmt_opt(r.r_prime),
        fmt_opt(r.theta_out),
        fmt_opt(r.critical_angle),
        fmt_opt(r.delta_r),
        fmt_opt(r.penetration_depth)
    )?;
    Ok(())
}

pub fn emit_index(doc: &IndexDocument, format: Format, w: &mut dyn Write) -> Result<()> {
    if format == Format::Json {
        return json_line(w, doc);
    }
    metadata_lines(w, &doc.command, &doc.metadata)?;
    let r = &doc.result;
    writeln!(
        w,
        "chi,xi,index,index_excess,wavelength_in_medium,atoms_per_wavelength,phase_per_wavelength"
    )?;
    writeln!(
        w,
        "{},{},{},{},{},{},{}",
        fmt_f64(r.chi),
        fmt_f64(r.xi),
        fmt_f64(r.index),
        fmt_f64(r.index_excess),
        fmt_f64(r.wavelength_in_medium),
        fmt_f64(r.atoms_per_wavelength),
        fmt_f64(r.phase_per_wavelength)
    )?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for v in [0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300, f64::MIN_POSITIVE] {
            let s = fmt_f64(v);
            assert_eq!(s.parse::<f64>().unwrap(), v);
            let mantissa = s.split('e').next().unwrap().trim_start_matches('-');
            assert_eq!(mantissa.chars().filter(|c| c.is_ascii_digit()).count(), 17);
        }
    }

    #[test]
    fn metadata_formats_by_type() {
        #[derive(Serialize)]
        struct M {
            a: f64,
            b: usize,
            c: Option<f64>,
            s: &'static str,
        }
        let mut out = Vec::new();
        let m = M {
            a: 2.0,
            b: 7,
            c: None,
            s: "x",
        };
        metadata_lines(&mut out, "t", &m).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(
            text,
            "# command: t\n# a: 2.0000000000000000e0\n# b: 7\n# c: none\n# s: x\n"
        );
    }
}
