use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::PathBuf;

use clap::error::{ContextKind, ContextValue, ErrorKind};
use clap::{Parser, ValueEnum};

use crate::error::{Error, Result};
use crate::gi_slab::StepRule;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, ValueEnum)]
pub enum Command {
    /// Guided TE modes and layer photon profiles of a step-index slab.
    Modes,
    /// Per-layer wavenumbers and interface reflections in a graded-index slab.
    Profile,
    /// Interface coefficients between two dielectrics.
    Fresnel,
    /// Ray trajectory through a graded-index slab.
    Trajectory,
    /// Refractive index from the field–atom phase retardation.
    Index,
    /// One base command run over a list of values of one parameter.
    Sweep,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::Modes => "modes",
            Command::Profile => "profile",
            Command::Fresnel => "fresnel",
            Command::Trajectory => "trajectory",
            Command::Index => "index",
            Command::Sweep => "sweep",
        }
    }

    fn parse(key: &str, text: &str) -> Result<Self> {
        Command::from_str(text, false).map_err(|_| {
            Error::usage(key, format!("unknown command `{text}`"))
        })
    }

    /// Keys the command needs, and keys it accepts on top of those.
    fn keys(self) -> (&'static [&'static str], &'static [&'static str]) {
        match self {
            Command::Modes => (
                &["n1", "n2", "d", "lambda0"],
                &["dx", "tail_tol", "s_target", "include_vacuum"],
            ),
            Command::Profile => (
                &["n1", "theta_in", "dx"],
                &["g", "delta_r", "d", "q", "lambda0", "x_start"],
            ),
            Command::Fresnel => (&[], &["n1", "n2", "theta_in", "lambda0", "kappa1", "kappa2"]),
            Command::Trajectory => (
                &["n1", "theta_in", "dx", "z_max"],
                &["g", "delta_r", "d", "q", "lambda0", "x_start", "step_rule"],
            ),
            Command::Index => (
                &["coupling", "delta_omega", "atom_spacing", "lambda0"],
                &["delta_tau"],
            ),
            Command::Sweep => (&["base", "param", "values"], &[]),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    /// Comma-separated tables with `#` metadata lines.
    #[default]
    Csv,
    /// One JSON document per run, on a single line.
    Json,
}

impl Format {
    pub fn as_str(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Number,
    Flag,
    Text,
    List,
}

const KEYS: &[(&str, Kind)] = &[
    ("n1", Kind::Number),
    ("n2", Kind::Number),
    ("d", Kind::Number),
    ("lambda0", Kind::Number),
    ("dx", Kind::Number),
    ("theta_in", Kind::Number),
    ("x_start", Kind::Number),
    ("g", Kind::Number),
    ("q", Kind::Number),
    ("delta_r", Kind::Number),
    ("s_target", Kind::Number),
    ("z_max", Kind::Number),
    ("tail_tol", Kind::Number),
    ("kappa1", Kind::Number),
    ("kappa2", Kind::Number),
    ("coupling", Kind::Number),
    ("delta_omega", Kind::Number),
    ("delta_tau", Kind::Number),
    ("atom_spacing", Kind::Number),
    ("include_vacuum", Kind::Flag),
    ("step_rule", Kind::Text),
    ("base", Kind::Text),
    ("param", Kind::Text),
    ("values", Kind::List),
    ("command", Kind::Text),
    ("format", Kind::Text),
    ("output", Kind::Text),
];

/// Keys that may be negative or zero.
const SIGNED: &[&str] = &["x_start", "coupling", "kappa1", "kappa2"];

fn kind_of(key: &str) -> Option<Kind> {
    KEYS.iter().find(|(k, _)| *k == key).map(|&(_, kind)| kind)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Number(f64),
    Flag(bool),
    Text(String),
    List(Vec<f64>),
}

/// Key–value parameters of one run.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Params(BTreeMap<String, Value>);

impl Params {
    pub fn set(&mut self, key: &str, value: Value) -> Result<()> {
        let want = kind_of(key).ok_or_else(|| Error::usage(key, "unknown key"))?;
        let ok = matches!(
            (want, &value),
            (Kind::Number, Value::Number(_))
                | (Kind::Flag, Value::Flag(_))
                | (Kind::Text, Value::Text(_))
                | (Kind::List, Value::List(_))
        );
        if !ok {
            return Err(Error::usage(key, "value has the wrong type"));
        }
        self.0.insert(key.to_string(), value);
        Ok(())
    }

    pub fn contains(&self, key: &str) -> bool {
        self.0.contains_key(key)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.0.keys().map(String::as_str)
    }

    pub fn number(&self, key: &str) -> Result<f64> {
        self.number_opt(key)?
            .ok_or_else(|| Error::usage(key, "missing required value"))
    }

    pub fn number_opt(&self, key: &str) -> Result<Option<f64>> {
        match self.0.get(key) {
            None => Ok(None),
            Some(Value::Number(v)) => Ok(Some(*v)),
            Some(_) => Err(Error::usage(key, "expected a number")),
        }
    }

    pub fn number_or(&self, key: &str, default: f64) -> Result<f64> {
        Ok(self.number_opt(key)?.unwrap_or(default))
    }

    pub fn flag(&self, key: &str) -> bool {
        matches!(self.0.get(key), Some(Value::Flag(true)))
    }

    pub fn text(&self, key: &str) -> Option<&str> {
        match self.0.get(key) {
            Some(Value::Text(s)) => Some(s),
            _ => None,
        }
    }

    pub fn list(&self, key: &str) -> Option<&[f64]> {
        match self.0.get(key) {
            Some(Value::List(v)) => Some(v),
            _ => None,
        }
    }

    fn merge_over(mut self, base: Params) -> Params {
        for (k, v) in base.0 {
            self.0.entry(k).or_insert(v);
        }
        self
    }
}

/// A fully validated invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub params: Params,
    pub format: Format,
    pub output: Option<PathBuf>,
}

impl RunConfig {
    pub fn step_rule(&self) -> Result<StepRule> {
        parse_step_rule(self.params.text("step_rule"))
    }

    /// The sweep's base command and one run per value, in order.
    pub fn sweep_runs(&self) -> Result<Vec<RunConfig>> {
        let base = self.params.text("base").unwrap_or_default();
        let base = Command::parse("base", base)?;
        let param = self.params.text("param").unwrap_or_default().to_string();
        let values = self.params.list("values").unwrap_or_default();
        values
            .iter()
            .map(|&v| {
                let mut params = Params::default();
                for (k, val) in &self.params.0 {
                    if !matches!(k.as_str(), "base" | "param" | "values") {
                        params.0.insert(k.clone(), val.clone());
                    }
                }
                params.0.insert(param.clone(), Value::Number(v));
                validate(base, params, self.format, self.output.clone())
            })
            .collect()
    }
}

fn parse_step_rule(text: Option<&str>) -> Result<StepRule> {
    match text {
        None | Some("interpolated") => Ok(StepRule::Interpolated),
        Some("layer-center") => Ok(StepRule::LayerCenter),
        Some(other) => Err(Error::usage(
            "step_rule",
            format!("expected `interpolated` or `layer-center`, got `{other}`"),
        )),
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "slabguide",
    version,
    about = "Coherent-state fields in dielectric slab waveguides"
)]
struct Cli {
    /// Command to run; may instead be given as `command` in the config file.
    #[arg(value_enum)]
    command: Option<Command>,
    /// Flat key = value TOML file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Core (or axial) refractive index.
    #[arg(long, allow_hyphen_values = true)]
    n1: Option<f64>,
    /// Cladding refractive index.
    #[arg(long, allow_hyphen_values = true)]
    n2: Option<f64>,
    /// Core width (m).
    #[arg(long, allow_hyphen_values = true)]
    d: Option<f64>,
    /// Vacuum wavelength (m).
    #[arg(long, allow_hyphen_values = true)]
    lambda0: Option<f64>,
    /// Layer thickness (m).
    #[arg(long, allow_hyphen_values = true)]
    dx: Option<f64>,
    /// Angle from the x-axis (interface normal), degrees.
    #[arg(long, allow_hyphen_values = true)]
    theta_in: Option<f64>,
    /// Launch position (m).
    #[arg(long, allow_hyphen_values = true)]
    x_start: Option<f64>,
    /// Focusing constant (1/m).
    #[arg(long, allow_hyphen_values = true)]
    g: Option<f64>,
    /// Profile exponent.
    #[arg(long, allow_hyphen_values = true)]
    q: Option<f64>,
    /// Relative index difference.
    #[arg(long, allow_hyphen_values = true)]
    delta_r: Option<f64>,
    /// Target energy flow (W per unit length along y).
    #[arg(long, allow_hyphen_values = true)]
    s_target: Option<f64>,
    /// Propagation length (m).
    #[arg(long, allow_hyphen_values = true)]
    z_max: Option<f64>,
    /// Bound on the cladding field tail at the grid edge.
    #[arg(long, allow_hyphen_values = true)]
    tail_tol: Option<f64>,
    /// Transverse wavenumber on side 1 (rad/m).
    #[arg(long, allow_hyphen_values = true)]
    kappa1: Option<f64>,
    /// Transverse wavenumber on side 2 (rad/m).
    #[arg(long, allow_hyphen_values = true)]
    kappa2: Option<f64>,
    /// Field–atom coupling constant (rad/s).
    #[arg(long, allow_hyphen_values = true)]
    coupling: Option<f64>,
    /// Detuning from the atomic resonance (rad/s).
    #[arg(long, allow_hyphen_values = true)]
    delta_omega: Option<f64>,
    /// Interaction duration (s); defaults to 1/delta_omega.
    #[arg(long, allow_hyphen_values = true)]
    delta_tau: Option<f64>,
    /// Atom spacing along the path (m).
    #[arg(long, allow_hyphen_values = true)]
    atom_spacing: Option<f64>,
    /// Include the vacuum term in the energy flow.
    #[arg(long)]
    include_vacuum: bool,
    /// `interpolated` or `layer-center`.
    #[arg(long)]
    step_rule: Option<String>,
    /// Base command of a sweep.
    #[arg(long, value_enum)]
    base: Option<Command>,
    /// Parameter a sweep varies.
    #[arg(long)]
    param: Option<String>,
    /// Comma-separated sweep values.
    #[arg(long, value_delimiter = ',')]
    values: Option<Vec<f64>>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Output file; standard output when absent.
    #[arg(long)]
    output: Option<PathBuf>,
}

impl Cli {
    fn params(&self) -> Result<Params> {
        let mut p = Params::default();
        let numbers = [
            ("n1", self.n1),
            ("n2", self.n2),
            ("d", self.d),
            ("lambda0", self.lambda0),
            ("dx", self.dx),
            ("theta_in", self.theta_in),
            ("x_start", self.x_start),
            ("g", self.g),
            ("q", self.q),
            ("delta_r", self.delta_r),
            ("s_target", self.s_target),
            ("z_max", self.z_max),
            ("tail_tol", self.tail_tol),
            ("kappa1", self.kappa1),
            ("kappa2", self.kappa2),
            ("coupling", self.coupling),
            ("delta_omega", self.delta_omega),
            ("delta_tau", self.delta_tau),
            ("atom_spacing", self.atom_spacing),
        ];
        for (k, v) in numbers {
            if let Some(v) = v {
                p.set(k, Value::Number(v))?;
            }
        }
        if self.include_vacuum {
            p.set("include_vacuum", Value::Flag(true))?;
        }
        if let Some(s) = &self.step_rule {
            p.set("step_rule", Value::Text(s.clone()))?;
        }
        if let Some(b) = self.base {
            p.set("base", Value::Text(b.as_str().into()))?;
        }
        if let Some(s) = &self.param {
            p.set("param", Value::Text(s.clone()))?;
        }
        if let Some(v) = &self.values {
            p.set("values", Value::List(v.clone()))?;
        }
        if let Some(f) = self.format {
            p.set("format", Value::Text(f.as_str().into()))?;
        }
        if let Some(o) = &self.output {
            p.set("output", Value::Text(o.to_string_lossy().into_owned()))?;
        }
        Ok(p)
    }
}

/// Parses a flat `key = value` TOML document.
pub fn parse_config_text(text: &str) -> Result<Params> {
    let table: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| Error::usage("config", e.message().to_string()))?;
    let mut p = Params::default();
    for (key, v) in table {
        let kind = kind_of(&key).ok_or_else(|| Error::usage(key.as_str(), "unknown key"))?;
        let value = match (kind, v) {
            (Kind::Number, toml::Value::Float(x)) => Value::Number(x),
            (Kind::Number, toml::Value::Integer(i)) => Value::Number(i as f64),
            (Kind::Flag, toml::Value::Boolean(b)) => Value::Flag(b),
            (Kind::Text, toml::Value::String(s)) => Value::Text(s),
            (Kind::List, toml::Value::Array(items)) => {
                let mut out = Vec::with_capacity(items.len());
                for item in items {
                    match item {
                        toml::Value::Float(x) => out.push(x),
                        toml::Value::Integer(i) => out.push(i as f64),
                        _ => return Err(Error::usage(key.as_str(), "expected a list of numbers")),
                    }
                }
                Value::List(out)
            }
            (Kind::Number, _) => return Err(Error::usage(key.as_str(), "expected a number")),
            (Kind::Flag, _) => return Err(Error::usage(key.as_str(), "expected true or false")),
            (Kind::Text, _) => return Err(Error::usage(key.as_str(), "expected a string")),
            (Kind::List, _) => return Err(Error::usage(key.as_str(), "expected a list of numbers")),
        };
        p.set(&key, value)?;
    }
    Ok(p)
}

/// Maps a clap failure onto a usage error that names the offending flag.
fn clap_to_usage(e: clap::Error) -> Error {
    let key = match e.get(ContextKind::InvalidArg) {
        Some(ContextValue::String(s)) => s
            .trim_start_matches('-')
            .split([' ', '='])
            .next()
            .unwrap_or("")
            .replace('-', "_"),
        _ => "arguments".to_string(),
    };
    let message = e
        .render()
        .to_string()
        .lines()
        .next()
        .unwrap_or("")
        .trim_start_matches("error: ")
        .to_string();
    Error::usage(if key.is_empty() { "arguments".into() } else { key }, message)
}

/// Outcome of reading the command line: a run, or text clap wants printed.
#[derive(Debug)]
pub enum Parsed {
    Run(RunConfig),
    Info(String),
}

/// Parses argv (including the program name) and any `--config` file.
pub fn parse_args<I, T>(args: I) -> Result<Parsed>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            return Ok(Parsed::Info(e.render().to_string()));
        }
        Err(e) => return Err(clap_to_usage(e)),
    };
    let from_file = match &cli.config {
        Some(path) => parse_config_text(&std::fs::read_to_string(path)?)?,
        None => Params::default(),
    };
    let params = cli.params()?.merge_over(from_file);
    let command = match (cli.command, params.text("command")) {
        (Some(c), _) => c,
        (None, Some(text)) => Command::parse("command", text)?,
        (None, None) => return Err(Error::usage("command", "no command given")),
    };
    from_params(command, params).map(Parsed::Run)
}

/// Validates merged parameters for `command`.
pub fn from_params(command: Command, mut params: Params) -> Result<RunConfig> {
    params.0.remove("command");
    let format = match params.0.remove("format") {
        None => Format::default(),
        Some(Value::Text(s)) => Format::from_str(&s, false)
            .map_err(|_| Error::usage("format", format!("expected csv or json, got `{s}`")))?,
        Some(_) => return Err(Error::usage("format", "expected a string")),
    };
    let output = match params.0.remove("output") {
        None => None,
        Some(Value::Text(s)) => Some(PathBuf::from(s)),
        Some(_) => return Err(Error::usage("output", "expected a path")),
    };
    validate(command, params, format, output)
}

fn validate(
    command: Command,
    params: Params,
    format: Format,
    output: Option<PathBuf>,
) -> Result<RunConfig> {
    if command == Command::Sweep {
        return validate_sweep(params, format, output);
    }
    let (required, optional) = command.keys();
    for key in params.keys() {
        if !required.contains(&key) && !optional.contains(&key) {
            return Err(Error::usage(
                key,
                format!("not a parameter of `{}`", command.as_str()),
            ));
        }
    }
    for key in required {
        if !params.contains(key) {
            return Err(Error::usage(*key, "missing required value"));
        }
    }
    for (key, value) in &params.0 {
        if let Value::Number(v) = value {
            if !v.is_finite() {
                return Err(Error::usage(key.as_str(), "must be finite"));
            }
            if !SIGNED.contains(&key.as_str()) && *v <= 0.0 {
                return Err(Error::usage(key.as_str(), "must be positive"));
            }
        }
    }
    parse_step_rule(params.text("step_rule"))?;
    match command {
        Command::Profile | Command::Trajectory => {
            if params.contains("g") == params.contains("delta_r") {
                return Err(Error::usage("g", "give exactly one of g and delta_r"));
            }
            if params.contains("delta_r") && !params.contains("d") {
                return Err(Error::usage("d", "required together with delta_r"));
            }
        }
        Command::Fresnel => {
            let by_kappa = params.contains("kappa1") || params.contains("kappa2");
            let needed: &[&str] = if by_kappa {
                &["kappa1", "kappa2"]
            } else {
                &["n1", "n2", "theta_in"]
            };
            for key in needed {
                if !params.contains(key) {
                    return Err(Error::usage(*key, "missing required value"));
                }
            }
            if by_kappa {
                for key in ["n1", "n2", "theta_in"] {
                    if params.contains(key) {
                        return Err(Error::usage(key, "not used together with kappa1/kappa2"));
                    }
                }
            }
        }
        _ => {}
    }
    Ok(RunConfig {
        command,
        params,
        format,
        output,
    })
}

fn validate_sweep(params: Params, format: Format, output: Option<PathBuf>) -> Result<RunConfig> {
    for key in ["base", "param", "values"] {
        if !params.contains(key) {
            return Err(Error::usage(key, "missing required value"));
        }
    }
    let base = Command::parse("base", params.text("base").unwrap_or_default())?;
    if base == Command::Sweep {
        return Err(Error::usage("base", "a sweep cannot sweep a sweep"));
    }
    let param = params.text("param").unwrap_or_default();
    let (required, optional) = base.keys();
    if kind_of(param) != Some(Kind::Number) || !(required.contains(&param) || optional.contains(&param)) {
        return Err(Error::usage(
            "param",
            format!("`{param}` is not a numeric parameter of `{}`", base.as_str()),
        ));
    }
    if params.list("values").is_none_or(|v| v.is_empty()) {
        return Err(Error::usage("values", "needs at least one value"));
    }
    let cfg = RunConfig {
        command: Command::Sweep,
        params,
        format,
        output,
    };
    // Every fanned-out run must be valid on its own.
    cfg.sweep_runs()?;
    Ok(cfg)
}
