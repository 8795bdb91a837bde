//! Declarative scenario files.
//!
//! A scenario is a TOML document with the sections `strip`, `cantilever`,
//! `coil`, `circuit`, `source`, and optional `noise` and `options`. Physical
//! quantities are strings with a unit suffix (`"50 nm"`, `"140 mT"`) or bare
//! numbers in SI. [`Scenario`] keeps the file's intent (`"optimal"`, `"max"`)
//! so that serializing and re-parsing gives back the same value; [`Resolved`]
//! holds the concrete specs used for computation.

use std::collections::BTreeSet;

use toml::{Table, Value};

use crate::analytic_strip::{max_gradient, max_homogeneous_field, optimal_coil_width, FieldMode, LambdaModel};
use crate::coupling::{flux_bias_for_phi, CircuitSpec, OmegaConvention};
use crate::domain::{validate_strip, CantileverSpec, CoilSpec, StripSpec, SystemSpec, ValidationReport};
use crate::error::{Error, Result};
use crate::sources::{gradient_at_origin, WirePairSpec};
use crate::units::{format_quantity, parse_quantity, Dimension};

/// A value that is either fixed or derived from the rest of the scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Setting {
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoilConfig {
    /// Height z_c above the strip plane [m].
    pub height: f64,
    /// w_c; `Auto` is the width maximizing η for the source's drive mode.
    pub width: Setting,
    /// L_c; defaults to the strip length.
    pub length: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CircuitEnergies {
    Omega0 { omega0: f64, ej_over_ec: f64 },
    Explicit { e_j1: f64, e_c: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FluxOperatingPoint {
    /// Target sensitivity φ; the bias is found by inversion.
    Phi(f64),
    /// Φ(0)/Φ₀ directly.
    FluxBias(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircuitConfig {
    pub energies: CircuitEnergies,
    pub operating_point: FluxOperatingPoint,
    pub q: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SourceConfig {
    /// Ideal quadrupole; `Auto` is b^max.
    Quadrupole { gradient: Setting },
    /// Uniform field; `Auto` is B_a^max.
    Homogeneous { field: Setting },
    /// Biased wire pair. At least one of `depth` and `gradient` is set; a
    /// pinned gradient overrides the one implied by the depth.
    WirePair { current: f64, depth: Option<f64>, gradient: Option<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseConfig {
    /// √S_I/I_w [1/√Hz].
    pub current_asd: f64,
    /// √S_B/B_b [1/√Hz].
    pub bias_asd: f64,
    /// Angular frequencies at which S_Φ is tabulated.
    pub frequencies: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Options {
    pub convention: OmegaConvention,
    pub lambda_model: LambdaModel,
    pub mem_aspects: Vec<f64>,
    pub mem_cells: Vec<usize>,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            convention: OmegaConvention::Cyclic,
            lambda_model: LambdaModel::LondonThinFilm,
            mem_aspects: vec![5.0, 10.0, 20.0, 50.0],
            mem_cells: vec![1024, 2304, 4096],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub strip: StripSpec,
    pub cantilever: CantileverSpec,
    pub coil: CoilConfig,
    pub circuit: CircuitConfig,
    pub source: SourceConfig,
    pub noise: Option<NoiseConfig>,
    pub options: Options,
}

/// Concrete inputs for one evaluation of a scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolved {
    pub system: SystemSpec,
    pub circuit: CircuitSpec,
    pub mode: FieldMode,
    /// b for a quadrupole-like drive, B_a for a homogeneous one.
    pub amplitude: f64,
    /// Gradient entering η⋆.
    pub reference_gradient: f64,
    /// Wire pair consistent with the drive gradient.
    pub wire_pair: Option<WirePairSpec>,
    /// Depth written in the scenario, when it differs from the consistent one.
    pub stated_depth: Option<f64>,
    pub validation: ValidationReport,
}

struct Section<'a> {
    name: &'static str,
    table: &'a Table,
    seen: BTreeSet<&'static str>,
}

impl<'a> Section<'a> {
    fn new(root: &'a Table, name: &'static str) -> Result<Self> {
        match root.get(name) {
            Some(Value::Table(table)) => Ok(Section { name, table, seen: BTreeSet::new() }),
            Some(_) => Err(Error::config(format!("[{name}] must be a table"))),
            None => Err(Error::config(format!("missing section [{name}]"))),
        }
    }

    fn raw(&mut self, key: &'static str) -> Option<&'a Value> {
        self.seen.insert(key);
        self.table.get(key)
    }

    fn opt(&mut self, key: &'static str, dim: Dimension) -> Result<Option<f64>> {
        let name = self.name;
        self.raw(key).map(|v| quantity(v, dim, name, key)).transpose()
    }

    fn req(&mut self, key: &'static str, dim: Dimension) -> Result<f64> {
        self.opt(key, dim)?
            .ok_or_else(|| Error::config(format!("[{}] is missing '{key}'", self.name)))
    }

    fn setting(&mut self, key: &'static str, auto: &str, dim: Dimension) -> Result<Setting> {
        match self.raw(key) {
            Some(Value::String(s)) if s.trim() == auto => Ok(Setting::Auto),
            Some(v) => Ok(Setting::Fixed(quantity(v, dim, self.name, key)?)),
            None => Err(Error::config(format!("[{}] is missing '{key}'", self.name))),
        }
    }

    fn text(&mut self, key: &'static str) -> Result<Option<&'a str>> {
        match self.raw(key) {
            Some(Value::String(s)) => Ok(Some(s.as_str())),
            Some(_) => Err(Error::config(format!("[{}] '{key}' must be a string", self.name))),
            None => Ok(None),
        }
    }

    fn list(&mut self, key: &'static str) -> Result<Option<&'a Vec<Value>>> {
        match self.raw(key) {
            Some(Value::Array(a)) => Ok(Some(a)),
            Some(_) => Err(Error::config(format!("[{}] '{key}' must be an array", self.name))),
            None => Ok(None),
        }
    }

    fn finish(self) -> Result<()> {
        for key in self.table.keys() {
            if !self.seen.contains(key.as_str()) {
                return Err(Error::config(format!("unknown key '{key}' in [{}]", self.name)));
            }
        }
        Ok(())
    }
}

fn quantity(v: &Value, dim: Dimension, section: &str, key: &str) -> Result<f64> {
    let r = match v {
        Value::String(s) => parse_quantity(s, dim),
        Value::Float(f) => Ok(*f),
        Value::Integer(i) => Ok(*i as f64),
        _ => Err(Error::config("expected a number or a quantity string")),
    };
    r.map_err(|e| Error::config(format!("[{section}] '{key}': {e}")))
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Self> {
        let root: Table = text.parse().map_err(|e| Error::config(format!("invalid TOML: {e}")))?;
        for key in root.keys() {
            if !matches!(
                key.as_str(),
                "name" | "strip" | "cantilever" | "coil" | "circuit" | "source" | "noise" | "options"
            ) {
                return Err(Error::config(format!("unknown top-level key '{key}'")));
            }
        }
        let name = match root.get("name") {
            Some(Value::String(s)) => s.clone(),
            Some(_) => return Err(Error::config("'name' must be a string")),
            None => String::new(),
        };

        let mut s = Section::new(&root, "strip")?;
        let strip = StripSpec {
            l: s.req("length", Dimension::Length)?,
            w: s.req("width", Dimension::Length)?,
            t: s.req("thickness", Dimension::Length)?,
            b_c: s.req("critical_field", Dimension::MagneticField)?,
            rho: s.req("density", Dimension::MassDensity)?,
            lambda_l: s.req("london_depth", Dimension::Length)?,
            xi: s.req("coherence_length", Dimension::Length)?,
        };
        s.finish()?;

        let mut s = Section::new(&root, "cantilever")?;
        let cantilever = CantileverSpec {
            t0: s.req("thickness", Dimension::Length)?,
            rho0: s.req("density", Dimension::MassDensity)?,
            omega: s.req("frequency", Dimension::AngularFrequency)?,
            gamma: s.req("damping", Dimension::AngularFrequency)?,
            temperature: s.req("temperature", Dimension::Temperature)?,
        };
        s.finish()?;

        let mut s = Section::new(&root, "coil")?;
        let coil = CoilConfig {
            height: s.req("height", Dimension::Length)?,
            width: s.setting("width", "optimal", Dimension::Length)?,
            length: s.opt("length", Dimension::Length)?,
        };
        s.finish()?;

        let circuit = parse_circuit(&root)?;
        let source = parse_source(&root)?;

        let noise = if root.contains_key("noise") {
            let mut s = Section::new(&root, "noise")?;
            let current_asd = s.req("current_asd", Dimension::RelativeAsd)?;
            let bias_asd = s.opt("bias_asd", Dimension::RelativeAsd)?.unwrap_or(0.0);
            let frequencies = match s.list("frequencies")? {
                Some(a) => a
                    .iter()
                    .map(|v| quantity(v, Dimension::AngularFrequency, "noise", "frequencies"))
                    .collect::<Result<Vec<_>>>()?,
                None => Vec::new(),
            };
            s.finish()?;
            Some(NoiseConfig { current_asd, bias_asd, frequencies })
        } else {
            None
        };

        let mut options = Options::default();
        if root.contains_key("options") {
            let mut s = Section::new(&root, "options")?;
            if let Some(c) = s.text("decoherence_convention")? {
                options.convention = match c {
                    "cyclic" => OmegaConvention::Cyclic,
                    "angular" => OmegaConvention::Angular,
                    _ => return Err(Error::config(format!("unknown decoherence_convention '{c}'"))),
                };
            }
            if let Some(m) = s.text("lambda_model")? {
                options.lambda_model = match m {
                    "london" => LambdaModel::LondonThinFilm,
                    "edge-fit" => LambdaModel::EdgeFit,
                    _ => return Err(Error::config(format!("unknown lambda_model '{m}'"))),
                };
            }
            if let Some(a) = s.list("mem_aspects")? {
                options.mem_aspects = a
                    .iter()
                    .map(|v| quantity(v, Dimension::Dimensionless, "options", "mem_aspects"))
                    .collect::<Result<_>>()?;
            }
            if let Some(a) = s.list("mem_cells")? {
                options.mem_cells = a
                    .iter()
                    .map(|v| match v {
                        Value::Integer(n) if *n > 0 => Ok(*n as usize),
                        _ => Err(Error::config("[options] 'mem_cells' entries must be positive integers")),
                    })
                    .collect::<Result<_>>()?;
            }
            s.finish()?;
        }

        Ok(Scenario { name, strip, cantilever, coil, circuit, source, noise, options })
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config(format!("cannot read {}: {e}", path.display())))?;
        Scenario::parse(&text)
    }

    /// TOML text that [`Scenario::parse`] maps back to `self` exactly.
    pub fn to_toml(&self) -> String {
        let q = |v: f64, d: Dimension| Value::String(format_quantity(v, d));
        let setting = |s: Setting, auto: &str, d: Dimension| match s {
            Setting::Auto => Value::String(auto.to_string()),
            Setting::Fixed(v) => q(v, d),
        };
        let mut root = Table::new();
        root.insert("name".into(), Value::String(self.name.clone()));

        let s = &self.strip;
        let mut t = Table::new();
        t.insert("length".into(), q(s.l, Dimension::Length));
        t.insert("width".into(), q(s.w, Dimension::Length));
        t.insert("thickness".into(), q(s.t, Dimension::Length));
        t.insert("critical_field".into(), q(s.b_c, Dimension::MagneticField));
        t.insert("density".into(), q(s.rho, Dimension::MassDensity));
        t.insert("london_depth".into(), q(s.lambda_l, Dimension::Length));
        t.insert("coherence_length".into(), q(s.xi, Dimension::Length));
        root.insert("strip".into(), Value::Table(t));

        let c = &self.cantilever;
        let mut t = Table::new();
        t.insert("thickness".into(), q(c.t0, Dimension::Length));
        t.insert("density".into(), q(c.rho0, Dimension::MassDensity));
        t.insert("frequency".into(), q(c.omega, Dimension::AngularFrequency));
        t.insert("damping".into(), q(c.gamma, Dimension::AngularFrequency));
        t.insert("temperature".into(), q(c.temperature, Dimension::Temperature));
        root.insert("cantilever".into(), Value::Table(t));

        let mut t = Table::new();
        t.insert("height".into(), q(self.coil.height, Dimension::Length));
        t.insert("width".into(), setting(self.coil.width, "optimal", Dimension::Length));
        if let Some(l) = self.coil.length {
            t.insert("length".into(), q(l, Dimension::Length));
        }
        root.insert("coil".into(), Value::Table(t));

        let mut t = Table::new();
        match self.circuit.energies {
            CircuitEnergies::Omega0 { omega0, ej_over_ec } => {
                t.insert("omega0".into(), q(omega0, Dimension::AngularFrequency));
                t.insert("ej_over_ec".into(), Value::Float(ej_over_ec));
            }
            CircuitEnergies::Explicit { e_j1, e_c } => {
                t.insert("ej1".into(), q(e_j1, Dimension::Energy));
                t.insert("ec".into(), q(e_c, Dimension::Energy));
            }
        }
        match self.circuit.operating_point {
            FluxOperatingPoint::Phi(p) => t.insert("phi".into(), Value::Float(p)),
            FluxOperatingPoint::FluxBias(f) => t.insert("flux_bias".into(), Value::Float(f)),
        };
        t.insert("quality_factor".into(), Value::Float(self.circuit.q));
        root.insert("circuit".into(), Value::Table(t));

        let mut t = Table::new();
        match self.source {
            SourceConfig::Quadrupole { gradient } => {
                t.insert("kind".into(), Value::String("quadrupole".into()));
                t.insert("gradient".into(), setting(gradient, "max", Dimension::FieldGradient));
            }
            SourceConfig::Homogeneous { field } => {
                t.insert("kind".into(), Value::String("homogeneous".into()));
                t.insert("field".into(), setting(field, "max", Dimension::MagneticField));
            }
            SourceConfig::WirePair { current, depth, gradient } => {
                t.insert("kind".into(), Value::String("wire-pair".into()));
                t.insert("current".into(), q(current, Dimension::Current));
                if let Some(d) = depth {
                    t.insert("depth".into(), q(d, Dimension::Length));
                }
                if let Some(b) = gradient {
                    t.insert("gradient".into(), q(b, Dimension::FieldGradient));
                }
            }
        }
        root.insert("source".into(), Value::Table(t));

        if let Some(n) = &self.noise {
            let mut t = Table::new();
            t.insert("current_asd".into(), q(n.current_asd, Dimension::RelativeAsd));
            t.insert("bias_asd".into(), q(n.bias_asd, Dimension::RelativeAsd));
            if !n.frequencies.is_empty() {
                let f = n.frequencies.iter().map(|&f| q(f, Dimension::AngularFrequency)).collect();
                t.insert("frequencies".into(), Value::Array(f));
            }
            root.insert("noise".into(), Value::Table(t));
        }

        let o = &self.options;
        let mut t = Table::new();
        t.insert("decoherence_convention".into(), Value::String(o.convention.name().into()));
        let model = match o.lambda_model {
            LambdaModel::LondonThinFilm => "london",
            LambdaModel::EdgeFit => "edge-fit",
        };
        t.insert("lambda_model".into(), Value::String(model.into()));
        t.insert("mem_aspects".into(), Value::Array(o.mem_aspects.iter().map(|&a| Value::Float(a)).collect()));
        t.insert(
            "mem_cells".into(),
            Value::Array(o.mem_cells.iter().map(|&n| Value::Integer(n as i64)).collect()),
        );
        root.insert("options".into(), Value::Table(t));

        toml::to_string(&root).expect("scenario tables always serialize")
    }

    pub fn mode(&self) -> FieldMode {
        match self.source {
            SourceConfig::Homogeneous { .. } => FieldMode::Homogeneous,
            _ => FieldMode::Quadrupole,
        }
    }

    /// Check every component and fill in derived settings.
    pub fn resolve(&self) -> Result<Resolved> {
        self.strip.check()?;
        self.cantilever.check()?;
        let strip = self.strip;
        let mode = self.mode();
        let w_c = match self.coil.width {
            Setting::Auto => {
                if !(self.coil.height > 0.0) {
                    return Err(Error::domain("coil height must be positive"));
                }
                optimal_coil_width(self.coil.height / strip.w, mode) * strip.w
            }
            Setting::Fixed(v) => v,
        };
        let coil = CoilSpec::new(w_c, self.coil.height, self.coil.length.unwrap_or(strip.l))?;
        if coil.z_c <= 0.5 * strip.t {
            return Err(Error::domain("pick-up coil must sit above the strip (z_c > t/2)"));
        }
        let system = SystemSpec { strip, cantilever: self.cantilever, coil };

        let (amplitude, reference_gradient, wire_pair, stated_depth) = match self.source {
            SourceConfig::Quadrupole { gradient } => {
                let b = match gradient {
                    Setting::Auto => max_gradient(&strip),
                    Setting::Fixed(b) => b,
                };
                (b, b, None, None)
            }
            SourceConfig::Homogeneous { field } => {
                let b_a = match field {
                    Setting::Auto => max_homogeneous_field(&strip),
                    Setting::Fixed(b) => b,
                };
                (b_a, max_gradient(&strip), None, None)
            }
            SourceConfig::WirePair { current, depth, gradient } => {
                let spec = match (depth, gradient) {
                    (_, Some(b)) => WirePairSpec::with_gradient(current, b)?,
                    (Some(d), None) => WirePairSpec::new(current, d)?,
                    (None, None) => return Err(Error::config("wire-pair source needs 'depth' or 'gradient'")),
                };
                let stated = depth.filter(|&d| d != spec.z_w);
                let b = gradient_at_origin(&spec);
                (b, b, Some(spec), stated)
            }
        };
        if !(amplitude > 0.0 && amplitude.is_finite()) {
            return Err(Error::domain(format!("drive amplitude must be positive, got {amplitude:e}")));
        }

        let flux_bias = match self.circuit.operating_point {
            FluxOperatingPoint::Phi(p) => flux_bias_for_phi(p)?,
            FluxOperatingPoint::FluxBias(f) => f,
        };
        let circuit = match self.circuit.energies {
            CircuitEnergies::Omega0 { omega0, ej_over_ec } => {
                CircuitSpec::from_omega0(omega0, ej_over_ec, flux_bias, self.circuit.q)?
            }
            CircuitEnergies::Explicit { e_j1, e_c } => CircuitSpec::new(e_j1, e_c, flux_bias, self.circuit.q)?,
        };
        if let Some(n) = &self.noise {
            if !(n.current_asd >= 0.0 && n.bias_asd >= 0.0) {
                return Err(Error::domain("noise spectral densities must be non-negative"));
            }
        }

        Ok(Resolved {
            system,
            circuit,
            mode,
            amplitude,
            reference_gradient,
            wire_pair,
            stated_depth,
            validation: validate_strip(&strip),
        })
    }

    /// Sweepable parameter paths.
    pub const PATHS: &'static [&'static str] = &[
        "strip.length",
        "strip.width",
        "strip.thickness",
        "strip.critical_field",
        "strip.density",
        "strip.london_depth",
        "strip.coherence_length",
        "cantilever.thickness",
        "cantilever.density",
        "cantilever.frequency",
        "cantilever.damping",
        "cantilever.temperature",
        "coil.height",
        "coil.width",
        "coil.length",
        "circuit.phi",
        "circuit.flux_bias",
        "circuit.quality_factor",
        "source.gradient",
        "source.field",
        "source.current",
        "source.depth",
        "noise.current_asd",
        "noise.bias_asd",
        "zc_over_w",
        "lambda_over_w",
    ];

    /// Dimension of a sweepable path.
    pub fn path_dimension(path: &str) -> Result<Dimension> {
        use Dimension::*;
        Ok(match path {
            "strip.length" | "strip.width" | "strip.thickness" | "strip.london_depth" | "strip.coherence_length"
            | "cantilever.thickness" | "coil.height" | "coil.width" | "coil.length" | "source.depth" => Length,
            "strip.critical_field" | "source.field" => MagneticField,
            "strip.density" | "cantilever.density" => MassDensity,
            "cantilever.frequency" | "cantilever.damping" => AngularFrequency,
            "cantilever.temperature" => Temperature,
            "source.gradient" => FieldGradient,
            "source.current" => Current,
            "noise.current_asd" | "noise.bias_asd" => RelativeAsd,
            "circuit.phi" | "circuit.flux_bias" | "circuit.quality_factor" | "zc_over_w" | "lambda_over_w" => {
                Dimensionless
            }
            _ => return Err(Error::config(format!("unknown parameter path '{path}'"))),
        })
    }

    /// Copy of the scenario with `path` set to `value` (SI).
    ///
    /// `zc_over_w` sets the coil height and `lambda_over_w` the London depth
    /// through Λ = λ²/t.
    pub fn with_parameter(&self, path: &str, value: f64) -> Result<Scenario> {
        Scenario::path_dimension(path)?;
        let mut s = self.clone();
        let mismatch = || Error::config(format!("parameter '{path}' does not apply to this scenario's source"));
        match path {
            "strip.length" => s.strip.l = value,
            "strip.width" => s.strip.w = value,
            "strip.thickness" => s.strip.t = value,
            "strip.critical_field" => s.strip.b_c = value,
            "strip.density" => s.strip.rho = value,
            "strip.london_depth" => s.strip.lambda_l = value,
            "strip.coherence_length" => s.strip.xi = value,
            "cantilever.thickness" => s.cantilever.t0 = value,
            "cantilever.density" => s.cantilever.rho0 = value,
            "cantilever.frequency" => s.cantilever.omega = value,
            "cantilever.damping" => s.cantilever.gamma = value,
            "cantilever.temperature" => s.cantilever.temperature = value,
            "coil.height" => s.coil.height = value,
            "coil.width" => s.coil.width = Setting::Fixed(value),
            "coil.length" => s.coil.length = Some(value),
            "circuit.phi" => s.circuit.operating_point = FluxOperatingPoint::Phi(value),
            "circuit.flux_bias" => s.circuit.operating_point = FluxOperatingPoint::FluxBias(value),
            "circuit.quality_factor" => s.circuit.q = value,
            "zc_over_w" => s.coil.height = value * s.strip.w,
            "lambda_over_w" => {
                if value < 0.0 {
                    return Err(Error::domain("Λ/w must be non-negative"));
                }
                s.strip.lambda_l = (value * s.strip.w * s.strip.t).sqrt();
            }
            "noise.current_asd" | "noise.bias_asd" => {
                let n = s.noise.get_or_insert(NoiseConfig { current_asd: 0.0, bias_asd: 0.0, frequencies: Vec::new() });
                if path == "noise.current_asd" {
                    n.current_asd = value;
                } else {
                    n.bias_asd = value;
                }
            }
            "source.gradient" => match &mut s.source {
                SourceConfig::Quadrupole { gradient } => *gradient = Setting::Fixed(value),
                SourceConfig::WirePair { gradient, .. } => *gradient = Some(value),
                _ => return Err(mismatch()),
            },
            "source.field" => match &mut s.source {
                SourceConfig::Homogeneous { field } => *field = Setting::Fixed(value),
                _ => return Err(mismatch()),
            },
            "source.current" => match &mut s.source {
                SourceConfig::WirePair { current, .. } => *current = value,
                _ => return Err(mismatch()),
            },
            "source.depth" => match &mut s.source {
                SourceConfig::WirePair { depth, gradient, .. } => {
                    *depth = Some(value);
                    *gradient = None;
                }
                _ => return Err(mismatch()),
            },
            _ => unreachable!("path_dimension accepted an unhandled path"),
        }
        Ok(s)
    }
}

fn parse_circuit(root: &Table) -> Result<CircuitConfig> {
    let mut s = Section::new(root, "circuit")?;
    let omega0 = s.opt("omega0", Dimension::AngularFrequency)?;
    let ratio = s.opt("ej_over_ec", Dimension::Dimensionless)?;
    let e_j1 = s.opt("ej1", Dimension::Energy)?;
    let e_c = s.opt("ec", Dimension::Energy)?;
    let energies = match (omega0, ratio, e_j1, e_c) {
        (Some(omega0), Some(ej_over_ec), None, None) => CircuitEnergies::Omega0 { omega0, ej_over_ec },
        (None, None, Some(e_j1), Some(e_c)) => CircuitEnergies::Explicit { e_j1, e_c },
        _ => {
            return Err(Error::config(
                "[circuit] needs either 'omega0' with 'ej_over_ec', or 'ej1' with 'ec'",
            ))
        }
    };
    let phi = s.opt("phi", Dimension::Dimensionless)?;
    let bias = s.opt("flux_bias", Dimension::Dimensionless)?;
    let operating_point = match (phi, bias) {
        (Some(p), None) => FluxOperatingPoint::Phi(p),
        (None, Some(f)) => FluxOperatingPoint::FluxBias(f),
        _ => return Err(Error::config("[circuit] needs exactly one of 'phi' and 'flux_bias'")),
    };
    let q = s.req("quality_factor", Dimension::Dimensionless)?;
    s.finish()?;
    Ok(CircuitConfig { energies, operating_point, q })
}

fn parse_source(root: &Table) -> Result<SourceConfig> {
    let mut s = Section::new(root, "source")?;
    let kind = s.text("kind")?.ok_or_else(|| Error::config("[source] is missing 'kind'"))?;
    let source = match kind {
        "quadrupole" => SourceConfig::Quadrupole { gradient: s.setting("gradient", "max", Dimension::FieldGradient)? },
        "homogeneous" => SourceConfig::Homogeneous { field: s.setting("field", "max", Dimension::MagneticField)? },
        "wire-pair" => SourceConfig::WirePair {
            current: s.req("current", Dimension::Current)?,
            depth: s.opt("depth", Dimension::Length)?,
            gradient: s.opt("gradient", Dimension::FieldGradient)?,
        },
        _ => return Err(Error::config(format!("unknown source kind '{kind}'"))),
    };
    s.finish()?;
    Ok(source)
}

/// Scenario files shipped with the crate, by name.
pub const BUNDLED: &[(&str, &str)] = &[
    ("paper-flagship", include_str!("../scenarios/paper-flagship.toml")),
    ("paper-two-wire", include_str!("../scenarios/paper-two-wire.toml")),
    ("paper-homogeneous", include_str!("../scenarios/paper-homogeneous.toml")),
];

/// Parse a bundled scenario by name.
pub fn bundled(name: &str) -> Result<Scenario> {
    BUNDLED
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| Scenario::parse(text))
        .unwrap_or_else(|| Err(Error::config(format!("no bundled scenario named '{name}'"))))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_round_trip() {
        for (name, text) in BUNDLED {
            let s = Scenario::parse(text).unwrap();
            let again = Scenario::parse(&s.to_toml()).unwrap();
            assert_eq!(s, again, "{name}");
            s.resolve().unwrap();
        }
    }

    #[test]
    fn unknown_keys_rejected() {
        let text = BUNDLED[0].1.replace("[coil]", "[coil]\nbogus = 1");
        assert!(matches!(Scenario::parse(&text), Err(Error::Config(_))));
        assert!(matches!(Scenario::parse("name = 3"), Err(Error::Config(_))));
        assert!(matches!(Scenario::parse("not toml ["), Err(Error::Config(_))));
    }

    #[test]
    fn bad_units_are_config_errors() {
        let text = BUNDLED[0].1.replace("\"50 nm\"", "\"50 mT\"");
        assert!(matches!(Scenario::parse(&text), Err(Error::Config(_))));
    }

    #[test]
    fn domain_errors_surface_on_resolve() {
        let mut s = bundled("paper-flagship").unwrap();
        s.strip.t = 2.0 * s.strip.w;
        assert!(matches!(s.resolve(), Err(Error::Domain(_))));
    }

    #[test]
    fn parameter_paths() {
        let s = bundled("paper-flagship").unwrap();
        for p in Scenario::PATHS {
            Scenario::path_dimension(p).unwrap();
        }
        assert!(matches!(s.with_parameter("coil.nothing", 1.0), Err(Error::Config(_))));
        let r = s.with_parameter("lambda_over_w", 0.03).unwrap();
        assert!((r.strip.pearl_length() / r.strip.w - 0.03).abs() < 1e-12);
        let r = s.with_parameter("zc_over_w", 3.0).unwrap();
        assert!((r.coil.height / r.strip.w - 3.0).abs() < 1e-12);
        assert!(s.with_parameter("source.current", 1.0).is_err());
    }

    #[test]
    fn wire_pair_depth_follows_pinned_gradient() {
        let s = bundled("paper-two-wire").unwrap();
        let r = s.resolve().unwrap();
        let spec = r.wire_pair.unwrap();
        assert!((gradient_at_origin(&spec) / 4.1e4 - 1.0).abs() < 1e-12);
        assert!((spec.z_w - 2.50e-6).abs() < 0.01e-6);
        assert!(r.stated_depth.is_some());
    }
}
