//! Physical constants and unit-suffixed quantity parsing.
//!
//! Everything inside the library is strict SI. Frequencies written with a
//! `Hz` suffix are ordinary frequencies and become angular frequencies
//! (multiplied by 2π) when parsed as [`Dimension::AngularFrequency`].

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Vacuum permeability [H/m] (CODATA 2018).
pub const MU0: f64 = 1.256_637_062_12e-6;
/// Planck constant [J s] (exact).
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Reduced Planck constant [J s].
pub const HBAR: f64 = PLANCK / (2.0 * PI);
/// Boltzmann constant [J/K] (exact).
pub const BOLTZMANN: f64 = 1.380_649e-23;
/// Elementary charge [C] (exact).
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
/// Superconducting flux quantum h/2e [Wb].
pub const FLUX_QUANTUM: f64 = PLANCK / (2.0 * ELEMENTARY_CHARGE);

/// Physical dimension of a configuration quantity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    Length,
    MagneticField,
    FieldGradient,
    MassDensity,
    /// rad/s; `Hz`-family suffixes are multiplied by 2π.
    AngularFrequency,
    Temperature,
    Current,
    /// Energy; `Hz`-family suffixes are converted with E = h f.
    Energy,
    /// Amplitude spectral density relative to the carrier [1/√Hz].
    RelativeAsd,
    Dimensionless,
}

impl Dimension {
    /// SI unit written back when serializing.
    pub fn si_suffix(self) -> &'static str {
        match self {
            Dimension::Length => "m",
            Dimension::MagneticField => "T",
            Dimension::FieldGradient => "T/m",
            Dimension::MassDensity => "kg/m3",
            Dimension::AngularFrequency => "rad/s",
            Dimension::Temperature => "K",
            Dimension::Current => "A",
            Dimension::Energy => "J",
            Dimension::RelativeAsd => "/rtHz",
            Dimension::Dimensionless => "",
        }
    }

    fn scale(self, unit: &str) -> Option<f64> {
        let s = match (self, unit) {
            (Dimension::Length, "m") => 1.0,
            (Dimension::Length, "mm") => 1e-3,
            (Dimension::Length, "um" | "µm" | "μm") => 1e-6,
            (Dimension::Length, "nm") => 1e-9,
            (Dimension::MagneticField, "T") => 1.0,
            (Dimension::MagneticField, "mT") => 1e-3,
            (Dimension::MagneticField, "uT" | "µT" | "μT") => 1e-6,
            (Dimension::MagneticField, "G") => 1e-4,
            (Dimension::FieldGradient, "T/m") => 1.0,
            (Dimension::FieldGradient, "mT/um" | "mT/µm") => 1e3,
            (Dimension::MassDensity, "kg/m3" | "kg/m^3") => 1.0,
            (Dimension::MassDensity, "g/cm3" | "g/cm^3") => 1e3,
            (Dimension::AngularFrequency, "rad/s" | "1/s") => 1.0,
            (Dimension::AngularFrequency, "Hz") => 2.0 * PI,
            (Dimension::AngularFrequency, "kHz") => 2.0 * PI * 1e3,
            (Dimension::AngularFrequency, "MHz") => 2.0 * PI * 1e6,
            (Dimension::AngularFrequency, "GHz") => 2.0 * PI * 1e9,
            (Dimension::Temperature, "K") => 1.0,
            (Dimension::Temperature, "mK") => 1e-3,
            (Dimension::Current, "A") => 1.0,
            (Dimension::Current, "mA") => 1e-3,
            (Dimension::Energy, "J") => 1.0,
            (Dimension::Energy, "Hz") => PLANCK,
            (Dimension::Energy, "MHz") => PLANCK * 1e6,
            (Dimension::Energy, "GHz") => PLANCK * 1e9,
            (Dimension::RelativeAsd, "/rtHz" | "/sqrt(Hz)" | "1/rtHz") => 1.0,
            (Dimension::Dimensionless, "") => 1.0,
            _ => return None,
        };
        Some(s)
    }
}

/// Parse `"<number> <unit>"` (space optional) into SI.
///
/// A bare number is accepted for every dimension and taken as SI.
pub fn parse_quantity(text: &str, dim: Dimension) -> Result<f64> {
    let text = text.trim();
    let split = text
        .char_indices()
        .find(|&(i, c)| {
            let numeric = c.is_ascii_digit() || matches!(c, '.' | '+' | '-');
            let exponent = matches!(c, 'e' | 'E')
                && text[i + 1..].starts_with(|n: char| n.is_ascii_digit() || n == '-' || n == '+')
                && i > 0;
            !(numeric || exponent)
        })
        .map(|(i, _)| i)
        .unwrap_or(text.len());
    let (num, unit) = text.split_at(split);
    let value: f64 = num
        .trim()
        .parse()
        .map_err(|_| Error::config(format!("cannot parse number in '{text}'")))?;
    let unit = unit.trim();
    let scale = if unit.is_empty() {
        1.0
    } else {
        dim.scale(unit).ok_or_else(|| {
            Error::config(format!("unit '{unit}' is not valid for a {dim:?} quantity"))
        })?
    };
    let v = value * scale;
    if !v.is_finite() {
        return Err(Error::config(format!("non-finite quantity '{text}'")));
    }
    Ok(v)
}

/// Render an SI value with its unit such that [`parse_quantity`] returns the
/// identical `f64`.
pub fn format_quantity(value: f64, dim: Dimension) -> String {
    let suffix = dim.si_suffix();
    if suffix.is_empty() {
        format!("{value:e}")
    } else {
        format!("{value:e} {suffix}")
    }
}
