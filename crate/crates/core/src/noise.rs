//! Flux-noise budget of the wire-pair source and the back-action of the
//! trap on the cantilever.
//!
//! Spectral densities are one-sided, S_f(ω) = (2/π)∫₀^∞⟨f(t)f(0)⟩cos(ωt)dt,
//! and are always stored relative to the carrier (S_I/I_w², S_B/B_b²).

use std::f64::consts::PI;

use crate::analytic_strip::{b_field, FieldPoint, StripState};
use crate::domain::{CoilSpec, StripSpec};
use crate::error::{Error, Result};
use crate::numerics::integrate;
use crate::sources::{bias_field, wire_pair_field, WirePairSpec};
use crate::units::{FLUX_QUANTUM, MU0};

/// A relative power spectral density [1/Hz].
#[derive(Debug, Clone, PartialEq)]
pub enum Psd {
    White(f64),
    /// Piecewise-linear in ω over sorted (ω, S) knots, flat outside.
    Table(Vec<(f64, f64)>),
}

impl Psd {
    /// White spectrum from an amplitude spectral density [1/√Hz].
    pub fn from_asd(asd: f64) -> Self {
        Psd::White(asd * asd)
    }

    pub fn at(&self, omega: f64) -> f64 {
        match self {
            Psd::White(v) => *v,
            Psd::Table(knots) => {
                let Some(first) = knots.first() else { return 0.0 };
                if omega <= first.0 {
                    return first.1;
                }
                for pair in knots.windows(2) {
                    let ((x0, y0), (x1, y1)) = (pair[0], pair[1]);
                    if omega <= x1 {
                        return y0 + (y1 - y0) * (omega - x0) / (x1 - x0);
                    }
                }
                knots[knots.len() - 1].1
            }
        }
    }

    pub fn check(&self) -> Result<()> {
        let ok = match self {
            Psd::White(v) => *v >= 0.0,
            Psd::Table(k) => {
                k.iter().all(|&(w, s)| w >= 0.0 && s >= 0.0) && k.windows(2).all(|p| p[0].0 < p[1].0)
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::domain("spectral densities must be non-negative with increasing frequencies"))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseInputs {
    pub s_i_rel: Psd,
    pub s_b_rel: Psd,
}

/// ζ = ln[((w_c + 4z_w)² + 4(z_c + z_w)²)/((w_c − 4z_w)² + 4(z_c + z_w)²)].
pub fn zeta(coil: &CoilSpec, spec: &WirePairSpec) -> Result<f64> {
    let (wc, zc, zw) = (coil.w_c, coil.z_c, spec.z_w);
    let h = 4.0 * (zc + zw).powi(2);
    log_ratio((wc + 4.0 * zw).powi(2) + h, (wc - 4.0 * zw).powi(2) + h)
}

/// The same logarithm with the wire positions of the implemented field,
/// (±z_w, −z_w/2):
/// ln[((w_c + 2z_w)² + (2z_c + z_w)²)/((w_c − 2z_w)² + (2z_c + z_w)²)].
pub fn zeta_field(coil: &CoilSpec, spec: &WirePairSpec) -> Result<f64> {
    let (wc, zc, zw) = (coil.w_c, coil.z_c, spec.z_w);
    let h = (2.0 * zc + zw).powi(2);
    log_ratio((wc + 2.0 * zw).powi(2) + h, (wc - 2.0 * zw).powi(2) + h)
}

fn log_ratio(num: f64, den: f64) -> Result<f64> {
    if !(num > 0.0 && den > 0.0) {
        return Err(Error::domain("ζ logarithm argument is not positive"));
    }
    Ok((num / den).ln())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Amplification {
    pub a_i: f64,
    pub a_b: f64,
}

/// a_I = (B_bL_cz_w/Φ₀)(5ζ/8 − χw/z_w), a_B = (B_bL_cw_c/Φ₀)(1 − χw/w_c).
///
/// The strip screens the uniform part of each perturbation, so its flux
/// enters with the opposite sign to the direct flux.
pub fn noise_amplification(coil: &CoilSpec, spec: &WirePairSpec, chi_value: f64, w: f64, b_b: f64) -> Result<Amplification> {
    let z = zeta_field(coil, spec)?;
    Ok(Amplification {
        a_i: b_b * coil.l_c * spec.z_w / FLUX_QUANTUM * (5.0 * z / 8.0 - chi_value * w / spec.z_w),
        a_b: b_b * coil.l_c * coil.w_c / FLUX_QUANTUM * (1.0 - chi_value * w / coil.w_c),
    })
}

/// The amplification factors evaluated with ζ as written and a `+` strip
/// term, kept for comparison only.
pub fn noise_amplification_as_printed(coil: &CoilSpec, spec: &WirePairSpec, chi_value: f64, w: f64, b_b: f64) -> Result<Amplification> {
    let z = zeta(coil, spec)?;
    Ok(Amplification {
        a_i: b_b * coil.l_c * spec.z_w / FLUX_QUANTUM * (5.0 * z / 8.0 + chi_value * w / spec.z_w),
        a_b: b_b * coil.l_c * coil.w_c / FLUX_QUANTUM * (1.0 + chi_value * w / coil.w_c),
    })
}

/// z-directed coil flux [Wb] for wire current `i_w`, bias `b_b`, with the
/// strip screening the uniform field at the origin. Integrates B_z across
/// the coil numerically.
fn coil_flux_numeric(coil: &CoilSpec, z_w: f64, i_w: f64, b_b: f64, strip: &StripSpec) -> Result<f64> {
    let spec = WirePairSpec::new(i_w, z_w)?;
    let (_, b0) = wire_pair_field(FieldPoint::new(0.0, 0.0), &spec)?;
    let state = StripState::homogeneous(b0 + b_b, 0.0);
    let f = |y: f64| {
        let p = FieldPoint::new(y, coil.z_c);
        let (_, bw) = wire_pair_field(p, &spec).unwrap_or((f64::NAN, f64::NAN));
        let (_, bk) = b_field(p, &state, strip).unwrap_or((f64::NAN, f64::NAN));
        bw + b_b + bk
    };
    let h = 0.5 * coil.w_c;
    Ok(coil.l_c * integrate(f, -h, h, 0.0, 1e-13)?)
}

/// a_I and a_B from ±10⁻⁶ relative perturbations of I_w and B_b applied to
/// the numerically integrated coil flux.
pub fn numerical_amplification(coil: &CoilSpec, spec: &WirePairSpec, strip: &StripSpec) -> Result<Amplification> {
    let d = 1e-6;
    let b_b = bias_field(spec);
    let fi = |k: f64| coil_flux_numeric(coil, spec.z_w, spec.i_w * k, b_b, strip);
    let fb = |k: f64| coil_flux_numeric(coil, spec.z_w, spec.i_w, b_b * k, strip);
    let a_i = (fi(1.0 + d)? - fi(1.0 - d)?) / (2.0 * d) / FLUX_QUANTUM;
    let a_b = (fb(1.0 + d)? - fb(1.0 - d)?) / (2.0 * d) / FLUX_QUANTUM;
    Ok(Amplification { a_i: a_i.abs(), a_b: a_b.abs() })
}

/// S_Φ/Φ₀² = a_I²·S_I/I_w² + a_B²·S_B/B_b² [1/Hz].
pub fn flux_noise_psd(amps: &Amplification, inputs: &NoiseInputs, omega: f64) -> f64 {
    amps.a_i.powi(2) * inputs.s_i_rel.at(omega) + amps.a_b.powi(2) * inputs.s_b_rel.at(omega)
}

/// Ω_m = (bw/2)·√(πL/(μ₀M)) [rad/s].
pub fn magnetic_spring(b: f64, strip: &StripSpec, mass: f64) -> f64 {
    0.5 * b * strip.w * (PI * strip.l / (MU0 * mass)).sqrt()
}

/// Lorentz force per unit length on the displaced strip,
/// F_z/L = −(πb²/μ₀)(w/2)²·z_m [N/m].
pub fn spring_force_per_length(b: f64, w: f64, z_m: f64) -> f64 {
    -(PI * b * b / MU0) * (0.5 * w).powi(2) * z_m
}

/// R₀→₂ = πΩ²·S_I(2Ω)/(4I_w²) [rad/s].
pub fn heating_rate(omega: f64, s_i_rel_at_2omega: f64) -> f64 {
    PI * omega * omega * s_i_rel_at_2omega / 4.0
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrapFraction {
    pub linear: f64,
    pub exact: f64,
}

/// ξ = 2δI/I and the exact (2b + δb)δb/b².
pub fn trap_fraction(delta_i_over_i: f64) -> Result<TrapFraction> {
    if !(delta_i_over_i.abs() < 1.0) {
        return Err(Error::domain(format!("|δI/I| must be below 1, got {delta_i_over_i:e}")));
    }
    let x = delta_i_over_i;
    Ok(TrapFraction { linear: 2.0 * x, exact: (2.0 + x) * x })
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseReport {
    pub zeta: f64,
    pub zeta_field: f64,
    pub amplification: Amplification,
    pub amplification_as_printed: Amplification,
    pub amplification_numeric: Amplification,
    /// (ω, S_Φ/Φ₀²).
    pub s_phi: Vec<(f64, f64)>,
    pub omega_m: f64,
    pub r02: f64,
}
